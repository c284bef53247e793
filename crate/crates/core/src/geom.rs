//! Vectors, rays, the three surface primitives and the pinhole/orthographic camera.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vector3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vector3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn from_f64(x: f64, y: f64, z: f64) -> Self {
        Self::new(T::of(x), T::of(y), T::of(z))
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn unit_x() -> Self {
        Self::new(T::one(), T::zero(), T::zero())
    }

    pub fn unit_y() -> Self {
        Self::new(T::zero(), T::one(), T::zero())
    }

    pub fn unit_z() -> Self {
        Self::new(T::zero(), T::zero(), T::one())
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction; the zero vector is returned unchanged.
    pub fn normalized(self) -> Self {
        let n = self.norm();
        if n > T::zero() {
            self / n
        } else {
            self
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Mirror `self` about the unit vector `n`: `2(n·v)n - v`.
    pub fn reflect_about(self, n: Self) -> Self {
        n * (T::two() * n.dot(self)) - self
    }

    /// Any unit vector orthogonal to `self` (which must be a unit vector).
    pub fn any_orthogonal(self) -> Self {
        let helper = if self.x.abs() < T::of(0.9) {
            Self::unit_x()
        } else {
            Self::unit_y()
        };
        self.cross(helper).normalized()
    }

    /// Angle between two unit vectors, robust near 0 and pi.
    pub fn angle_to(self, o: Self) -> T {
        let c = self.cross(o).norm();
        let d = self.dot(o);
        c.atan2(d)
    }
}

impl<T: Real> Add for Vector3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> AddAssign for Vector3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Vector3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Vector3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<T> for Vector3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Real> Div<T> for Vector3<T> {
    type Output = Self;
    fn div(self, s: T) -> Self {
        Self::new(self.x / s, self.y / s, self.z / s)
    }
}

/// Orthonormal frame whose third axis is a given unit vector.
#[derive(Clone, Copy, Debug)]
pub struct Frame<T> {
    pub tangent: Vector3<T>,
    pub bitangent: Vector3<T>,
    pub normal: Vector3<T>,
}

impl<T: Real> Frame<T> {
    pub fn around(normal: Vector3<T>) -> Self {
        let normal = normal.normalized();
        let tangent = normal.any_orthogonal();
        let bitangent = normal.cross(tangent);
        Self {
            tangent,
            bitangent,
            normal,
        }
    }

    pub fn to_world(&self, local: Vector3<T>) -> Vector3<T> {
        self.tangent * local.x + self.bitangent * local.y + self.normal * local.z
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Ray<T> {
    pub origin: Vector3<T>,
    pub dir: Vector3<T>,
}

impl<T: Real> Ray<T> {
    pub fn new(origin: Vector3<T>, dir: Vector3<T>) -> Self {
        Self { origin, dir }
    }

    pub fn at(&self, t: T) -> Vector3<T> {
        self.origin + self.dir * t
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit<T> {
    pub t: T,
    pub point: Vector3<T>,
    pub normal: Vector3<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CapOrientation {
    Bump,
    Dent,
}

/// Spherical cap standing on (bump) or sunk into (dent) a base plane.
///
/// `center` is the center of the base circle; the cap's sphere has radius
/// `radius` and the cap spans polar angles `[0, max_polar_angle]` about `axis`.
/// A dent is the mirror image of the bump through the base plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarCap<T> {
    pub center: Vector3<T>,
    pub radius: T,
    pub axis: Vector3<T>,
    pub max_polar_angle: T,
    pub orientation: CapOrientation,
}

impl<T: Real> PolarCap<T> {
    /// Radius of the circle where the cap meets its base plane.
    pub fn footprint_radius(&self) -> T {
        self.radius * self.max_polar_angle.sin()
    }

    /// Center of the sphere the (bump-oriented) cap is cut from.
    fn bump_sphere_center(&self) -> Vector3<T> {
        self.center - self.axis * (self.radius * self.max_polar_angle.cos())
    }

    fn intersect(&self, ray: &Ray<T>, t_min: T, t_max: T) -> Option<Hit<T>> {
        let a = self.axis;
        let mut rel = ray.origin - self.center;
        let mut dir = ray.dir;
        if self.orientation == CapOrientation::Dent {
            rel = rel - a * (T::two() * rel.dot(a));
            dir = dir - a * (T::two() * dir.dot(a));
        }
        let sphere = self.bump_sphere_center() - self.center;
        let oc = rel - sphere;
        let b = dir.dot(oc);
        let c = oc.norm_squared() - self.radius * self.radius;
        let disc = b * b - c;
        if disc < T::zero() {
            return None;
        }
        let sq = disc.sqrt();
        let t = [-b - sq, -b + sq]
            .into_iter()
            .find(|&t| t > t_min && t < t_max && (rel + dir * t).dot(a) >= T::zero())?;

        let point = ray.at(t);
        let offset = point - self.center;
        let tangential = (offset - a * offset.dot(a)) / self.radius;
        let axial = (T::one() - tangential.norm_squared()).max(T::zero()).sqrt();
        let normal = match self.orientation {
            CapOrientation::Bump => tangential + a * axial,
            CapOrientation::Dent => -tangential + a * axial,
        };
        Some(Hit { t, point, normal })
    }
}

/// Circular cut-out in a plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disc<T> {
    pub center: Vector3<T>,
    pub radius: T,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SurfacePatch<T> {
    Sphere {
        center: Vector3<T>,
        radius: T,
    },
    /// Infinite plane, optionally with circular holes (where caps are sunk in).
    Plane {
        point: Vector3<T>,
        normal: Vector3<T>,
        holes: Vec<Disc<T>>,
    },
    PolarCap(PolarCap<T>),
}

impl<T: Real> SurfacePatch<T> {
    pub fn sphere(center: Vector3<T>, radius: T) -> Self {
        SurfacePatch::Sphere { center, radius }
    }

    pub fn plane(point: Vector3<T>, normal: Vector3<T>) -> Self {
        SurfacePatch::Plane {
            point,
            normal: normal.normalized(),
            holes: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SurfacePatch::Sphere { radius, .. } if !(*radius > T::zero()) => {
                Err(Error::InvalidGeometry("sphere radius must be positive"))
            }
            SurfacePatch::Plane { normal, .. } if !(normal.norm() > T::zero()) => {
                Err(Error::InvalidGeometry("plane normal must be non-zero"))
            }
            SurfacePatch::PolarCap(cap) => {
                if !(cap.radius > T::zero()) {
                    return Err(Error::InvalidGeometry("cap radius must be positive"));
                }
                if !(cap.max_polar_angle > T::zero() && cap.max_polar_angle <= T::FRAC_PI_2()) {
                    return Err(Error::InvalidGeometry("cap polar angle must lie in (0, pi/2]"));
                }
                if !(cap.axis.norm() > T::zero()) {
                    return Err(Error::InvalidGeometry("cap axis must be non-zero"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Nearest intersection with `t` in the open interval `(t_min, t_max)`.
    pub fn intersect_range(&self, ray: &Ray<T>, t_min: T, t_max: T) -> Option<Hit<T>> {
        match self {
            SurfacePatch::Sphere { center, radius } => {
                let oc = ray.origin - *center;
                let b = ray.dir.dot(oc);
                let c = oc.norm_squared() - *radius * *radius;
                let disc = b * b - c;
                if disc < T::zero() {
                    return None;
                }
                let sq = disc.sqrt();
                let t = [-b - sq, -b + sq]
                    .into_iter()
                    .find(|&t| t > t_min && t < t_max)?;
                let point = ray.at(t);
                Some(Hit {
                    t,
                    point,
                    normal: (point - *center) / *radius,
                })
            }
            SurfacePatch::Plane {
                point,
                normal,
                holes,
            } => {
                let denom = ray.dir.dot(*normal);
                if denom == T::zero() {
                    return None;
                }
                let t = (*point - ray.origin).dot(*normal) / denom;
                if !(t > t_min && t < t_max) {
                    return None;
                }
                let hit = ray.at(t);
                if holes
                    .iter()
                    .any(|h| (hit - h.center).norm_squared() < h.radius * h.radius)
                {
                    return None;
                }
                let facing = if denom > T::zero() { -*normal } else { *normal };
                Some(Hit {
                    t,
                    point: hit,
                    normal: facing,
                })
            }
            SurfacePatch::PolarCap(cap) => cap.intersect(ray, t_min, t_max),
        }
    }
}

/// Nearest positive-`t` intersection of a ray with a patch.
pub fn intersect<T: Real>(ray: &Ray<T>, patch: &SurfacePatch<T>) -> Option<Hit<T>> {
    patch.intersect_range(ray, T::zero(), T::infinity())
}

/// Distance a secondary ray origin is pushed off a surface to avoid self-hits.
pub fn surface_offset<T: Real>(point: Vector3<T>) -> T {
    let eps = T::of(1e-7).max(T::epsilon() * T::of(256.0));
    eps * (T::one() + point.x.abs().max(point.y.abs()).max(point.z.abs()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Projection {
    Orthographic,
    Perspective,
}

/// `fov_or_extent` is the full vertical field of view in radians for a
/// perspective camera and the full vertical extent in scene units for an
/// orthographic one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Camera<T> {
    pub kind: Projection,
    pub position: Vector3<T>,
    pub view_dir: Vector3<T>,
    pub up: Vector3<T>,
    pub width_px: usize,
    pub height_px: usize,
    pub fov_or_extent: T,
}

impl<T: Real> Camera<T> {
    pub fn orthographic(
        position: Vector3<T>,
        view_dir: Vector3<T>,
        up: Vector3<T>,
        size: (usize, usize),
        extent: T,
    ) -> Self {
        Self {
            kind: Projection::Orthographic,
            position,
            view_dir,
            up,
            width_px: size.0,
            height_px: size.1,
            fov_or_extent: extent,
        }
    }

    pub fn perspective(
        position: Vector3<T>,
        look_at: Vector3<T>,
        up: Vector3<T>,
        size: (usize, usize),
        fov_y: T,
    ) -> Self {
        Self {
            kind: Projection::Perspective,
            position,
            view_dir: look_at - position,
            up,
            width_px: size.0,
            height_px: size.1,
            fov_or_extent: fov_y,
        }
    }

    pub fn with_size(mut self, width: usize, height: usize) -> Self {
        self.width_px = width;
        self.height_px = height;
        self
    }

    /// Orthonormalized view basis; rejects degenerate configurations.
    pub fn frame(&self) -> Result<CameraFrame<T>> {
        if self.width_px == 0 || self.height_px == 0 {
            return Err(Error::DegenerateCamera("image size must be at least 1x1"));
        }
        if !(self.position.is_finite() && self.view_dir.is_finite() && self.up.is_finite()) {
            return Err(Error::DegenerateCamera("non-finite camera vectors"));
        }
        let forward = self.view_dir.normalized();
        if !(forward.norm() > T::zero()) {
            return Err(Error::DegenerateCamera("view direction is zero"));
        }
        let right = forward.cross(self.up);
        if !(right.norm() > T::of(1e-9) * self.up.norm().max(T::one())) {
            return Err(Error::DegenerateCamera("up vector parallel to view direction"));
        }
        let right = right.normalized();
        let up = right.cross(forward);
        match self.kind {
            Projection::Perspective => {
                if !(self.fov_or_extent > T::zero() && self.fov_or_extent < T::PI()) {
                    return Err(Error::DegenerateCamera("field of view must lie in (0, pi)"));
                }
            }
            Projection::Orthographic => {
                if !(self.fov_or_extent > T::zero() && self.fov_or_extent.is_finite()) {
                    return Err(Error::DegenerateCamera("orthographic extent must be positive"));
                }
            }
        }
        let half_h = match self.kind {
            Projection::Perspective => (self.fov_or_extent * T::half()).tan(),
            Projection::Orthographic => self.fov_or_extent * T::half(),
        };
        let aspect = T::of_usize(self.width_px) / T::of_usize(self.height_px);
        Ok(CameraFrame {
            kind: self.kind,
            position: self.position,
            forward,
            right,
            up,
            half_w: half_h * aspect,
            half_h,
            width: self.width_px,
            height: self.height_px,
        })
    }
}

/// Validated camera ready to generate rays.
#[derive(Clone, Copy, Debug)]
pub struct CameraFrame<T> {
    pub kind: Projection,
    pub position: Vector3<T>,
    pub forward: Vector3<T>,
    pub right: Vector3<T>,
    pub up: Vector3<T>,
    half_w: T,
    half_h: T,
    pub width: usize,
    pub height: usize,
}

impl<T: Real> CameraFrame<T> {
    /// Ray through continuous image coordinates; pixel `(i, j)` covers
    /// `[i, i+1) x [j, j+1)` with row 0 at the top.
    pub fn ray_through(&self, x: T, y: T) -> Ray<T> {
        let sx = T::two() * x / T::of_usize(self.width) - T::one();
        let sy = T::one() - T::two() * y / T::of_usize(self.height);
        match self.kind {
            Projection::Orthographic => Ray::new(
                self.position + self.right * (sx * self.half_w) + self.up * (sy * self.half_h),
                self.forward,
            ),
            Projection::Perspective => Ray::new(
                self.position,
                (self.forward + self.right * (sx * self.half_w) + self.up * (sy * self.half_h))
                    .normalized(),
            ),
        }
    }

    pub fn primary_ray(&self, i: usize, j: usize) -> Ray<T> {
        self.ray_through(
            T::of_usize(i) + T::half(),
            T::of_usize(j) + T::half(),
        )
    }

    /// Camera-space direction (x right, y up, z towards the viewer) in world space.
    pub fn to_world(&self, v: Vector3<T>) -> Vector3<T> {
        self.right * v.x + self.up * v.y - self.forward * v.z
    }

    /// Continuous image coordinates of a world point, if it lies in front of the camera.
    pub fn project(&self, p: Vector3<T>) -> Option<(T, T)> {
        let rel = p - self.position;
        let (sx, sy) = match self.kind {
            Projection::Orthographic => (
                rel.dot(self.right) / self.half_w,
                rel.dot(self.up) / self.half_h,
            ),
            Projection::Perspective => {
                let depth = rel.dot(self.forward);
                if !(depth > T::zero()) {
                    return None;
                }
                (
                    rel.dot(self.right) / (depth * self.half_w),
                    rel.dot(self.up) / (depth * self.half_h),
                )
            }
        };
        let x = (sx + T::one()) * T::half() * T::of_usize(self.width);
        let y = (T::one() - sy) * T::half() * T::of_usize(self.height);
        Some((x, y))
    }

    /// Scene-space width of one pixel at the given point.
    pub fn pixel_size_at(&self, p: Vector3<T>) -> T {
        let per_px = T::two() * self.half_h / T::of_usize(self.height);
        match self.kind {
            Projection::Orthographic => per_px,
            Projection::Perspective => per_px * (p - self.position).dot(self.forward),
        }
    }
}
