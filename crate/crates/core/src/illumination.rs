//! Light sources, materials and the local shading models of the fixed-function
//! pipeline: Lambert diffuse, classic and modified Phong specular, ambient,
//! reflection-map lookup and the overcast sky.

use crate::error::{Error, Result};
use crate::geom::Vector3;
use crate::image::Rgb;
use crate::quadrature::HemisphereRule;
use crate::real::Real;

/// Largest shininess exponent representable in OpenGL's 7-bit field.
pub const MAX_7BIT_SHININESS: f64 = 127.0;

/// Sample count used by [`shade_point`] for sky irradiance.
pub const DEFAULT_SKY_SAMPLES: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Material<T> {
    pub k_a: Rgb<T>,
    pub k_d: Rgb<T>,
    pub k_s: Rgb<T>,
    pub m_shiny: T,
    /// Weight of the reflection-map lookup.
    pub reflectivity: T,
    /// Self-luminous term, used for glyphs such as the light-source marker.
    pub emission: Rgb<T>,
}

impl<T: Real> Material<T> {
    pub fn gray(k_a: f64, k_d: f64, k_s: f64, m_shiny: f64) -> Self {
        Self {
            k_a: Rgb::gray(T::of(k_a)),
            k_d: Rgb::gray(T::of(k_d)),
            k_s: Rgb::gray(T::of(k_s)),
            m_shiny: T::of(m_shiny),
            reflectivity: T::zero(),
            emission: Rgb::black(),
        }
    }

    pub fn with_reflectivity(mut self, reflectivity: f64) -> Self {
        self.reflectivity = T::of(reflectivity);
        self
    }

    pub fn emissive(level: f64) -> Self {
        Self {
            emission: Rgb::gray(T::of(level)),
            ..Self::gray(0.0, 0.0, 0.0, 0.0)
        }
    }

    /// Checks coefficient ranges; with `seven_bit` also rejects `m_shiny > 127`.
    pub fn validate(&self, seven_bit: bool) -> Result<()> {
        let coeffs = [("k_a", self.k_a), ("k_d", self.k_d), ("k_s", self.k_s)];
        for (name, c) in coeffs {
            for v in c.channels() {
                if !(v >= T::zero() && v <= T::one()) {
                    return Err(Error::InvalidCoefficient {
                        name,
                        value: v.to_f64_lossy(),
                    });
                }
            }
        }
        if !(self.reflectivity >= T::zero() && self.reflectivity <= T::one()) {
            return Err(Error::InvalidCoefficient {
                name: "reflectivity",
                value: self.reflectivity.to_f64_lossy(),
            });
        }
        if !(self.emission.min_channel() >= T::zero()) {
            return Err(Error::NegativeRadiance(self.emission.min_channel().to_f64_lossy()));
        }
        if !(self.m_shiny >= T::zero()) {
            return Err(Error::NegativeShininess(self.m_shiny.to_f64_lossy()));
        }
        if seven_bit && self.m_shiny > T::of(MAX_7BIT_SHININESS) {
            return Err(Error::ShininessExceeds7Bit(self.m_shiny.to_f64_lossy()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Attenuation {
    #[default]
    None,
    InverseSquare,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LightSource<T> {
    /// Collimated light travelling along `dir` (unit vector).
    Directional { dir: Vector3<T>, intensity: Rgb<T> },
    Point {
        pos: Vector3<T>,
        intensity: Rgb<T>,
        attenuation: Attenuation,
    },
    /// Light co-located with the eye: `L = V` at every shaded point.
    Headlight { intensity: Rgb<T> },
    Ambient { intensity: Rgb<T> },
    /// Overcast sky with radiance `L_z (1 + 2 cos θ) / 3` above the horizon.
    OvercastSky { zenith_radiance: T, up: Vector3<T> },
}

impl<T: Real> LightSource<T> {
    pub fn directional(dir: Vector3<T>, intensity: f64) -> Self {
        LightSource::Directional {
            dir: dir.normalized(),
            intensity: Rgb::gray(T::of(intensity)),
        }
    }

    pub fn point(pos: Vector3<T>, intensity: f64, attenuation: Attenuation) -> Self {
        LightSource::Point {
            pos,
            intensity: Rgb::gray(T::of(intensity)),
            attenuation,
        }
    }

    pub fn headlight(intensity: f64) -> Self {
        LightSource::Headlight {
            intensity: Rgb::gray(T::of(intensity)),
        }
    }

    pub fn ambient(intensity: f64) -> Self {
        LightSource::Ambient {
            intensity: Rgb::gray(T::of(intensity)),
        }
    }

    pub fn overcast_sky(zenith_radiance: f64, up: Vector3<T>) -> Self {
        LightSource::OvercastSky {
            zenith_radiance: T::of(zenith_radiance),
            up: up.normalized(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let intensity = match self {
            LightSource::Directional { intensity, .. }
            | LightSource::Point { intensity, .. }
            | LightSource::Headlight { intensity }
            | LightSource::Ambient { intensity } => *intensity,
            LightSource::OvercastSky { zenith_radiance, .. } => {
                if !(*zenith_radiance > T::zero()) {
                    return Err(Error::InvalidSetup(
                        "sky zenith radiance must be positive".into(),
                    ));
                }
                Rgb::gray(*zenith_radiance)
            }
        };
        if !(intensity.min_channel() >= T::zero()) {
            return Err(Error::NegativeRadiance(intensity.min_channel().to_f64_lossy()));
        }
        let unit = |v: Vector3<T>| (v.norm() - T::one()).abs() < T::of(1e-6);
        match self {
            LightSource::Directional { dir, .. } if !unit(*dir) => Err(Error::InvalidSetup(
                "directional light direction must be a unit vector".into(),
            )),
            LightSource::OvercastSky { up, .. } if !unit(*up) => Err(Error::InvalidSetup(
                "sky up vector must be a unit vector".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Latitude-longitude radiance map about the world +y axis; row 0 is the zenith.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvironmentMap<T> {
    width: usize,
    height: usize,
    texels: Vec<Rgb<T>>,
}

impl<T: Real> EnvironmentMap<T> {
    pub fn new(width: usize, height: usize, texels: Vec<Rgb<T>>) -> Result<Self> {
        if width == 0 || height == 0 || texels.len() != width * height {
            return Err(Error::InvalidSetup(format!(
                "environment map needs {width}x{height} texels, got {}",
                texels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            texels,
        })
    }

    pub fn constant(c: Rgb<T>) -> Self {
        Self {
            width: 1,
            height: 1,
            texels: vec![c],
        }
    }

    /// Rows blend linearly from `top` at the zenith to `bottom` at the nadir.
    pub fn vertical_gradient(width: usize, height: usize, top: Rgb<T>, bottom: Rgb<T>) -> Self {
        let (width, height) = (width.max(1), height.max(1));
        let mut texels = Vec::with_capacity(width * height);
        for row in 0..height {
            let s = if height == 1 {
                T::zero()
            } else {
                T::of_usize(row) / T::of_usize(height - 1)
            };
            let c = top * (T::one() - s) + bottom * s;
            texels.extend(std::iter::repeat_n(c, width));
        }
        Self {
            width,
            height,
            texels,
        }
    }

    pub fn texel(&self, col: usize, row: usize) -> Rgb<T> {
        self.texels[row * self.width + col]
    }

    /// Texel containing the direction (nearest-texel lookup).
    pub fn texel_index(&self, dir: Vector3<T>) -> (usize, usize) {
        let d = dir.normalized();
        let theta = d.y.max(-T::one()).min(T::one()).acos();
        let phi = d.z.atan2(d.x) + T::PI();
        let col = (phi / (T::two() * T::PI()) * T::of_usize(self.width))
            .floor()
            .to_usize()
            .unwrap_or(0)
            .min(self.width - 1);
        let row = (theta / T::PI() * T::of_usize(self.height))
            .floor()
            .to_usize()
            .unwrap_or(0)
            .min(self.height - 1);
        (col, row)
    }

    pub fn lookup(&self, dir: Vector3<T>) -> Rgb<T> {
        let (c, r) = self.texel_index(dir);
        self.texel(c, r)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum SpecularModel {
    /// Lobe `max(R·V, 0)^m`, switched off abruptly where `N·L <= 0`.
    #[default]
    Classic,
    /// Lobe multiplied by `max(N·L, 0)`, optionally scaled by `(m+2)/(2π)`.
    Modified { normalized: bool },
}

pub fn lambert_term<T: Real>(n: Vector3<T>, l: Vector3<T>) -> T {
    n.dot(l).max(T::zero())
}

pub(crate) fn specular_lobe<T: Real>(
    model: SpecularModel,
    n: Vector3<T>,
    l: Vector3<T>,
    v: Vector3<T>,
    m: T,
) -> T {
    let n_dot_l = n.dot(l);
    let r = n * (T::two() * n_dot_l) - l;
    let lobe = r.dot(v).max(T::zero()).powf(m);
    match model {
        SpecularModel::Classic => {
            if n_dot_l > T::zero() {
                lobe
            } else {
                T::zero()
            }
        }
        SpecularModel::Modified { normalized } => {
            let s = lobe * n_dot_l.max(T::zero());
            if normalized {
                s * (m + T::two()) / (T::two() * T::PI())
            } else {
                s
            }
        }
    }
}

/// Phong specular factor for unit `n`, `l` (towards the light) and `v` (towards the eye).
pub fn phong_specular<T: Real>(
    model: SpecularModel,
    n: Vector3<T>,
    l: Vector3<T>,
    v: Vector3<T>,
    m: T,
) -> Result<T> {
    if !(m >= T::zero()) {
        return Err(Error::NegativeShininess(m.to_f64_lossy()));
    }
    Ok(specular_lobe(model, n, l, v, m))
}

/// Radiance of the overcast sky arriving from direction `dir`.
pub fn sky_radiance<T: Real>(dir: Vector3<T>, zenith_radiance: T, up: Vector3<T>) -> T {
    let c = dir.dot(up);
    if c >= T::zero() {
        zenith_radiance * (T::one() + T::two() * c) / T::of(3.0)
    } else {
        T::zero()
    }
}

/// Cosine-weighted integral of sky radiance over the hemisphere around `normal`,
/// skipping directions for which `occluded` returns true.
pub fn sky_irradiance_with_rule<T: Real>(
    rule: &HemisphereRule<T>,
    normal: Vector3<T>,
    zenith_radiance: T,
    up: Vector3<T>,
    occluded: Option<&dyn Fn(Vector3<T>) -> bool>,
) -> T {
    rule.integrate(normal, |w| {
        let cos_n = w.dot(normal);
        if cos_n <= T::zero() {
            return T::zero();
        }
        let l = sky_radiance(w, zenith_radiance, up);
        if l == T::zero() || occluded.is_some_and(|occ| occ(w)) {
            return T::zero();
        }
        l * cos_n
    })
}

pub fn sky_irradiance<T: Real>(
    normal: Vector3<T>,
    zenith_radiance: T,
    up: Vector3<T>,
    occluded: Option<&dyn Fn(Vector3<T>) -> bool>,
    n_samples: usize,
) -> T {
    sky_irradiance_with_rule(
        &HemisphereRule::new(n_samples),
        normal,
        zenith_radiance,
        up,
        occluded,
    )
}

/// Mirror lookup of the environment for eye direction `v` at normal `n`.
pub fn env_reflection<T: Real>(v: Vector3<T>, n: Vector3<T>, map: &EnvironmentMap<T>) -> Rgb<T> {
    map.lookup(v.reflect_about(n))
}

/// Point being shaded: position, unit normal and unit direction towards the eye.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePoint<T> {
    pub point: Vector3<T>,
    pub normal: Vector3<T>,
    pub view: Vector3<T>,
}

/// Per-render shading state: specular model, optional reflection map, sky rule.
#[derive(Clone, Debug)]
pub struct Shader<'a, T> {
    pub model: SpecularModel,
    pub env: Option<&'a EnvironmentMap<T>>,
    pub sky_rule: HemisphereRule<T>,
}

impl<'a, T: Real> Shader<'a, T> {
    pub fn new(model: SpecularModel, env: Option<&'a EnvironmentMap<T>>, sky_samples: usize) -> Self {
        Self {
            model,
            env,
            sky_rule: HemisphereRule::new(sky_samples),
        }
    }

    fn direct(&self, s: &SurfacePoint<T>, mat: &Material<T>, l: Vector3<T>, intensity: Rgb<T>) -> Rgb<T> {
        let diffuse = lambert_term(s.normal, l);
        let spec = specular_lobe(self.model, s.normal, l, s.view, mat.m_shiny);
        intensity * (mat.k_d * diffuse + mat.k_s * spec)
    }

    /// Contribution of one light; `sky_occluded` is consulted per sky sample.
    pub fn light_term(
        &self,
        light: &LightSource<T>,
        s: &SurfacePoint<T>,
        mat: &Material<T>,
        sky_occluded: Option<&dyn Fn(Vector3<T>) -> bool>,
    ) -> Rgb<T> {
        match *light {
            LightSource::Ambient { intensity } => mat.k_a * intensity,
            LightSource::Directional { dir, intensity } => self.direct(s, mat, -dir, intensity),
            LightSource::Headlight { intensity } => self.direct(s, mat, s.view, intensity),
            LightSource::Point {
                pos,
                intensity,
                attenuation,
            } => {
                let to_light = pos - s.point;
                let d2 = to_light.norm_squared();
                let intensity = match attenuation {
                    Attenuation::None => intensity,
                    Attenuation::InverseSquare => intensity * d2.recip(),
                };
                self.direct(s, mat, to_light.normalized(), intensity)
            }
            LightSource::OvercastSky {
                zenith_radiance,
                up,
            } => {
                let e = sky_irradiance_with_rule(&self.sky_rule, s.normal, zenith_radiance, up, sky_occluded);
                mat.k_d * (e / T::PI())
            }
        }
    }

    /// Reflection-map term, zero without a map.
    pub fn env_term(&self, s: &SurfacePoint<T>, mat: &Material<T>) -> Rgb<T> {
        match self.env {
            Some(map) if mat.reflectivity > T::zero() => {
                env_reflection(s.view, s.normal, map) * mat.reflectivity
            }
            _ => Rgb::black(),
        }
    }

    /// Unclamped sum of emission, every light and the reflection map.
    pub fn shade(&self, s: &SurfacePoint<T>, mat: &Material<T>, lights: &[LightSource<T>]) -> Rgb<T> {
        let mut c = mat.emission;
        for light in lights {
            c += self.light_term(light, s, mat, None);
        }
        c + self.env_term(s, mat)
    }
}

/// Fixed-function shading of one point, no shadows, no clamping.
pub fn shade_point<T: Real>(
    s: &SurfacePoint<T>,
    material: &Material<T>,
    lights: &[LightSource<T>],
    model: SpecularModel,
    env: Option<&EnvironmentMap<T>>,
) -> Rgb<T> {
    let sky_samples = if lights
        .iter()
        .any(|l| matches!(l, LightSource::OvercastSky { .. }))
    {
        DEFAULT_SKY_SAMPLES
    } else {
        1
    };
    Shader::new(model, env, sky_samples).shade(s, material, lights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    type V = Vector3<f64>;

    fn unit(theta: f64, phi: f64) -> V {
        V::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
    }

    #[test]
    fn lambert_examples() {
        let n = V::unit_z();
        assert_eq!(lambert_term(n, n), 1.0);
        let back = V::new((1.0f64 - 0.01).sqrt(), 0.0, -0.1);
        assert_eq!(lambert_term(n, back), 0.0);
        let sixty = unit(60f64.to_radians(), 0.3);
        assert!((lambert_term(n, sixty) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn specular_peak_in_mirror_configuration() {
        let n = V::unit_z();
        let l = unit(0.7, 0.2);
        let v = l.reflect_about(n);
        for m in [0.0, 1.0, 10.0, 127.0, 5000.0] {
            let s = phong_specular(SpecularModel::Classic, n, l, v, m).unwrap();
            assert!((s - 1.0).abs() < 1e-9);
        }
    }

    /// Builds unit L with `N·L = n_dot_l` and unit V with `R·V = 0.8`, where R
    /// is the reflection of L; N is +z.
    fn cutoff_config(n_dot_l: f64) -> (V, V, V) {
        let n = V::unit_z();
        let l = V::new((1.0 - n_dot_l * n_dot_l).sqrt(), 0.0, n_dot_l);
        let r = l.reflect_about(n);
        // Rotate R by acos(0.8) about an axis orthogonal to it.
        let axis = r.any_orthogonal();
        let a = 0.8f64.acos();
        let v = r * a.cos() + axis.cross(r) * a.sin();
        (n, l, v)
    }

    #[test]
    fn classic_cutoff_jump() {
        let eps = 1e-9;
        let (n, l, v) = cutoff_config(eps);
        let above = phong_specular(SpecularModel::Classic, n, l, v, 10.0).unwrap();
        // 0.8^10 by direct evaluation.
        assert!((above - 0.107_374_182_4).abs() < 1e-6);
        let (n, l, v) = cutoff_config(-eps);
        assert_eq!(phong_specular(SpecularModel::Classic, n, l, v, 10.0).unwrap(), 0.0);
    }

    #[test]
    fn modified_is_continuous_at_terminator() {
        for sign in [1.0, -1.0] {
            let (n, l, v) = cutoff_config(sign * 1e-9);
            for normalized in [false, true] {
                let s = phong_specular(SpecularModel::Modified { normalized }, n, l, v, 10.0).unwrap();
                assert!(s.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn negative_shininess_rejected() {
        let n = V::unit_z();
        assert!(matches!(
            phong_specular(SpecularModel::Classic, n, n, n, -1.0),
            Err(Error::NegativeShininess(_))
        ));
    }

    #[test]
    fn seven_bit_mode() {
        let m = Material::<f64>::gray(0.1, 0.5, 0.5, 200.0);
        assert!(m.validate(false).is_ok());
        assert!(matches!(m.validate(true), Err(Error::ShininessExceeds7Bit(_))));
        assert!(Material::<f64>::gray(0.1, 0.5, 0.5, 127.0).validate(true).is_ok());
        assert!(Material::<f64>::gray(-0.1, 0.5, 0.5, 1.0).validate(false).is_err());
    }

    #[test]
    fn sky_radiance_gradation() {
        let up = V::unit_y();
        assert_eq!(sky_radiance(up, 2.0, up), 2.0);
        assert!((sky_radiance(V::unit_x(), 3.0, up) - 1.0).abs() < 1e-12);
        assert_eq!(sky_radiance(-up, 3.0, up), 0.0);
    }

    #[test]
    fn horizontal_irradiance_matches_closed_form() {
        let up = V::unit_y();
        let e = sky_irradiance(up, 1.0, up, None, 1_000_000);
        // (2π/3)(1/2 + 2/3) = 7π/9
        assert!((e / (7.0 * PI / 9.0) - 1.0).abs() < 5e-3);
        assert_eq!(sky_irradiance(-up, 1.0, up, None, 10_000), 0.0);
    }

    #[test]
    fn vertical_irradiance_matches_golden() {
        let up = V::unit_y();
        let e = sky_irradiance(V::unit_x(), 1.0, up, None, 1_000_000);
        // Adaptive 2-D quadrature of the same integrand (scipy dblquad): π/6 + 4/9.
        let golden = 0.968_043_220_042_743_3;
        assert!((e - golden).abs() / golden < 1e-3, "{e}");
        assert!(e > 0.0 && e < 7.0 * PI / 9.0);
    }

    #[test]
    fn fully_occluded_sky_is_dark() {
        let up = V::unit_y();
        let occ = |_: V| true;
        assert_eq!(sky_irradiance(up, 1.0, up, Some(&occ), 1000), 0.0);
    }

    #[test]
    fn env_lookups() {
        let c = Rgb::new(0.1, 0.2, 0.3);
        let map = EnvironmentMap::constant(c);
        assert_eq!(env_reflection(unit(0.4, 1.0), unit(0.1, 2.0), &map), c);

        let grad = EnvironmentMap::vertical_gradient(8, 4, Rgb::gray(1.0), Rgb::gray(0.0));
        let up = V::unit_y();
        assert_eq!(grad.texel_index(up).1, 0);
        assert_eq!(env_reflection(up, up, &grad), grad.texel(0, 0));
        assert_eq!(grad.lookup(-up), Rgb::gray(0.0));
    }

    #[test]
    fn env_lookup_is_total() {
        let map = EnvironmentMap::vertical_gradient(16, 8, Rgb::gray(1.0), Rgb::gray(0.0));
        for i in 0..500 {
            let d = unit(PI * i as f64 / 499.0, 0.37 * i as f64 - PI);
            let (c, r) = map.texel_index(d);
            assert!(c < 16 && r < 8);
        }
        let _ = map.lookup(V::new(-1.0, 0.0, -0.0));
    }

    fn surface() -> SurfacePoint<f64> {
        SurfacePoint {
            point: V::zero(),
            normal: unit(0.3, 0.5),
            view: V::unit_z(),
        }
    }

    #[test]
    fn ambient_only_is_flat() {
        let mat = Material::<f64>::gray(1.0, 0.0, 0.0, 10.0);
        let lights = [LightSource::ambient(0.2)];
        for theta in [0.0, 0.5, 1.2] {
            let s = SurfacePoint {
                normal: unit(theta, 1.0),
                ..surface()
            };
            assert_eq!(shade_point(&s, &mat, &lights, SpecularModel::Classic, None), Rgb::gray(0.2));
        }
    }

    #[test]
    fn duplicated_light_doubles() {
        let mat = Material::<f64>::gray(0.0, 0.6, 0.4, 8.0);
        let light = LightSource::directional(V::from_f64(0.2, -0.3, -1.0), 0.7);
        let one = shade_point(&surface(), &mat, &[light], SpecularModel::Classic, None);
        let two = shade_point(&surface(), &mat, &[light, light], SpecularModel::Classic, None);
        assert_eq!(two, one * 2.0);
    }

    #[test]
    fn headlight_uses_view_direction() {
        let mat = Material::<f64>::gray(0.0, 1.0, 0.0, 1.0);
        let s = surface();
        let c = shade_point(&s, &mat, &[LightSource::headlight(1.0)], SpecularModel::Classic, None);
        assert!((c.r - s.normal.dot(s.view)).abs() < 1e-15);
    }

    #[test]
    fn inverse_square_point_light() {
        let mat = Material::<f64>::gray(0.0, 1.0, 0.0, 1.0);
        let s = SurfacePoint {
            point: V::zero(),
            normal: V::unit_z(),
            view: V::unit_z(),
        };
        let near = LightSource::point(V::new(0.0, 0.0, 2.0), 1.0, Attenuation::InverseSquare);
        let plain = LightSource::point(V::new(0.0, 0.0, 2.0), 1.0, Attenuation::None);
        let a = shade_point(&s, &mat, &[near], SpecularModel::Classic, None);
        let b = shade_point(&s, &mat, &[plain], SpecularModel::Classic, None);
        assert!((a.r - 0.25).abs() < 1e-15);
        assert_eq!(b.r, 1.0);
    }

    #[test]
    fn normalized_modified_factor() {
        let n = V::unit_z();
        let plain = phong_specular(SpecularModel::Modified { normalized: false }, n, n, n, 20.0).unwrap();
        let norm = phong_specular(SpecularModel::Modified { normalized: true }, n, n, n, 20.0).unwrap();
        assert!((norm / plain - 22.0 / (2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn classic_energy_decreases_with_shininess() {
        let n = V::unit_z();
        let rule = HemisphereRule::new(200_000);
        let energy = |m: f64| rule.integrate(n, |v| specular_lobe(SpecularModel::Classic, n, n, v, m));
        let mut prev = f64::INFINITY;
        for m in [0.0, 0.5, 1.0, 3.0, 5.0, 6.0, 20.0, 100.0] {
            let e = energy(m);
            assert!(e < prev);
            prev = e;
        }
    }

    fn arb_unit() -> impl Strategy<Value = V> {
        (0.0f64..PI, -PI..PI).prop_map(|(t, p)| unit(t, p))
    }

    fn arb_light() -> impl Strategy<Value = LightSource<f64>> {
        prop_oneof![
            (arb_unit(), 0.0f64..2.0).prop_map(|(d, i)| LightSource::directional(d, i)),
            (arb_unit(), 0.5f64..4.0, 0.0f64..2.0)
                .prop_map(|(d, r, i)| LightSource::point(d * r, i, Attenuation::InverseSquare)),
            (0.0f64..2.0).prop_map(LightSource::headlight),
            (0.0f64..1.0).prop_map(LightSource::ambient),
        ]
    }

    proptest! {
        #[test]
        fn modified_never_exceeds_classic(n in arb_unit(), l in arb_unit(), v in arb_unit(), m in 0.0f64..200.0) {
            let c = phong_specular(SpecularModel::Classic, n, l, v, m).unwrap();
            let md = phong_specular(SpecularModel::Modified { normalized: false }, n, l, v, m).unwrap();
            prop_assert!(md <= c + 1e-15);
        }

        #[test]
        fn classic_jump_equals_terminator_lobe(theta in 0.05f64..PI - 0.05, phi in -PI..PI, m in 0.0f64..50.0) {
            // N = +z; L on the terminator rotated by ±1e-6 around it.
            let n = V::unit_z();
            let v = unit(theta * 0.5, phi);
            let l0 = V::new(phi.cos(), phi.sin(), 0.0);
            let tilt = |e: f64| (l0 * (1.0 - e * e).sqrt() + n * e).normalized();
            let above = phong_specular(SpecularModel::Classic, n, tilt(1e-6), v, m).unwrap();
            let below = phong_specular(SpecularModel::Classic, n, tilt(-1e-6), v, m).unwrap();
            let expected = (-l0).dot(v).max(0.0).powf(m);
            prop_assert_eq!(below, 0.0);
            prop_assert!((above - expected).abs() < 1e-4 * (1.0 + m));
            for normalized in [false, true] {
                let model = SpecularModel::Modified { normalized };
                let a = phong_specular(model, n, tilt(1e-6), v, m).unwrap();
                let b = phong_specular(model, n, tilt(-1e-6), v, m).unwrap();
                prop_assert!((a - b).abs() <= 1e-6 * (m + 2.0));
            }
        }

        #[test]
        fn sky_radiance_is_rotation_invariant_about_up(dir in arb_unit(), angle in -PI..PI) {
            let up = V::unit_z();
            let (c, s) = (angle.cos(), angle.sin());
            let rotated = V::new(c * dir.x - s * dir.y, s * dir.x + c * dir.y, dir.z);
            prop_assert!((sky_radiance(dir, 1.7, up) - sky_radiance(rotated, 1.7, up)).abs() < 1e-12);
        }

        #[test]
        fn shading_is_additive_in_lights(
            lights in proptest::collection::vec(arb_light(), 0..6),
            split in 0usize..6,
            n in arb_unit(),
        ) {
            let split = split.min(lights.len());
            let (a, b) = lights.split_at(split);
            let mat = Material::<f64>::gray(0.3, 0.5, 0.4, 12.0).with_reflectivity(0.2);
            let env = EnvironmentMap::vertical_gradient(8, 4, Rgb::gray(1.0), Rgb::gray(0.1));
            let s = SurfacePoint { point: V::from_f64(0.1, 0.2, 0.3), normal: n, view: V::unit_z() };
            let shade = |ls: &[LightSource<f64>]| shade_point(&s, &mat, ls, SpecularModel::Classic, Some(&env));
            let env_once = Shader::new(SpecularModel::Classic, Some(&env), 1).env_term(&s, &mat);
            let whole = shade(&lights) + env_once;
            let parts = shade(a) + shade(b);
            for (x, y) in whole.channels().into_iter().zip(parts.channels()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
