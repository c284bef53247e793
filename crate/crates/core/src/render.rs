//! Primary-ray renderer producing unclamped linear framebuffers.

use std::thread;

use crate::error::{Error, Result};
use crate::geom::{surface_offset, Camera, CameraFrame, Hit, Ray, SurfacePatch, Vector3};
use crate::illumination::{EnvironmentMap, LightSource, Material, Shader, SpecularModel, SurfacePoint};
use crate::image::{Framebuffer, Rgb, TransferFunction};
use crate::real::Real;

/// Environment variable overriding the renderer's worker count.
pub const THREADS_ENV: &str = "SHADELAB_THREADS";

#[derive(Clone, Debug, PartialEq)]
pub struct Scene<T> {
    pub patches: Vec<(SurfacePatch<T>, Material<T>)>,
    pub lights: Vec<LightSource<T>>,
    pub env: Option<EnvironmentMap<T>>,
    pub camera: Camera<T>,
    pub background: Rgb<T>,
}

impl<T: Real> Scene<T> {
    pub fn new(camera: Camera<T>) -> Self {
        Self {
            patches: Vec::new(),
            lights: Vec::new(),
            env: None,
            camera,
            background: Rgb::black(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.patches.is_empty() {
            return Err(Error::EmptyScene);
        }
        for (patch, material) in &self.patches {
            patch.validate()?;
            material.validate(false)?;
        }
        for light in &self.lights {
            light.validate()?;
        }
        self.camera.frame()?;
        Ok(())
    }

    /// Nearest hit in `(t_min, t_max)` and the index of the patch it belongs to.
    pub fn nearest_hit(&self, ray: &Ray<T>, t_min: T, t_max: T) -> Option<(Hit<T>, usize)> {
        let mut best: Option<(Hit<T>, usize)> = None;
        let mut limit = t_max;
        for (i, (patch, _)) in self.patches.iter().enumerate() {
            if let Some(hit) = patch.intersect_range(ray, t_min, limit) {
                limit = hit.t;
                best = Some((hit, i));
            }
        }
        best
    }

    pub fn is_blocked(&self, ray: &Ray<T>, t_max: T) -> bool {
        self.patches
            .iter()
            .any(|(p, _)| p.intersect_range(ray, T::zero(), t_max).is_some())
    }

    /// Copy of the scene lit only by the lights at `indices`.
    pub fn with_lights(&self, indices: &[usize]) -> Self {
        Self {
            lights: indices.iter().map(|&i| self.lights[i]).collect(),
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Shadows {
    #[default]
    Off,
    On,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Superposition {
    /// Sum light contributions linearly; the transfer function is applied on output.
    #[default]
    LinearThenEncode,
    /// Clamp and encode each contribution, then sum the encoded values, as an
    /// uncorrected pipeline driving a gamma display does.
    NaiveEncodedSum,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenderOptions<T> {
    pub specular_model: SpecularModel,
    pub shadows: Shadows,
    pub superposition: Superposition,
    pub output_tf: TransferFunction<T>,
    /// Directions per sky-irradiance evaluation (deterministic stratified rule).
    pub sky_samples: usize,
}

impl<T: Real> Default for RenderOptions<T> {
    fn default() -> Self {
        Self {
            specular_model: SpecularModel::Classic,
            shadows: Shadows::Off,
            superposition: Superposition::LinearThenEncode,
            output_tf: TransferFunction::Identity,
            sky_samples: 256,
        }
    }
}

/// True iff some patch blocks the path from `point` towards `light`.
///
/// Directional lights test a ray, point lights the open segment to the light.
/// Headlight, ambient and sky sources never report occlusion here; the sky is
/// occluded per sample during irradiance integration.
pub fn shadow_query<T: Real>(point: Vector3<T>, light: &LightSource<T>, scene: &Scene<T>) -> bool {
    let eps = surface_offset(point);
    match *light {
        LightSource::Directional { dir, .. } => {
            let ray = Ray::new(point - dir * eps, -dir);
            scene.is_blocked(&ray, T::infinity())
        }
        LightSource::Point { pos, .. } => {
            let to_light = pos - point;
            let dist = to_light.norm();
            let dir = to_light / dist;
            let ray = Ray::new(point + dir * eps, dir);
            scene.is_blocked(&ray, dist - T::two() * eps)
        }
        _ => false,
    }
}

pub fn default_workers() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| thread::available_parallelism().map_or(1, |n| n.get()))
}

struct Tracer<'a, T: Real> {
    scene: &'a Scene<T>,
    options: &'a RenderOptions<T>,
    frame: CameraFrame<T>,
    shader: Shader<'a, T>,
}

impl<T: Real> Tracer<'_, T> {
    fn pixel(&self, i: usize, j: usize) -> Rgb<T> {
        let ray = self.frame.primary_ray(i, j);
        let Some((hit, idx)) = self.scene.nearest_hit(&ray, T::zero(), T::infinity()) else {
            return self.scene.background;
        };
        let material = &self.scene.patches[idx].1;
        let surf = SurfacePoint {
            point: hit.point,
            normal: hit.normal,
            view: -ray.dir,
        };
        let shadows = self.options.shadows == Shadows::On;
        let naive = self.options.superposition == Superposition::NaiveEncodedSum;
        let tf = &self.options.output_tf;

        let mut total = Rgb::black();
        let mut add = |c: Rgb<T>| {
            if naive {
                total += c.clamp01().map(|v| tf.encode_unclamped(v));
            } else {
                total += c;
            }
        };

        add(material.emission);
        let lift = surf.point + surf.normal * surface_offset(surf.point);
        let sky_occluder = |w: Vector3<T>| self.scene.is_blocked(&Ray::new(lift, w), T::infinity());
        for light in &self.scene.lights {
            if shadows && shadow_query(surf.point, light, self.scene) {
                add(Rgb::black());
                continue;
            }
            let occ: Option<&dyn Fn(Vector3<T>) -> bool> = if shadows { Some(&sky_occluder) } else { None };
            add(self.shader.light_term(light, &surf, material, occ));
        }
        add(self.shader.env_term(&surf, material));

        if naive {
            total.map(|v| tf.decode(v))
        } else {
            total
        }
    }
}

/// Renders with the worker count from [`default_workers`].
pub fn render<T: Real>(scene: &Scene<T>, options: &RenderOptions<T>) -> Result<Framebuffer<T>> {
    render_with_workers(scene, options, default_workers())
}

/// Renders one primary ray per pixel center; rows are split into contiguous
/// bands, one per worker. The result does not depend on `workers`.
pub fn render_with_workers<T: Real>(
    scene: &Scene<T>,
    options: &RenderOptions<T>,
    workers: usize,
) -> Result<Framebuffer<T>> {
    scene.validate()?;
    let frame = scene.camera.frame()?;
    let tracer = Tracer {
        scene,
        options,
        frame,
        shader: Shader::new(options.specular_model, scene.env.as_ref(), options.sky_samples),
    };
    let (w, h) = (frame.width, frame.height);
    let mut pixels = vec![Rgb::black(); w * h];
    let workers = workers.clamp(1, h);
    let rows_per = h.div_ceil(workers);
    if workers == 1 {
        for (j, row) in pixels.chunks_mut(w).enumerate() {
            for (i, px) in row.iter_mut().enumerate() {
                *px = tracer.pixel(i, j);
            }
        }
    } else {
        thread::scope(|s| {
            for (band, chunk) in pixels.chunks_mut(rows_per * w).enumerate() {
                let tracer = &tracer;
                s.spawn(move || {
                    for (r, row) in chunk.chunks_mut(w).enumerate() {
                        let j = band * rows_per + r;
                        for (i, px) in row.iter_mut().enumerate() {
                            *px = tracer.pixel(i, j);
                        }
                    }
                });
            }
        });
    }
    Framebuffer::from_pixels(w, h, pixels)
}
