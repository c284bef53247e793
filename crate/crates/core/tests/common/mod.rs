//! Shared oracles for the integration suites.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shadelab_core::geom::{Camera, Vector3};
use shadelab_core::illumination::{LightSource, Material};
use shadelab_core::render::Scene;
use shadelab_core::SurfacePatch;

pub type V = Vector3<f64>;

fn random_unit(rng: &mut ChaCha8Rng) -> V {
    loop {
        let v = V::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

/// One sphere, one directional light, random camera and material.
pub fn random_cutoff_scenes(count: usize, seed: u64) -> Vec<Scene<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let center = V::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let radius = rng.gen_range(0.5..2.0);
            let towards_camera = random_unit(&mut rng);
            let up = towards_camera.any_orthogonal();
            let camera = if k % 2 == 0 {
                Camera::orthographic(center + towards_camera * 10.0, -towards_camera, up, (32, 32), 3.0 * radius)
            } else {
                let distance = radius * rng.gen_range(2.0..8.0);
                Camera::perspective(center + towards_camera * distance, center, up, (32, 32), 0.8)
            };
            let mut scene = Scene::new(camera);
            let m = 10f64.powf(rng.gen_range(0.0..3.0));
            let k_s = rng.gen_range(0.1..1.0);
            scene
                .patches
                .push((SurfacePatch::sphere(center, radius), Material::gray(0.0, 0.0, k_s, m)));
            scene.lights.push(LightSource::directional(random_unit(&mut rng), 1.0));
            scene
        })
        .collect()
}

/// Brute-force terminator scan: the lit-side classic lobe `k_s max(R·V, 0)^m`
/// at 10^5 points of the great circle `N·L = 0` facing the camera. On that
/// circle the mirror direction is `R = −L`.
pub fn terminator_scan_oracle(scene: &Scene<f64>) -> f64 {
    let (center, radius, material) = match &scene.patches[0] {
        (SurfacePatch::Sphere { center, radius }, m) => (*center, *radius, *m),
        _ => panic!("first patch must be a sphere"),
    };
    let l = match scene.lights[0] {
        LightSource::Directional { dir, .. } => -dir,
        _ => panic!("single directional light expected"),
    };
    // Basis of the plane orthogonal to L by Gram–Schmidt from a fixed seed axis.
    let seed = if l.x.abs() < 0.9 { V::unit_x() } else { V::unit_y() };
    let a = (seed - l * seed.dot(l)).normalized();
    let b = l.cross(a);
    let cam = &scene.camera;
    let forward = cam.view_dir.normalized();
    let mut best = 0.0f64;
    let n = 100_000;
    for k in 0..n {
        let phi = std::f64::consts::TAU * (k as f64 + 0.5) / n as f64;
        let normal = a * phi.cos() + b * phi.sin();
        let p = center + normal * radius;
        let v = match cam.kind {
            shadelab_core::geom::Projection::Orthographic => -forward,
            shadelab_core::geom::Projection::Perspective => (cam.position - p).normalized(),
        };
        if normal.dot(v) <= 0.0 {
            continue;
        }
        let rv = (-l).dot(v).max(0.0);
        best = best.max(material.k_s.r * rv.powf(material.m_shiny));
    }
    best
}

/// Horizontal irradiance under the overcast sky by a 1-D midpoint rule in θ:
/// `2π ∫ L_z (1 + 2cos θ)/3 cos θ sin θ dθ`.
pub fn sky_horizontal_oracle(zenith: f64) -> f64 {
    let n = 200_000;
    let h = std::f64::consts::FRAC_PI_2 / n as f64;
    let sum: f64 = (0..n)
        .map(|k| {
            let t = (k as f64 + 0.5) * h;
            zenith * (1.0 + 2.0 * t.cos()) / 3.0 * t.cos() * t.sin()
        })
        .sum();
    std::f64::consts::TAU * sum * h
}
