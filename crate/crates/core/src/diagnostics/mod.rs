//! Numeric measurements of the artifacts of fixed-function Phong lighting.
//!
//! Each function quantifies one effect (energy gain of broad lobes, highlight
//! size, the specular cutoff at the terminator, superadditive superposition,
//! overflow plateaus, terminator hardness, cast-shadow contrast) and is paired
//! with a closed form or brute-force check in the test suites.

mod full;
mod report;

pub use full::{cutoff_scene, highlight_scene, overflow_scene, run_full_report, AuditConfig, AuditKind, ENERGY_SAMPLES};
pub use report::{DiagnosticReport, Entry, MetricValue};

use crate::error::{Error, Result};
use crate::geom::{Frame, Projection, SurfacePatch, Vector3};
use crate::illumination::{specular_lobe, LightSource, SpecularModel};
use crate::image::{displayed_luminance, Framebuffer, Rgb, TransferFunction};
use crate::quadrature::HemisphereRule;
use crate::real::Real;
use crate::render::Scene;

/// Integration convention for the reflected-energy audit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EnergyConvention {
    /// `∫ cos^m α dω` over the hemisphere around the mirror direction.
    Unweighted,
    /// `∫ cos^m α cos θ_out dω`.
    CosineWeighted,
}

/// Reflected/received energy of the classic lobe at normal incidence.
pub fn energy_ratio<T: Real>(m: T, convention: EnergyConvention, n_samples: usize) -> Result<T> {
    if !(m >= T::zero()) {
        return Err(Error::NegativeShininess(m.to_f64_lossy()));
    }
    Ok(energy_ratio_with_rule(&HemisphereRule::new(n_samples), m, convention))
}

fn energy_ratio_with_rule<T: Real>(rule: &HemisphereRule<T>, m: T, convention: EnergyConvention) -> T {
    let n = Vector3::unit_z();
    rule.integrate(n, |w| {
        let lobe = specular_lobe(SpecularModel::Classic, n, n, w, m);
        match convention {
            EnergyConvention::Unweighted => lobe,
            EnergyConvention::CosineWeighted => lobe * w.dot(n),
        }
    })
}

/// Shininess at which [`energy_ratio`] crosses 1, by bisection on `[0, 50]`.
pub fn energy_crossing<T: Real>(convention: EnergyConvention, n_samples: usize) -> T {
    let rule = HemisphereRule::new(n_samples);
    let (mut lo, mut hi) = (T::zero(), T::of(50.0));
    for _ in 0..60 {
        let mid = (lo + hi) * T::half();
        if energy_ratio_with_rule(&rule, mid, convention) > T::one() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * T::half()
}

/// Half-width at half-maximum of the lobe `cos^m α`: `arccos(2^(-1/m))`.
pub fn highlight_half_angle<T: Real>(m: T) -> Result<T> {
    if !(m > T::zero()) {
        return Err(Error::NoSpecularLobe(m.to_f64_lossy()));
    }
    // 1 - cos α = -expm1(-ln2/m); α = 2 asin(sqrt((1 - cos α)/2)) keeps precision for huge m.
    let one_minus_cos = -(-T::LN_2() / m).exp_m1();
    Ok(T::two() * (one_minus_cos * T::half()).sqrt().asin())
}

/// Measured half-max highlight radius and the angular size of one pixel there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HighlightSize<T> {
    /// Largest angle between the reflected light direction at a half-max pixel
    /// and the reflected direction at the peak pixel.
    pub half_angle: T,
    /// Change of the reflected direction between neighbouring pixels at the
    /// rim of the half-max region.
    pub pixel_angle: T,
    pub peak: T,
    pub area_px: usize,
}

fn first_sphere<T: Real>(scene: &Scene<T>) -> Result<(usize, Vector3<T>, T)> {
    scene
        .patches
        .iter()
        .enumerate()
        .find_map(|(i, (p, _))| match p {
            SurfacePatch::Sphere { center, radius } => Some((i, *center, *radius)),
            _ => None,
        })
        .ok_or(Error::SphereNotFound)
}

type NormalView<T> = Option<(Vector3<T>, Vector3<T>)>;

/// Per pixel: the surface normal and view direction if the primary ray's
/// nearest hit is patch `index`.
fn patch_samples<T: Real>(scene: &Scene<T>, index: usize) -> Result<Vec<NormalView<T>>> {
    let frame = scene.camera.frame()?;
    let mut out = Vec::with_capacity(frame.width * frame.height);
    for j in 0..frame.height {
        for i in 0..frame.width {
            let ray = frame.primary_ray(i, j);
            out.push(
                scene
                    .nearest_hit(&ray, T::zero(), T::infinity())
                    .filter(|(_, k)| *k == index)
                    .map(|(h, _)| (h.normal, -ray.dir)),
            );
        }
    }
    Ok(out)
}

fn check_dims<T: Real>(fb: &Framebuffer<T>, scene: &Scene<T>) -> Result<()> {
    let (w, h) = (scene.camera.width_px, scene.camera.height_px);
    if fb.width() != w || fb.height() != h {
        return Err(Error::DimensionMismatch(fb.width(), fb.height(), w, h));
    }
    Ok(())
}

/// Direction towards the single light of a one-light scene at a point with
/// view direction `view`.
type LightDir<T> = Box<dyn Fn(Vector3<T>) -> Vector3<T>>;

fn single_light_dir<T: Real>(scene: &Scene<T>) -> Result<LightDir<T>> {
    let lights: Vec<_> = scene
        .lights
        .iter()
        .filter(|l| !matches!(l, LightSource::Ambient { .. }))
        .collect();
    match lights.as_slice() {
        [LightSource::Directional { dir, .. }] => {
            let l = -*dir;
            Ok(Box::new(move |_| l))
        }
        [LightSource::Headlight { .. }] => Ok(Box::new(|v| v)),
        _ => Err(Error::InvalidSetup(
            "measurement needs exactly one directional light or headlight".into(),
        )),
    }
}

/// Angular radius of the half-maximum highlight on the scene's sphere.
pub fn measure_highlight_size<T: Real>(fb: &Framebuffer<T>, scene: &Scene<T>) -> Result<HighlightSize<T>> {
    check_dims(fb, scene)?;
    let (index, _, _) = first_sphere(scene)?;
    let light_dir = single_light_dir(scene)?;
    let samples = patch_samples(scene, index)?;
    let w = fb.width();

    let value = |k: usize| fb.pixels()[k].max_channel();
    let peak_idx = (0..samples.len())
        .filter(|&k| samples[k].is_some())
        .max_by(|&a, &b| value(a).partial_cmp(&value(b)).unwrap_or(std::cmp::Ordering::Equal))
        .ok_or(Error::SphereNotFound)?;
    let peak = value(peak_idx);
    if !(peak > T::zero()) {
        return Err(Error::NoHighlight);
    }
    let reflected = |k: usize| {
        samples[k].map(|(n, v)| light_dir(v).reflect_about(n))
    };
    let r_peak = reflected(peak_idx).expect("peak on sphere");
    let inside = |k: usize| samples[k].is_some() && value(k) >= peak * T::half();

    let mut half_angle = T::zero();
    let mut pixel_angle = T::zero();
    let mut area_px = 0;
    for k in 0..samples.len() {
        if !inside(k) {
            continue;
        }
        area_px += 1;
        let r = reflected(k).expect("inside implies on sphere");
        half_angle = half_angle.max(r.angle_to(r_peak));
        let (x, y) = (k % w, k / w);
        let neighbours = [
            (x > 0).then(|| k - 1),
            (x + 1 < w).then(|| k + 1),
            (y > 0).then(|| k - w),
            (k + w < samples.len()).then(|| k + w),
        ];
        for nb in neighbours.into_iter().flatten() {
            if !inside(nb) {
                if let Some(rn) = reflected(nb) {
                    pixel_angle = pixel_angle.max(rn.angle_to(r));
                }
            }
        }
    }
    Ok(HighlightSize {
        half_angle,
        pixel_angle,
        peak,
        area_px,
    })
}

/// Number of points sampled on the terminator circle.
pub const TERMINATOR_SAMPLES: usize = 100_000;
/// Normal perturbation either side of the terminator.
pub const TERMINATOR_EPSILON: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutoffReport<T> {
    /// Largest specular discontinuity across the visible terminator.
    pub max_jump: T,
    pub visible_samples: usize,
}

/// Largest jump of the specular term across the terminator of the scene's
/// sphere, for its single directional light (or headlight).
///
/// Each terminator point is perturbed to `N·L = ±ε` and `±2ε`; the one-sided
/// limits are extrapolated linearly to `ε → 0`, so a continuous model reports
/// ~0 and a discontinuous one reports the step height.
pub fn cutoff_discontinuity<T: Real>(scene: &Scene<T>, model: SpecularModel) -> Result<CutoffReport<T>> {
    let (index, center, radius) = first_sphere(scene)?;
    let material = &scene.patches[index].1;
    let k_s = material.k_s.max_channel();
    let m = material.m_shiny;
    let light_dir = single_light_dir(scene)?;
    let frame = scene.camera.frame()?;
    let view_at = |p: Vector3<T>| match frame.kind {
        Projection::Orthographic => -frame.forward,
        Projection::Perspective => (frame.position - p).normalized(),
    };
    // For a headlight the terminator is the silhouette, so L is taken at the sphere's center.
    let axis = light_dir(view_at(center));
    let circle = Frame::around(axis);
    let eps = T::of(TERMINATOR_EPSILON);
    let spec = |n: Vector3<T>, l: Vector3<T>, v: Vector3<T>| k_s * specular_lobe(model, n, l, v, m);

    let mut max_jump = T::zero();
    let mut visible = 0;
    for k in 0..TERMINATOR_SAMPLES {
        let phi = T::two() * T::PI() * T::of_usize(k) / T::of_usize(TERMINATOR_SAMPLES);
        let n = circle.tangent * phi.cos() + circle.bitangent * phi.sin();
        let p = center + n * radius;
        let v = view_at(p);
        if !(n.dot(v) > T::zero()) {
            continue;
        }
        visible += 1;
        let l = light_dir(v);
        let jump = |e: T| {
            let up = (n + l * e).normalized();
            let down = (n - l * e).normalized();
            spec(up, l, v) - spec(down, l, v)
        };
        let extrapolated = T::two() * jump(eps) - jump(T::two() * eps);
        max_jump = max_jump.max(extrapolated.abs());
    }
    Ok(CutoffReport {
        max_jump,
        visible_samples: visible,
    })
}

/// Displayed luminance of two equal encoded contributions summed in device
/// space, relative to the correct (linear) sum: `2^(γ−1)`.
pub fn superposition_ratio<T: Real>(v: T, display_gamma: T) -> Result<T> {
    if !(v > T::zero()) {
        return Err(Error::InvalidSetup(format!(
            "encoded value must be positive, got {v}"
        )));
    }
    if T::two() * v > T::one() {
        return Err(Error::SuperpositionOverflow(v.to_f64_lossy()));
    }
    if !(display_gamma > T::zero()) {
        return Err(Error::InvalidGamma(display_gamma.to_f64_lossy()));
    }
    Ok(displayed_luminance(T::two() * v, display_gamma) / (T::two() * displayed_luminance(v, display_gamma)))
}

/// Superposition ratio measured on a naive three-panel render: left panel lit
/// by light A, middle by B, right by both summed in device space.
///
/// Uses the brightest pixel at which A and B agree exactly; the device value
/// of the sum is clamped to 1 as a display would.
pub fn measured_superposition_ratio<T: Real>(naive: &Framebuffer<T>, display_gamma: T) -> Result<T> {
    if !naive.width().is_multiple_of(3) {
        return Err(Error::InvalidSetup("expected three equal panels side by side".into()));
    }
    if !(display_gamma > T::zero()) {
        return Err(Error::InvalidGamma(display_gamma.to_f64_lossy()));
    }
    let w = naive.width() / 3;
    let mut best: Option<(T, T)> = None;
    for y in 0..naive.height() {
        for x in 0..w {
            let a = naive.get(x, y).max_channel();
            let b = naive.get(x + w, y).max_channel();
            if a > T::zero() && a == b && best.is_none_or(|(v, _)| a > v) {
                best = Some((a, naive.get(x + 2 * w, y).max_channel()));
            }
        }
    }
    let (v, sum) = best.ok_or_else(|| Error::InvalidSetup("no pixel is lit equally by both lights".into()))?;
    let v = v.min(T::one());
    let sum = sum.min(T::one());
    Ok(displayed_luminance(sum, display_gamma) / (T::two() * displayed_luminance(v, display_gamma)))
}

/// Fraction of the first sphere's pixels that are exactly black.
pub fn dark_fraction<T: Real>(fb: &Framebuffer<T>, scene: &Scene<T>) -> Result<T> {
    check_dims(fb, scene)?;
    let (index, _, _) = first_sphere(scene)?;
    let samples = patch_samples(scene, index)?;
    let (mut on, mut dark) = (0usize, 0usize);
    for (k, s) in samples.iter().enumerate() {
        if s.is_some() {
            on += 1;
            if fb.pixels()[k].max_channel() == T::zero() {
                dark += 1;
            }
        }
    }
    if on == 0 {
        return Err(Error::SphereNotFound);
    }
    Ok(T::of_usize(dark) / T::of_usize(on))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverflowStats<T> {
    pub fraction: T,
    pub max_value: T,
    /// Largest neighbour difference of the clamped image inside the overflow region.
    pub plateau_gradient: T,
}

pub fn overflow_stats<T: Real>(fb: &Framebuffer<T>) -> OverflowStats<T> {
    let (w, h) = (fb.width(), fb.height());
    let mask = fb.overflow_mask();
    let count = mask.iter().filter(|&&m| m).count();
    let max_value = fb
        .pixels()
        .iter()
        .map(|p| p.max_channel())
        .fold(T::zero(), T::max);
    let mut plateau_gradient = T::zero();
    let diff = |a: Rgb<T>, b: Rgb<T>| {
        let (a, b) = (a.clamp01(), b.clamp01());
        (a.r - b.r).abs().max((a.g - b.g).abs()).max((a.b - b.b).abs())
    };
    for y in 0..h {
        for x in 0..w {
            if !fb.is_overflowed(x, y) {
                continue;
            }
            if x + 1 < w && fb.is_overflowed(x + 1, y) {
                plateau_gradient = plateau_gradient.max(diff(fb.get(x, y), fb.get(x + 1, y)));
            }
            if y + 1 < h && fb.is_overflowed(x, y + 1) {
                plateau_gradient = plateau_gradient.max(diff(fb.get(x, y), fb.get(x, y + 1)));
            }
        }
    }
    OverflowStats {
        fraction: if w * h == 0 {
            T::zero()
        } else {
            T::of_usize(count) / T::of_usize(w * h)
        },
        max_value,
        plateau_gradient,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImageDifference<T> {
    pub max_abs: T,
    pub mean_abs: T,
}

/// Channel-wise statistics of `|a − b|`.
pub fn image_difference<T: Real>(a: &Framebuffer<T>, b: &Framebuffer<T>) -> Result<ImageDifference<T>> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::DimensionMismatch(a.width(), a.height(), b.width(), b.height()));
    }
    let mut max_abs = T::zero();
    let mut sum = T::zero();
    for (p, q) in a.pixels().iter().zip(b.pixels()) {
        for (x, y) in p.channels().into_iter().zip(q.channels()) {
            let d = (x - y).abs();
            max_abs = max_abs.max(d);
            sum += d;
        }
    }
    let n = a.pixels().len() * 3;
    Ok(ImageDifference {
        max_abs,
        mean_abs: if n == 0 { T::zero() } else { sum / T::of_usize(n) },
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TerminatorProfile<T> {
    /// Largest angle between normal and light direction among sphere pixels
    /// whose encoded value exceeds 1/255; `None` without a directional light.
    pub confinement_angle: Option<T>,
    /// Normal change between neighbouring pixels at the confinement pixel.
    pub pixel_angle: T,
    /// Largest encoded difference between neighbouring sphere pixels near `N·L = 0`.
    pub max_gradient: T,
    /// Every sphere pixel with `N·L < 0` is exactly zero in the linear image.
    pub dark_side_is_zero: bool,
    /// Every sphere pixel with `N·L > 0` is non-zero in the linear image.
    pub lit_side_is_lit: bool,
}

/// Width of the band `|N·L| < TERMINATOR_BAND` searched for the steepest break.
pub const TERMINATOR_BAND: f64 = 0.1;

/// Hardness and position of the light break on a sphere lit by one directional light.
pub fn terminator_profile<T: Real>(
    fb: &Framebuffer<T>,
    scene: &Scene<T>,
    tf: &TransferFunction<T>,
) -> Result<TerminatorProfile<T>> {
    check_dims(fb, scene)?;
    let (index, _, _) = first_sphere(scene)?;
    let samples = patch_samples(scene, index)?;
    if samples.iter().all(Option::is_none) {
        return Err(Error::SphereNotFound);
    }
    let to_light = scene.lights.iter().find_map(|l| match l {
        LightSource::Directional { dir, .. } => Some(-*dir),
        _ => None,
    });
    let encoded = fb.encoded(tf)?;
    let w = fb.width();
    let threshold = T::one() / T::of(255.0);
    let band = T::of(TERMINATOR_BAND);

    let n_dot_l = |k: usize| -> Option<T> { Some(samples[k]?.0.dot(to_light?)) };
    let neighbours = |k: usize| {
        let (x, y) = (k % w, k / w);
        [
            (x + 1 < w).then(|| k + 1),
            (k + w < samples.len()).then(|| k + w),
            (x > 0).then(|| k - 1),
            (y > 0).then(|| k - w),
        ]
    };

    let mut confinement: Option<(T, usize)> = None;
    let mut max_gradient = T::zero();
    let mut dark_side_is_zero = true;
    let mut lit_side_is_lit = true;
    for k in 0..samples.len() {
        let Some((n, _)) = samples[k] else { continue };
        if let Some(l) = to_light {
            let c = n.dot(l);
            let linear = fb.pixels()[k].max_channel();
            if c < T::zero() && linear != T::zero() {
                dark_side_is_zero = false;
            }
            if c > T::zero() && linear == T::zero() {
                lit_side_is_lit = false;
            }
            if encoded[k].max_channel() > threshold {
                let angle = n.angle_to(l);
                if confinement.is_none_or(|(a, _)| angle > a) {
                    confinement = Some((angle, k));
                }
            }
        }
        let near = n_dot_l(k).is_none_or(|c| c.abs() < band);
        for nb in neighbours(k).into_iter().take(2).flatten() {
            if samples[nb].is_none() {
                continue;
            }
            let nb_near = n_dot_l(nb).is_none_or(|c| c.abs() < band);
            if near || nb_near {
                let d = (encoded[k].max_channel() - encoded[nb].max_channel()).abs();
                max_gradient = max_gradient.max(d);
            }
        }
    }

    let pixel_angle = confinement.map_or(T::zero(), |(_, k)| {
        let n = samples[k].expect("confinement pixel is on the sphere").0;
        neighbours(k)
            .into_iter()
            .flatten()
            .filter_map(|nb| samples[nb].map(|(m, _)| m.angle_to(n)))
            .fold(T::zero(), T::max)
    });
    Ok(TerminatorProfile {
        confinement_angle: confinement.map(|(a, _)| a),
        pixel_angle,
        max_gradient,
        dark_side_is_zero,
        lit_side_is_lit,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShadowContrast<T> {
    /// Mean luminance of floor pixels within 0.7 radii of the contact point.
    pub under_mean: T,
    /// Mean luminance of floor pixels 3–4 radii from the contact point.
    pub ring_mean: T,
    pub ratio: T,
    /// Size of the connected darkened floor region touching the contact area.
    pub region_px: usize,
    /// The darkened region is one 4-connected component covering at least 90%
    /// of the visible floor pixels near the contact point.
    pub connected: bool,
}

pub const SHADOW_UNDER_RADII: f64 = 0.7;
pub const SHADOW_RING_RADII: (f64, f64) = (3.0, 4.0);
pub const SHADOW_DARKENING: f64 = 0.8;

/// Cast-shadow signal of a sphere resting on a plane: floor luminance under
/// the ball against a ring of open floor.
pub fn shadow_contrast<T: Real>(fb: &Framebuffer<T>, scene: &Scene<T>) -> Result<ShadowContrast<T>> {
    check_dims(fb, scene)?;
    let (_, center, radius) = first_sphere(scene)?;
    let (floor, point, normal) = scene
        .patches
        .iter()
        .enumerate()
        .find_map(|(i, (p, _))| match p {
            SurfacePatch::Plane { point, normal, .. } => Some((i, *point, *normal)),
            _ => None,
        })
        .ok_or_else(|| Error::InvalidSetup("shadow contrast needs a floor plane".into()))?;
    let contact = center - normal * (center - point).dot(normal);
    let frame = scene.camera.frame()?;
    let (w, h) = (frame.width, frame.height);

    // Distance (in radii) from the contact point for every floor pixel.
    let mut dist = vec![None; w * h];
    for j in 0..h {
        for i in 0..w {
            let ray = frame.primary_ray(i, j);
            if let Some((hit, k)) = scene.nearest_hit(&ray, T::zero(), T::infinity()) {
                if k == floor {
                    dist[j * w + i] = Some((hit.point - contact).norm() / radius);
                }
            }
        }
    }
    let lum = |k: usize| fb.pixels()[k].luminance();
    let mean_where = |pred: &dyn Fn(T) -> bool| {
        let (sum, n) = dist
            .iter()
            .enumerate()
            .filter(|(_, d)| d.is_some_and(pred))
            .fold((T::zero(), 0usize), |(s, n), (k, _)| (s + lum(k), n + 1));
        (n > 0).then(|| sum / T::of_usize(n))
    };
    let under = T::of(SHADOW_UNDER_RADII);
    let (r0, r1) = (T::of(SHADOW_RING_RADII.0), T::of(SHADOW_RING_RADII.1));
    let under_mean = mean_where(&|d| d < under)
        .ok_or_else(|| Error::InvalidSetup("floor under the sphere is not visible".into()))?;
    let ring_mean = mean_where(&|d| d >= r0 && d <= r1)
        .ok_or_else(|| Error::InvalidSetup("floor ring around the sphere is not visible".into()))?;

    let dark_level = ring_mean * T::of(SHADOW_DARKENING);
    let is_dark = |k: usize| dist[k].is_some() && lum(k) < dark_level;
    let under_px: Vec<usize> = (0..w * h).filter(|&k| dist[k].is_some_and(|d| d < under)).collect();
    let seed = under_px
        .iter()
        .copied()
        .filter(|&k| is_dark(k))
        .min_by(|&a, &b| dist[a].partial_cmp(&dist[b]).unwrap_or(std::cmp::Ordering::Equal));

    let mut region_px = 0;
    let mut covered = 0;
    if let Some(seed) = seed {
        let mut seen = vec![false; w * h];
        let mut stack = vec![seed];
        seen[seed] = true;
        while let Some(k) = stack.pop() {
            region_px += 1;
            if dist[k].is_some_and(|d| d < under) {
                covered += 1;
            }
            let (x, y) = (k % w, k / w);
            let nbs = [
                (x > 0).then(|| k - 1),
                (x + 1 < w).then(|| k + 1),
                (y > 0).then(|| k - w),
                (y + 1 < h).then(|| k + w),
            ];
            for nb in nbs.into_iter().flatten() {
                if !seen[nb] && is_dark(nb) {
                    seen[nb] = true;
                    stack.push(nb);
                }
            }
        }
    }
    let connected = seed.is_some() && covered * 10 >= under_px.len() * 9;
    Ok(ShadowContrast {
        under_mean,
        ring_mean,
        ratio: under_mean / ring_mean,
        region_px,
        connected,
    })
}
