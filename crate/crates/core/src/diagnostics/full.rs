use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use super::*;
use crate::error::{Error, Result};
use crate::figures::{self, FigureId, Variant, FAR_BALL, NEAR_BALL};
use crate::geom::Camera;
use crate::illumination::{sky_irradiance, Material};
use crate::render::{default_workers, render_with_workers, RenderOptions};

/// Group of diagnostics to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AuditKind {
    Energy,
    HalfAngle,
    Cutoff,
    Superposition,
    Overflow,
    Terminator,
    All,
}

impl AuditKind {
    pub const ALL: [AuditKind; 7] = [
        AuditKind::Energy,
        AuditKind::HalfAngle,
        AuditKind::Cutoff,
        AuditKind::Superposition,
        AuditKind::Overflow,
        AuditKind::Terminator,
        AuditKind::All,
    ];

    pub fn token(self) -> &'static str {
        match self {
            AuditKind::Energy => "energy",
            AuditKind::HalfAngle => "halfangle",
            AuditKind::Cutoff => "cutoff",
            AuditKind::Superposition => "superposition",
            AuditKind::Overflow => "overflow",
            AuditKind::Terminator => "terminator",
            AuditKind::All => "all",
        }
    }
}

impl fmt::Display for AuditKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for AuditKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AuditKind::ALL
            .into_iter()
            .find(|k| k.token() == s)
            .ok_or_else(|| Error::InvalidSetup(format!("unknown audit '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuditConfig {
    pub kind: AuditKind,
    /// Overrides the per-diagnostic default exponent (5 and 6 for energy,
    /// 127 for highlight size, 10 for the cutoff).
    pub shininess: Option<f64>,
    pub gamma: f64,
    /// Specular model audited by the cutoff diagnostic.
    pub model: SpecularModel,
    pub size: usize,
    pub workers: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            kind: AuditKind::All,
            shininess: None,
            gamma: 2.2,
            model: SpecularModel::Classic,
            size: figures::FIGURE_SIZE,
            workers: default_workers(),
        }
    }
}

/// Quadrature size for the energy integrals.
pub const ENERGY_SAMPLES: usize = 1 << 18;
const CROSSING_SAMPLES: usize = 1 << 14;
const SKY_CHECK_SAMPLES: usize = 1 << 16;

fn v3<T: Real>(x: f64, y: f64, z: f64) -> Vector3<T> {
    Vector3::from_f64(x, y, z)
}

fn sphere_view<T: Real>(size: usize, material: Material<T>) -> Scene<T> {
    let camera = Camera::orthographic(
        v3(0.0, 0.0, 10.0),
        v3(0.0, 0.0, -1.0),
        Vector3::unit_y(),
        (size, size),
        T::of(2.05),
    );
    let mut scene = Scene::new(camera);
    scene
        .patches
        .push((SurfacePatch::sphere(Vector3::zero(), T::one()), material));
    scene
}

/// Specular-only unit sphere lit along the view axis, for highlight sizing.
pub fn highlight_scene<T: Real>(m: f64, size: usize) -> Scene<T> {
    let mut scene = sphere_view(size, Material::gray(0.0, 0.0, 1.0, m));
    scene.lights.push(LightSource::directional(v3(0.0, 0.0, -1.0), 1.0));
    scene
}

/// Specular-only sphere with its light `angle_deg` away from the view axis,
/// tilted towards +x.
pub fn cutoff_scene<T: Real>(angle_deg: f64, m: f64, size: usize) -> Scene<T> {
    let a = angle_deg.to_radians();
    let mut scene = sphere_view(size, Material::gray(0.0, 0.0, 1.0, m));
    scene
        .lights
        .push(LightSource::directional(v3(-a.sin(), 0.0, -a.cos()), 1.0));
    scene
}

/// Specular-only sphere under two lights 3° either side of the view axis,
/// whose highlights overlap; at intensity 1 the sum overflows.
pub fn overflow_scene<T: Real>(intensity: f64, size: usize) -> Scene<T> {
    let a = 3f64.to_radians();
    let mut scene = sphere_view(size, Material::gray(0.0, 0.0, 1.0, 10.0));
    for s in [1.0, -1.0] {
        scene
            .lights
            .push(LightSource::directional(v3(s * a.sin(), 0.0, -a.cos()), intensity));
    }
    scene
}

/// Runs the selected diagnostics. Failing sub-diagnostics are recorded as
/// failed entries; the rest still run.
pub fn run_full_report(config: &AuditConfig) -> DiagnosticReport {
    let mut report = DiagnosticReport::new();
    let want = |k: AuditKind| config.kind == k || config.kind == AuditKind::All;
    if want(AuditKind::Energy) {
        energy(config, &mut report);
    }
    if want(AuditKind::HalfAngle) {
        half_angle(config, &mut report);
    }
    if want(AuditKind::Cutoff) {
        cutoff(config, &mut report);
    }
    if want(AuditKind::Superposition) {
        superposition(config, &mut report);
    }
    if want(AuditKind::Overflow) {
        overflow(config, &mut report);
    }
    if want(AuditKind::Terminator) {
        terminator(config, &mut report);
    }
    if config.kind == AuditKind::All {
        scene_rows(config, &mut report);
    }
    report
}

fn shininess_label(m: f64) -> String {
    format!("m{m}").replace('.', "_")
}

fn energy(config: &AuditConfig, report: &mut DiagnosticReport) {
    let ms = config.shininess.map_or(vec![5.0, 6.0], |m| vec![m]);
    for m in ms {
        let label = shininess_label(m);
        report.record(
            &format!("coupling_light_material.energy_unweighted.{label}"),
            energy_ratio(m, EnergyConvention::Unweighted, ENERGY_SAMPLES).map(|e| {
                let oracle = TAU / (m + 1.0);
                Entry::against_oracle(e, oracle, 1e-3 * oracle)
            }),
        );
        report.record(
            &format!("coupling_light_material.energy_cosine_weighted.{label}"),
            energy_ratio(m, EnergyConvention::CosineWeighted, ENERGY_SAMPLES).map(|e| {
                let oracle = TAU / (m + 2.0);
                Entry::against_oracle(e, oracle, 1e-3 * oracle)
            }),
        );
    }
    let c: f64 = energy_crossing(EnergyConvention::Unweighted, CROSSING_SAMPLES);
    report.insert(
        "coupling_light_material.energy_crossing_unweighted",
        Entry::bounded(c, c > 5.0 && c < 6.0, "reflected exceeds received below this m; requires 5 < m < 6"),
    );
    let c: f64 = energy_crossing(EnergyConvention::CosineWeighted, CROSSING_SAMPLES);
    report.insert(
        "coupling_light_material.energy_crossing_cosine_weighted",
        Entry::reported(c, "same crossing with cosine-weighted outgoing energy"),
    );
    report.insert(
        "coupling_light_material.per_object_lighting",
        Entry::documented("documented, not measured"),
    );
}

/// Solves `cos^m α = 1/2` by bisection on `[0, π/2]`.
fn half_angle_by_bisection(m: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, PI / 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if m * mid.cos().ln() > -std::f64::consts::LN_2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn half_angle(config: &AuditConfig, report: &mut DiagnosticReport) {
    let m = config.shininess.unwrap_or(MAX_SHININESS_7BIT);
    let label = shininess_label(m);
    report.record(
        &format!("highlight_size.half_angle.{label}"),
        highlight_half_angle(m).map(|a| Entry::against_oracle(a, half_angle_by_bisection(m), 1e-9)),
    );
    if m == MAX_SHININESS_7BIT {
        report.record(
            "highlight_size.half_angle_reference",
            highlight_half_angle(m).map(|a| {
                Entry::against_oracle(a, 0.10448, 1e-4)
                    .with_note("largest 7-bit exponent gives highlights no smaller than ~6°")
            }),
        );
    }
    let sun: Result<Vec<f64>> = [5000.0, 10000.0]
        .into_iter()
        .map(|m| highlight_half_angle(m).map(f64::to_degrees))
        .collect();
    report.record(
        "highlight_size.sun_range_deg",
        sun.map(|d| {
            let pass = d.iter().any(|&a| (0.87..=1.0).contains(&a));
            Entry::bounded(d, pass, "half angles at m = 5000 and 10000; one must lie in [0.87°, 1°]")
        }),
    );
    let measured = (|| {
        let scene = highlight_scene::<f64>(m, config.size);
        let fb = render_with_workers(&scene, &RenderOptions::default(), config.workers)?;
        let size = measure_highlight_size(&fb, &scene)?;
        Ok::<_, Error>(
            Entry::against_oracle(size.half_angle, highlight_half_angle(m)?, size.pixel_angle)
                .with_note("tolerance is the angular size of one pixel at the rim"),
        )
    })();
    report.record(&format!("highlight_size.measured.{label}"), measured);
}

const MAX_SHININESS_7BIT: f64 = crate::illumination::MAX_7BIT_SHININESS;

fn cutoff(config: &AuditConfig, report: &mut DiagnosticReport) {
    let m = config.shininess.unwrap_or(10.0);
    let angle = 120.0f64;
    let scene = cutoff_scene::<f64>(angle, m, config.size);
    let entry = cutoff_discontinuity(&scene, config.model).map(|c| match config.model {
        SpecularModel::Classic => {
            // Along the terminator R = −L, so the lit-side lobe is (−L·V)^m everywhere.
            let oracle = (-angle.to_radians().cos()).max(0.0).powf(m);
            Entry::against_oracle(c.max_jump, oracle, 1e-3)
        }
        SpecularModel::Modified { .. } => Entry::at_most(c.max_jump, 1e-6),
    });
    report.record("highlight_cutoff.jump", entry);

    let mut headlit = scene.clone();
    headlit.lights = vec![LightSource::headlight(1.0)];
    report.record(
        "highlight_cutoff.headlight_jump",
        cutoff_discontinuity(&headlit, SpecularModel::Classic).map(|c| Entry::at_most(c.max_jump, 1e-6)),
    );
}

fn superposition(config: &AuditConfig, report: &mut DiagnosticReport) {
    let g = config.gamma;
    let oracle = 2f64.powf(g - 1.0);
    report.record(
        "superadditivity.closed_form",
        superposition_ratio(0.5, g).map(|r| Entry::against_oracle(r, oracle, 1e-12)),
    );
    // Each light alone displays 0.25² = 1/16; together (0.5)² = 4/16.
    report.record(
        "superadditivity.one_plus_one",
        superposition_ratio(0.25, 2.0).map(|r| Entry::against_oracle(2.0 * r, 4.0, 1e-12)),
    );
    let measured = (|| {
        let spec = figures::build_sized::<f64>(FigureId::Fig6Pair, None, config.size)?;
        let fb = figures::render_options(&spec, &spec.options, config.workers)?;
        measured_superposition_ratio(&fb, g)
    })();
    report.record(
        "superadditivity.image_path",
        measured.map(|r| Entry::against_oracle(r, oracle, 1.0 / 255.0)),
    );
}

fn overflow(config: &AuditConfig, report: &mut DiagnosticReport) {
    let run = |intensity: f64| {
        let scene = overflow_scene::<f64>(intensity, config.size);
        render_with_workers(&scene, &RenderOptions::default(), config.workers).map(|fb| overflow_stats(&fb))
    };
    match run(1.0) {
        Ok(s) => {
            report.insert(
                "highlight_overflow.fraction",
                Entry::bounded(s.fraction, s.fraction > 0.0, "requires value > 0"),
            );
            report.insert(
                "highlight_overflow.plateau_gradient",
                Entry::against_oracle(s.plateau_gradient, 0.0, 0.0),
            );
        }
        Err(e) => report.insert("highlight_overflow.fraction", Entry::failed(e.to_string())),
    }
    report.record(
        "highlight_overflow.halved_fraction",
        run(0.5).map(|s| Entry::against_oracle(s.fraction, 0.0, 0.0)),
    );
}

fn terminator(config: &AuditConfig, report: &mut DiagnosticReport) {
    let result = (|| {
        let spec = figures::build_sized::<f64>(FigureId::Fig5Pair, None, config.size)?;
        let fb = render_with_workers(&spec.scene, &spec.options, config.workers)?;
        let identity = terminator_profile(&fb, &spec.scene, &TransferFunction::Identity)?;
        let gamma = terminator_profile(&fb, &spec.scene, &TransferFunction::power_law(config.gamma)?)?;
        Ok::<_, Error>((identity, gamma))
    })();
    match result {
        Ok((identity, gamma)) => {
            for (name, p) in [("identity", identity), ("gamma", gamma)] {
                let bound = PI / 2.0 + p.pixel_angle;
                report.insert(
                    format!("illumination_terminator.confinement_{name}"),
                    match p.confinement_angle {
                        Some(a) => Entry::at_most(a, bound),
                        None => Entry::failed("no lit pixel found"),
                    },
                );
            }
            report.insert(
                "illumination_terminator.zero_exactly_where_unlit",
                Entry::bounded(
                    f64::from(u8::from(identity.dark_side_is_zero && identity.lit_side_is_lit)),
                    identity.dark_side_is_zero && identity.lit_side_is_lit,
                    "1 when pixels are zero exactly where N·L < 0",
                ),
            );
            let ratio = gamma.max_gradient / identity.max_gradient;
            report.insert(
                "illumination_terminator.gradient_ratio",
                Entry::at_least(ratio, 1.5),
            );
        }
        Err(e) => report.insert("illumination_terminator.gradient_ratio", Entry::failed(e.to_string())),
    }

    let ambient = (|| {
        let mut scene = sphere_view::<f64>(config.size, Material::gray(1.0, 1.0, 0.0, 1.0));
        scene.lights.push(LightSource::ambient(0.5));
        let fb = render_with_workers(&scene, &RenderOptions::default(), config.workers)?;
        terminator_profile(&fb, &scene, &TransferFunction::Identity)
    })();
    report.record(
        "ambient_light.gradient",
        ambient.map(|p| Entry::against_oracle(p.max_gradient, 0.0, 1e-12).with_note("ambient-only shading is flat")),
    );
}

fn plate_difference(id: FigureId, config: &AuditConfig) -> Result<f64> {
    let render = |v: Variant| -> Result<Framebuffer<f64>> {
        let spec = figures::build_sized::<f64>(id, Some(v), config.size)?;
        render_with_workers(&spec.scene, &spec.options, config.workers)
    };
    Ok(image_difference(&render(Variant::Bump)?, &render(Variant::Dent)?)?.max_abs)
}

fn scene_rows(config: &AuditConfig, report: &mut DiagnosticReport) {
    let dark = (|| {
        let spec = figures::build_sized::<f64>(FigureId::Fig5Pair, None, config.size)?;
        let fb = render_with_workers(&spec.scene, &spec.options, config.workers)?;
        let l = match spec.scene.lights[0] {
            LightSource::Directional { dir, .. } => -dir,
            _ => unreachable!("fig5 uses one directional light"),
        };
        // Unlit share of the visible disc: (1 − cos β)/2 for light–view angle β.
        let oracle = (1.0 - l.dot(Vector3::unit_z())) / 2.0;
        Ok::<_, Error>(Entry::against_oracle(dark_fraction(&fb, &spec.scene)?, oracle, 0.01))
    })();
    report.record("collimated_light_only.dark_fraction", dark);
    report.insert(
        "collimated_light_only.sky_irradiance_horizontal",
        {
            let e: f64 = sky_irradiance(Vector3::unit_y(), 1.0, Vector3::unit_y(), None, SKY_CHECK_SAMPLES);
            let oracle = 7.0 * PI / 9.0;
            Entry::against_oracle(e, oracle, 5e-3 * oracle)
                .with_note("diffuse sky light a collimated-only pipeline lacks")
        },
    );
    report.record(
        "headlight.bump_dent_max_abs",
        plate_difference(FigureId::Fig2a, config).map(|d| {
            Entry::against_oracle(d, 0.0, 0.0).with_note("bumps and dents are indistinguishable")
        }),
    );
    report.record(
        "collimated_light_only.bump_dent_max_abs",
        plate_difference(FigureId::Fig2b, config).map(|d| Entry::at_least(d, 0.1)),
    );
    report.record(
        "many_lights.bump_dent_max_abs",
        plate_difference(FigureId::Fig2d, config)
            .map(|d| Entry::reported(d, "bump/dent contrast under eight lights")),
    );
    report.insert("moving_lights", Entry::documented("documented, not measured"));

    let shadows = (|| {
        let mut ratios = Vec::new();
        let mut connected = Vec::new();
        for id in [FigureId::Fig1a, FigureId::Fig1b, FigureId::Fig1c, FigureId::Fig1d, FigureId::Fig1e] {
            let spec = figures::build_sized::<f64>(id, None, config.size)?;
            let fb = render_with_workers(&spec.scene, &spec.options, config.workers)?;
            let s = shadow_contrast(&fb, &spec.scene)?;
            ratios.push(s.ratio);
            connected.push(s.connected);
        }
        let shadowed = ratios[4] < SHADOW_DARKENING && connected[4];
        let others_open = ratios[..4]
            .iter()
            .zip(&connected)
            .all(|(&r, &c)| r >= SHADOW_DARKENING || !c);
        Ok::<_, Error>(Entry::bounded(
            ratios,
            shadowed && others_open,
            "floor luminance under the ball / open ring for fig1a..fig1e; only fig1e may fall below 0.8",
        ))
    })();
    report.record("no_cast_shadows.floor_ratio", shadows);

    let areas = (|| {
        let spec = figures::build_sized::<f64>(FigureId::Fig7, None, config.size)?;
        figures::highlight_areas(&spec.scene, &[NEAR_BALL, FAR_BALL])
    })();
    report.record(
        "coupling_light_material.highlight_areas",
        areas.map(|a| {
            Entry::bounded(
                a.iter().map(|&n| n as f64).collect::<Vec<_>>(),
                a[1] >= a[0],
                "half-max highlight pixels [near ball, far ball]; far must not be smaller",
            )
        }),
    );
}
