//! Acceptance criteria: one PASS/FAIL line per criterion, with wall time
//! against its budget. Exits non-zero if any criterion fails.

mod common;

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use shadelab_core::diagnostics::{
    cutoff_discontinuity, energy_crossing, energy_ratio, highlight_half_angle, highlight_scene, image_difference,
    measure_highlight_size, measured_superposition_ratio, overflow_scene, overflow_stats, shadow_contrast,
    superposition_ratio, terminator_profile, EnergyConvention,
};
use shadelab_core::figures::{self, build, build_sized, FigureId, Variant, FIGURE_SIZE};
use shadelab_core::illumination::{sky_irradiance, SpecularModel, DEFAULT_SKY_SAMPLES};
use shadelab_core::image::{displayed_luminance, TransferFunction};
use shadelab_core::io::{ppm_bytes, read_pfm, write_linear};
use shadelab_core::render::{default_workers, render_with_workers, RenderOptions};
use shadelab_core::Vec3;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn energy() -> Check {
    let n = shadelab_core::diagnostics::ENERGY_SAMPLES;
    let e5: f64 = energy_ratio(5.0, EnergyConvention::Unweighted, n).map_err(err)?;
    let e6: f64 = energy_ratio(6.0, EnergyConvention::Unweighted, n).map_err(err)?;
    let (o5, o6) = (TAU / 6.0, TAU / 7.0);
    ensure((e5 - o5).abs() <= 1e-3 * o5, format!("E(5) = {e5}, expected {o5} ± 0.1%"))?;
    ensure((e6 - o6).abs() <= 1e-3 * o6, format!("E(6) = {e6}, expected {o6} ± 0.1%"))?;
    let c: f64 = energy_crossing(EnergyConvention::Unweighted, 1 << 14);
    ensure(c > 5.0 && c < 6.0, format!("crossing at m = {c}"))?;
    Ok(format!("E(5) = {e5:.5}, E(6) = {e6:.5}, crossing m = {c:.4}"))
}

fn highlight_size(workers: usize) -> Check {
    let a: f64 = highlight_half_angle(127.0).map_err(err)?;
    ensure((a - 0.10448).abs() <= 1e-4, format!("half angle(127) = {a}"))?;
    let sun: Vec<f64> = [5000.0, 7500.0, 10000.0]
        .into_iter()
        .map(|m| highlight_half_angle(m).map(f64::to_degrees))
        .collect::<Result<_, _>>()
        .map_err(err)?;
    ensure(
        sun.iter().any(|d| (0.87..=1.0).contains(d)),
        format!("no m in [5000, 10000] gives a 0.87°–1° highlight: {sun:?}"),
    )?;
    let scene = highlight_scene::<f64>(127.0, FIGURE_SIZE);
    let fb = render_with_workers(&scene, &RenderOptions::default(), workers).map_err(err)?;
    let h = measure_highlight_size(&fb, &scene).map_err(err)?;
    ensure(
        (h.half_angle - a).abs() <= h.pixel_angle,
        format!("measured {} vs analytic {a}, pixel {}", h.half_angle, h.pixel_angle),
    )?;
    Ok(format!(
        "α(127) = {a:.6} rad, α(5000) = {:.3}°, measured {:.5} ± {:.5} rad",
        sun[0], h.half_angle, h.pixel_angle
    ))
}

fn cutoff() -> Check {
    let mut worst_classic = 0.0f64;
    let mut worst_modified = 0.0f64;
    for (k, scene) in common::random_cutoff_scenes(50, 2024).iter().enumerate() {
        let classic = cutoff_discontinuity(scene, SpecularModel::Classic).map_err(err)?.max_jump;
        let oracle = common::terminator_scan_oracle(scene);
        worst_classic = worst_classic.max((classic - oracle).abs());
        ensure((classic - oracle).abs() <= 1e-3, format!("config {k}: {classic} vs oracle {oracle}"))?;
        let modified = cutoff_discontinuity(scene, SpecularModel::Modified { normalized: false })
            .map_err(err)?
            .max_jump;
        worst_modified = worst_modified.max(modified);
        ensure(modified <= 1e-6, format!("config {k}: modified jump {modified}"))?;
    }
    Ok(format!(
        "50 configs: max |classic − oracle| = {worst_classic:.2e}, max modified jump = {worst_modified:.2e}"
    ))
}

fn superposition(workers: usize) -> Check {
    let gamma = 2.2;
    let oracle = 2f64.powf(gamma - 1.0);
    let closed: f64 = superposition_ratio(0.5, gamma).map_err(err)?;
    ensure((closed - oracle).abs() <= 1e-12, format!("closed form {closed}"))?;
    let one_plus_one = displayed_luminance(0.5f64, 2.0) / displayed_luminance(0.25f64, 2.0);
    ensure((one_plus_one - 4.0).abs() <= 1e-12, format!("γ = 2 gives {one_plus_one}"))?;
    let doubled: f64 = superposition_ratio(0.3, 2.0).map_err(err)?;
    ensure((doubled - 2.0).abs() <= 1e-12, format!("γ = 2 ratio {doubled}"))?;

    // Image path: naive three-panel render written to and read back from a float file.
    let spec = build::<f64>(FigureId::Fig6Pair).map_err(err)?;
    let fb = figures::render_options(&spec, &spec.options, workers).map_err(err)?;
    let dir = tempfile::tempdir().map_err(err)?;
    let path = dir.path().join("fig6_naive.pfm");
    write_linear(&fb, &path).map_err(err)?;
    let back = read_pfm::<f64>(&path).map_err(err)?;
    let measured = measured_superposition_ratio(&back, gamma).map_err(err)?;
    ensure(
        (measured - oracle).abs() <= 1.0 / 255.0,
        format!("image path {measured} vs {oracle}"),
    )?;
    Ok(format!("closed form {closed:.12}, image path {measured:.6}, oracle 2^1.2 = {oracle:.6}"))
}

fn terminator(workers: usize) -> Check {
    let spec = build::<f64>(FigureId::Fig5Pair).map_err(err)?;
    let fb = render_with_workers(&spec.scene, &spec.options, workers).map_err(err)?;
    let id = terminator_profile(&fb, &spec.scene, &TransferFunction::Identity).map_err(err)?;
    let g = terminator_profile(&fb, &spec.scene, &TransferFunction::PowerLaw { gamma: 2.2 }).map_err(err)?;
    for (name, p) in [("identity", &id), ("gamma", &g)] {
        ensure(p.dark_side_is_zero && p.lit_side_is_lit, format!("{name}: zero pixels do not match N·L < 0"))?;
        let a = p.confinement_angle.ok_or("no lit pixels")?;
        ensure(a <= PI / 2.0 + p.pixel_angle, format!("{name}: confinement {a}"))?;
    }
    let ratio = g.max_gradient / id.max_gradient;
    ensure(ratio >= 1.5, format!("gradient ratio {ratio}"))?;
    Ok(format!(
        "confinement {:.4}/{:.4} rad, gradient ratio {ratio:.3}",
        id.confinement_angle.unwrap_or(0.0),
        g.confinement_angle.unwrap_or(0.0)
    ))
}

fn bump_dent(workers: usize) -> Check {
    let render = |id, v| -> Result<shadelab_core::Framebuffer, String> {
        let spec = build_sized::<f64>(id, Some(v), FIGURE_SIZE).map_err(err)?;
        render_with_workers(&spec.scene, &spec.options, workers).map_err(err)
    };
    let (bump, dent) = (render(FigureId::Fig2a, Variant::Bump)?, render(FigureId::Fig2a, Variant::Dent)?);
    let identity = TransferFunction::Identity;
    ensure(
        ppm_bytes(&bump, &identity).map_err(err)? == ppm_bytes(&dent, &identity).map_err(err)?,
        "headlight bump and dent renders differ",
    )?;
    let d = image_difference(&render(FigureId::Fig2b, Variant::Bump)?, &render(FigureId::Fig2b, Variant::Dent)?)
        .map_err(err)?;
    ensure(d.max_abs > 0.1, format!("oblique light difference {}", d.max_abs))?;
    Ok(format!("headlight byte-identical; oblique max |Δ| = {:.4}", d.max_abs))
}

fn sky(workers: usize) -> Check {
    let oracle = common::sky_horizontal_oracle(1.0);
    ensure((oracle - 7.0 * PI / 9.0).abs() < 1e-6, format!("oracle {oracle}"))?;
    let e: f64 = sky_irradiance(Vec3::unit_y(), 1.0, Vec3::unit_y(), None, DEFAULT_SKY_SAMPLES);
    ensure((e / oracle - 1.0).abs() <= 5e-3, format!("irradiance {e} vs {oracle}"))?;
    let mut ratios = Vec::new();
    for id in [FigureId::Fig1a, FigureId::Fig1b, FigureId::Fig1c, FigureId::Fig1d, FigureId::Fig1e] {
        let spec = build::<f64>(id).map_err(err)?;
        let fb = render_with_workers(&spec.scene, &spec.options, workers).map_err(err)?;
        let s = shadow_contrast(&fb, &spec.scene).map_err(err)?;
        if id == FigureId::Fig1e {
            ensure(s.ratio < 0.8 && s.connected, format!("fig1e: {s:?}"))?;
        } else {
            ensure(s.ratio >= 0.8, format!("{id} has a darkened floor: {s:?}"))?;
        }
        ratios.push(format!("{:.3}", s.ratio));
    }
    Ok(format!("E = {e:.5} (7π/9 = {oracle:.5}); floor ratios a..e = [{}]", ratios.join(", ")))
}

fn overflow(workers: usize) -> Check {
    let full = render_with_workers(&overflow_scene::<f64>(1.0, FIGURE_SIZE), &RenderOptions::default(), workers)
        .map_err(err)?;
    let s = overflow_stats(&full);
    ensure(s.fraction > 0.0, "no overflow")?;
    ensure(s.plateau_gradient == 0.0, format!("plateau gradient {}", s.plateau_gradient))?;
    let half = render_with_workers(&overflow_scene::<f64>(0.5, FIGURE_SIZE), &RenderOptions::default(), workers)
        .map_err(err)?;
    let h = overflow_stats(&half);
    ensure(h.fraction == 0.0, format!("halved fraction {}", h.fraction))?;
    Ok(format!("fraction {:.4}, plateau gradient 0, halved fraction 0", s.fraction))
}

fn render_suite(workers: usize) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut out = Vec::new();
    for id in FigureId::ALL {
        let spec = build::<f64>(id).map_err(err)?;
        for image in figures::render_figure(&spec, workers).map_err(err)? {
            out.push((image.name, ppm_bytes(&image.framebuffer, &image.output_tf).map_err(err)?));
        }
    }
    Ok(out)
}

/// Returns the check and the time of the first full suite render alone.
fn determinism(workers: usize) -> (Check, Duration) {
    let start = Instant::now();
    let first = match render_suite(workers) {
        Ok(r) => r,
        Err(e) => return (Err(e), start.elapsed()),
    };
    let suite_time = start.elapsed();
    let check = (|| {
        ensure(first.len() == 15, format!("expected 15 images from 13 figures, got {}", first.len()))?;
        let again = render_suite(workers)?;
        ensure(first == again, "second run differs")?;
        let single = render_suite(1)?;
        ensure(first == single, format!("{workers} workers differ from 1"))?;
        let other = render_suite(workers.max(2) + 1)?;
        ensure(first == other, "worker count changes output")?;
        Ok(format!(
            "13 figures ({} images) byte-identical across runs and 1/{}/{} workers; suite {:.1} s",
            first.len(),
            workers,
            workers.max(2) + 1,
            suite_time.as_secs_f64()
        ))
    })();
    (check, suite_time)
}

fn main() -> ExitCode {
    let workers = default_workers();
    let mut all_pass = true;
    let mut report = |n: usize, name: &str, budget: Duration, run: &mut dyn FnMut() -> (Check, Duration)| {
        let (result, elapsed) = run();
        let within = elapsed <= budget;
        let (status, detail) = match (&result, within) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("{d}; over budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        all_pass &= status == "PASS";
        println!(
            "{status} criterion {n} {name}: {detail} [{:.2} s / {} s]",
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    };
    let timed = |f: &dyn Fn() -> Check| {
        let start = Instant::now();
        let r = f();
        (r, start.elapsed())
    };
    let s = Duration::from_secs;
    report(1, "energy", s(1), &mut || timed(&energy));
    report(2, "highlight size", s(5), &mut || timed(&|| highlight_size(workers)));
    report(3, "cutoff", s(30), &mut || timed(&cutoff));
    report(4, "superposition", s(5), &mut || timed(&|| superposition(workers)));
    report(5, "terminator", s(5), &mut || timed(&|| terminator(workers)));
    report(6, "bump/dent", s(10), &mut || timed(&|| bump_dent(workers)));
    report(7, "sky irradiance", s(60), &mut || timed(&|| sky(workers)));
    report(8, "overflow", s(5), &mut || timed(&|| overflow(workers)));
    report(9, "determinism", s(120), &mut || determinism(workers));
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
