use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use shadelab_core::diagnostics::{run_full_report, AuditConfig, AuditKind};
use shadelab_core::figures::{self, FigureId, RenderedFigure, Variant, FIGURE_SIZE};
use shadelab_core::illumination::SpecularModel;
use shadelab_core::image::TransferFunction;
use shadelab_core::io::{write_image, write_linear};
use shadelab_core::render::{default_workers, render_with_workers, RenderOptions, Shadows, Superposition};
use shadelab_core::scene_file::load_scene;
use shadelab_core::{Error, Result};

/// Render the reference figures and audit the artifacts of fixed-function
/// Phong lighting.
///
/// The worker count defaults to the machine's parallelism and can be set with
/// the SHADELAB_THREADS environment variable; output never depends on it.
#[derive(Parser, Debug)]
#[command(name = "shadelab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render a built-in figure or a scene file to PPM plus a linear PFM twin.
    Render(RenderArgs),
    /// Run diagnostics and print one PASS/FAIL line per metric.
    Audit(AuditArgs),
    /// List the built-in figure ids.
    ListFigures,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Model {
    Classic,
    Modified,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SuperpositionArg {
    Linear,
    Naive,
}

#[derive(Copy, Clone, Debug, PartialEq)]
enum Gamma {
    None,
    Srgb,
    Power(f64),
}

fn parse_gamma(s: &str) -> std::result::Result<Gamma, String> {
    match s {
        "none" => Ok(Gamma::None),
        "srgb" => Ok(Gamma::Srgb),
        _ => match s.parse::<f64>() {
            Ok(g) if g.is_finite() && g > 0.0 => Ok(Gamma::Power(g)),
            _ => Err(format!("expected a positive number, `srgb` or `none`, got `{s}`")),
        },
    }
}

fn parse_figure(s: &str) -> std::result::Result<FigureId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_variant(s: &str) -> std::result::Result<Variant, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_audit(s: &str) -> std::result::Result<AuditKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_size(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("expected a positive pixel count, got `{s}`")),
    }
}

#[derive(Args, Debug)]
struct RenderArgs {
    /// Built-in figure id (see list-figures).
    #[arg(long, value_parser = parse_figure, conflicts_with = "scene", required_unless_present = "scene")]
    figure: Option<FigureId>,
    /// Scene description file.
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Plate layout for fig2a..fig2e: bump, dent, mixed or tilted [default: mixed].
    #[arg(long, value_parser = parse_variant, requires = "figure")]
    variant: Option<Variant>,
    /// Specular model [default: the figure's own, classic].
    #[arg(long, value_enum)]
    model: Option<Model>,
    /// Normalize the modified specular lobe by (m+2)/2π.
    #[arg(long)]
    normalized: bool,
    /// Output transfer function: a power-law exponent, `srgb` or `none`
    /// [default: the figure's own, none].
    #[arg(long, value_parser = parse_gamma)]
    gamma: Option<Gamma>,
    /// Cast shadows [default: on for fig1e/fig2e, off otherwise].
    #[arg(long, value_enum)]
    shadows: Option<OnOff>,
    /// How light contributions are summed [default: the figure's own, linear].
    #[arg(long, value_enum)]
    superposition: Option<SuperpositionArg>,
    /// Square image size in pixels.
    #[arg(long, value_parser = parse_size, default_value_t = FIGURE_SIZE)]
    size: usize,
    /// Output PPM path; the PFM twin gets the same stem. Pairs add
    /// `_naive`/`_corrected` to the stem [default: <id>[_variant].ppm].
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AuditArgs {
    /// energy, halfangle, cutoff, superposition, overflow, terminator or all.
    #[arg(value_parser = parse_audit)]
    kind: AuditKind,
    /// Shininess exponent overriding the per-diagnostic defaults.
    #[arg(long, allow_hyphen_values = true)]
    shininess: Option<f64>,
    /// Display gamma for the superposition and terminator diagnostics.
    #[arg(long, default_value_t = 2.2)]
    gamma: f64,
    /// Specular model audited by the cutoff diagnostic.
    #[arg(long, value_enum, default_value_t = Model::Classic)]
    model: Model,
    /// Normalize the modified specular lobe by (m+2)/2π.
    #[arg(long)]
    normalized: bool,
    /// Image size for rendered measurements.
    #[arg(long, value_parser = parse_size, default_value_t = FIGURE_SIZE)]
    size: usize,
    /// Also write the report as JSON to this path.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Exit with status 2 if any metric fails.
    #[arg(long)]
    strict: bool,
}

fn specular_model(model: Model, normalized: bool) -> SpecularModel {
    match model {
        Model::Classic => SpecularModel::Classic,
        Model::Modified => SpecularModel::Modified { normalized },
    }
}

fn apply_overrides(args: &RenderArgs, o: &mut RenderOptions<f64>) {
    if let Some(m) = args.model {
        o.specular_model = specular_model(m, args.normalized);
    } else if args.normalized {
        o.specular_model = SpecularModel::Modified { normalized: true };
    }
    if let Some(g) = args.gamma {
        o.output_tf = match g {
            Gamma::None => TransferFunction::Identity,
            Gamma::Srgb => TransferFunction::SrgbPiecewise,
            Gamma::Power(g) => TransferFunction::PowerLaw { gamma: g },
        };
    }
    if let Some(s) = args.shadows {
        o.shadows = match s {
            OnOff::On => Shadows::On,
            OnOff::Off => Shadows::Off,
        };
    }
    if let Some(s) = args.superposition {
        o.superposition = match s {
            SuperpositionArg::Linear => Superposition::LinearThenEncode,
            SuperpositionArg::Naive => Superposition::NaiveEncodedSum,
        };
    }
}

/// `dir/stem.ppm` → `dir/stem_suffix.ppm`.
fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    if suffix.is_empty() {
        return path.to_path_buf();
    }
    let stem = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let mut name = format!("{stem}_{suffix}");
    if let Some(ext) = path.extension() {
        name.push('.');
        name.push_str(&ext.to_string_lossy());
    }
    path.with_file_name(name)
}

fn run_render(args: &RenderArgs) -> Result<()> {
    let workers = default_workers();
    let (base, images): (String, Vec<(String, RenderedFigure<f64>)>) = match (&args.figure, &args.scene) {
        (Some(id), _) => {
            let spec = figures::build_sized::<f64>(*id, args.variant, args.size)?
                .map_options(|o| apply_overrides(args, o));
            let base = spec.name();
            let rendered = figures::render_figure(&spec, workers)?;
            let images = rendered
                .into_iter()
                .map(|r| {
                    let suffix = r.name.strip_prefix(&base).unwrap_or("").trim_start_matches('_').to_owned();
                    (suffix, r)
                })
                .collect();
            (base, images)
        }
        (None, Some(path)) => {
            let scene = load_scene::<f64>(path)?;
            let mut options = RenderOptions::default();
            apply_overrides(args, &mut options);
            let base = path
                .file_stem()
                .map_or_else(|| "scene".to_owned(), |s| s.to_string_lossy().into_owned());
            let fb = render_with_workers(&scene, &options, workers)?;
            let image = RenderedFigure {
                name: base.clone(),
                framebuffer: fb,
                output_tf: options.output_tf,
            };
            (base.clone(), vec![(String::new(), image)])
        }
        (None, None) => unreachable!("clap requires --figure or --scene"),
    };

    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(format!("{base}.ppm")));
    for (suffix, image) in images {
        let ppm = with_suffix(&out, &suffix);
        let pfm = ppm.with_extension("pfm");
        write_image(&image.framebuffer, &image.output_tf, &ppm)?;
        write_linear(&image.framebuffer, &pfm)?;
        println!("{}", ppm.display());
        println!("{}", pfm.display());
    }
    Ok(())
}

/// Returns whether every metric passed.
fn run_audit(args: &AuditArgs) -> Result<bool> {
    if !(args.gamma.is_finite() && args.gamma > 0.0) {
        return Err(Error::InvalidGamma(args.gamma));
    }
    let config = AuditConfig {
        kind: args.kind,
        shininess: args.shininess,
        gamma: args.gamma,
        model: specular_model(args.model, args.normalized),
        size: args.size,
        workers: default_workers(),
    };
    let report = run_full_report(&config);
    for line in report.summary_lines() {
        println!("{line}");
    }
    if let Some(path) = &args.json {
        std::fs::write(path, report.to_json() + "\n").map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
    }
    Ok(report.all_pass())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Render(args) => run_render(args).map(|()| true),
        Command::Audit(args) => run_audit(args).map(|ok| ok || !args.strict),
        Command::ListFigures => {
            for id in FigureId::ALL {
                println!("{:<10} {}", id.token(), id.description());
            }
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
