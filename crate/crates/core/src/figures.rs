//! Procedural scenes for the reference figures.
//!
//! Every builder is pure: the same id, variant and size always produce the
//! same scene and options. Light directions given "in camera frame" use
//! x right, y up, z towards the viewer.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geom::{Camera, CameraFrame, CapOrientation, Disc, PolarCap, SurfacePatch, Vector3};
use crate::illumination::{specular_lobe, Attenuation, EnvironmentMap, LightSource, Material, SpecularModel};
use crate::image::{Framebuffer, Rgb, TransferFunction};
use crate::real::Real;
use crate::render::{render_with_workers, RenderOptions, Scene, Shadows, Superposition};

/// Default square image size in pixels.
pub const FIGURE_SIZE: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FigureId {
    Fig1a,
    Fig1b,
    Fig1c,
    Fig1d,
    Fig1e,
    Fig2a,
    Fig2b,
    Fig2c,
    Fig2d,
    Fig2e,
    Fig5Pair,
    Fig6Pair,
    Fig7,
}

impl FigureId {
    pub const ALL: [FigureId; 13] = [
        FigureId::Fig1a,
        FigureId::Fig1b,
        FigureId::Fig1c,
        FigureId::Fig1d,
        FigureId::Fig1e,
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig2c,
        FigureId::Fig2d,
        FigureId::Fig2e,
        FigureId::Fig5Pair,
        FigureId::Fig6Pair,
        FigureId::Fig7,
    ];

    pub fn token(self) -> &'static str {
        match self {
            FigureId::Fig1a => "fig1a",
            FigureId::Fig1b => "fig1b",
            FigureId::Fig1c => "fig1c",
            FigureId::Fig1d => "fig1d",
            FigureId::Fig1e => "fig1e",
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig2c => "fig2c",
            FigureId::Fig2d => "fig2d",
            FigureId::Fig2e => "fig2e",
            FigureId::Fig5Pair => "fig5_pair",
            FigureId::Fig6Pair => "fig6_pair",
            FigureId::Fig7 => "fig7",
        }
    }

    /// One-line description for listings.
    pub fn description(self) -> &'static str {
        match self {
            FigureId::Fig1a => "sphere on a floor, single headlight",
            FigureId::Fig1b => "sphere on a floor, directional light plus ambient",
            FigureId::Fig1c => "sphere on a floor, headlight, two directionals and a reflection map",
            FigureId::Fig1d => "sphere on a floor, eight directional lights on a cone",
            FigureId::Fig1e => "clay sphere on a floor under an overcast sky, shadows on",
            FigureId::Fig2a => "bump/dent plate, single headlight",
            FigureId::Fig2b => "bump/dent plate, directional light plus ambient",
            FigureId::Fig2c => "bump/dent plate, headlight, two directionals and a reflection map",
            FigureId::Fig2d => "bump/dent plate, eight directional lights on a cone",
            FigureId::Fig2e => "bump/dent plate under an overcast sky, shadows on",
            FigureId::Fig5Pair => "white sphere, one directional light, unencoded vs gamma-encoded",
            FigureId::Fig6Pair => "three balls lit by left, right and both lights, naive vs linear sum",
            FigureId::Fig7 => "two glossy balls and a point light",
        }
    }

    pub fn is_plate(self) -> bool {
        matches!(
            self,
            FigureId::Fig2a | FigureId::Fig2b | FigureId::Fig2c | FigureId::Fig2d | FigureId::Fig2e
        )
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        FigureId::ALL
            .into_iter()
            .find(|id| id.token() == s || id.token().strip_suffix("_pair") == Some(s))
            .ok_or_else(|| Error::UnknownFigure(s.to_owned()))
    }
}

/// Layout of the bump/dent plate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// All caps raised, orthographic top view.
    Bump,
    /// All caps sunk, orthographic top view.
    Dent,
    /// Checkerboard of bumps and dents, orthographic top view.
    Mixed,
    /// Checkerboard viewed in perspective, tilted 15° from vertical.
    Tilted,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Bump, Variant::Dent, Variant::Mixed, Variant::Tilted];

    pub fn token(self) -> &'static str {
        match self {
            Variant::Bump => "bump",
            Variant::Dent => "dent",
            Variant::Mixed => "mixed",
            Variant::Tilted => "tilted",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.token() == s.trim())
            .ok_or_else(|| Error::InvalidSetup(format!("unknown variant '{s}' (expected bump, dent, mixed or tilted)")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FigureSpec<T> {
    pub id: FigureId,
    pub variant: Option<Variant>,
    pub scene: Scene<T>,
    pub options: RenderOptions<T>,
    /// Gamma-corrected counterpart of `options` for the naive/corrected pairs.
    pub corrected: Option<RenderOptions<T>>,
    /// Light subsets rendered as side-by-side panels of one image.
    pub panels: Option<Vec<Vec<usize>>>,
}

impl<T: Real> FigureSpec<T> {
    /// Base file name, `<id>[_variant]`.
    pub fn name(&self) -> String {
        match self.variant {
            Some(v) => format!("{}_{}", self.id, v),
            None => self.id.to_string(),
        }
    }

    /// Option sets to render with their name suffixes (`""`, or `"naive"` and
    /// `"corrected"` for pairs).
    pub fn outputs(&self) -> Vec<(&'static str, RenderOptions<T>)> {
        match self.corrected {
            Some(c) => vec![("naive", self.options), ("corrected", c)],
            None => vec![("", self.options)],
        }
    }

    /// Applies `f` to every option set.
    pub fn map_options(mut self, f: impl Fn(&mut RenderOptions<T>)) -> Self {
        f(&mut self.options);
        if let Some(c) = self.corrected.as_mut() {
            f(c);
        }
        self
    }
}

/// One rendered image of a figure.
#[derive(Clone, Debug, PartialEq)]
pub struct RenderedFigure<T> {
    /// `<id>[_variant][_naive|_corrected]`.
    pub name: String,
    pub framebuffer: Framebuffer<T>,
    pub output_tf: TransferFunction<T>,
}

/// Builds the figure at the default size with its default variant.
pub fn build<T: Real>(id: FigureId) -> Result<FigureSpec<T>> {
    build_sized(id, None, FIGURE_SIZE)
}

/// Builds the figure with an explicit plate variant and image size.
///
/// `variant` is only meaningful for the plate figures, which default to
/// [`Variant::Mixed`]. The superposition panels use the next odd size so a
/// pixel column lies exactly on the symmetry axis.
pub fn build_sized<T: Real>(id: FigureId, variant: Option<Variant>, size: usize) -> Result<FigureSpec<T>> {
    if size == 0 {
        return Err(Error::DegenerateCamera("image size must be at least 1x1"));
    }
    if variant.is_some() && !id.is_plate() {
        return Err(Error::InvalidSetup(format!("{id} has no variants")));
    }
    let plain = |scene: Scene<T>, options: RenderOptions<T>| FigureSpec {
        id,
        variant: None,
        scene,
        options,
        corrected: None,
        panels: None,
    };
    let spec = match id {
        FigureId::Fig1a | FigureId::Fig1b | FigureId::Fig1c | FigureId::Fig1d | FigureId::Fig1e => {
            let (scene, options) = sphere_on_floor(lighting_of(id), size);
            plain(scene, options)
        }
        FigureId::Fig2a | FigureId::Fig2b | FigureId::Fig2c | FigureId::Fig2d | FigureId::Fig2e => {
            let variant = variant.unwrap_or(Variant::Mixed);
            let (scene, options) = plate(lighting_of(id), variant, size);
            FigureSpec {
                variant: Some(variant),
                ..plain(scene, options)
            }
        }
        FigureId::Fig5Pair => FigureSpec {
            corrected: Some(RenderOptions {
                output_tf: gamma_22(),
                ..RenderOptions::default()
            }),
            ..plain(lit_white_sphere(size), RenderOptions::default())
        },
        FigureId::Fig6Pair => FigureSpec {
            corrected: Some(RenderOptions {
                output_tf: gamma_22(),
                ..RenderOptions::default()
            }),
            panels: Some(vec![vec![0], vec![1], vec![0, 1]]),
            ..plain(
                superposition_scene(size | 1),
                RenderOptions {
                    superposition: Superposition::NaiveEncodedSum,
                    ..RenderOptions::default()
                },
            )
        },
        FigureId::Fig7 => plain(two_balls(size)?, RenderOptions::default()),
    };
    Ok(spec)
}

fn gamma_22<T: Real>() -> TransferFunction<T> {
    TransferFunction::PowerLaw { gamma: T::of(2.2) }
}

/// Renders one option set of a figure, assembling panels if present.
pub fn render_options<T: Real>(spec: &FigureSpec<T>, options: &RenderOptions<T>, workers: usize) -> Result<Framebuffer<T>> {
    let Some(panels) = &spec.panels else {
        return render_with_workers(&spec.scene, options, workers);
    };
    let (w, h) = (spec.scene.camera.width_px, spec.scene.camera.height_px);
    let mut out = Framebuffer::new(w * panels.len(), h);
    for (k, lights) in panels.iter().enumerate() {
        if let Some(&bad) = lights.iter().find(|&&i| i >= spec.scene.lights.len()) {
            return Err(Error::InvalidSetup(format!("panel refers to missing light {bad}")));
        }
        let panel = render_with_workers(&spec.scene.with_lights(lights), options, workers)?;
        out.blit(&panel, k * w, 0);
    }
    Ok(out)
}

/// Renders every output of a figure.
pub fn render_figure<T: Real>(spec: &FigureSpec<T>, workers: usize) -> Result<Vec<RenderedFigure<T>>> {
    let base = spec.name();
    spec.outputs()
        .into_iter()
        .map(|(suffix, options)| {
            Ok(RenderedFigure {
                name: if suffix.is_empty() {
                    base.clone()
                } else {
                    format!("{base}_{suffix}")
                },
                framebuffer: render_options(spec, &options, workers)?,
                output_tf: options.output_tf,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Lighting {
    Headlight,
    DirectionalAmbient,
    MixedWithMap,
    EightCone,
    Sky,
}

fn lighting_of(id: FigureId) -> Lighting {
    match id {
        FigureId::Fig1a | FigureId::Fig2a => Lighting::Headlight,
        FigureId::Fig1b | FigureId::Fig2b => Lighting::DirectionalAmbient,
        FigureId::Fig1c | FigureId::Fig2c => Lighting::MixedWithMap,
        FigureId::Fig1d | FigureId::Fig2d => Lighting::EightCone,
        _ => Lighting::Sky,
    }
}

fn v3<T: Real>(x: f64, y: f64, z: f64) -> Vector3<T> {
    Vector3::from_f64(x, y, z)
}

fn matte_gray<T: Real>() -> Material<T> {
    Material::gray(0.8, 0.8, 0.0, 1.0)
}

/// Lights, environment and options for one CAD-style lighting setup.
/// Directions are given in the camera frame and converted with `frame`.
fn apply_lighting<T: Real>(scene: &mut Scene<T>, lighting: Lighting, frame: &CameraFrame<T>) -> RenderOptions<T> {
    let cam = |x: f64, y: f64, z: f64| frame.to_world(v3(x, y, z)).normalized();
    let mut options = RenderOptions::default();
    match lighting {
        Lighting::Headlight => scene.lights.push(LightSource::headlight(1.0)),
        Lighting::DirectionalAmbient => {
            scene.lights.push(LightSource::directional(cam(1.0, -1.0, -1.0), 1.0));
            scene.lights.push(LightSource::ambient(0.2));
        }
        Lighting::MixedWithMap => {
            scene.lights.push(LightSource::headlight(0.5));
            scene.lights.push(LightSource::directional(cam(1.0, -1.0, -1.0), 0.35));
            scene.lights.push(LightSource::directional(cam(-1.0, -0.3, -0.4), 0.35));
            scene.env = Some(EnvironmentMap::vertical_gradient(
                64,
                32,
                Rgb::gray(T::one()),
                Rgb::gray(T::of(0.05)),
            ));
            for (_, material) in scene.patches.iter_mut() {
                material.reflectivity = T::of(0.3);
            }
        }
        Lighting::EightCone => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            for k in 0..8 {
                let phi = std::f64::consts::TAU * k as f64 / 8.0;
                // Towards-light directions on the 45° cone about the view axis.
                let to_light = v3::<T>(s * phi.cos(), s * phi.sin(), s);
                scene
                    .lights
                    .push(LightSource::directional(-frame.to_world(to_light), 0.2));
            }
        }
        Lighting::Sky => {
            scene.lights.push(LightSource::overcast_sky(1.0, Vector3::unit_y()));
            scene.background = Rgb::gray(T::of(0.7));
            for (_, material) in scene.patches.iter_mut() {
                material.k_a = Rgb::black();
            }
            options.shadows = Shadows::On;
        }
    }
    options
}

/// Unit sphere resting on the plane `y = 0`, seen from above and in front.
fn sphere_on_floor<T: Real>(lighting: Lighting, size: usize) -> (Scene<T>, RenderOptions<T>) {
    let camera = Camera::perspective(
        v3(0.0, 6.0, 6.0),
        v3(0.0, 0.5, 0.0),
        Vector3::unit_y(),
        (size, size),
        T::of(50f64.to_radians()),
    );
    let frame = camera.frame().expect("fixed camera is valid");
    let mut scene = Scene::new(camera);
    scene
        .patches
        .push((SurfacePatch::sphere(v3(0.0, 1.0, 0.0), T::one()), matte_gray()));
    scene
        .patches
        .push((SurfacePatch::plane(Vector3::zero(), Vector3::unit_y()), matte_gray()));
    let options = apply_lighting(&mut scene, lighting, &frame);
    (scene, options)
}

/// Plate cap layout: 4 columns × 2 rows, radius 0.4, spacing 1.0, 80° polar angle.
pub const PLATE_COLUMNS: usize = 4;
pub const PLATE_ROWS: usize = 2;
pub const CAP_RADIUS: f64 = 0.4;
pub const CAP_SPACING: f64 = 1.0;
pub const CAP_POLAR_ANGLE_DEG: f64 = 80.0;

fn plate<T: Real>(lighting: Lighting, variant: Variant, size: usize) -> (Scene<T>, RenderOptions<T>) {
    let extent = 4.4;
    let camera = match variant {
        Variant::Tilted => {
            let tilt = 15f64.to_radians();
            let distance = 10.0;
            Camera::perspective(
                v3(0.0, distance * tilt.cos(), distance * tilt.sin()),
                Vector3::zero(),
                v3(0.0, 0.0, -1.0),
                (size, size),
                T::of(2.0 * (0.5 * extent / distance).atan()),
            )
        }
        _ => Camera::orthographic(
            v3(0.0, 10.0, 0.0),
            v3(0.0, -1.0, 0.0),
            v3(0.0, 0.0, -1.0),
            (size, size),
            T::of(extent),
        ),
    };
    let frame = camera.frame().expect("fixed camera is valid");
    let mut scene = Scene::new(camera);
    let mut holes = Vec::new();
    for row in 0..PLATE_ROWS {
        for col in 0..PLATE_COLUMNS {
            let x = (col as f64 - (PLATE_COLUMNS as f64 - 1.0) / 2.0) * CAP_SPACING;
            let z = (row as f64 - (PLATE_ROWS as f64 - 1.0) / 2.0) * CAP_SPACING;
            let orientation = match variant {
                Variant::Bump => CapOrientation::Bump,
                Variant::Dent => CapOrientation::Dent,
                Variant::Mixed | Variant::Tilted if (row + col) % 2 == 0 => CapOrientation::Bump,
                _ => CapOrientation::Dent,
            };
            let cap = PolarCap {
                center: v3(x, 0.0, z),
                radius: T::of(CAP_RADIUS),
                axis: Vector3::unit_y(),
                max_polar_angle: T::of(CAP_POLAR_ANGLE_DEG.to_radians()),
                orientation,
            };
            holes.push(Disc {
                center: cap.center,
                radius: cap.footprint_radius(),
            });
            scene.patches.push((SurfacePatch::PolarCap(cap), matte_gray()));
        }
    }
    scene.patches.push((
        SurfacePatch::Plane {
            point: Vector3::zero(),
            normal: Vector3::unit_y(),
            holes,
        },
        matte_gray(),
    ));
    let options = apply_lighting(&mut scene, lighting, &frame);
    (scene, options)
}

fn white_lambert<T: Real>() -> Material<T> {
    Material::gray(0.0, 1.0, 0.0, 1.0)
}

/// Orthographic view of a unit sphere filling the frame, viewed along −z.
fn framed_sphere<T: Real>(size: usize) -> Scene<T> {
    let camera = Camera::orthographic(
        v3(0.0, 0.0, 10.0),
        v3(0.0, 0.0, -1.0),
        Vector3::unit_y(),
        (size, size),
        T::of(2.1),
    );
    let mut scene = Scene::new(camera);
    scene
        .patches
        .push((SurfacePatch::sphere(Vector3::zero(), T::one()), white_lambert()));
    scene
}

/// White sphere lit from the upper left by one directional light.
fn lit_white_sphere<T: Real>(size: usize) -> Scene<T> {
    let mut scene = framed_sphere(size);
    scene
        .lights
        .push(LightSource::directional(v3(1.0, -1.0, -0.9), 1.0));
    scene
}

/// Two directional lights 60° left and right of the view axis; the panels
/// show each alone and both together.
fn superposition_scene<T: Real>(size: usize) -> Scene<T> {
    let mut scene = framed_sphere(size);
    let (s, c) = (0.75f64.sqrt(), 0.5);
    scene.lights.push(LightSource::directional(v3(s, 0.0, -c), 1.0));
    scene.lights.push(LightSource::directional(v3(-s, 0.0, -c), 1.0));
    scene
}

/// Radius of the emissive marker drawn at the fig7 light position.
pub const LIGHT_SYMBOL_RADIUS: f64 = 0.1;
/// Patch indices in the fig7 scene.
pub const NEAR_BALL: usize = 0;
pub const FAR_BALL: usize = 1;
pub const LIGHT_SYMBOL: usize = 2;

fn two_balls<T: Real>(size: usize) -> Result<Scene<T>> {
    let camera = Camera::perspective(
        v3(0.0, 0.5, 9.0),
        Vector3::zero(),
        Vector3::unit_y(),
        (size, size),
        T::of(45f64.to_radians()),
    );
    let light = v3(-2.8, 1.2, 1.8);
    let mut scene = Scene::new(camera);
    let glossy = Material::gray(0.0, 0.2, 0.8, 1.0);
    scene
        .patches
        .push((SurfacePatch::sphere(v3(-2.0, 0.0, 0.0), T::one()), glossy));
    scene
        .patches
        .push((SurfacePatch::sphere(v3(2.0, 0.0, 0.0), T::one()), glossy));
    scene.patches.push((
        SurfacePatch::sphere(light, T::of(LIGHT_SYMBOL_RADIUS)),
        Material::emissive(1.0),
    ));
    scene
        .lights
        .push(LightSource::point(light, 1.0, Attenuation::None));

    let m = tune_shininess(&scene)?;
    for k in [NEAR_BALL, FAR_BALL] {
        scene.patches[k].1.m_shiny = m;
    }
    Ok(scene)
}

/// Pixel areas of the half-maximum specular highlight on each listed patch,
/// lit by the scene's first point light with the classic lobe.
pub fn highlight_areas<T: Real>(scene: &Scene<T>, patches: &[usize]) -> Result<Vec<usize>> {
    let light = scene
        .lights
        .iter()
        .find_map(|l| match l {
            LightSource::Point { pos, .. } => Some(*pos),
            _ => None,
        })
        .ok_or_else(|| Error::InvalidSetup("highlight areas need a point light".into()))?;
    let frame = scene.camera.frame()?;
    let mut values: Vec<Vec<T>> = vec![Vec::new(); patches.len()];
    for j in 0..frame.height {
        for i in 0..frame.width {
            let ray = frame.primary_ray(i, j);
            let Some((hit, k)) = scene.nearest_hit(&ray, T::zero(), T::infinity()) else {
                continue;
            };
            if let Some(slot) = patches.iter().position(|&p| p == k) {
                let material = &scene.patches[k].1;
                let l = (light - hit.point).normalized();
                let v = -ray.dir;
                values[slot].push(specular_lobe(SpecularModel::Classic, hit.normal, l, v, material.m_shiny));
            }
        }
    }
    Ok(values
        .iter()
        .map(|vals| {
            let peak = vals.iter().copied().fold(T::zero(), T::max);
            if peak > T::zero() {
                vals.iter().filter(|&&v| v >= peak * T::half()).count()
            } else {
                0
            }
        })
        .collect())
}

/// Pixel count of patch `index` in the scene's view.
fn coverage<T: Real>(scene: &Scene<T>, index: usize) -> Result<usize> {
    let frame = scene.camera.frame()?;
    let mut n = 0;
    for j in 0..frame.height {
        for i in 0..frame.width {
            let ray = frame.primary_ray(i, j);
            if scene
                .nearest_hit(&ray, T::zero(), T::infinity())
                .is_some_and(|(_, k)| k == index)
            {
                n += 1;
            }
        }
    }
    Ok(n)
}

/// Shininess at which the near ball's half-max highlight covers as many
/// pixels as the light symbol (equal equivalent diameters), by bisection on
/// `log m`.
fn tune_shininess<T: Real>(scene: &Scene<T>) -> Result<T> {
    let target = coverage(scene, LIGHT_SYMBOL)?;
    let mut probe = scene.clone();
    let mut area_at = |log_m: f64| -> Result<usize> {
        probe.patches[NEAR_BALL].1.m_shiny = T::of(log_m.exp());
        Ok(highlight_areas(&probe, &[NEAR_BALL])?[0])
    };
    let (mut lo, mut hi) = (0.0f64, 2000f64.ln());
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if area_at(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(T::of((0.5 * (lo + hi)).exp()))
}
