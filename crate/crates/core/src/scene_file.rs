//! Minimal line-oriented scene description.
//!
//! One directive per line; `#` starts a comment. Vectors are three numbers,
//! angles are in degrees, and `material` applies to every primitive after it.
//!
//! ```text
//! camera ortho  <pos> <view_dir> <up> <width> <height> <extent>
//! camera persp  <pos> <look_at>  <up> <width> <height> <fov_y_deg>
//! background    <r> <g> <b>
//! material      <k_a> <k_d> <k_s> <m> [reflectivity [emission]]
//! sphere        <center> <radius>
//! plane         <point> <normal>
//! hole          <center> <radius>            # cut-out in the last plane
//! cap bump|dent <base_center> <radius> <axis> <polar_deg>
//! directional   <dir> <intensity>            # dir is the propagation direction
//! point         <pos> <intensity> [none|inverse_square]
//! headlight     <intensity>
//! ambient       <intensity>
//! sky           <zenith_radiance> [<up>]
//! envmap        <top> <bottom>               # vertical gray gradient
//! ```

use std::path::Path;

use crate::error::{Error, Result};
use crate::geom::{Camera, CapOrientation, Disc, PolarCap, SurfacePatch, Vector3};
use crate::illumination::{Attenuation, EnvironmentMap, LightSource, Material};
use crate::image::Rgb;
use crate::real::Real;
use crate::render::Scene;

struct Line<'a> {
    number: usize,
    words: std::slice::Iter<'a, &'a str>,
}

impl<'a> Line<'a> {
    fn err(&self, reason: impl Into<String>) -> Error {
        Error::SceneParse {
            line: self.number,
            reason: reason.into(),
        }
    }

    fn word(&mut self, what: &str) -> Result<&'a str> {
        self.words
            .next()
            .copied()
            .ok_or_else(|| self.err(format!("missing {what}")))
    }

    fn num(&mut self, what: &str) -> Result<f64> {
        let w = self.word(what)?;
        w.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.err(format!("{what}: expected a number, got `{w}`")))
    }

    fn opt_num(&mut self, what: &str) -> Result<Option<f64>> {
        if self.words.len() == 0 {
            Ok(None)
        } else {
            self.num(what).map(Some)
        }
    }

    fn vec<T: Real>(&mut self, what: &str) -> Result<Vector3<T>> {
        Ok(Vector3::from_f64(self.num(what)?, self.num(what)?, self.num(what)?))
    }

    fn size(&mut self, what: &str) -> Result<usize> {
        let w = self.word(what)?;
        w.parse::<usize>()
            .map_err(|_| self.err(format!("{what}: expected a pixel count, got `{w}`")))
    }

    fn finish(&self) -> Result<()> {
        match self.words.as_slice().first() {
            Some(extra) => Err(self.err(format!("unexpected `{extra}`"))),
            None => Ok(()),
        }
    }
}

/// Parses a scene description. A camera and at least one primitive are required.
pub fn parse_scene<T: Real>(text: &str) -> Result<Scene<T>> {
    let mut camera = None;
    let mut background = Rgb::black();
    let mut material = Material::gray(0.1, 0.8, 0.0, 1.0);
    let mut patches: Vec<(SurfacePatch<T>, Material<T>)> = Vec::new();
    let mut lights = Vec::new();
    let mut env = None;

    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        let Some((&keyword, _)) = words.split_first() else { continue };
        let mut line = Line {
            number: i + 1,
            words: words[1..].iter(),
        };
        match keyword {
            "camera" => {
                let kind = line.word("projection")?;
                let pos = line.vec("position")?;
                let target = line.vec("view direction")?;
                let up = line.vec("up")?;
                let size = (line.size("width")?, line.size("height")?);
                let c = match kind {
                    "ortho" => Camera::orthographic(pos, target, up, size, T::of(line.num("extent")?)),
                    "persp" => Camera::perspective(pos, target, up, size, T::of(line.num("fov")?.to_radians())),
                    other => return Err(line.err(format!("unknown projection `{other}`"))),
                };
                c.frame().map_err(|e| line.err(e.to_string()))?;
                camera = Some(c);
            }
            "background" => background = Rgb::new(T::of(line.num("r")?), T::of(line.num("g")?), T::of(line.num("b")?)),
            "material" => {
                let (ka, kd, ks, m) = (line.num("k_a")?, line.num("k_d")?, line.num("k_s")?, line.num("m")?);
                let mut mat = Material::gray(ka, kd, ks, m);
                if let Some(r) = line.opt_num("reflectivity")? {
                    mat.reflectivity = T::of(r);
                }
                if let Some(e) = line.opt_num("emission")? {
                    mat.emission = Rgb::gray(T::of(e));
                }
                mat.validate(false).map_err(|e| line.err(e.to_string()))?;
                material = mat;
            }
            "sphere" => {
                let center = line.vec("center")?;
                let radius = T::of(line.num("radius")?);
                patches.push((SurfacePatch::sphere(center, radius), material));
            }
            "plane" => {
                let point = line.vec("point")?;
                let normal = line.vec("normal")?;
                patches.push((SurfacePatch::plane(point, normal), material));
            }
            "hole" => {
                let center = line.vec("center")?;
                let radius = T::of(line.num("radius")?);
                match patches.iter_mut().rev().find_map(|(p, _)| match p {
                    SurfacePatch::Plane { holes, .. } => Some(holes),
                    _ => None,
                }) {
                    Some(holes) => holes.push(Disc { center, radius }),
                    None => return Err(line.err("`hole` needs a preceding plane")),
                }
            }
            "cap" => {
                let orientation = match line.word("orientation")? {
                    "bump" => CapOrientation::Bump,
                    "dent" => CapOrientation::Dent,
                    other => return Err(line.err(format!("unknown cap orientation `{other}`"))),
                };
                let center = line.vec("center")?;
                let radius = T::of(line.num("radius")?);
                let axis = line.vec::<T>("axis")?.normalized();
                let max_polar_angle = T::of(line.num("polar angle")?.to_radians());
                let cap = PolarCap {
                    center,
                    radius,
                    axis,
                    max_polar_angle,
                    orientation,
                };
                patches.push((SurfacePatch::PolarCap(cap), material));
            }
            "directional" => {
                let dir = line.vec("direction")?;
                lights.push(LightSource::directional(dir, line.num("intensity")?));
            }
            "point" => {
                let pos = line.vec("position")?;
                let intensity = line.num("intensity")?;
                let attenuation = match line.words.next().copied() {
                    None | Some("none") => Attenuation::None,
                    Some("inverse_square") => Attenuation::InverseSquare,
                    Some(other) => return Err(line.err(format!("unknown attenuation `{other}`"))),
                };
                lights.push(LightSource::point(pos, intensity, attenuation));
            }
            "headlight" => lights.push(LightSource::headlight(line.num("intensity")?)),
            "ambient" => lights.push(LightSource::ambient(line.num("intensity")?)),
            "sky" => {
                let lz = line.num("zenith radiance")?;
                let up = if line.words.len() == 0 {
                    Vector3::unit_y()
                } else {
                    line.vec("up")?
                };
                lights.push(LightSource::overcast_sky(lz, up));
            }
            "envmap" => {
                let top = line.num("top")?;
                let bottom = line.num("bottom")?;
                env = Some(EnvironmentMap::vertical_gradient(
                    64,
                    32,
                    Rgb::gray(T::of(top)),
                    Rgb::gray(T::of(bottom)),
                ));
            }
            other => return Err(line.err(format!("unknown directive `{other}`"))),
        }
        line.finish()?;
        if let Some(light) = lights.last() {
            if matches!(keyword, "directional" | "point" | "headlight" | "ambient" | "sky") {
                light.validate().map_err(|e| line.err(e.to_string()))?;
            }
        }
        if let Some((patch, _)) = patches.last() {
            if matches!(keyword, "sphere" | "plane" | "cap" | "hole") {
                patch.validate().map_err(|e| line.err(e.to_string()))?;
            }
        }
    }

    let camera = camera.ok_or_else(|| Error::SceneParse {
        line: 0,
        reason: "no camera given".into(),
    })?;
    let scene = Scene {
        patches,
        lights,
        env,
        camera,
        background,
    };
    scene.validate()?;
    Ok(scene)
}

pub fn load_scene<T: Real>(path: impl AsRef<Path>) -> Result<Scene<T>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scene(&text)
}
