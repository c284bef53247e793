//! Classic fixed-function Phong lighting, its corrected alternatives, and
//! measurements of the artifacts it produces.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the aliases below fix it to `f64`.

// `!(a > b)` is used on purpose throughout to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod figures;
pub mod geom;
pub mod illumination;
pub mod image;
pub mod io;
pub mod quadrature;
pub mod real;
pub mod render;
pub mod scene_file;

pub use error::{Error, Result};
pub use real::Real;

pub type Vec3 = geom::Vector3<f64>;
pub type Camera = geom::Camera<f64>;
pub type SurfacePatch = geom::SurfacePatch<f64>;
pub type Color = image::Rgb<f64>;
pub type Framebuffer = image::Framebuffer<f64>;
pub type TransferFunction = image::TransferFunction<f64>;
pub type Material = illumination::Material<f64>;
pub type LightSource = illumination::LightSource<f64>;
pub type EnvironmentMap = illumination::EnvironmentMap<f64>;
pub type Scene = render::Scene<f64>;
pub type RenderOptions = render::RenderOptions<f64>;
pub type FigureSpec = figures::FigureSpec<f64>;
