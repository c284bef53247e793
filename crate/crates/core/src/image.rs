//! Linear RGB framebuffer and display transfer functions.

use std::ops::{Add, AddAssign, Mul};

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Rgb<T> {
    pub r: T,
    pub g: T,
    pub b: T,
}

impl<T: Real> Rgb<T> {
    pub fn new(r: T, g: T, b: T) -> Self {
        Self { r, g, b }
    }

    pub fn gray(v: T) -> Self {
        Self::new(v, v, v)
    }

    pub fn black() -> Self {
        Self::gray(T::zero())
    }

    pub fn map(self, f: impl Fn(T) -> T) -> Self {
        Self::new(f(self.r), f(self.g), f(self.b))
    }

    pub fn try_map<E>(self, f: impl Fn(T) -> Result<T, E>) -> Result<Self, E> {
        Ok(Self::new(f(self.r)?, f(self.g)?, f(self.b)?))
    }

    pub fn zip(self, o: Self, f: impl Fn(T, T) -> T) -> Self {
        Self::new(f(self.r, o.r), f(self.g, o.g), f(self.b, o.b))
    }

    pub fn max_channel(self) -> T {
        self.r.max(self.g).max(self.b)
    }

    pub fn min_channel(self) -> T {
        self.r.min(self.g).min(self.b)
    }

    pub fn channels(self) -> [T; 3] {
        [self.r, self.g, self.b]
    }

    /// Rec. 709 relative luminance of linear values.
    pub fn luminance(self) -> T {
        T::of(0.2126) * self.r + T::of(0.7152) * self.g + T::of(0.0722) * self.b
    }

    pub fn clamp01(self) -> Self {
        self.map(|v| v.max(T::zero()).min(T::one()))
    }
}

impl<T: Real> Add for Rgb<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.zip(o, |a, b| a + b)
    }
}

impl<T: Real> AddAssign for Rgb<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Mul<T> for Rgb<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.map(|v| v * s)
    }
}

impl<T: Real> Mul for Rgb<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.zip(o, |a, b| a * b)
    }
}

/// Row-major image of unclamped linear values with a per-pixel overflow flag.
#[derive(Clone, Debug, PartialEq)]
pub struct Framebuffer<T> {
    width: usize,
    height: usize,
    pixels: Vec<Rgb<T>>,
    overflow: Vec<bool>,
}

impl<T: Real> Framebuffer<T> {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            pixels: vec![Rgb::black(); width * height],
            overflow: vec![false; width * height],
        }
    }

    pub fn from_pixels(width: usize, height: usize, pixels: Vec<Rgb<T>>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::InvalidSetup(format!(
                "{} pixels supplied for a {width}x{height} image",
                pixels.len()
            )));
        }
        if let Some(bad) = pixels.iter().flat_map(|p| p.channels()).find(|v| !(*v >= T::zero())) {
            return Err(Error::NegativeRadiance(bad.to_f64_lossy()));
        }
        let overflow = pixels.iter().map(|p| p.max_channel() > T::one()).collect();
        Ok(Self {
            width,
            height,
            pixels,
            overflow,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Rgb<T>] {
        &self.pixels
    }

    pub fn overflow_mask(&self) -> &[bool] {
        &self.overflow
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb<T> {
        self.pixels[y * self.width + x]
    }

    pub fn is_overflowed(&self, x: usize, y: usize) -> bool {
        self.overflow[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, c: Rgb<T>) {
        let i = y * self.width + x;
        self.pixels[i] = c;
        self.overflow[i] = c.max_channel() > T::one();
    }

    /// Places `other` with its top-left corner at `(x0, y0)`.
    pub fn blit(&mut self, other: &Framebuffer<T>, x0: usize, y0: usize) {
        for y in 0..other.height.min(self.height.saturating_sub(y0)) {
            for x in 0..other.width.min(self.width.saturating_sub(x0)) {
                self.set(x0 + x, y0 + y, other.get(x, y));
            }
        }
    }

    /// Clamps, encodes and quantizes every channel to 8 bits, row-major RGB.
    pub fn encoded_bytes(&self, tf: &TransferFunction<T>) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(self.pixels.len() * 3);
        for p in &self.pixels {
            for v in p.channels() {
                out.push(quantize(tf.encode(v)?));
            }
        }
        Ok(out)
    }

    /// Encoded (clamped, transfer-applied) value of every pixel, not quantized.
    pub fn encoded(&self, tf: &TransferFunction<T>) -> Result<Vec<Rgb<T>>> {
        self.pixels
            .iter()
            .map(|p| p.try_map(|v| tf.encode(v)))
            .collect()
    }
}

/// `round(v * 255)` for `v` in `[0, 1]`.
pub fn quantize<T: Real>(v: T) -> u8 {
    let code = (v * T::of(255.0)).round();
    code.to_u8().unwrap_or(if code > T::zero() { 255 } else { 0 })
}

/// Breakpoint where the linear toe of the sRGB curve meets its power segment.
///
/// The commonly quoted 0.0031308 sits slightly past the second crossing of the
/// two segments and makes the curve step down by ~3e-8; this is the crossing
/// itself, so the encoding is continuous and monotone.
const SRGB_LINEAR_LIMIT: f64 = 0.003_130_668_442_500_568_6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TransferFunction<T> {
    /// Values are sent to the display as-is (the uncorrected CAD pipeline).
    Identity,
    /// `encode(v) = v^(1/gamma)`.
    PowerLaw { gamma: T },
    SrgbPiecewise,
}

impl<T: Real> TransferFunction<T> {
    pub fn power_law(gamma: T) -> Result<Self> {
        if gamma > T::zero() && gamma.is_finite() {
            Ok(TransferFunction::PowerLaw { gamma })
        } else {
            Err(Error::InvalidGamma(gamma.to_f64_lossy()))
        }
    }

    /// Clamps to `[0, 1]` and applies the encoding.
    pub fn encode(&self, v: T) -> Result<T> {
        if !(v >= T::zero()) {
            return Err(Error::NegativeRadiance(v.to_f64_lossy()));
        }
        Ok(self.encode_unclamped(v.min(T::one())))
    }

    /// Encoding curve extended past 1 (monotone); `v` must be non-negative.
    pub fn encode_unclamped(&self, v: T) -> T {
        match *self {
            TransferFunction::Identity => v,
            TransferFunction::PowerLaw { gamma } => v.powf(gamma.recip()),
            TransferFunction::SrgbPiecewise => {
                if v <= T::of(SRGB_LINEAR_LIMIT) {
                    T::of(12.92) * v
                } else {
                    T::of(1.055) * v.powf(T::of(1.0 / 2.4)) - T::of(0.055)
                }
            }
        }
    }

    /// Inverse of [`encode_unclamped`](Self::encode_unclamped).
    pub fn decode(&self, e: T) -> T {
        match *self {
            TransferFunction::Identity => e,
            TransferFunction::PowerLaw { gamma } => e.powf(gamma),
            TransferFunction::SrgbPiecewise => {
                if e <= T::of(12.92 * SRGB_LINEAR_LIMIT) {
                    e / T::of(12.92)
                } else {
                    ((e + T::of(0.055)) / T::of(1.055)).powf(T::of(2.4))
                }
            }
        }
    }
}

/// Luminance a display with the given gamma emits for an encoded value.
pub fn displayed_luminance<T: Real>(encoded: T, display_gamma: T) -> T {
    encoded.powf(display_gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_kinds() -> [TransferFunction<f64>; 4] {
        [
            TransferFunction::Identity,
            TransferFunction::PowerLaw { gamma: 2.2 },
            TransferFunction::PowerLaw { gamma: 2.0 },
            TransferFunction::SrgbPiecewise,
        ]
    }

    #[test]
    fn power_law_half() {
        let tf = TransferFunction::PowerLaw { gamma: 2.2f64 };
        let e = tf.encode(0.5).unwrap();
        // 0.5^(1/2.2), evaluated independently.
        assert!((e - 0.729_740_052_840_723_1).abs() < 1e-12);
        assert!((tf.decode(e) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fixed_points_and_clamp() {
        for tf in all_kinds() {
            assert_eq!(tf.encode(0.0).unwrap(), 0.0);
            assert!((tf.encode(1.0).unwrap() - 1.0).abs() < 1e-12);
        }
        assert_eq!(TransferFunction::<f64>::Identity.encode(1.7).unwrap(), 1.0);
    }

    #[test]
    fn negative_radiance_rejected() {
        for tf in all_kinds() {
            assert!(matches!(tf.encode(-0.1), Err(Error::NegativeRadiance(_))));
            assert!(tf.encode(f64::NAN).is_err());
        }
        assert!(TransferFunction::power_law(0.0f64).is_err());
    }

    #[test]
    fn round_trip_on_uniform_grid() {
        for tf in all_kinds() {
            for i in 0..1000 {
                let v = (i as f64 + 0.5) / 1000.0;
                let e = tf.encode(v).unwrap();
                assert!((tf.decode(e) - v).abs() < 1e-9, "{tf:?} at {v}");
            }
        }
    }

    #[test]
    fn srgb_segments_meet() {
        let tf = TransferFunction::<f64>::SrgbPiecewise;
        let below = tf.encode(SRGB_LINEAR_LIMIT).unwrap();
        let above = tf.encode(SRGB_LINEAR_LIMIT * (1.0 + 1e-12)).unwrap();
        assert!(above >= below);
        assert!(above - below < 1e-12);
    }

    #[test]
    fn displayed_luminance_examples() {
        assert_eq!(displayed_luminance(1.0, 2.0), 1.0);
        assert!((displayed_luminance(0.5f64, 2.2) - 0.217_637_640_824_031).abs() < 1e-12);
        assert_eq!(displayed_luminance(0.5, 1.0), 0.5);
    }

    #[test]
    fn single_precision_round_trip() {
        let tf = TransferFunction::<f32>::SrgbPiecewise;
        for i in 0..100 {
            let v = i as f32 / 99.0;
            assert!((tf.decode(tf.encode(v).unwrap()) - v).abs() < 1e-5);
        }
    }

    #[test]
    fn overflow_mask_tracks_pixels() {
        let mut fb = Framebuffer::<f64>::new(2, 1);
        fb.set(0, 0, Rgb::new(0.2, 1.5, 0.0));
        fb.set(1, 0, Rgb::gray(1.0));
        assert_eq!(fb.overflow_mask(), &[true, false]);
        let bytes = fb.encoded_bytes(&TransferFunction::Identity).unwrap();
        assert_eq!(bytes, vec![51, 255, 0, 255, 255, 255]);
        assert!(Framebuffer::from_pixels(1, 1, vec![Rgb::gray(-1.0)]).is_err());
    }

    proptest! {
        #[test]
        fn encode_is_monotone(a in 0.0f64..1.5, b in 0.0f64..1.5) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            for tf in all_kinds() {
                prop_assert!(tf.encode(lo).unwrap() <= tf.encode(hi).unwrap());
            }
        }

        #[test]
        fn round_trip_anywhere(v in 0.0f64..=1.0) {
            for tf in all_kinds() {
                prop_assert!((tf.decode(tf.encode(v).unwrap()) - v).abs() < 1e-9);
            }
        }
    }
}
