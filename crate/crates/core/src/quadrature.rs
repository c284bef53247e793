//! Deterministic hemisphere quadrature.
//!
//! The hemisphere is cut into equal-area latitude bands (uniform in `cos θ`)
//! and each band into equal azimuth sectors; every cell is sampled once at its
//! midpoint with weight `2π / cells`. No randomness, so results are
//! reproducible bit for bit.

use crate::geom::{Frame, Vector3};
use crate::real::Real;

#[derive(Clone, Debug)]
pub struct HemisphereRule<T> {
    /// Local directions (z is the pole) at the cell midpoints.
    directions: Vec<Vector3<T>>,
    weight: T,
}

impl<T: Real> HemisphereRule<T> {
    /// Rule with at most `n_samples` cells (at least one).
    pub fn new(n_samples: usize) -> Self {
        let n = n_samples.max(1);
        let bands = ((n as f64 / 2.0).sqrt().round() as usize).clamp(1, n);
        let sectors = (n / bands).max(1);
        let mut directions = Vec::with_capacity(bands * sectors);
        let sector_angle = T::two() * T::PI() / T::of_usize(sectors);
        let azimuths: Vec<(T, T)> = (0..sectors)
            .map(|l| {
                let phi = (T::of_usize(l) + T::half()) * sector_angle;
                (phi.cos(), phi.sin())
            })
            .collect();
        for k in 0..bands {
            let cos_theta = (T::of_usize(k) + T::half()) / T::of_usize(bands);
            let sin_theta = (T::one() - cos_theta * cos_theta).max(T::zero()).sqrt();
            for &(c, s) in &azimuths {
                directions.push(Vector3::new(sin_theta * c, sin_theta * s, cos_theta));
            }
        }
        let weight = T::two() * T::PI() / T::of_usize(directions.len());
        Self { directions, weight }
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Solid angle represented by each sample.
    pub fn weight(&self) -> T {
        self.weight
    }

    /// World-space sample directions on the hemisphere around `normal`.
    pub fn directions(&self, normal: Vector3<T>) -> impl Iterator<Item = Vector3<T>> + '_ {
        let frame = Frame::around(normal);
        self.directions.iter().map(move |&d| frame.to_world(d))
    }

    /// Estimate of the integral of `f` over the hemisphere around `normal`.
    pub fn integrate(&self, normal: Vector3<T>, mut f: impl FnMut(Vector3<T>) -> T) -> T {
        let mut sum = T::zero();
        let mut carry = T::zero();
        for d in self.directions(normal) {
            // Kahan summation keeps single precision usable at 10^6 samples.
            let y = f(d) - carry;
            let t = sum + y;
            carry = (t - sum) - y;
            sum = t;
        }
        sum * self.weight
    }
}

/// Integral of `f` over the unit hemisphere around `normal` with a stratified
/// midpoint rule of (at most) `n_samples` directions.
pub fn hemisphere_quadrature<T: Real>(
    f: impl FnMut(Vector3<T>) -> T,
    normal: Vector3<T>,
    n_samples: usize,
) -> T {
    HemisphereRule::new(n_samples).integrate(normal, f)
}
