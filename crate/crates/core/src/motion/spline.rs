//! Clamped open-uniform B-splines sampled at a fixed number of parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::scalar::Real;

/// Precomputed blending weights for `samples` uniformly spaced parameters in
/// `[0, 1]`. Row `k` holds the weight of every control point at sample `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineSampler<T> {
    pub control_points: usize,
    /// Order (degree + 1); 4 is cubic.
    pub order: usize,
    pub samples: usize,
    weights: Vec<Vec<T>>,
}

impl<T: Real> SplineSampler<T> {
    pub fn new(control_points: usize, order: usize, samples: usize) -> Result<Self> {
        if control_points < 2 {
            return Err(Error::Spline("at least two control points are required".into()));
        }
        if order < 2 || order > control_points {
            return Err(Error::Spline(format!(
                "order {order} needs between 2 and {control_points} (the control point count)"
            )));
        }
        if samples < control_points {
            return Err(Error::Spline("sample count must be at least the control point count".into()));
        }
        let knots = open_uniform_knots::<T>(control_points, order);
        let weights = (0..samples)
            .map(|k| {
                if k == 0 {
                    unit_row(control_points, 0)
                } else if k == samples - 1 {
                    unit_row(control_points, control_points - 1)
                } else {
                    let u = T::of_usize(k) / T::of_usize(samples - 1);
                    basis_row(&knots, control_points, order, u)
                }
            })
            .collect();
        Ok(Self { control_points, order, samples, weights })
    }

    pub fn weights(&self) -> &[Vec<T>] {
        &self.weights
    }

    /// Sampled curve; the first and last samples equal the end control points exactly.
    pub fn sample(&self, cp: &[Vec3<T>]) -> Vec<Vec3<T>> {
        assert_eq!(cp.len(), self.control_points, "control point count mismatch");
        self.weights
            .iter()
            .map(|row| {
                let mut p = Vec3::zero();
                for (w, c) in row.iter().zip(cp) {
                    if *w != T::zero() {
                        p = p + *c * *w;
                    }
                }
                p
            })
            .collect()
    }
}

fn unit_row<T: Real>(n: usize, i: usize) -> Vec<T> {
    let mut row = vec![T::zero(); n];
    row[i] = T::one();
    row
}

/// `order` zeros, evenly spaced interior knots, `order` ones.
pub fn open_uniform_knots<T: Real>(n: usize, order: usize) -> Vec<T> {
    let interior = n - order;
    let mut knots = vec![T::zero(); order];
    knots.extend((1..=interior).map(|i| T::of_usize(i) / T::of_usize(interior + 1)));
    knots.extend(std::iter::repeat(T::one()).take(order));
    knots
}

/// Cox–de Boor basis values of all control points at `u` in `[0, 1)`.
fn basis_row<T: Real>(knots: &[T], n: usize, order: usize, u: T) -> Vec<T> {
    let m = knots.len() - 1;
    let mut b: Vec<T> = (0..m)
        .map(|i| if knots[i] <= u && u < knots[i + 1] { T::one() } else { T::zero() })
        .collect();
    for k in 2..=order {
        for i in 0..(m + 1 - k) {
            let left_den = knots[i + k - 1] - knots[i];
            let right_den = knots[i + k] - knots[i + 1];
            let left = if left_den > T::zero() { (u - knots[i]) / left_den * b[i] } else { T::zero() };
            let right = if right_den > T::zero() { (knots[i + k] - u) / right_den * b[i + 1] } else { T::zero() };
            b[i] = left + right;
        }
    }
    b.truncate(n);
    b
}

/// Samples the spline through `cp` at `samples` parameters.
pub fn spline_path<T: Real>(cp: &[Vec3<T>], order: usize, samples: usize) -> Result<Vec<Vec3<T>>> {
    Ok(SplineSampler::new(cp.len(), order, samples)?.sample(cp))
}

/// Chord-sum length of a polyline.
pub fn polyline_length<T: Real>(points: &[Vec3<T>]) -> T {
    points.windows(2).map(|w| w[0].distance(w[1])).sum()
}
