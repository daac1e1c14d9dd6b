//! Scalar abstraction shared by every numeric module.
//!
//! All planners are generic over [`Real`]; the crate root exposes `f64`
//! aliases for the common case. Random draws are taken as `f64` and converted,
//! so a seed produces the same stream regardless of the scalar width.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Floating point scalar usable by the planners: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + serde::Serialize
    + serde::de::DeserializeOwned
    + 'static
{
    /// Lossy conversion from `f64`; panics only for types that cannot hold finite f64s.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("scalar conversion from f64")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar conversion to f64")
    }

    fn of_usize(v: usize) -> Self {
        Self::of(v as f64)
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half() -> Self {
        Self::of(0.5)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Uniform draw in `[lo, hi)`.
pub fn uniform<T: Real, R: Rng + ?Sized>(rng: &mut R, lo: T, hi: T) -> T {
    let u: f64 = rng.gen();
    lo + (hi - lo) * T::of(u)
}

/// Uniform draw in `(lo, hi]`.
pub fn uniform_left_open<T: Real, R: Rng + ?Sized>(rng: &mut R, lo: T, hi: T) -> T {
    let u: f64 = rng.gen();
    hi - (hi - lo) * T::of(u)
}

/// Normal draw with mean `mean` and standard deviation `sigma`.
pub fn normal<T: Real, R: Rng + ?Sized>(rng: &mut R, mean: T, sigma: T) -> T {
    let z: f64 = StandardNormal.sample(rng);
    mean + sigma * T::of(z)
}

/// Relative-or-absolute closeness used by the stall detector and a few tests.
pub fn approx_eq<T: Real>(a: T, b: T, rel: T) -> bool {
    if a == b {
        return true;
    }
    let scale = a.abs().max(b.abs()).max(T::one());
    (a - b).abs() <= rel * scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn draws_agree_across_widths() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x: f64 = uniform(&mut a, -3.0, 5.0);
            let y: f32 = uniform(&mut b, -3.0, 5.0);
            assert!((x as f32 - y).abs() < 1e-5);
        }
    }

    #[test]
    fn left_open_interval_excludes_lower_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let v: f64 = uniform_left_open(&mut rng, 0.0, 0.03);
            assert!(v > 0.0 && v <= 0.03);
        }
    }
}
