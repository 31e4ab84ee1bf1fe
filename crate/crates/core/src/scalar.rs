use std::fmt::Debug;
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating scalar for the complex kernels.
///
/// Blanket-implemented for every type with the listed `num_traits` bounds,
/// in particular `f32` and `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Send + Sync + 'static
{
    /// Rounding conversion from `f64`.
    fn of_f64(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts to any float scalar")
    }

    /// Rounding conversion from `u64`.
    fn of_u64(x: u64) -> Self {
        Self::from_u64(x).expect("u64 converts to any float scalar")
    }

    /// Rounding conversion to `f64`.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("float scalar converts to f64")
    }
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Send + Sync + 'static
{
}

/// `exp(2πi · turns)` with the turn count reduced to `[-1/2, 1/2)` before
/// the trigonometric calls, which keeps accuracy uniform over the circle.
pub fn unit_turns<T: Scalar>(turns: T) -> Complex<T> {
    let mut x = turns - turns.floor();
    if x >= T::of_f64(0.5) {
        x -= T::one();
    }
    let theta = x * T::TAU();
    Complex::new(theta.cos(), theta.sin())
}

/// Reduce a turn count to `[0, 1)`.
pub fn reduce_turns<T: Scalar>(turns: T) -> T {
    let x = turns - turns.floor();
    // x == 1.0 can survive the subtraction when turns is a huge negative
    // value one ulp below an integer.
    if x >= T::one() {
        T::zero()
    } else {
        x
    }
}

/// Kahan-compensated accumulator for complex sums.
///
/// Adding values in a fixed order gives a bit-reproducible result; merging
/// two accumulators is done by adding the partial sums in caller-chosen
/// (fixed) order.
#[derive(Clone, Copy, Debug)]
pub struct KahanSum<T: Scalar> {
    sum: Complex<T>,
    comp: Complex<T>,
}

impl<T: Scalar> Default for KahanSum<T> {
    fn default() -> Self {
        KahanSum {
            sum: Complex::new(T::zero(), T::zero()),
            comp: Complex::new(T::zero(), T::zero()),
        }
    }
}

impl<T: Scalar> KahanSum<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex<T>) {
        let yr = z.re - self.comp.re;
        let tr = self.sum.re + yr;
        self.comp.re = (tr - self.sum.re) - yr;
        self.sum.re = tr;

        let yi = z.im - self.comp.im;
        let ti = self.sum.im + yi;
        self.comp.im = (ti - self.sum.im) - yi;
        self.sum.im = ti;
    }

    pub fn value(&self) -> Complex<T> {
        self.sum
    }

    /// Fold another accumulator in; order of merges must be fixed by the
    /// caller for reproducibility.
    pub fn merge(&mut self, other: &KahanSum<T>) {
        self.add(other.sum);
        self.add(-other.comp);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unit_turns_quarters() {
        let z = unit_turns(0.25f64);
        assert_abs_diff_eq!(z.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z.im, 1.0, epsilon = 1e-15);
        let z = unit_turns(0.5f64);
        assert_abs_diff_eq!(z.re, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn unit_turns_wraps() {
        let a = unit_turns(0.3f64);
        let b = unit_turns(-0.7f64);
        assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
        assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-12);
    }

    #[test]
    fn unit_turns_f32() {
        let z = unit_turns(0.5f32);
        assert!((z.re + 1.0).abs() < 1e-6);
    }

    #[test]
    fn reduce_turns_range() {
        for &x in &[0.0, 0.999, -0.25, 17.75, -3.0] {
            let r = reduce_turns(x);
            assert!((0.0..1.0).contains(&r), "reduce_turns({x}) = {r}");
        }
    }

    #[test]
    fn kahan_beats_naive() {
        // Alternating large/small magnitudes lose digits in a naive sum.
        let mut kahan = KahanSum::<f64>::new();
        let mut naive = Complex::new(0.0f64, 0.0);
        for k in 0..100_000 {
            let z = Complex::new(1e-10, if k % 2 == 0 { 1e10 } else { -1e10 });
            kahan.add(z);
            naive += z;
        }
        let want = 100_000.0 * 1e-10;
        assert!((kahan.value().re - want).abs() < 1e-12);
        assert_eq!(kahan.value().im, 0.0);
        let _ = naive;
    }

    #[test]
    fn kahan_merge_matches_sequential() {
        let values: Vec<Complex<f64>> = (0..1000)
            .map(|k| Complex::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        let mut whole = KahanSum::new();
        for &z in &values {
            whole.add(z);
        }
        let mut left = KahanSum::new();
        let mut right = KahanSum::new();
        for &z in &values[..500] {
            left.add(z);
        }
        for &z in &values[500..] {
            right.add(z);
        }
        left.merge(&right);
        assert!((left.value() - whole.value()).norm() < 1e-12);
    }
}
