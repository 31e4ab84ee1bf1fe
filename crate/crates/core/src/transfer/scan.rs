//! Dense products of transfer matrices over rational grids and their
//! certified sup-norm bounds.

use num_complex::Complex;
use rayon::prelude::*;

use super::FourierConfig;
use crate::error::{Error, Result};
use crate::scalar::{reduce_turns, unit_turns, Scalar};

/// Largest component dimension accepted by the dense product path.
pub const MAX_DENSE_DIM: usize = 20_000;

/// Grid points processed between early-abort checks; fixed so that results
/// do not depend on the worker count.
const SCAN_CHUNK: u64 = 8192;

/// Precomputed unimodular edge weights for repeated matrix assembly.
///
/// The `t`-independent factors are instantiated once; per grid point only
/// the `b` twiddles `e(-rt)/b` and the dense product remain.
pub(super) struct ProductScanner<T: Scalar> {
    n: usize,
    b: u64,
    /// `[member][r] -> (target, unit weight)`, digit `r` positional.
    edge_units: Vec<Vec<(usize, Complex<T>)>>,
    f0: Vec<Complex<T>>,
}

impl<T: Scalar> ProductScanner<T> {
    pub(super) fn new(config: &FourierConfig) -> Result<Self> {
        let n = config.component().len();
        if n > MAX_DENSE_DIM {
            return Err(Error::too_large(format!(
                "component has {n} members; dense products are capped at {MAX_DENSE_DIM}"
            )));
        }
        let edge_units = config
            .edges()
            .iter()
            .map(|row| row.iter().map(|&(tgt, a)| (tgt, a.unit())).collect())
            .collect();
        Ok(ProductScanner {
            n,
            b: config.base() as u64,
            edge_units,
            f0: config.f0_units(),
        })
    }

    fn twiddles(&self, turns: T) -> Vec<Complex<T>> {
        let inv_b = T::one() / T::of_u64(self.b);
        (0..self.b)
            .map(|r| unit_turns(-(T::of_u64(r) * turns)).scale(inv_b))
            .collect()
    }

    /// One step of the dense product: `next = data · A(turns)`.
    fn right_multiply(&self, data: &[Complex<T>], turns: T) -> Vec<Complex<T>> {
        let n = self.n;
        let tw = self.twiddles(turns);
        let zero = Complex::new(T::zero(), T::zero());
        let mut next = vec![zero; n * n];
        for row in 0..n {
            let src = &data[row * n..(row + 1) * n];
            let dst = &mut next[row * n..(row + 1) * n];
            for (c, &v) in src.iter().enumerate() {
                if v == zero {
                    continue;
                }
                for (r, &(tgt, unit)) in self.edge_units[c].iter().enumerate() {
                    dst[tgt] += v * unit * tw[r];
                }
            }
        }
        next
    }

    fn identity(&self) -> Vec<Complex<T>> {
        let n = self.n;
        let mut data = vec![Complex::new(T::zero(), T::zero()); n * n];
        for r in 0..n {
            data[r * n + r] = Complex::new(T::one(), T::zero());
        }
        data
    }

    fn row_sum_norm(&self, data: &[Complex<T>]) -> T {
        let n = self.n;
        let mut best = T::zero();
        for row in 0..n {
            let s: T = data[row * n..(row + 1) * n].iter().map(|z| z.norm()).sum();
            if s > best {
                best = s;
            }
        }
        best
    }

    /// Row-sum norm of `A(t)·A(bt)···A(b^L t)` at `t = num/den`; the
    /// argument chain `b^j·num mod den` is kept exact in integers.
    pub(super) fn product_norm_rational(&self, l: u32, num: u64, den: u64) -> T {
        debug_assert!(den > 0 && den <= u64::MAX / self.b);
        let mut data = self.identity();
        let mut arg = num % den;
        for _ in 0..=l {
            data = self.right_multiply(&data, T::of_u64(arg) / T::of_u64(den));
            arg = arg * self.b % den;
        }
        self.row_sum_norm(&data)
    }

    /// Same product at an arbitrary turn argument, reduced in floating
    /// point step by step.
    pub(super) fn product_norm_turns(&self, l: u32, t: T) -> T {
        let mut data = self.identity();
        let mut arg = reduce_turns(t);
        for _ in 0..=l {
            data = self.right_multiply(&data, arg);
            arg = reduce_turns(arg * T::of_u64(self.b));
        }
        self.row_sum_norm(&data)
    }

    /// `|F_λ^{i0,j0}(t)|` for every `λ ≤ lambda_max` at `t = num/den`, by
    /// pushing the row of the start member through the factor chain.
    pub(super) fn entry_moduli_rational(
        &self,
        start: usize,
        lambda_max: u32,
        num: u64,
        den: u64,
    ) -> Vec<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let mut u = vec![zero; self.n];
        u[start] = Complex::new(T::one(), T::zero());
        let mut out = Vec::with_capacity(lambda_max as usize + 1);
        let mut arg = num % den;
        for _ in 0..=lambda_max {
            let dot = u
                .iter()
                .zip(self.f0.iter())
                .fold(zero, |acc, (a, b)| acc + *a * *b);
            out.push(dot.norm());
            // u ← u · A(arg/den)
            let tw = self.twiddles(T::of_u64(arg) / T::of_u64(den));
            let mut next = vec![zero; self.n];
            for (c, &v) in u.iter().enumerate() {
                if v == zero {
                    continue;
                }
                for (r, &(tgt, unit)) in self.edge_units[c].iter().enumerate() {
                    next[tgt] += v * unit * tw[r];
                }
            }
            u = next;
            arg = arg * self.b % den;
        }
        out
    }

    /// Max of [`product_norm_rational`] over the grid `{m/grid : m < grid}`,
    /// stopping early once a value exceeds `abort_above` (the scan is then
    /// conclusive for callers asking "is the sup below the threshold").
    ///
    /// Chunk boundaries are fixed, so the result is identical for any
    /// worker count.
    pub(super) fn grid_norm_scan(
        &self,
        l: u32,
        grid: u64,
        abort_above: Option<T>,
    ) -> (T, bool)
    where
        T: Send + Sync,
    {
        let mut sup = T::zero();
        let mut m = 0u64;
        while m < grid {
            let hi = grid.min(m + SCAN_CHUNK);
            let chunk_max = (m..hi)
                .into_par_iter()
                .map(|p| self.product_norm_rational(l, p, grid))
                .reduce(T::zero, |a, b| if a > b { a } else { b });
            if chunk_max > sup {
                sup = chunk_max;
            }
            if let Some(cap) = abort_above {
                if sup > cap {
                    return (sup, true);
                }
            }
            m = hi;
        }
        (sup, false)
    }

    /// Elementwise max over the grid of the per-λ entry moduli.
    pub(super) fn grid_entry_sweep(&self, start: usize, lambda_max: u32, grid: u64) -> Vec<T>
    where
        T: Send + Sync,
    {
        (0..grid)
            .into_par_iter()
            .map(|m| self.entry_moduli_rational(start, lambda_max, m, grid))
            .reduce(
                || vec![T::zero(); lambda_max as usize + 1],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        if y > *x {
                            *x = y;
                        }
                    }
                    a
                },
            )
    }
}

/// The Lipschitz constant `K = π·b^{L+1}` used by every certified bound:
/// each length-(L+1) digit path contributes a phase with derivative at most
/// `2π·Σ r_k b^k`, and averaging over paths gives `π(b^{L+1}-1) < K` for
/// the row-sum norm.
pub(super) fn lipschitz_k(base: u32, l: u32) -> f64 {
    std::f64::consts::PI * (base as f64).powi(l as i32 + 1)
}

/// Row-sum norm of `A(t)·A(bt)···A(b^L t)` at a single argument `t` (turns).
pub fn product_norm<T: Scalar>(config: &FourierConfig, l: u32, t: T) -> Result<T> {
    let scanner = ProductScanner::new(config)?;
    Ok(scanner.product_norm_turns(l, t))
}

/// Grid maximum and certified sup of the (L+1)-fold product norm.
///
/// The certificate is `grid-sup + K·h` with `h = 1/grid_m` and
/// `K = π·b^{L+1}`; a value above 1 certifies nothing (the true sup is
/// always ≤ 1) but is returned as computed.
pub fn product_norm_certified<T: Scalar>(
    config: &FourierConfig,
    l: u32,
    grid_m: u64,
) -> Result<(T, T)> {
    let b = config.base() as u128;
    let needed = b
        .checked_pow(l + 1)
        .ok_or_else(|| Error::overflow(format!("b^{} exceeds u128", l + 1)))?;
    if (grid_m as u128) < needed {
        return Err(Error::invalid(format!(
            "grid must out-sample the fastest factor: grid_m ≥ b^{} = {needed}",
            l + 1
        )));
    }
    if grid_m > u64::MAX / config.base() as u64 {
        return Err(Error::too_large("grid_m too large for exact argument chains"));
    }
    let scanner = ProductScanner::new(config)?;
    let (sup, _) = scanner.grid_norm_scan(l, grid_m, None);
    let pad = T::of_f64(lipschitz_k(config.base(), l)) / T::of_u64(grid_m);
    Ok((sup, sup + pad))
}
