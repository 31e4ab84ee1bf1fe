//! Fourier coefficient averages of two-scale digit products and the
//! transfer matrices that propagate them.
//!
//! For a strongly b-multiplicative `g` and coprime scales `P`, `Q`, the
//! object of study is
//!
//! ```text
//! F_λ^{i,j}(t) = b^{-λ} Σ_{0 ≤ u < b^λ} g(Pu+i) · conj(g(Qu+j)) · e(-ut)
//! ```
//!
//! Splitting `u` into its lowest digit `r` and the rest shows that the
//! vector of `F_λ^{i,j}` over the component `C` satisfies
//! `F_λ(t) = A(t) · F_{λ-1}(bt)` for a sparse `C × C` matrix `A(t)` whose
//! row sums have modulus at most 1. Products `A(t)·A(bt)···A(b^L t)` with
//! certified sup-norm below `1 - δ` therefore force exponential decay of
//! `F_λ`, which [`decay`] quantifies.

mod scan;

pub mod decay;

pub use decay::{
    decay_profile, find_contraction, ContractionCertificate, ContractionSearch, DecayProfile,
    DecayRow, LevelScan, DEFAULT_DELTA_MIN, DEFAULT_L_MAX,
};
pub use scan::{product_norm, product_norm_certified, MAX_DENSE_DIM};

use num_complex::Complex;

use crate::digitcore::{Angle, BMultFunction};
use crate::error::{Error, Result};
use crate::pairgraph::{build_component, edge_targets, ComponentC};
use crate::scalar::{reduce_turns, unit_turns, KahanSum, Scalar};

/// Cap on the direct-sum oracle: `b^λ` terms must stay below 2^24.
pub const DIRECT_SUM_CAP: u128 = 1 << 24;

/// A function pair `(g, P, Q)` together with its carry component and the
/// precomputed edge weights of the transfer recursion.
#[derive(Clone, Debug)]
pub struct FourierConfig {
    g: BMultFunction,
    p: u64,
    q: u64,
    component: ComponentC,
    /// Per member, per digit r: target member index and the exact angle of
    /// `g((Pr+i) mod b) · conj(g((Qr+j) mod b))`.
    edges: Vec<Vec<(usize, Angle)>>,
    /// Exact angle of `F_0^{i,j} = g(i) · conj(g(j))` per member.
    f0: Vec<Angle>,
}

impl FourierConfig {
    /// Build the component of `(0,0)` for `(P, Q, b)` and precompute edge
    /// weights. `P`, `Q`, `b` must be pairwise coprime.
    pub fn new(g: BMultFunction, p: u64, q: u64) -> Result<Self> {
        let component = build_component(g.base(), p, q)?;
        let b = g.base() as u64;
        let mut edges = Vec::with_capacity(component.len());
        let mut f0 = Vec::with_capacity(component.len());
        for &(i, j) in component.members() {
            let mut row = Vec::with_capacity(b as usize);
            for (r, (ti, tj)) in edge_targets(i, j, g.base(), p, q).into_iter().enumerate() {
                let idx = component.index_of(ti, tj).ok_or_else(|| {
                    Error::internal(format!("edge target ({ti},{tj}) escapes the component"))
                })?;
                let r = r as u64;
                let di = (i as u128 + r as u128 * p as u128) % b as u128;
                let dj = (j as u128 + r as u128 * q as u128) % b as u128;
                let w = g.eval_angle(di) - g.eval_angle(dj);
                row.push((idx, w));
            }
            edges.push(row);
            f0.push(g.eval_angle(i as u128) - g.eval_angle(j as u128));
        }
        Ok(FourierConfig {
            g,
            p,
            q,
            component,
            edges,
            f0,
        })
    }

    /// Convenience for the prime-pair use `P = p²`, `Q = q²`.
    pub fn from_primes(g: BMultFunction, p: u64, q: u64) -> Result<Self> {
        let ps = p
            .checked_mul(p)
            .ok_or_else(|| Error::overflow("p² exceeds u64".to_string()))?;
        let qs = q
            .checked_mul(q)
            .ok_or_else(|| Error::overflow("q² exceeds u64".to_string()))?;
        Self::new(g, ps, qs)
    }

    pub fn g(&self) -> &BMultFunction {
        &self.g
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn base(&self) -> u32 {
        self.g.base()
    }

    pub fn component(&self) -> &ComponentC {
        &self.component
    }

    pub(crate) fn edges(&self) -> &[Vec<(usize, Angle)>] {
        &self.edges
    }

    /// `F_0` as unit complex numbers.
    pub(crate) fn f0_units<T: Scalar>(&self) -> Vec<Complex<T>> {
        self.f0.iter().map(|a| a.unit()).collect()
    }
}

/// Brute-force evaluation of `F_λ^{i,j}(t)` by direct summation.
///
/// This is the oracle the recursion is tested against; `b^λ` is capped at
/// 2^24 to keep it honest about its cost. `t` is in turns.
pub fn fourier_direct<T: Scalar>(
    config: &FourierConfig,
    i: u64,
    j: u64,
    lambda: u32,
    t: T,
) -> Result<Complex<T>> {
    if i >= config.p() || j >= config.q() {
        return Err(Error::invalid(format!(
            "carry states must satisfy i < P, j < Q; got i={i}, j={j}"
        )));
    }
    let b = config.base() as u128;
    let total = b
        .checked_pow(lambda)
        .filter(|&v| v <= DIRECT_SUM_CAP)
        .ok_or_else(|| {
            Error::too_large(format!("direct sum needs b^{lambda} ≤ {DIRECT_SUM_CAP} terms"))
        })?;
    let g = config.g();
    let (p, q) = (config.p() as u128, config.q() as u128);
    let mut acc = KahanSum::<T>::new();
    for u in 0..total {
        let angle = g.eval_angle(p * u + i as u128) - g.eval_angle(q * u + j as u128);
        let phase = T::of_f64(angle.turns()) - T::of_u64(u as u64) * t;
        acc.add(unit_turns(phase));
    }
    let scale = T::one() / T::of_u64(total as u64);
    Ok(acc.value().scale(scale))
}

/// `F_λ^{i,j}(t)` through the one-digit recursion
/// `F_λ(t) = A(t) · F_{λ-1}(bt)`, carried out as `λ` sparse level passes
/// over the component. `(i, j)` must belong to the component.
pub fn fourier_recursive<T: Scalar>(
    config: &FourierConfig,
    i: u64,
    j: u64,
    lambda: u32,
    t: T,
) -> Result<Complex<T>> {
    let idx = config.component().index_of(i, j).ok_or_else(|| {
        Error::invalid(format!("({i}, {j}) is not in the component of (0,0)"))
    })?;
    let v = fourier_vector(config, lambda, t);
    Ok(v[idx])
}

/// The full vector `(F_λ^{i,j}(t))` over the component, in member order.
pub fn fourier_vector<T: Scalar>(config: &FourierConfig, lambda: u32, t: T) -> Vec<Complex<T>> {
    let b = config.base() as u64;
    // Arguments t, bt, ..., b^{λ-1} t reduced mod 1; consumed deepest first.
    let mut args = Vec::with_capacity(lambda as usize);
    let mut cur = reduce_turns(t);
    for _ in 0..lambda {
        args.push(cur);
        cur = reduce_turns(cur * T::of_u64(b));
    }
    let mut v = config.f0_units::<T>();
    for level in 1..=lambda {
        let s = args[(lambda - level) as usize];
        v = level_pass(config, s, &v);
    }
    v
}

/// One application of `A(s)` to a component vector.
fn level_pass<T: Scalar>(config: &FourierConfig, s: T, v: &[Complex<T>]) -> Vec<Complex<T>> {
    let b = config.base() as u64;
    let inv_b = T::one() / T::of_u64(b);
    let twiddles: Vec<Complex<T>> = (0..b)
        .map(|r| unit_turns(-(T::of_u64(r) * s)).scale(inv_b))
        .collect();
    config
        .edges()
        .iter()
        .map(|row| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (r, &(target, angle)) in row.iter().enumerate() {
                acc += angle.unit::<T>() * twiddles[r] * v[target];
            }
            acc
        })
        .collect()
}

/// The transfer matrix `A(t)` over the component, stored as sparse rows
/// (at most `b` nonzero entries each).
#[derive(Clone, Debug)]
pub struct TransferMatrix<T: Scalar> {
    t: T,
    dim: usize,
    rows: Vec<Vec<(usize, Complex<T>)>>,
}

impl<T: Scalar> TransferMatrix<T> {
    pub fn t(&self) -> T {
        self.t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry by member indices; zero when no digit maps row to col.
    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.rows[row]
            .iter()
            .find(|(c, _)| *c == col)
            .map(|&(_, w)| w)
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn rows(&self) -> &[Vec<(usize, Complex<T>)>] {
        &self.rows
    }

    /// Maximum over rows of the sum of entry moduli.
    pub fn row_sum_norm(&self) -> T {
        let mut best = T::zero();
        for row in &self.rows {
            let s: T = row.iter().map(|(_, w)| w.norm()).sum();
            if s > best {
                best = s;
            }
        }
        best
    }

    /// `A · v`.
    pub fn apply(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        self.rows
            .iter()
            .map(|row| {
                let mut acc = Complex::new(T::zero(), T::zero());
                for &(c, w) in row {
                    acc += w * v[c];
                }
                acc
            })
            .collect()
    }

    /// `u · A` for a row vector `u`.
    pub fn apply_row(&self, u: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.dim];
        for (r, row) in self.rows.iter().enumerate() {
            let ur = u[r];
            if ur.re == T::zero() && ur.im == T::zero() {
                continue;
            }
            for &(c, w) in row {
                out[c] += ur * w;
            }
        }
        out
    }
}

/// Assemble `A(t)`; entries collapse digits that share a target.
pub fn transfer_matrix<T: Scalar>(config: &FourierConfig, t: T) -> TransferMatrix<T> {
    let b = config.base() as u64;
    let inv_b = T::one() / T::of_u64(b);
    let s = reduce_turns(t);
    let twiddles: Vec<Complex<T>> = (0..b)
        .map(|r| unit_turns(-(T::of_u64(r) * s)).scale(inv_b))
        .collect();
    let rows = config
        .edges()
        .iter()
        .map(|row| {
            let mut entries: Vec<(usize, Complex<T>)> = Vec::with_capacity(row.len());
            for (r, &(target, angle)) in row.iter().enumerate() {
                let w = angle.unit::<T>() * twiddles[r];
                match entries.iter_mut().find(|(c, _)| *c == target) {
                    Some((_, acc)) => *acc += w,
                    None => entries.push((target, w)),
                }
            }
            entries.sort_by_key(|&(c, _)| c);
            entries
        })
        .collect();
    TransferMatrix {
        t: s,
        dim: config.component().len(),
        rows,
    }
}
