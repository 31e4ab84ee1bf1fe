//! Long-sum experiments: Möbius-twisted sums along squares, two-prime
//! correlations, linearly twisted square sums, carry-mismatch counting, and
//! block statistics of the Thue-Morse sequence along squares.

use num_complex::Complex;
use rayon::prelude::*;

use crate::digitcore::{thue_morse_bit, Angle, BMultFunction, PairFunction};
use crate::error::{Error, Result};
use crate::scalar::KahanSum;
use crate::sieve::{is_prime, MobiusSieve};
use crate::{Cplx, Real};

/// Largest phase denominator for which sums use exact angle-bucket counters
/// instead of compensated floating summation.
pub const BUCKET_DEN_CAP: u64 = 1024;

/// Which experiment produced a [`SumSeries`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    MobiusSquare,
    DkCorrelation,
    TwistedSquare,
}

impl SeriesKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SeriesKind::MobiusSquare => "mobius-square",
            SeriesKind::DkCorrelation => "dk-correlation",
            SeriesKind::TwistedSquare => "twisted-square",
        }
    }
}

/// A recorded partial sum `S(N)`.
#[derive(Clone, Copy, Debug)]
pub struct Checkpoint {
    pub n: u64,
    pub sum: Cplx,
}

/// Partial sums of a long series at increasing checkpoints.
#[derive(Clone, Debug)]
pub struct SumSeries {
    pub kind: SeriesKind,
    pub checkpoints: Vec<Checkpoint>,
}

impl SumSeries {
    /// `(N, |S(N)|/N)` rows.
    pub fn abs_over_n(&self) -> Vec<(u64, Real)> {
        self.checkpoints
            .iter()
            .map(|c| (c.n, if c.n == 0 { 0.0 } else { c.sum.norm() / c.n as Real }))
            .collect()
    }
}

/// The default decade checkpoints `10^3..10^7`, clipped to `n_max`, with
/// `n_max` itself always included.
pub fn default_checkpoints(n_max: u64) -> Vec<u64> {
    let mut cps: Vec<u64> = [1_000u64, 10_000, 100_000, 1_000_000, 10_000_000]
        .into_iter()
        .filter(|&c| c <= n_max)
        .collect();
    if cps.last() != Some(&n_max) {
        cps.push(n_max);
    }
    cps
}

fn normalize_checkpoints(checkpoints: &[u64], start: u64, n_max: u64) -> Vec<u64> {
    let mut cps: Vec<u64> = checkpoints
        .iter()
        .copied()
        .filter(|&c| c >= start && c <= n_max)
        .collect();
    cps.sort_unstable();
    cps.dedup();
    cps
}

/// `e(a/den)` with conjugation symmetry exact at the bit level:
/// `bucket_unit(den - a, den)` is always the exact complex conjugate of
/// `bucket_unit(a, den)`.
fn bucket_unit(a: u64, den: u64) -> Cplx {
    debug_assert!(a < den);
    if a == 0 {
        return Complex::new(1.0, 0.0);
    }
    if 2 * a == den {
        return Complex::new(-1.0, 0.0);
    }
    if 2 * a < den {
        Angle::rational_reduced(a, den).unit()
    } else {
        bucket_unit(den - a, den).conj()
    }
}

/// Partial-sum accumulator: exact signed counters per angle bucket when the
/// phases live over a small common denominator, compensated complex
/// summation otherwise. Either way, merging in a fixed order is
/// bit-reproducible for any worker count.
#[derive(Clone, Debug)]
enum Accumulator {
    Bucket { den: u64, counts: Vec<i64> },
    Kahan(KahanSum<Real>),
}

impl Accumulator {
    fn bucket(den: u64) -> Self {
        Accumulator::Bucket {
            den,
            counts: vec![0i64; den as usize],
        }
    }

    fn kahan() -> Self {
        Accumulator::Kahan(KahanSum::new())
    }

    fn add_bucket(&mut self, numer: u64, sign: i8) {
        match self {
            Accumulator::Bucket { counts, .. } => counts[numer as usize] += sign as i64,
            Accumulator::Kahan(_) => unreachable!("bucket add on float accumulator"),
        }
    }

    fn add_complex(&mut self, z: Cplx) {
        match self {
            Accumulator::Kahan(k) => k.add(z),
            Accumulator::Bucket { .. } => unreachable!("float add on bucket accumulator"),
        }
    }

    fn merge(&mut self, other: &Accumulator) {
        match (self, other) {
            (
                Accumulator::Bucket { counts, den },
                Accumulator::Bucket {
                    counts: oc,
                    den: od,
                },
            ) => {
                debug_assert_eq!(den, od);
                for (a, b) in counts.iter_mut().zip(oc.iter()) {
                    *a += b;
                }
            }
            (Accumulator::Kahan(k), Accumulator::Kahan(ok)) => k.merge(ok),
            _ => unreachable!("mixed accumulator kinds"),
        }
    }

    fn value(&self) -> Cplx {
        match self {
            Accumulator::Bucket { den, counts } => {
                let mut acc = KahanSum::new();
                for (a, &c) in counts.iter().enumerate() {
                    if c != 0 {
                        acc.add(bucket_unit(a as u64, *den).scale(c as Real));
                    }
                }
                acc.value()
            }
            Accumulator::Kahan(k) => k.value(),
        }
    }
}

/// Drive a blockwise sum from `start` through the checkpoints. Blocks are
/// `block_size` wide with fixed boundaries; partial accumulators merge in
/// block order, so results do not depend on the worker count.
fn run_blocks<F>(
    kind: SeriesKind,
    start: u64,
    checkpoints: &[u64],
    block_size: u64,
    template: &Accumulator,
    block_fn: F,
) -> SumSeries
where
    F: Fn(u64, u64) -> Accumulator + Sync,
{
    let mut total = template.clone();
    let mut rows = Vec::with_capacity(checkpoints.len());
    let mut prev = start;
    for &cp in checkpoints {
        let mut blocks = Vec::new();
        let mut lo = prev;
        while lo < cp {
            let hi = cp.min(lo + block_size);
            blocks.push((lo, hi));
            lo = hi;
        }
        let partials: Vec<Accumulator> = blocks
            .par_iter()
            .map(|&(lo, hi)| block_fn(lo, hi))
            .collect();
        for p in &partials {
            total.merge(p);
        }
        let sum = total.value();
        debug_assert!(sum.norm() <= cp as Real * (1.0 + 1e-9));
        rows.push(Checkpoint { n: cp, sum });
        prev = cp;
    }
    SumSeries {
        kind,
        checkpoints: rows,
    }
}

fn bucket_den_for(g: &BMultFunction) -> Option<u64> {
    g.common_denominator().filter(|&d| d <= BUCKET_DEN_CAP)
}

/// `S(N) = Σ_{1 ≤ n < N} μ(n) · g(n²)` at each checkpoint.
///
/// For the ±1 Thue-Morse convention this is the Möbius-orthogonality sum
/// along squares; for `g ≡ 1` it collapses to the Mertens function
/// `M(N-1)`.
pub fn mobius_square_sum(
    g: &BMultFunction,
    n_max: u64,
    checkpoints: &[u64],
    block_size: u64,
) -> Result<SumSeries> {
    if block_size == 0 {
        return Err(Error::invalid("block size must be positive"));
    }
    if n_max > 1 << 63 {
        return Err(Error::too_large("n_max must stay below 2^63"));
    }
    let cps = normalize_checkpoints(checkpoints, 1, n_max);
    let top = cps.last().copied().unwrap_or(1);
    let sieve = MobiusSieve::new(top.max(2))?;
    let template = match bucket_den_for(g) {
        Some(den) => Accumulator::bucket(den),
        None => Accumulator::kahan(),
    };
    let series = run_blocks(
        SeriesKind::MobiusSquare,
        1,
        &cps,
        block_size,
        &template,
        |lo, hi| {
            let mut acc = template.clone();
            let table = sieve.block(lo, hi).expect("block within sieve range");
            match &mut acc {
                Accumulator::Bucket { .. } => {
                    for (n, mu) in table.iter() {
                        if mu != 0 {
                            let nn = n as u128 * n as u128;
                            let numer = g.turn_numerator(nn).expect("rational phases");
                            acc.add_bucket(numer, mu);
                        }
                    }
                }
                Accumulator::Kahan(k) => {
                    for (n, mu) in table.iter() {
                        if mu != 0 {
                            let nn = n as u128 * n as u128;
                            k.add(g.eval_complex::<Real>(nn).scale(mu as Real));
                        }
                    }
                }
            }
            acc
        },
    );
    Ok(series)
}

/// `S(N) = Σ_{0 ≤ n < N} g(p²n²) · conj(g(q²n²))` at each checkpoint.
///
/// `p`, `q` must be primes coprime to the base; `p = q` is the degenerate
/// positive control (`S(N) = N` exactly) and must be opted into.
pub fn dk_correlation(
    g: &BMultFunction,
    p: u64,
    q: u64,
    n_max: u64,
    checkpoints: &[u64],
    allow_equal: bool,
    block_size: u64,
) -> Result<SumSeries> {
    if block_size == 0 {
        return Err(Error::invalid("block size must be positive"));
    }
    if !is_prime(p) || !is_prime(q) {
        return Err(Error::invalid(format!("p={p} and q={q} must both be prime")));
    }
    let b = g.base() as u64;
    if num_integer::gcd(p, b) != 1 || num_integer::gcd(q, b) != 1 {
        return Err(Error::invalid(format!(
            "p={p}, q={q} must be coprime to the base {b}"
        )));
    }
    if p == q && !allow_equal {
        return Err(Error::invalid(
            "p = q is the degenerate control; pass allow_equal to run it",
        ));
    }
    let hi = p.max(q) as u128;
    if n_max > 0 && (n_max - 1) as u128 * hi >= 1 << 64 {
        return Err(Error::too_large(
            "p·n must stay below 2^64; reduce n_max or the primes",
        ));
    }
    let cps = normalize_checkpoints(checkpoints, 0, n_max);
    let f = PairFunction::pair(g.clone(), p * p, q * q);
    let template = match bucket_den_for(g) {
        Some(den) => Accumulator::bucket(den),
        None => Accumulator::kahan(),
    };
    let series = run_blocks(
        SeriesKind::DkCorrelation,
        0,
        &cps,
        block_size,
        &template,
        |lo, hi| {
            let mut acc = template.clone();
            match &mut acc {
                Accumulator::Bucket { .. } => {
                    for n in lo..hi {
                        let pn = p * n;
                        let qn = q * n;
                        let a = g
                            .turn_numerator(pn as u128 * pn as u128)
                            .expect("rational phases");
                        let bnum = g
                            .turn_numerator(qn as u128 * qn as u128)
                            .expect("rational phases");
                        let den = g.common_denominator().expect("rational phases");
                        acc.add_bucket((a + den - bnum) % den, 1);
                    }
                }
                Accumulator::Kahan(k) => {
                    for n in lo..hi {
                        k.add(f.eval_complex::<Real>(n as u128));
                    }
                }
            }
            acc
        },
    );
    Ok(series)
}

/// `S(N) = Σ_{0 ≤ n < N} f(n²) · e(θ·n)` at each checkpoint, for a
/// two-scale product `f` and a twist angle `θ`.
pub fn twisted_square_sum(
    f: &PairFunction,
    theta: Angle,
    n_max: u64,
    checkpoints: &[u64],
    block_size: u64,
) -> Result<SumSeries> {
    if block_size == 0 {
        return Err(Error::invalid("block size must be positive"));
    }
    let scale = f.p().max(f.q()).max(1) as u128;
    let top = n_max.saturating_sub(1) as u128;
    if top
        .checked_mul(top)
        .and_then(|s| s.checked_mul(scale))
        .is_none()
    {
        return Err(Error::too_large(
            "scale · n² must fit in 128 bits; reduce n_max",
        ));
    }
    let cps = normalize_checkpoints(checkpoints, 0, n_max);
    // Exact bucket accumulation needs rational phases and a rational twist
    // over a small common denominator.
    let bucket = match (f.g().common_denominator(), theta) {
        (Some(fden), Angle::Rational { num, den }) => {
            let l = num_integer::lcm(fden, den);
            if l <= BUCKET_DEN_CAP {
                Some((l, fden, num, den))
            } else {
                None
            }
        }
        _ => None,
    };
    let template = match bucket {
        Some((l, ..)) => Accumulator::bucket(l),
        None => Accumulator::kahan(),
    };
    let series = run_blocks(
        SeriesKind::TwistedSquare,
        0,
        &cps,
        block_size,
        &template,
        |lo, hi| {
            let mut acc = template.clone();
            match bucket {
                Some((l, fden, tnum, tden)) => {
                    for n in lo..hi {
                        let fn_num = f
                            .turn_numerator(n as u128 * n as u128)
                            .expect("rational phases");
                        let twist = tnum as u128 * (n % tden) as u128 % tden as u128;
                        let numer =
                            (fn_num as u128 * (l / fden) as u128 + twist * (l / tden) as u128)
                                % l as u128;
                        acc.add_bucket(numer as u64, 1);
                    }
                }
                None => {
                    for n in lo..hi {
                        let base = f.eval_angle(n as u128 * n as u128);
                        let twisted = base + theta.mul_int(n);
                        acc.add_complex(twisted.unit());
                    }
                }
            }
            acc
        },
    );
    Ok(series)
}

/// Exhaustive count of carry-window mismatches between `f(n) = g(a·n)` and
/// its digit truncation.
#[derive(Clone, Copy, Debug)]
pub struct CarryReport {
    pub base: u32,
    pub a: u64,
    pub lambda: u32,
    pub kappa: u32,
    pub rho: u32,
    /// ℓ < b^λ for which some k-pair exposes a mismatch.
    pub violations: u64,
    /// ℓ count failing the sufficient carry-free criterion
    /// `a·ℓ mod b^ρ < b^ρ - 2a`; an upper bound for `violations`.
    pub sufficient_violations: u64,
    /// The bound scale `b^{λ-ρ}`.
    pub bound_pow: u128,
}

impl CarryReport {
    /// `V / b^{λ-ρ}`: the constant the bound shape `V ≤ C·b^{λ-ρ}` needs.
    pub fn bound_ratio(&self) -> f64 {
        self.violations as f64 / self.bound_pow as f64
    }
}

/// Count `ℓ < b^λ` for which the products
/// `f(ℓb^κ + k₁ + k₂) · conj(f(ℓb^κ + k₁))` differ from the same products
/// under the `(κ+ρ)`-digit truncation of `f`, for any `k₁, k₂ < b^κ`.
///
/// Comparison happens at the angle level: exact for rational phases.
pub fn count_carry_violations(
    g: &BMultFunction,
    a: u64,
    lambda: u32,
    kappa: u32,
    rho: u32,
) -> Result<CarryReport> {
    if rho >= lambda {
        return Err(Error::invalid("rho must be smaller than lambda"));
    }
    let b = g.base() as u128;
    let budget = b
        .checked_pow(lambda + 2 * kappa)
        .filter(|&v| v <= 1 << 32)
        .ok_or_else(|| {
            Error::too_large(format!(
                "brute-force budget b^(λ+2κ) = b^{} exceeds 2^32",
                lambda + 2 * kappa
            ))
        })?;
    let _ = budget;
    let f = PairFunction::scaled(g.clone(), a);
    let trunc = f.clone().truncate(kappa + rho)?;
    let ell_count = (g.base() as u64).pow(lambda);
    let k_count = (g.base() as u64).pow(kappa);
    let rho_pow = (g.base() as u64).pow(rho);

    let violations = (0..ell_count)
        .into_par_iter()
        .map(|ell| {
            let base_arg = ell * k_count;
            for k1 in 0..k_count {
                let x1 = (base_arg + k1) as u128;
                let f_x1 = f.eval_angle(x1);
                let t_x1 = trunc.eval_angle(x1);
                for k2 in 0..k_count {
                    let x2 = x1 + k2 as u128;
                    let lhs = f.eval_angle(x2) - f_x1;
                    let rhs = trunc.eval_angle(x2) - t_x1;
                    if lhs != rhs {
                        return 1u64;
                    }
                }
            }
            0u64
        })
        .sum();

    let sufficient_violations = (0..ell_count)
        .map(|ell| {
            let residue = (a as u128 * ell as u128 % rho_pow as u128) as i128;
            let window = rho_pow as i128 - 2 * a as i128;
            u64::from(residue >= window)
        })
        .sum();

    Ok(CarryReport {
        base: g.base(),
        a,
        lambda,
        kappa,
        rho,
        violations,
        sufficient_violations,
        bound_pow: b.pow(lambda - rho),
    })
}

/// Violation counts across a range of truncation offsets ρ, with the
/// fitted constant `C = max V·b^{ρ-λ}`.
#[derive(Clone, Debug)]
pub struct CarrySweep {
    pub reports: Vec<CarryReport>,
    pub fitted_c: f64,
}

pub fn carry_sweep(
    g: &BMultFunction,
    a: u64,
    lambda: u32,
    kappa: u32,
    rho_min: u32,
    rho_max: u32,
) -> Result<CarrySweep> {
    if rho_min > rho_max {
        return Err(Error::invalid("rho_min must not exceed rho_max"));
    }
    let mut reports = Vec::with_capacity((rho_max - rho_min + 1) as usize);
    for rho in rho_min..=rho_max {
        reports.push(count_carry_violations(g, a, lambda, kappa, rho)?);
    }
    let fitted_c = reports
        .iter()
        .map(CarryReport::bound_ratio)
        .fold(0.0f64, f64::max);
    Ok(CarrySweep { reports, fitted_c })
}

/// Sliding-window counts of length-`block_len` binary words in the
/// sequence `t(n²)`, `0 ≤ n < n`.
#[derive(Clone, Debug)]
pub struct BlockHistogram {
    block_len: u32,
    n: u64,
    counts: Vec<u64>,
}

impl BlockHistogram {
    pub fn block_len(&self) -> u32 {
        self.block_len
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of windows, `N - L + 1`.
    pub fn windows(&self) -> u64 {
        self.n - self.block_len as u64 + 1
    }

    /// One count per word; index bit `L-1` is the first symbol.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn frequency(&self, word: usize) -> f64 {
        self.counts[word] as f64 / self.windows() as f64
    }

    /// The normal-sequence target `2^{-L}`.
    pub fn expected(&self) -> f64 {
        1.0 / self.counts.len() as f64
    }

    /// Word as a binary string, first symbol leftmost.
    pub fn word_string(&self, word: usize) -> String {
        format!("{:0width$b}", word, width = self.block_len as usize)
    }

    /// Histogram of the first `L-1` symbols obtained by summing over the
    /// last symbol. Differs from a directly computed `L-1` histogram only
    /// in the final window (boundary term ≤ 1 per word).
    pub fn marginalize_last(&self) -> Option<BlockHistogram> {
        if self.block_len < 2 {
            return None;
        }
        let counts = self
            .counts
            .chunks_exact(2)
            .map(|c| c[0] + c[1])
            .collect();
        Some(BlockHistogram {
            block_len: self.block_len - 1,
            n: self.n,
            counts,
        })
    }
}

/// Count sliding windows of `t(n²)` for `0 ≤ n < n_max`.
pub fn block_histogram(n_max: u64, block_len: u32) -> Result<BlockHistogram> {
    if !(1..=24).contains(&block_len) {
        return Err(Error::invalid("block length must lie in 1..=24"));
    }
    if n_max < block_len as u64 {
        return Err(Error::invalid("n_max must be at least the block length"));
    }
    let mask = (1u32 << block_len) - 1;
    let mut counts = vec![0u64; 1 << block_len];
    let mut word = 0u32;
    for n in 0..block_len as u64 {
        word = (word << 1) | thue_morse_bit((n * n) as u128) as u32;
    }
    counts[(word & mask) as usize] += 1;
    for start in 1..=(n_max - block_len as u64) {
        let n = start + block_len as u64 - 1;
        word = ((word << 1) | thue_morse_bit((n as u128) * (n as u128)) as u32) & mask;
        counts[word as usize] += 1;
    }
    Ok(BlockHistogram {
        block_len,
        n: n_max,
        counts,
    })
}

/// Empirical block entropy per symbol, `H_L / L` with
/// `H_L = -Σ f·ln f` over nonzero frequencies. Equals `ln 2` for the
/// uniform histogram.
pub fn entropy_estimate(hist: &BlockHistogram) -> f64 {
    let w = hist.windows() as f64;
    let h: f64 = hist
        .counts()
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let f = c as f64 / w;
            -f * f.ln()
        })
        .sum();
    h / hist.block_len() as f64
}
