use num_complex::Complex;
use num_integer::Integer;

use super::angle::{Angle, FLOAT_TOLERANCE, MAX_DENOMINATOR};
use super::digits_rev;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A strongly b-multiplicative function `g` of modulus one.
///
/// `g` is determined by its base `b` and the phases `θ_0, ..., θ_{b-1}`
/// (in turns) of `g` at the digits: writing `n = Σ ε_k b^k`,
/// `g(n) = e(Σ θ_{ε_k})`. `θ_0 = 0` is required so that `g(0) = 1` and
/// `g(kb) = g(k)`.
///
/// When every phase is rational the least common denominator `L` of the
/// phases is precomputed and every evaluation is carried out exactly as a
/// numerator mod `L`; `L` is capped at 2^31 so the modular sums stay in u64.
#[derive(Clone, Debug)]
pub struct BMultFunction {
    base: u32,
    phases: Vec<Angle>,
    exact: Option<ExactTable>,
}

#[derive(Clone, Debug)]
struct ExactTable {
    /// lcm of the phase denominators.
    den: u64,
    /// Phase numerators rescaled to the common denominator.
    nums: Vec<u64>,
}

impl BMultFunction {
    /// Build `g` from its digit phases; `phases.len()` must equal `base`
    /// and the phase at digit 0 must be zero.
    pub fn new(base: u32, phases: Vec<Angle>) -> Result<Self> {
        if base < 2 {
            return Err(Error::invalid("base must be at least 2"));
        }
        if phases.len() != base as usize {
            return Err(Error::invalid(format!(
                "expected {} phases for base {}, got {}",
                base,
                base,
                phases.len()
            )));
        }
        if !phases[0].is_zero() {
            return Err(Error::invalid("phase at digit 0 must be 0 so that g(0) = 1"));
        }
        let exact = Self::exact_table(&phases)?;
        Ok(BMultFunction { base, phases, exact })
    }

    fn exact_table(phases: &[Angle]) -> Result<Option<ExactTable>> {
        let mut den: u64 = 1;
        for a in phases {
            match a {
                Angle::Rational { den: d, .. } => {
                    let l = den as u128 * (d / den.gcd(d)) as u128;
                    if l > MAX_DENOMINATOR as u128 {
                        return Err(Error::too_large(format!(
                            "common denominator of the phases exceeds {MAX_DENOMINATOR}; \
                             exact evaluation would overflow"
                        )));
                    }
                    den = l as u64;
                }
                Angle::Float(_) => return Ok(None),
            }
        }
        let nums = phases
            .iter()
            .map(|a| match a {
                Angle::Rational { num, den: d } => num * (den / d),
                Angle::Float(_) => unreachable!(),
            })
            .collect();
        Ok(Some(ExactTable { den, nums }))
    }

    /// The Thue-Morse sign `g(n) = (-1)^{s_2(n)}`: base 2 with phases 0, 1/2.
    pub fn thue_morse() -> Self {
        BMultFunction::new(2, vec![Angle::ZERO, Angle::HALF]).expect("valid phases")
    }

    /// Parse a function description: either the preset name `thue-morse` or
    /// a spec of the form `b=3;phases=0,1/3,1/2`.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim() == "thue-morse" {
            return Ok(Self::thue_morse());
        }
        let mut base: Option<u32> = None;
        let mut phases: Option<Vec<Angle>> = None;
        for part in text.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("expected key=value, got {part:?}")))?;
            match key.trim() {
                "b" | "base" => {
                    base = Some(value.trim().parse().map_err(|_| {
                        Error::invalid(format!("cannot parse base {:?}", value.trim()))
                    })?);
                }
                "phases" => {
                    phases = Some(
                        value
                            .split(',')
                            .map(Angle::parse)
                            .collect::<Result<Vec<_>>>()?,
                    );
                }
                other => {
                    return Err(Error::invalid(format!(
                        "unknown key {other:?} in function spec"
                    )));
                }
            }
        }
        let base = base.ok_or_else(|| Error::invalid("function spec is missing b="))?;
        let phases = phases.ok_or_else(|| Error::invalid("function spec is missing phases="))?;
        BMultFunction::new(base, phases)
    }

    /// Canonical `b=...;phases=...` form, parseable by [`BMultFunction::parse`].
    pub fn spec_string(&self) -> String {
        let phases: Vec<String> = self.phases.iter().map(|a| a.to_string()).collect();
        format!("b={};phases={}", self.base, phases.join(","))
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn phases(&self) -> &[Angle] {
        &self.phases
    }

    /// True when all phases are rational and evaluation is exact.
    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Common denominator of the phases in the exact case.
    pub fn common_denominator(&self) -> Option<u64> {
        self.exact.as_ref().map(|t| t.den)
    }

    /// Phase numerator of `g(n)` over [`common_denominator`]; `None` when
    /// some phase is irrational.
    ///
    /// [`common_denominator`]: BMultFunction::common_denominator
    pub(crate) fn turn_numerator(&self, n: u128) -> Option<u64> {
        let table = self.exact.as_ref()?;
        if self.base == 2 {
            let ones = n.count_ones() as u64;
            return Some(ones * table.nums[1] % table.den);
        }
        let mut acc: u64 = 0;
        let b = self.base as u128;
        let mut m = n;
        // 128-bit division is a library call; drop to hardware u64 division
        // as soon as the value allows.
        while m > u64::MAX as u128 {
            acc += table.nums[(m % b) as usize];
            m /= b;
        }
        let b = self.base as u64;
        let mut m = m as u64;
        while m > 0 {
            acc += table.nums[(m % b) as usize];
            m /= b;
        }
        Some(acc % table.den)
    }

    /// The angle of `g(n)` in turns.
    pub fn eval_angle(&self, n: u128) -> Angle {
        if let Some(table) = self.exact.as_ref() {
            let num = self.turn_numerator(n).expect("exact table present");
            return Angle::rational_reduced(num, table.den);
        }
        let mut turns = 0.0f64;
        for d in digits_rev(n, self.base) {
            turns += self.phases[d as usize].turns();
        }
        Angle::Float(crate::scalar::reduce_turns(turns))
    }

    /// `g(n)` as a unit complex number.
    pub fn eval_complex<T: Scalar>(&self, n: u128) -> Complex<T> {
        self.eval_angle(n).unit()
    }

    /// When `g` is periodic, returns the witness divisor `b - 1` of its
    /// period; `g` is periodic exactly when `θ_ℓ ≡ ℓ·θ_1 (mod 1)` for all
    /// digits `ℓ` and `θ_{b-1} ≡ 0`.
    pub fn periodic_witness(&self) -> Option<u64> {
        let b = self.base as usize;
        if !self.phases[b - 1].approx_eq(&Angle::ZERO, FLOAT_TOLERANCE) {
            return None;
        }
        let theta1 = self.phases[1];
        for l in 2..b {
            let expect = theta1.mul_int(l as u64);
            if !self.phases[l].approx_eq(&expect, FLOAT_TOLERANCE) {
                return None;
            }
        }
        Some(self.base as u64 - 1)
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic_witness().is_some()
    }
}

impl Angle {
    /// Constructor used by exact evaluation: `num/den` already reduced mod 1
    /// but possibly with a common factor.
    pub(crate) fn rational_reduced(num: u64, den: u64) -> Angle {
        debug_assert!(num < den);
        let g = num.gcd(&den);
        Angle::Rational {
            num: num / g,
            den: den / g,
        }
    }
}

/// The two-scale product `f(n) = g(P·n) · conj(g(Q·n))`.
///
/// A zero scale makes its factor constant 1 (`g(0·n) = g(0) = 1`), so
/// `PairFunction::plain(g)` is `g` itself and `PairFunction::scaled(g, a)`
/// is `n -> g(a·n)`, including the degenerate `a = 0 -> 1`.
#[derive(Clone, Debug)]
pub struct PairFunction {
    g: BMultFunction,
    p: u64,
    q: u64,
}

impl PairFunction {
    pub fn pair(g: BMultFunction, p: u64, q: u64) -> Self {
        PairFunction { g, p, q }
    }

    pub fn plain(g: BMultFunction) -> Self {
        PairFunction { g, p: 1, q: 0 }
    }

    pub fn scaled(g: BMultFunction, a: u64) -> Self {
        Self::pair(g, a, 0)
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

    /// The angle of `f(n)`; `P·n` and `Q·n` must fit in a u128.
    pub fn eval_angle(&self, n: u128) -> Angle {
        let pn = (self.p as u128)
            .checked_mul(n)
            .expect("P*n fits in u128");
        let a = self.g.eval_angle(pn);
        if self.q == 0 {
            return a;
        }
        let qn = (self.q as u128)
            .checked_mul(n)
            .expect("Q*n fits in u128");
        a - self.g.eval_angle(qn)
    }

    /// Phase numerator of `f(n)` over the common denominator of `g`.
    pub(crate) fn turn_numerator(&self, n: u128) -> Option<u64> {
        let den = self.g.common_denominator()?;
        let pn = (self.p as u128).checked_mul(n).expect("P*n fits in u128");
        let a = self.g.turn_numerator(pn)?;
        if self.q == 0 {
            return Some(a);
        }
        let qn = (self.q as u128).checked_mul(n).expect("Q*n fits in u128");
        let b = self.g.turn_numerator(qn)?;
        Some((a + den - b) % den)
    }

    pub fn eval_complex<T: Scalar>(&self, n: u128) -> Complex<T> {
        self.eval_angle(n).unit()
    }

    /// Restrict to the lowest `lambda` base-b digits of the argument.
    pub fn truncate(self, lambda: u32) -> Result<TruncatedFunction> {
        let modulus = (self.base() as u128)
            .checked_pow(lambda)
            .ok_or_else(|| Error::overflow(format!("b^{lambda} exceeds u128")))?;
        Ok(TruncatedFunction {
            inner: self,
            lambda,
            modulus,
        })
    }
}

/// `f_λ(n) = f(n mod b^λ)`: the digit truncation of a [`PairFunction`].
#[derive(Clone, Debug)]
pub struct TruncatedFunction {
    inner: PairFunction,
    lambda: u32,
    modulus: u128,
}

impl TruncatedFunction {
    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    pub fn modulus(&self) -> u128 {
        self.modulus
    }

    pub fn eval_angle(&self, n: u128) -> Angle {
        self.inner.eval_angle(n % self.modulus)
    }

    pub fn eval_complex<T: Scalar>(&self, n: u128) -> Complex<T> {
        self.eval_angle(n).unit()
    }
}
