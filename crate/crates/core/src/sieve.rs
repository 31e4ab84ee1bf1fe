//! Prime and Möbius sieves, segmented so that long ranges stream in blocks.

use num_integer::Integer;

use crate::error::{Error, Result};

/// Default block length for segmented sieving.
pub const DEFAULT_BLOCK: u64 = 1 << 20;

/// Hard cap on a single materialized table.
const MAX_TABLE_LEN: u64 = 1 << 31;

/// Largest base-prime bound we are willing to sieve eagerly (10^8 booleans).
const MAX_BASE_PRIME: u64 = 100_000_000;

/// Primes up to and including `limit`, by Eratosthenes.
pub fn primes_upto(limit: u64) -> Result<Vec<u64>> {
    if limit > MAX_BASE_PRIME {
        return Err(Error::too_large(format!(
            "prime table up to {limit} exceeds the {MAX_BASE_PRIME} budget"
        )));
    }
    if limit < 2 {
        return Ok(Vec::new());
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if composite[p] {
            continue;
        }
        primes.push(p as u64);
        let mut m = p * p;
        while m <= n {
            composite[m] = true;
            m += p;
        }
    }
    Ok(primes)
}

/// Deterministic primality by trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Möbius function by trial division; the slow reference implementation.
pub fn mobius_trial(n: u64) -> i8 {
    assert!(n >= 1, "mobius is defined for n >= 1");
    let mut n = n;
    let mut mu = 1i8;
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            mu = -mu;
        }
        d += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// True when `p`, `q`, `b` are pairwise coprime.
pub fn pairwise_coprime(p: u64, q: u64, b: u64) -> bool {
    p.gcd(&q) == 1 && p.gcd(&b) == 1 && q.gcd(&b) == 1
}

/// Möbius values on a half-open range `[lo, hi)`.
#[derive(Clone, Debug)]
pub struct MobiusTable {
    lo: u64,
    values: Vec<i8>,
}

impl MobiusTable {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.lo + self.values.len() as u64
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `μ(n)`; panics when `n` is outside the table range.
    pub fn get(&self, n: u64) -> i8 {
        assert!(n >= self.lo && n < self.hi(), "n={n} outside table");
        self.values[(n - self.lo) as usize]
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// Iterate `(n, μ(n))` in increasing order of `n`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, i8)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.lo + i as u64, v))
    }
}

/// Segmented Möbius sieve: base primes up to `sqrt(limit - 1)` are computed
/// once, then arbitrary blocks `[lo, hi) ⊆ [1, limit)` can be sieved
/// independently.
#[derive(Clone, Debug)]
pub struct MobiusSieve {
    limit: u64,
    base_primes: Vec<u64>,
}

impl MobiusSieve {
    /// Prepare base primes for sieving any block within `[1, limit)`.
    pub fn new(limit: u64) -> Result<Self> {
        if limit < 2 {
            return Ok(MobiusSieve {
                limit: 2,
                base_primes: Vec::new(),
            });
        }
        let root = (limit - 1).isqrt();
        let base_primes = primes_upto(root).map_err(|_| {
            Error::too_large(format!(
                "sieving up to {limit} needs base primes past the {MAX_BASE_PRIME} budget"
            ))
        })?;
        Ok(MobiusSieve { limit, base_primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Möbius values on `[lo, hi)`. Requires `1 <= lo <= hi <= limit`.
    pub fn block(&self, lo: u64, hi: u64) -> Result<MobiusTable> {
        if lo < 1 || lo > hi || hi > self.limit {
            return Err(Error::invalid(format!(
                "block [{lo}, {hi}) must satisfy 1 <= lo <= hi <= {}",
                self.limit
            )));
        }
        if hi - lo > MAX_TABLE_LEN {
            return Err(Error::too_large(format!(
                "block of {} values exceeds the {MAX_TABLE_LEN} cap; sieve smaller blocks",
                hi - lo
            )));
        }
        let len = (hi - lo) as usize;
        let mut mu = vec![1i8; len];
        // rem[i] tracks lo+i divided by every base prime that occurs in it
        // exactly once; a leftover > 1 is a single large prime factor.
        let mut rem: Vec<u64> = (lo..hi).collect();
        for &p in &self.base_primes {
            if (p as u128) * (p as u128) >= hi as u128 {
                break;
            }
            let start = lo.div_ceil(p) * p;
            let mut m = start;
            while m < hi {
                let i = (m - lo) as usize;
                mu[i] = -mu[i];
                rem[i] /= p;
                m += p;
            }
            let p2 = p * p;
            let start2 = (lo.div_ceil(p2) as u128 * p2 as u128).min(hi as u128) as u64;
            let mut m = start2;
            while m < hi {
                mu[(m - lo) as usize] = 0;
                // A second factor of p may remain in rem; it no longer
                // matters since μ is already 0 there.
                m += p2;
            }
        }
        for i in 0..len {
            if rem[i] > 1 {
                mu[i] = -mu[i];
            }
        }
        Ok(MobiusTable { lo, values: mu })
    }
}

/// Möbius values on `[lo, hi)`, sieved internally in blocks of `block_size`.
pub fn sieve_mobius(lo: u64, hi: u64, block_size: u64) -> Result<MobiusTable> {
    if block_size == 0 {
        return Err(Error::invalid("block size must be positive"));
    }
    if lo < 1 || lo > hi {
        return Err(Error::invalid(format!(
            "range [{lo}, {hi}) must satisfy 1 <= lo <= hi"
        )));
    }
    if hi - lo > MAX_TABLE_LEN {
        return Err(Error::too_large(format!(
            "materializing {} values exceeds the {MAX_TABLE_LEN} cap; \
             stream blocks through MobiusSieve instead",
            hi - lo
        )));
    }
    let sieve = MobiusSieve::new(hi.max(2))?;
    let mut values = Vec::with_capacity((hi - lo) as usize);
    let mut cur = lo;
    while cur < hi {
        let end = hi.min(cur.saturating_add(block_size));
        let table = sieve.block(cur, end)?;
        values.extend_from_slice(table.values());
        cur = end;
    }
    Ok(MobiusTable { lo, values })
}

/// Mertens function `M(n) = Σ_{k<=n} μ(k)`.
pub fn mertens(n: u64) -> Result<i64> {
    if n == 0 {
        return Ok(0);
    }
    let table = sieve_mobius(1, n + 1, DEFAULT_BLOCK)?;
    Ok(table.values().iter().map(|&v| v as i64).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_primes() {
        assert_eq!(primes_upto(1).unwrap(), Vec::<u64>::new());
        assert_eq!(primes_upto(20).unwrap(), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        // π(100) = 25
        assert_eq!(primes_upto(100).unwrap().len(), 25);
    }

    #[test]
    fn primality_trial() {
        let primes = primes_upto(1000).unwrap();
        for n in 0u64..=1000 {
            assert_eq!(is_prime(n), primes.binary_search(&n).is_ok(), "n={n}");
        }
    }

    #[test]
    fn mobius_first_values() {
        // μ(1..10) = 1,-1,-1,0,-1,1,-1,0,0,1
        let expect = [1i8, -1, -1, 0, -1, 1, -1, 0, 0, 1];
        for (i, &e) in expect.iter().enumerate() {
            assert_eq!(mobius_trial(i as u64 + 1), e, "n={}", i + 1);
        }
    }

    #[test]
    fn sieve_matches_trial_division() {
        let table = sieve_mobius(1, 5000, 64).unwrap();
        for (n, v) in table.iter() {
            assert_eq!(v, mobius_trial(n), "n={n}");
        }
    }

    #[test]
    fn sieve_blocks_independent_of_split() {
        let whole = sieve_mobius(1, 3000, 1 << 20).unwrap();
        for block in [1u64, 7, 100, 2999, 3000] {
            let split = sieve_mobius(1, 3000, block).unwrap();
            assert_eq!(whole.values(), split.values(), "block={block}");
        }
    }

    #[test]
    fn sieve_interior_block() {
        let sieve = MobiusSieve::new(20_000).unwrap();
        let table = sieve.block(9_973, 10_412).unwrap();
        for (n, v) in table.iter() {
            assert_eq!(v, mobius_trial(n), "n={n}");
        }
        assert_eq!(table.lo(), 9_973);
        assert_eq!(table.hi(), 10_412);
    }

    #[test]
    fn mertens_checkpoints() {
        assert_eq!(mertens(1).unwrap(), 1);
        assert_eq!(mertens(10).unwrap(), -1);
        assert_eq!(mertens(100).unwrap(), 1);
    }

    #[test]
    fn block_bounds_checked() {
        let sieve = MobiusSieve::new(100).unwrap();
        assert!(sieve.block(0, 10).is_err());
        assert!(sieve.block(5, 4).is_err());
        assert!(sieve.block(1, 101).is_err());
        assert!(sieve.block(1, 100).is_ok());
        assert!(sieve.block(7, 7).unwrap().is_empty());
    }

    #[test]
    fn coprime_checks() {
        assert!(pairwise_coprime(9, 25, 2));
        assert!(!pairwise_coprime(9, 24, 2));
        assert!(!pairwise_coprime(9, 25, 5));
        assert!(pairwise_coprime(1, 1, 2));
    }
}
