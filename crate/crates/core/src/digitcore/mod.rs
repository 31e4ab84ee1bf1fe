//! Base-b digits, exact circle angles, and strongly b-multiplicative
//! functions.

mod angle;
mod function;

pub use angle::{Angle, FLOAT_TOLERANCE, MAX_DENOMINATOR};
pub use function::{BMultFunction, PairFunction, TruncatedFunction};

/// Base-b digits of `n`, least significant first. `digits(0, b)` is empty.
///
/// Panics if `base < 2`.
pub fn digits(n: u128, base: u32) -> Vec<u32> {
    digits_rev(n, base).collect()
}

/// Iterator over the base-b digits of `n`, least significant first.
pub(crate) fn digits_rev(n: u128, base: u32) -> impl Iterator<Item = u32> {
    assert!(base >= 2, "base must be at least 2");
    let b = base as u128;
    let mut m = n;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let d = (m % b) as u32;
            m /= b;
            Some(d)
        }
    })
}

/// Digit sum `s_b(n)` of `n` in base `b`.
pub fn digit_sum(n: u128, base: u32) -> u64 {
    if base == 2 {
        return n.count_ones() as u64;
    }
    digits_rev(n, base).map(|d| d as u64).sum()
}

/// The Thue-Morse sequence `t(n) = s_2(n) mod 2`.
pub fn thue_morse_bit(n: u128) -> u8 {
    (n.count_ones() & 1) as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_of_zero() {
        assert!(digits(0, 2).is_empty());
        assert!(digits(0, 10).is_empty());
    }

    #[test]
    fn digits_example() {
        // 25 = 1·3^0 + 2·3^1 + 2·3^2
        assert_eq!(digits(25, 3), vec![1, 2, 2]);
        assert_eq!(digits(25, 2), vec![1, 0, 0, 1, 1]);
        assert_eq!(digits(255, 16), vec![15, 15]);
    }

    #[test]
    fn digit_sum_reconstructs() {
        for n in 0u128..2000 {
            for base in [2u32, 3, 7, 10] {
                let ds: u128 = digits(n, base)
                    .iter()
                    .enumerate()
                    .map(|(k, &d)| d as u128 * (base as u128).pow(k as u32))
                    .sum();
                assert_eq!(ds, n, "base {base}");
                assert_eq!(
                    digit_sum(n, base),
                    digits(n, base).iter().map(|&d| d as u64).sum::<u64>()
                );
            }
        }
    }

    #[test]
    fn thue_morse_prefix() {
        let expect = [0u8, 1, 1, 0, 1, 0, 0, 1];
        for (n, &e) in expect.iter().enumerate() {
            assert_eq!(thue_morse_bit(n as u128), e, "n={n}");
        }
    }

    #[test]
    fn thue_morse_recurrences() {
        for n in 0u128..10_000 {
            assert_eq!(thue_morse_bit(2 * n), thue_morse_bit(n));
            assert_eq!(thue_morse_bit(2 * n + 1), 1 - thue_morse_bit(n));
        }
    }

    #[test]
    #[should_panic]
    fn base_one_rejected() {
        digits(3, 1);
    }
}
