//! Built-in oracle-equivalence suite: every check compares a fast
//! implementation against an independent brute-force or closed-form oracle.

use num_integer::gcd;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use digit_spectra_core::correlation::{block_histogram, dk_correlation, mobius_square_sum};
use digit_spectra_core::digitcore::{digit_sum, thue_morse_bit, Angle, BMultFunction};
use digit_spectra_core::pairgraph::{build_component, find_i0, path_counts, sweep_members};
use digit_spectra_core::sieve::{mertens, mobius_trial, pairwise_coprime, sieve_mobius};
use digit_spectra_core::transfer::{fourier_direct, fourier_recursive, FourierConfig};
use digit_spectra_core::{Error, Result};

type CheckResult = std::result::Result<(), String>;

fn fail(msg: impl Into<String>) -> CheckResult {
    Err(msg.into())
}

fn thue_morse_recurrence() -> CheckResult {
    let prefix = [0u8, 1, 1, 0, 1, 0, 0, 1];
    for (n, &want) in prefix.iter().enumerate() {
        if thue_morse_bit(n as u128) != want {
            return fail(format!("t({n}) != {want}"));
        }
    }
    for n in 0..4096u128 {
        let t = thue_morse_bit(n);
        if thue_morse_bit(2 * n) != t || thue_morse_bit(2 * n + 1) != 1 - t {
            return fail(format!("recurrence fails at n={n}"));
        }
    }
    Ok(())
}

fn digit_evaluation_exact() -> CheckResult {
    let tm = BMultFunction::thue_morse();
    // s2(25) = 3, so the angle is 3/2 = 1/2 mod 1.
    if tm.eval_angle(25) != Angle::rational(1, 2).unwrap() {
        return fail("thue-morse angle at 25 is not 1/2");
    }
    for n in 0..2048u128 {
        let want = if digit_sum(n, 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        let got = tm.eval_complex::<f64>(n);
        if (got.re - want).abs() > 1e-12 || got.im.abs() > 1e-12 {
            return fail(format!("thue-morse value at {n}: {got}"));
        }
    }
    let half = Angle::rational(1, 2).unwrap();
    let periodic = BMultFunction::new(3, vec![Angle::ZERO, half, Angle::ZERO])
        .map_err(|e| e.to_string())?;
    if !periodic.is_periodic() {
        return fail("b=3, phases (0,1/2,0) should be periodic ((-1)^n)");
    }
    if tm.is_periodic() {
        return fail("thue-morse misclassified as periodic");
    }
    // The periodic witness: g(n) = (-1)^n exactly.
    for n in 0..729u128 {
        let got = periodic.eval_complex::<f64>(n).re;
        let want = if n % 2 == 0 { 1.0 } else { -1.0 };
        if (got - want).abs() > 1e-12 {
            return fail(format!("(-1)^n mismatch at {n}"));
        }
    }
    Ok(())
}

fn sieve_against_trial_division() -> CheckResult {
    let table = sieve_mobius(1, 20_001, 1 << 12).map_err(|e| e.to_string())?;
    for (n, mu) in table.iter() {
        if mu != mobius_trial(n) {
            return fail(format!("mu({n}): sieve {mu}, trial {}", mobius_trial(n)));
        }
    }
    let checkpoints = [(10u64, -1i64), (100, 1)];
    for (n, want) in checkpoints {
        let got = mertens(n).map_err(|e| e.to_string())?;
        if got != want {
            return fail(format!("M({n}) = {got}, want {want}"));
        }
    }
    Ok(())
}

fn random_coprime_triple(rng: &mut ChaCha8Rng, ordered: bool) -> (u32, u64, u64) {
    loop {
        let b = rng.gen_range(2..=5u32);
        let p = rng.gen_range(1..=200u64);
        let q = rng.gen_range(1..=200u64);
        if !pairwise_coprime(p, q, b as u64) || p == q {
            continue;
        }
        if ordered && !((b as u64) < p && p < q) {
            continue;
        }
        return (b, p, q);
    }
}

fn component_constructions_agree(rng: &mut ChaCha8Rng) -> CheckResult {
    for _ in 0..5 {
        let (b, p, q) = random_coprime_triple(rng, false);
        let comp = build_component(b, p, q).map_err(|e| e.to_string())?;
        if comp.len() as u64 != p + q - 1 {
            return fail(format!("({b},{p},{q}): size {} != P+Q-1", comp.len()));
        }
        if comp.members() != sweep_members(p, q).as_slice() {
            return fail(format!("({b},{p},{q}): closure != t-sweep"));
        }
    }
    Ok(())
}

fn distinguished_row_exists(rng: &mut ChaCha8Rng) -> CheckResult {
    for _ in 0..5 {
        let (b, p, q) = random_coprime_triple(rng, true);
        let comp = build_component(b, p, q).map_err(|e| e.to_string())?;
        let i0 = find_i0(&comp).map_err(|e| e.to_string())?;
        if i0 >= b as u64 {
            return fail(format!("({b},{p},{q}): i0 = {i0} not below b"));
        }
    }
    Ok(())
}

fn fourier_recursion_matches_direct() -> CheckResult {
    let cfg = FourierConfig::new(BMultFunction::thue_morse(), 9, 25)
        .map_err(|e| e.to_string())?;
    let ts = [0.0f64, 0.5, 1.0 / 3.0, 0.125, 0.9, 0.0625, 0.71, 0.007];
    for &t in &ts {
        for lambda in 0..=6u32 {
            for &(i, j) in cfg.component().members() {
                let direct =
                    fourier_direct(&cfg, i, j, lambda, t).map_err(|e| e.to_string())?;
                let rec =
                    fourier_recursive(&cfg, i, j, lambda, t).map_err(|e| e.to_string())?;
                if (direct - rec).norm() > 1e-9 {
                    return fail(format!(
                        "F_{lambda}^{{{i},{j}}}({t}): direct {direct}, recursive {rec}"
                    ));
                }
            }
        }
    }
    Ok(())
}

fn path_count_row_sums() -> CheckResult {
    let comp = build_component(2, 9, 25).map_err(|e| e.to_string())?;
    for l in [1u32, 3, 6] {
        let m = path_counts(&comp, l).map_err(|e| e.to_string())?;
        let want = 1u128 << l;
        if m.row_sums().iter().any(|&s| s != want) {
            return fail(format!("row sums at L={l} differ from 2^{l}"));
        }
    }
    Ok(())
}

fn correlation_degenerate_control() -> CheckResult {
    let tm = BMultFunction::thue_morse();
    let s = dk_correlation(&tm, 5, 5, 500, &[500], true, 64).map_err(|e| e.to_string())?;
    let z = s.checkpoints[0].sum;
    if z.re != 500.0 || z.im != 0.0 {
        return fail(format!("p=q control: S(500) = {z}, want exactly 500"));
    }
    Ok(())
}

fn block_partition_invariance() -> CheckResult {
    let tm = BMultFunction::thue_morse();
    let a = mobius_square_sum(&tm, 2_000, &[2_000], 1 << 16).map_err(|e| e.to_string())?;
    let b = mobius_square_sum(&tm, 2_000, &[2_000], 61).map_err(|e| e.to_string())?;
    let (za, zb) = (a.checkpoints[0].sum, b.checkpoints[0].sum);
    if za.re != zb.re || za.im != zb.im {
        return fail(format!("block-size dependence: {za} vs {zb}"));
    }
    Ok(())
}

fn histogram_window_count() -> CheckResult {
    let h = block_histogram(1_000, 4).map_err(|e| e.to_string())?;
    let total: u64 = h.counts().iter().sum();
    if total != 997 {
        return fail(format!("window count {total} != 997"));
    }
    Ok(())
}

fn angle_arithmetic_exact(rng: &mut ChaCha8Rng) -> CheckResult {
    for _ in 0..200 {
        let d1 = rng.gen_range(1..=64i64);
        let d2 = rng.gen_range(1..=64i64);
        let n1 = rng.gen_range(0..d1);
        let n2 = rng.gen_range(0..d2);
        let a = Angle::rational(n1, d1).map_err(|e| e.to_string())?;
        let b = Angle::rational(n2, d2).map_err(|e| e.to_string())?;
        let sum = a + b;
        // Oracle: integer arithmetic over the common denominator.
        let l = (d1 / gcd(d1, d2)) * d2;
        let want = Angle::rational((n1 * (l / d1) + n2 * (l / d2)) % l, l)
            .map_err(|e| e.to_string())?;
        if sum != want {
            return fail(format!("{a} + {b} = {sum}, want {want}"));
        }
        if !(a + (-a)).is_zero() {
            return fail(format!("{a} + (-{a}) is not 0"));
        }
    }
    Ok(())
}

/// Run every check, printing one line per check; `Err` (exit code 2) when
/// any check fails.
pub fn run(seed: u64) -> Result<()> {
    println!("# digit-spectra {} selftest", env!("CARGO_PKG_VERSION"));
    println!("# seed: {seed}");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0usize;
    let mut total = 0usize;
    let mut check = |name: &str, result: CheckResult| {
        total += 1;
        match result {
            Ok(()) => println!("ok {name}"),
            Err(msg) => {
                failures += 1;
                println!("FAIL {name}: {msg}");
            }
        }
    };

    check("thue-morse-recurrence", thue_morse_recurrence());
    check("digit-evaluation-exact", digit_evaluation_exact());
    check("angle-arithmetic-exact", angle_arithmetic_exact(&mut rng));
    check("sieve-vs-trial-division", sieve_against_trial_division());
    check(
        "component-constructions-agree",
        component_constructions_agree(&mut rng),
    );
    check("distinguished-row-exists", distinguished_row_exists(&mut rng));
    check(
        "fourier-recursion-vs-direct",
        fourier_recursion_matches_direct(),
    );
    check("path-count-row-sums", path_count_row_sums());
    check(
        "correlation-degenerate-control",
        correlation_degenerate_control(),
    );
    check("block-partition-invariance", block_partition_invariance());
    check("histogram-window-count", histogram_window_count());

    if failures > 0 {
        println!("selftest: {failures}/{total} checks failed");
        Err(Error::internal(format!("{failures} selftest checks failed")))
    } else {
        println!("selftest: all {total} checks passed");
        Ok(())
    }
}
