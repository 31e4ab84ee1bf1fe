//! `digit-spectra`: experiments with strongly b-multiplicative functions.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 internal inconsistency
//! (a verified structural invariant failed, or a selftest check failed).

mod report;
mod selftest;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use digit_spectra_core::correlation::{
    block_histogram, carry_sweep, default_checkpoints, dk_correlation, entropy_estimate,
    mobius_square_sum, twisted_square_sum, SumSeries,
};
use digit_spectra_core::digitcore::{Angle, BMultFunction, PairFunction};
use digit_spectra_core::pairgraph::{build_component, find_i0};
use digit_spectra_core::sieve::is_prime;
use digit_spectra_core::transfer::{
    decay_profile, find_contraction, FourierConfig, DEFAULT_DELTA_MIN, DEFAULT_L_MAX,
};
use digit_spectra_core::{Error, Result};

use report::{num, Format, Output};

#[derive(Parser, Debug)]
#[command(
    name = "digit-spectra",
    version,
    about = "Digit-spectra experiments: pair components, transfer-product contraction, \
             long correlation sums, carry statistics, and block frequencies.",
    long_about = None
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// Worker threads for parallel kernels (default: all hardware threads).
    /// Results never depend on this setting.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Assert reproducibility: block boundaries and merge order are always
    /// fixed, so outputs are bit-identical across reruns and thread counts;
    /// this flag records the contract in the output header.
    #[arg(long, global = true)]
    deterministic: bool,

    /// Seed for the randomized sweeps in `selftest`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output path; `-` writes to stdout.
    #[arg(long, global = true, default_value = "-")]
    output: String,

    /// Output format (`contract` always emits JSON).
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Block width for block-parallel long sums; affects rounding only for
    /// irrational phases (exact-phase sums are block-size invariant).
    #[arg(long, global = true, default_value_t = 1 << 20)]
    block_size: u64,
}

/// Function selection: an explicit spec or a named preset.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
struct FunctionArgs {
    /// Function spec `b=<base>;phases=<a0,a1,...>` with phases in turns
    /// (rationals like `1/2` are exact, decimals are rounded to f64).
    #[arg(long)]
    g: Option<String>,

    /// Named preset; currently `thue-morse` (= `b=2;phases=0,1/2`).
    #[arg(long)]
    preset: Option<String>,
}

impl FunctionArgs {
    fn resolve(&self) -> Result<BMultFunction> {
        let text = self
            .g
            .as_deref()
            .or(self.preset.as_deref())
            .expect("clap group guarantees one source");
        BMultFunction::parse(text)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate the pair component C for scales (P, Q) in base b.
    ///
    /// Emits one `i,j` row per member; the summary reports the size
    /// (always P+Q-1) and, when b < P < Q, the distinguished row index i0
    /// whose outgoing step (i0, b-1) -> (i0, b) is unique.
    Component(ComponentArgs),

    /// Certified decay profile of |F_lambda(t)| for a prime pair (p, q).
    ///
    /// Searches a contraction certificate for the transfer products of
    /// (P, Q) = (p^2, q^2), then reports per-lambda grid suprema and
    /// certified upper bounds with the exponential fit C*exp(-eta*lambda).
    FourierDecay(FourierDecayArgs),

    /// Search a contraction certificate (L, delta) for a prime pair.
    ///
    /// Output is always JSON: {found: true, L, delta, grid, lipschitz_K}
    /// on success, {found: false, best_grid_sup} when the search budget is
    /// exhausted (which is not a disproof).
    Contract(ContractArgs),

    /// Moebius-twisted sum along squares: S(N) = sum mu(n) g(n^2), 1 <= n < N.
    MobiusSum(MobiusSumArgs),

    /// Two-prime correlation: S(N) = sum g(p^2 n^2) conj(g(q^2 n^2)), n < N.
    DkCorr(DkCorrArgs),

    /// Linearly twisted square sum: S(N) = sum f(n^2) e(theta*n), n < N,
    /// where f(n) = g(P*n) conj(g(Q*n)) or plain g when no scales are given.
    TwistedSum(TwistedSumArgs),

    /// Exhaustive carry-window mismatch counts between f(n) = g(a*n) and
    /// its digit truncations, for a range of truncation offsets rho.
    CarryCheck(CarryCheckArgs),

    /// Sliding-window block frequencies of the Thue-Morse sequence along
    /// squares, with the per-symbol entropy estimate.
    Normality(NormalityArgs),

    /// Run the built-in oracle-equivalence suite; exits 2 on any failure.
    Selftest,
}

#[derive(Args, Debug)]
struct ComponentArgs {
    /// Base b >= 2.
    #[arg(long)]
    base: u32,

    /// First scale P >= 1; pairwise coprime with Q and b.
    #[arg(long = "P")]
    scale_p: u64,

    /// Second scale Q >= 1; pairwise coprime with P and b.
    #[arg(long = "Q")]
    scale_q: u64,
}

#[derive(Args, Debug)]
struct FourierDecayArgs {
    #[command(flatten)]
    function: FunctionArgs,

    /// First prime; the pair is studied at scales (p^2, q^2).
    #[arg(long)]
    p: u64,

    /// Second prime, distinct from p.
    #[arg(long)]
    q: u64,

    /// Largest lambda in the profile; must exceed the certificate window.
    #[arg(long, default_value_t = 20)]
    lambda_max: u32,

    /// Grid resolution for the reported per-lambda grid suprema.
    #[arg(long, default_value_t = 1024)]
    grid: u64,
}

#[derive(Args, Debug)]
struct ContractArgs {
    #[command(flatten)]
    function: FunctionArgs,

    /// First prime; the pair is studied at scales (p^2, q^2).
    #[arg(long)]
    p: u64,

    /// Second prime, distinct from p.
    #[arg(long)]
    q: u64,

    /// Largest product length L to try.
    #[arg(long, default_value_t = DEFAULT_L_MAX)]
    l_max: u32,

    /// Smallest acceptable contraction margin delta.
    #[arg(long, default_value_t = DEFAULT_DELTA_MIN)]
    delta_min: f64,
}

#[derive(Args, Debug)]
struct MobiusSumArgs {
    #[command(flatten)]
    function: FunctionArgs,

    /// Sum upper limit N (exclusive).
    #[arg(long)]
    n_max: u64,

    /// Comma-separated checkpoint list (default: decades up to n-max).
    /// An empty list gives a header-only report.
    #[arg(long)]
    checkpoints: Option<String>,
}

#[derive(Args, Debug)]
struct DkCorrArgs {
    #[command(flatten)]
    function: FunctionArgs,

    /// First prime, coprime to the base.
    #[arg(long)]
    p: u64,

    /// Second prime, coprime to the base.
    #[arg(long)]
    q: u64,

    /// Sum upper limit N (exclusive).
    #[arg(long)]
    n_max: u64,

    /// Comma-separated checkpoint list (default: decades up to n-max).
    #[arg(long)]
    checkpoints: Option<String>,

    /// Allow p = q (degenerate positive control: S(N) = N exactly).
    #[arg(long)]
    allow_equal: bool,
}

#[derive(Args, Debug)]
struct TwistedSumArgs {
    #[command(flatten)]
    function: FunctionArgs,

    /// First scale of f(n) = g(P*n) conj(g(Q*n)); omit both for f = g.
    #[arg(long = "P", requires = "scale_q")]
    scale_p: Option<u64>,

    /// Second scale; required together with --P.
    #[arg(long = "Q", requires = "scale_p")]
    scale_q: Option<u64>,

    /// Twist angle theta in turns (`1/3` exact, decimals rounded).
    #[arg(long, default_value = "0")]
    theta: String,

    /// Sum upper limit N (exclusive).
    #[arg(long)]
    n_max: u64,

    /// Comma-separated checkpoint list (default: decades up to n-max).
    #[arg(long)]
    checkpoints: Option<String>,
}

#[derive(Args, Debug)]
struct CarryCheckArgs {
    #[command(flatten)]
    function: FunctionArgs,

    /// Scale a of f(n) = g(a*n); a = 0 gives the constant function.
    #[arg(long)]
    a: u64,

    /// Digit length of the scanned prefix range (ell < b^lambda).
    #[arg(long)]
    lambda: u32,

    /// Digit length of the summand window (k < b^kappa).
    #[arg(long)]
    kappa: u32,

    /// Smallest truncation offset rho to scan.
    #[arg(long, default_value_t = 1)]
    rho_min: u32,

    /// Largest truncation offset rho to scan (default: lambda - 1).
    #[arg(long)]
    rho_max: Option<u32>,
}

#[derive(Args, Debug)]
struct NormalityArgs {
    /// Number of sequence terms t(n^2), 0 <= n < n-max.
    #[arg(long)]
    n_max: u64,

    /// Window length L, 1 <= L <= 24 (2^L distinct words).
    #[arg(long, default_value_t = 8)]
    block_len: u32,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_internal() { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::invalid(format!("cannot configure {n} worker threads: {e}")))?;
    }
    let g = &cli.global;
    let out = match &cli.command {
        Command::Component(a) => cmd_component(g, a)?,
        Command::FourierDecay(a) => cmd_fourier_decay(g, a)?,
        Command::Contract(a) => cmd_contract(g, a)?,
        Command::MobiusSum(a) => cmd_mobius_sum(g, a)?,
        Command::DkCorr(a) => cmd_dk_corr(g, a)?,
        Command::TwistedSum(a) => cmd_twisted_sum(g, a)?,
        Command::CarryCheck(a) => cmd_carry_check(g, a)?,
        Command::Normality(a) => cmd_normality(g, a)?,
        Command::Selftest => return selftest::run(cli.global.seed),
    };
    out.write(&cli.global.output, cli.global.format)
}

/// Common trailing config entries; keep these last so `# args:` stays a
/// valid command line with the computation flags first.
fn finish_config(out: &mut Output, g: &GlobalOpts, uses_blocks: bool) {
    if uses_blocks {
        out.config("block-size", g.block_size);
    }
    out.config("format", g.format.as_str());
    out.config_flag("deterministic", g.deterministic);
}

fn parse_checkpoint_list(text: &str) -> Result<Vec<u64>> {
    let t = text.trim();
    if t.is_empty() {
        return Ok(Vec::new());
    }
    t.split(',')
        .map(|x| {
            x.trim()
                .parse::<u64>()
                .map_err(|_| Error::invalid(format!("bad checkpoint {x:?} in --checkpoints")))
        })
        .collect()
}

/// Resolve the checkpoint list exactly as the computation will use it, so
/// the echoed config matches the emitted rows.
fn resolve_checkpoints(opt: &Option<String>, start: u64, n_max: u64) -> Result<Vec<u64>> {
    let mut cps = match opt {
        Some(text) => parse_checkpoint_list(text)?,
        None => default_checkpoints(n_max),
    };
    cps.retain(|&c| c >= start && c <= n_max);
    cps.sort_unstable();
    cps.dedup();
    Ok(cps)
}

fn join_checkpoints(cps: &[u64]) -> String {
    cps.iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn series_rows(out: &mut Output, series: &SumSeries) {
    out.columns(&["N", "S_re", "S_im", "abs_over_N"]);
    for c in &series.checkpoints {
        let ratio = if c.n == 0 { 0.0 } else { c.sum.norm() / c.n as f64 };
        out.row(vec![json!(c.n), num(c.sum.re), num(c.sum.im), num(ratio)]);
    }
}

fn require_prime_pair(p: u64, q: u64, base: u32) -> Result<()> {
    if !is_prime(p) || !is_prime(q) {
        return Err(Error::invalid(format!(
            "--p {p} and --q {q} must both be prime"
        )));
    }
    if p == q {
        return Err(Error::invalid("--p and --q must be distinct primes"));
    }
    if num_integer::gcd(p, base as u64) != 1 || num_integer::gcd(q, base as u64) != 1 {
        return Err(Error::invalid(format!(
            "--p {p} and --q {q} must be coprime to the base {base}"
        )));
    }
    Ok(())
}

fn cmd_component(g: &GlobalOpts, a: &ComponentArgs) -> Result<Output> {
    let comp = build_component(a.base, a.scale_p, a.scale_q)?;
    let mut out = Output::new("component");
    out.config("base", a.base)
        .config("P", a.scale_p)
        .config("Q", a.scale_q);
    finish_config(&mut out, g, false);
    out.extra("size", json!(comp.len()));
    if (a.base as u64) < a.scale_p && a.scale_p < a.scale_q {
        // Failure here is an internal inconsistency (exit 2): the theory
        // guarantees a unique distinguished row in this regime.
        let i0 = find_i0(&comp)?;
        out.extra("i0", json!(i0));
    }
    out.columns(&["i", "j"]);
    for &(i, j) in comp.members() {
        out.row(vec![json!(i), json!(j)]);
    }
    Ok(out)
}

fn cmd_fourier_decay(g: &GlobalOpts, a: &FourierDecayArgs) -> Result<Output> {
    let func = a.function.resolve()?;
    require_prime_pair(a.p, a.q, func.base())?;
    let spec = func.spec_string();
    let cfg = FourierConfig::from_primes(func, a.p, a.q)?;
    let profile = decay_profile(&cfg, a.lambda_max, a.grid)?;
    let mut out = Output::new("fourier-decay");
    out.config("g", &spec)
        .config("p", a.p)
        .config("q", a.q)
        .config("lambda-max", a.lambda_max)
        .config("grid", a.grid);
    finish_config(&mut out, g, false);
    let cert = &profile.certificate;
    out.extra("certificate-L", json!(cert.l))
        .extra("certificate-delta", num(cert.delta))
        .extra("certificate-grid", json!(cert.grid_m))
        .extra("lipschitz-K", num(cert.lipschitz_k))
        .extra("eta-lower-bound", num(cert.eta_lower_bound()))
        .extra("fit-c", num(profile.fit_c))
        .extra("fit-eta", num(profile.fit_eta));
    out.columns(&["lambda", "grid", "sup_grid", "sup_certified"]);
    for row in &profile.rows {
        out.row(vec![
            json!(row.lambda),
            json!(row.grid_m),
            num(row.sup_grid),
            num(row.sup_certified),
        ]);
    }
    Ok(out)
}

fn cmd_contract(g: &GlobalOpts, a: &ContractArgs) -> Result<Output> {
    let func = a.function.resolve()?;
    require_prime_pair(a.p, a.q, func.base())?;
    let spec = func.spec_string();
    let cfg = FourierConfig::from_primes(func, a.p, a.q)?;
    let search = find_contraction(&cfg, a.l_max, a.delta_min)?;
    let mut out = Output::new("contract");
    out.config("g", &spec)
        .config("p", a.p)
        .config("q", a.q)
        .config("l-max", a.l_max)
        .config("delta-min", a.delta_min);
    finish_config(&mut out, g, false);
    out.force_json();
    match search.certificate {
        Some(cert) => {
            out.extra("found", json!(true))
                .extra("L", json!(cert.l))
                .extra("delta", num(cert.delta))
                .extra("grid", json!(cert.grid_m))
                .extra("lipschitz_K", num(cert.lipschitz_k))
                .extra("eta_lower_bound", num(cert.eta_lower_bound()));
        }
        None => {
            out.extra("found", json!(false)).extra(
                "best_grid_sup",
                num(search.best_grid_sup().unwrap_or(f64::NAN)),
            );
        }
    }
    Ok(out)
}

fn cmd_mobius_sum(g: &GlobalOpts, a: &MobiusSumArgs) -> Result<Output> {
    let func = a.function.resolve()?;
    let spec = func.spec_string();
    let cps = resolve_checkpoints(&a.checkpoints, 1, a.n_max)?;
    let series = mobius_square_sum(&func, a.n_max, &cps, g.block_size)?;
    let mut out = Output::new("mobius-sum");
    out.config("g", &spec)
        .config("n-max", a.n_max)
        .config("checkpoints", join_checkpoints(&cps));
    finish_config(&mut out, g, true);
    series_rows(&mut out, &series);
    Ok(out)
}

fn cmd_dk_corr(g: &GlobalOpts, a: &DkCorrArgs) -> Result<Output> {
    let func = a.function.resolve()?;
    if a.p == a.q && !a.allow_equal {
        return Err(Error::invalid(
            "--p equals --q: the degenerate control returns S(N) = N exactly; \
             pass --allow-equal to run it",
        ));
    }
    let spec = func.spec_string();
    let cps = resolve_checkpoints(&a.checkpoints, 0, a.n_max)?;
    let series = dk_correlation(
        &func,
        a.p,
        a.q,
        a.n_max,
        &cps,
        a.allow_equal,
        g.block_size,
    )?;
    let mut out = Output::new("dk-corr");
    out.config("g", &spec)
        .config("p", a.p)
        .config("q", a.q)
        .config("n-max", a.n_max)
        .config("checkpoints", join_checkpoints(&cps))
        .config_flag("allow-equal", a.allow_equal);
    finish_config(&mut out, g, true);
    series_rows(&mut out, &series);
    Ok(out)
}

fn cmd_twisted_sum(g: &GlobalOpts, a: &TwistedSumArgs) -> Result<Output> {
    let func = a.function.resolve()?;
    let spec = func.spec_string();
    let theta = Angle::parse(&a.theta)?;
    let f = match (a.scale_p, a.scale_q) {
        (Some(p), Some(q)) => PairFunction::pair(func, p, q),
        (None, None) => PairFunction::plain(func),
        _ => unreachable!("clap `requires` keeps the scales paired"),
    };
    let cps = resolve_checkpoints(&a.checkpoints, 0, a.n_max)?;
    let series = twisted_square_sum(&f, theta, a.n_max, &cps, g.block_size)?;
    let mut out = Output::new("twisted-sum");
    out.config("g", &spec);
    if let (Some(p), Some(q)) = (a.scale_p, a.scale_q) {
        out.config("P", p).config("Q", q);
    }
    out.config("theta", theta)
        .config("n-max", a.n_max)
        .config("checkpoints", join_checkpoints(&cps));
    finish_config(&mut out, g, true);
    series_rows(&mut out, &series);
    Ok(out)
}

fn cmd_carry_check(g: &GlobalOpts, a: &CarryCheckArgs) -> Result<Output> {
    let func = a.function.resolve()?;
    let spec = func.spec_string();
    if a.lambda == 0 {
        return Err(Error::invalid("--lambda must be at least 1"));
    }
    let rho_max = a.rho_max.unwrap_or(a.lambda - 1);
    let sweep = carry_sweep(&func, a.a, a.lambda, a.kappa, a.rho_min, rho_max)?;
    let mut out = Output::new("carry-check");
    out.config("g", &spec)
        .config("a", a.a)
        .config("lambda", a.lambda)
        .config("kappa", a.kappa)
        .config("rho-min", a.rho_min)
        .config("rho-max", rho_max);
    finish_config(&mut out, g, false);
    out.extra("fitted-C", num(sweep.fitted_c));
    out.columns(&["lambda", "kappa", "rho", "violations", "bound_b_pow"]);
    for r in &sweep.reports {
        let bound = u64::try_from(r.bound_pow)
            .map_err(|_| Error::internal("bound b^(lambda-rho) exceeds u64"))?;
        out.row(vec![
            json!(r.lambda),
            json!(r.kappa),
            json!(r.rho),
            json!(r.violations),
            json!(bound),
        ]);
    }
    Ok(out)
}

fn cmd_normality(g: &GlobalOpts, a: &NormalityArgs) -> Result<Output> {
    let hist = block_histogram(a.n_max, a.block_len)?;
    let mut out = Output::new("normality");
    out.config("n-max", a.n_max).config("block-len", a.block_len);
    finish_config(&mut out, g, false);
    out.extra("windows", json!(hist.windows()))
        .extra("entropy-per-symbol", num(entropy_estimate(&hist)));
    out.columns(&["block", "count", "freq", "expected"]);
    let expected = hist.expected();
    for word in 0..hist.counts().len() {
        out.row(vec![
            json!(hist.word_string(word)),
            json!(hist.counts()[word]),
            num(hist.frequency(word)),
            num(expected),
        ]);
    }
    Ok(out)
}
