//! End-to-end interface tests for the `digit-spectra` binary: exit codes,
//! header echoes, output schemas, and flag validation.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_digit-spectra"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 output")
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines()
        .skip_while(|l| l.starts_with('#'))
        .skip(1) // column header
        .collect()
}

#[test]
fn preset_expands_to_canonical_spec() {
    let out = run(&["mobius-sum", "--preset", "thue-morse", "--n-max", "1000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# g: b=2;phases=0,1/2"), "{text}");
}

#[test]
fn component_emits_one_row_per_member() {
    let out = run(&["component", "--base", "2", "--P", "9", "--Q", "25"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# size: 33"));
    assert!(text.contains("# i0: 0"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 33);
    assert_eq!(rows[0], "0,0");
    assert_eq!(*rows.last().unwrap(), "8,24");
}

#[test]
fn component_without_ordering_omits_i0() {
    // P < b here, so the distinguished-row regime does not apply.
    let out = run(&["component", "--base", "5", "--P", "2", "--Q", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# size: 4"));
    assert!(!text.contains("# i0:"));
}

#[test]
fn fourier_decay_runs_end_to_end() {
    let out = run(&[
        "fourier-decay",
        "--g",
        "b=2;phases=0,1/2",
        "--p",
        "3",
        "--q",
        "5",
        "--lambda-max",
        "8",
        "--grid",
        "128",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("lambda,grid,sup_grid,sup_certified"));
    assert_eq!(data_rows(&text).len(), 9, "{text}");
    assert!(text.contains("# fit-eta: "));
}

#[test]
fn header_block_carries_version_and_config() {
    let out = run(&["normality", "--n-max", "2000", "--block-len", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        format!("# digit-spectra {}", env!("CARGO_PKG_VERSION"))
    );
    assert!(lines.next().unwrap().starts_with("# args: normality"));
    assert!(text.contains("block,count,freq,expected"));
    assert_eq!(data_rows(&text).len(), 8);
}

#[test]
fn empty_checkpoints_give_header_only_csv() {
    let out = run(&[
        "mobius-sum",
        "--preset",
        "thue-morse",
        "--n-max",
        "1000",
        "--checkpoints",
        "",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("N,S_re,S_im,abs_over_N"));
    assert!(data_rows(&text).is_empty());
}

#[test]
fn json_format_is_one_object() {
    let out = run(&[
        "dk-corr", "--preset", "thue-morse", "--p", "3", "--q", "5", "--n-max", "1000",
        "--format", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(v["command"], "dk-corr");
    assert_eq!(v["config"]["g"], "b=2;phases=0,1/2");
    assert_eq!(v["columns"][0], "N");
    assert_eq!(v["rows"][0][0], 1000);
}

#[test]
fn contract_is_json_with_certificate_fields() {
    let out = run(&["contract", "--preset", "thue-morse", "--p", "3", "--q", "5"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(v["found"], true);
    assert!(v["L"].is_u64());
    assert!(v["delta"].is_f64());
    assert!(v["grid"].is_u64());
    assert!(v["lipschitz_K"].is_f64());
}

#[test]
fn contract_rejects_periodic_functions() {
    let out = run(&["contract", "--g", "b=2;phases=0,0", "--p", "3", "--q", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("periodic"));
}

#[test]
fn usage_errors_exit_one() {
    // Unknown flag.
    let out = run(&["mobius-sum", "--preset", "thue-morse", "--n-max", "10", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));

    // Non-coprime configuration, named in the message.
    let out = run(&["component", "--base", "2", "--P", "9", "--Q", "6"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("coprime"));

    // p = q without the explicit control flag.
    let out = run(&["dk-corr", "--preset", "thue-morse", "--p", "5", "--q", "5", "--n-max", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--allow-equal"));

    // Composite input where a prime is required.
    let out = run(&["fourier-decay", "--preset", "thue-morse", "--p", "4", "--q", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("prime"));

    // Bad function spec.
    let out = run(&["mobius-sum", "--g", "b=1;phases=0", "--n-max", "10"]);
    assert_eq!(out.status.code(), Some(1));

    // Out-of-budget size.
    let out = run(&[
        "carry-check", "--preset", "thue-morse", "--a", "1", "--lambda", "40",
        "--kappa", "1", "--rho-min", "3", "--rho-max", "3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("2^32"));
}

#[test]
fn selftest_passes_and_reports_each_check() {
    let out = run(&["selftest", "--seed", "7"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("# seed: 7"));
    assert!(text.lines().filter(|l| l.starts_with("ok ")).count() >= 10);
    assert!(text.contains("all 11 checks passed"));
}

#[test]
fn help_lists_every_interface_flag() {
    let top = stdout(&run(&["--help"]));
    for flag in [
        "--threads",
        "--deterministic",
        "--seed",
        "--output",
        "--format",
        "--block-size",
    ] {
        assert!(top.contains(flag), "top-level help missing {flag}");
    }
    for (cmd, flags) in [
        ("component", vec!["--base", "--P", "--Q"]),
        ("fourier-decay", vec!["--g", "--preset", "--p", "--q", "--lambda-max", "--grid"]),
        ("contract", vec!["--g", "--preset", "--p", "--q", "--l-max", "--delta-min"]),
        ("mobius-sum", vec!["--g", "--preset", "--n-max", "--checkpoints"]),
        (
            "dk-corr",
            vec!["--g", "--preset", "--p", "--q", "--n-max", "--checkpoints", "--allow-equal"],
        ),
        (
            "twisted-sum",
            vec!["--g", "--preset", "--P", "--Q", "--theta", "--n-max", "--checkpoints"],
        ),
        (
            "carry-check",
            vec!["--g", "--preset", "--a", "--lambda", "--kappa", "--rho-min", "--rho-max"],
        ),
        ("normality", vec!["--n-max", "--block-len"]),
    ] {
        let help = stdout(&run(&[cmd, "--help"]));
        for flag in flags {
            assert!(help.contains(flag), "{cmd} help missing {flag}");
        }
    }
}

#[test]
fn version_flag_prints_and_exits_zero() {
    let out = run(&["--version"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = run(&[
        "component", "--base", "3", "--P", "4", "--Q", "7",
        "--output", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("# size: 10"));
    assert_eq!(data_rows(&text).len(), 10);
}
