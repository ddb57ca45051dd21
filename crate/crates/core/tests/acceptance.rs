//! The eleven acceptance criteria at the default configuration.
//!
//! Each test prints one `criterion N: PASS|FAIL` line. The suites run once in
//! process and are shared; determinism runs the binary twice.

use std::collections::BTreeMap;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use duplicity::cli::config::ExperimentConfig;
use duplicity::cli::report::{CheckRecord, Status};
use duplicity::cli::suites::{Context, SUITES};
use duplicity::realize::{eff_finite_dim_obstruction, verify_obstruction, Obstruction};

struct Run {
    checks: Vec<CheckRecord>,
    elapsed: BTreeMap<&'static str, Duration>,
}

fn run() -> &'static Run {
    static RUN: OnceLock<Run> = OnceLock::new();
    RUN.get_or_init(|| {
        let mut ctx = Context::new(ExperimentConfig::default()).expect("default configuration");
        let mut elapsed = BTreeMap::new();
        for &name in SUITES {
            let start = Instant::now();
            ctx.run_suite(name).unwrap_or_else(|e| panic!("suite {name}: {e}"));
            elapsed.insert(name, start.elapsed());
        }
        Run { checks: ctx.report.checks, elapsed }
    })
}

fn check(name: &str) -> &'static CheckRecord {
    run().checks.iter().find(|c| c.name == name).unwrap_or_else(|| panic!("missing check {name}"))
}

/// Prints the verdict line and fails the test with the offending checks.
fn criterion(n: usize, title: &str, names: &[&str], extra: &[(&str, bool)]) {
    let mut failures: Vec<String> = names
        .iter()
        .map(|&name| check(name))
        .filter(|c| c.status == Status::Fail)
        .map(|c| format!("{} = {:e} (tol {:e})", c.name, c.value, c.tol))
        .collect();
    failures.extend(extra.iter().filter(|(_, ok)| !ok).map(|(what, _)| what.to_string()));
    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {n}: {verdict} {title}");
    assert!(failures.is_empty(), "criterion {n} failed: {}", failures.join("; "));
}

#[test]
fn criterion_01_representation_soundness() {
    let elapsed = run().elapsed["verify-rep"];
    criterion(
        1,
        "representation soundness",
        &[
            "rep.unitarity",
            "rep.homomorphism",
            "rep.poisson_cocycle",
            "rep.poisson_integral",
            "rep.covariance_plus",
            "rep.covariance_minus",
        ],
        &[("verify-rep runtime < 10 s", elapsed < Duration::from_secs(10))],
    );
}

#[test]
fn criterion_02_realization_algebra() {
    criterion(
        2,
        "realization algebra",
        &["eff.plus_projections", "eff.plus_self_pairing", "eff.minus_self_pairing", "eff.combined_pairing"],
        &[],
    );
}

#[test]
fn criterion_03_transfer_fixed_points_and_adjointness() {
    criterion(3, "transfer fixed points and adjointness", &["eff.fixed_point", "eff.adjointness", "eff.two_path"], &[]);
}

#[test]
fn criterion_04_ftc_convergence() {
    let elapsed = run().elapsed["ftc"];
    criterion(
        4,
        "trace pairing convergence",
        &["ftc.nondecreasing", "ftc.converged", "ftc.positive"],
        &[("ftc runtime < 30 s", elapsed < Duration::from_secs(30))],
    );
}

#[test]
fn criterion_05_duplicity_limit() {
    criterion(5, "duplicity limit", &["abel.duplicity_limit", "abel.tail_consistent"], &[]);
}

#[test]
fn criterion_06_schur_orthogonality() {
    criterion(6, "Schur orthogonality", &["schur.ab", "schur.one", "schur.translation"], &[]);
}

#[test]
fn criterion_07_oddity_block_identity() {
    criterion(7, "odd block identity", &["oddsym.four_way", "oddsym.identity_block"], &[]);
}

#[test]
fn criterion_08_good_vectors() {
    criterion(
        8,
        "good vectors",
        &[
            "gv.special_exact",
            "gv.zero_for_perfect",
            "gv.certified",
            "gv.sphere_bound",
            "gv.sphere_scalar",
            "gv.abel_uniform",
        ],
        &[],
    );
}

#[test]
fn criterion_09_gns() {
    criterion(
        9,
        "GNS construction",
        &["gns.gram_psd", "gns.isometry_iff_unital", "gns.monotone", "gns.norm_bound"],
        &[],
    );
}

#[test]
fn criterion_10_negative_controls() {
    // Independent of the suite: the certificate must verify in exact arithmetic.
    let exact = (2..=3).all(|k| {
        (1..=8).all(|d| {
            let o = eff_finite_dim_obstruction(d, k);
            matches!(o, Obstruction::Infeasible { .. }) && verify_obstruction(k, d, &o)
        })
    });
    criterion(
        10,
        "negative controls",
        &["eff.finite_dim_obstruction", "gv.boundary_split"],
        &[("exact obstruction certificates for k = 2..3, d = 1..8", exact)],
    );
}

#[test]
fn criterion_11_determinism() {
    let dir = std::env::temp_dir().join(format!("duplicity-determinism-{}", std::process::id()));
    let reports: Vec<Vec<u8>> = [1, 4]
        .iter()
        .map(|workers| {
            let out = dir.join(format!("w{workers}"));
            let status = Command::new(env!("CARGO_BIN_EXE_duplicity"))
                .args(["all", "--workers", &workers.to_string(), "--out"])
                .arg(&out)
                .output()
                .expect("run binary");
            // Exit code 1 is a failed check, not a crash; 2 would be a config error.
            assert!(matches!(status.status.code(), Some(0 | 1)), "{}", String::from_utf8_lossy(&status.stderr));
            let mut files: Vec<_> = std::fs::read_dir(&out).expect("output dir").map(|e| e.expect("entry").path()).collect();
            files.sort();
            files.iter().flat_map(|p| std::fs::read(p).expect("output file")).collect()
        })
        .collect();
    let identical = reports[0] == reports[1];
    let _ = std::fs::remove_dir_all(&dir);
    criterion(11, "determinism", &[], &[("byte-identical report and tables for 1 and 4 workers", identical)]);
}
