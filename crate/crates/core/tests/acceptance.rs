//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs the full verification matrix once and grades each criterion from the
//! reports, plus exact and randomized checks that live outside the matrix.
//! Criteria listed in `EXPECTED_FAIL` are reported but do not fail the
//! process; everything else does.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use polylog::finite::{check_inversion_identity, check_twisted_inversion_identity};
use polylog::identities::{constants_check, uniqueness_check};
use polylog::series::{TruncSeries, Var};
use polylog::verify::{self, CheckKind, Matrix, Report, RunConfig};
use polylog::{make_ctx, FiniteField, WittApprox};

/// The untwisted finite inversion identity fails off the prime field.
const EXPECTED_FAIL: &[u32] = &[12];

struct Outcome {
    id: u32,
    pass: bool,
    summary: String,
}

fn outcome(id: u32, pass: bool, summary: impl Into<String>) -> Outcome {
    Outcome { id, pass, summary: summary.into() }
}

fn by_check(reports: &[Report]) -> BTreeMap<CheckKind, Vec<&Report>> {
    let mut map: BTreeMap<CheckKind, Vec<&Report>> = BTreeMap::new();
    for r in reports {
        map.entry(r.check).or_default().push(r);
    }
    map
}

/// Grades every sample of every report with `ok`, and requires at least
/// `min_samples` samples per report.
fn grade(
    id: u32,
    reports: &[&Report],
    min_samples: usize,
    ok: impl Fn(&verify::SampleRecord) -> bool,
) -> Outcome {
    let total: usize = reports.iter().map(|r| r.per_sample.len()).sum();
    let mut bad = Vec::new();
    for r in reports {
        if r.per_sample.len() < min_samples {
            bad.push(format!("p={} n={} k={}: {} samples", r.p, r.n, r.k, r.per_sample.len()));
        }
        for s in r.per_sample.iter().filter(|s| !ok(s)) {
            bad.push(format!("p={} n={} k={} #{}", r.p, r.n, r.k, s.index));
        }
    }
    let summary = if bad.is_empty() {
        format!("{} configurations, {total} samples", reports.len())
    } else {
        format!("{} bad of {total}: {}", bad.len(), bad.iter().take(5).cloned().collect::<Vec<_>>().join(", "))
    };
    outcome(id, bad.is_empty() && !reports.is_empty(), summary)
}

fn residues_agree(s: &verify::SampleRecord) -> bool {
    s.lhs_residue.is_some() && s.lhs_residue == s.rhs_residue
}

fn part(s: &verify::SampleRecord, name: &str) -> bool {
    s.parts.get(name).copied().unwrap_or(false)
}

fn min_digits(reports: &[&Report]) -> i64 {
    reports.iter().flat_map(|r| &r.per_sample).filter_map(|s| s.certified_digits).min().unwrap_or(0)
}

fn uniqueness() -> Outcome {
    let start = Instant::now();
    let failures: Vec<u32> = (2..=12).filter(|&n| !uniqueness_check(n).map(|r| r.pass).unwrap_or(false)).collect();
    let elapsed = start.elapsed();
    outcome(
        3,
        failures.is_empty() && elapsed < Duration::from_secs(1),
        format!("n = 2..12 in {:.0} ms, failing n: {failures:?}", elapsed.as_secs_f64() * 1e3),
    )
}

fn constants_and_route(remarks: &[&Report]) -> Outcome {
    let bad: Vec<u32> = (1..=20).filter(|&n| !constants_check(n).pass).collect();
    let route = grade(11, remarks, 10, |s| part(s, "lRoute") && s.certified_digits.unwrap_or(0) >= 3);
    outcome(
        11,
        bad.is_empty() && route.pass,
        format!("constants n = 1..20 failing {bad:?}; e-route {}", route.summary),
    )
}

fn finite_inversion() -> Outcome {
    let start = Instant::now();
    let (mut literal_bad, mut off_prime_field, mut twisted_bad, mut points) = (0, 0, 0, 0);
    let mut failing_cases = Vec::new();
    for p in [5, 7, 11, 13] {
        for k in [1, 2] {
            let field = FiniteField::new(p, k).expect("field");
            for n in 2..=6 {
                let plain = check_inversion_identity(n, &field).expect("literal");
                let twisted = check_twisted_inversion_identity(n, &field).expect("twisted");
                points += plain.checked;
                literal_bad += plain.counterexamples.len();
                off_prime_field +=
                    plain.counterexamples.iter().filter(|z| z.coeffs()[1..].iter().any(|&c| c != 0)).count();
                twisted_bad += twisted.counterexamples.len();
                if !plain.pass {
                    failing_cases.push(format!("({p},{k},{n})"));
                }
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let summary = format!(
        "{points} points in {elapsed:.1} s; literal form fails at {literal_bad} points ({off_prime_field} off F_p) \
         in (p,k,n) = {}; with the leading factor z replaced by z^p it fails at {twisted_bad}",
        if failing_cases.is_empty() { "none".to_string() } else { failing_cases.join(" ") },
    );
    outcome(12, literal_bad == 0 && elapsed < 10.0, summary)
}

fn oracle_mul(a: &[u64], b: &[u64], h_low: &[u64], modulus: &BigInt) -> Vec<BigInt> {
    let k = h_low.len();
    let mut prod = vec![BigInt::zero(); 2 * k];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += BigInt::from(*x) * BigInt::from(*y);
        }
    }
    for top in (k..2 * k).rev() {
        let c = std::mem::take(&mut prod[top]);
        for (i, h) in h_low.iter().enumerate() {
            prod[top - k + i] -= &c * BigInt::from(*h);
        }
    }
    prod.truncate(k);
    prod.iter().map(|c| c.mod_floor(modulus)).collect()
}

fn coords(v: &WittApprox, e: u32) -> Vec<BigInt> {
    v.coeffs_mod(e).expect("integral").into_iter().map(BigInt::from).collect()
}

const CASES: u32 = 1000;

fn padic_suite() -> Result<(), String> {
    let fields = [(3u64, 1usize, 12u32), (5, 2, 8), (7, 3, 5), (13, 2, 7)];
    let mut runner = TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() });
    let strategy = (0..fields.len()).prop_flat_map(move |i| {
        let (p, k, a) = fields[i];
        let m = p.pow(a);
        (Just(i), prop::collection::vec(0..m, k), prop::collection::vec(0..m, k))
    });
    runner
        .run(&strategy, |(i, x, y)| {
            let (p, k, a) = fields[i];
            let ctx = make_ctx(p, k, a).unwrap();
            let m = BigInt::from(p).pow(a);
            let u = WittApprox::from_coeffs(&ctx, 0, &x).unwrap();
            let v = WittApprox::from_coeffs(&ctx, 0, &y).unwrap();
            let sum: Vec<BigInt> = x.iter().zip(&y).map(|(s, t)| (BigInt::from(*s) + t).mod_floor(&m)).collect();
            prop_assert_eq!(coords(&u.add(&v), a), sum);
            let prod = u.mul(&v);
            let known = prod.abs_precision().min(a as i64) as u32;
            let reduce = BigInt::from(p).pow(known);
            let want: Vec<BigInt> =
                oracle_mul(&x, &y, ctx.modulus(), &m).iter().map(|c| c.mod_floor(&reduce)).collect();
            prop_assert_eq!(coords(&prod, known), want);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn series_suite() -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() });
    let modulus = 11u64.pow(5);
    let strategy = (prop::collection::vec(0..modulus, 1..9), prop::collection::vec(0..modulus, 1..9));
    runner
        .run(&strategy, |(xs, ys)| {
            let ctx = make_ctx(11, 1, 5).unwrap();
            let lift =
                |v: &[u64]| v.iter().map(|&c| WittApprox::from_coeffs(&ctx, 0, &[c]).unwrap()).collect::<Vec<_>>();
            let s = TruncSeries::polynomial(&ctx, Var::U, lift(&xs)).unwrap();
            let t = TruncSeries::polynomial(&ctx, Var::U, lift(&ys)).unwrap();
            let st = s.mul(&t).unwrap();
            let m = BigInt::from(modulus);
            for j in 0..xs.len() + ys.len() - 1 {
                let c: BigInt = (0..=j)
                    .filter(|&i| i < xs.len() && j - i < ys.len())
                    .map(|i| BigInt::from(xs[i]) * ys[j - i])
                    .sum();
                prop_assert_eq!(coords(st.coeff(j), 5), vec![c.mod_floor(&m)]);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn determinism() -> Result<usize, String> {
    let configs = [
        RunConfig::new(CheckKind::Theorem, 7, 3, 2).with_samples(5).with_seed(42),
        RunConfig::new(CheckKind::Maincong, 5, 2, 1).with_samples(5).with_seed(7),
        RunConfig::new(CheckKind::Delprop, 7, 1, 2).with_samples(3).with_seed(3),
    ];
    for cfg in &configs {
        let first = verify::run(cfg).map_err(|e| e.to_string())?.to_json();
        let again = verify::run(cfg).map_err(|e| e.to_string())?.to_json();
        let mut parallel = cfg.clone();
        parallel.jobs = 4;
        let threaded = verify::run(&parallel).map_err(|e| e.to_string())?.to_json();
        if first != again || first != threaded {
            return Err(format!("{} report differs between runs", cfg.check.name()));
        }
    }
    Ok(configs.len())
}

fn infrastructure() -> Outcome {
    let results = [
        ("padic", padic_suite().map(|_| format!("{CASES} cases"))),
        ("series", series_suite().map(|_| format!("{CASES} cases"))),
        ("determinism", determinism().map(|n| format!("{n} configs byte-identical"))),
    ];
    let pass = results.iter().all(|(_, r)| r.is_ok());
    let summary = results
        .iter()
        .map(|(name, r)| match r {
            Ok(s) => format!("{name}: {s}"),
            Err(e) => format!("{name}: {e}"),
        })
        .collect::<Vec<_>>()
        .join("; ");
    outcome(13, pass, summary)
}

fn main() -> ExitCode {
    let start = Instant::now();
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut reports = Vec::new();
    for mut cfg in verify::matrix(Matrix::Full, 0) {
        cfg.jobs = jobs;
        match verify::run(&cfg) {
            Ok(r) => reports.push(r),
            Err(e) => {
                eprintln!("configuration {} p={} n={} k={} rejected: {e}", cfg.check.name(), cfg.p, cfg.n, cfg.k);
                return ExitCode::FAILURE;
            }
        }
    }
    let groups = by_check(&reports);
    let get = |c: CheckKind| groups.get(&c).cloned().unwrap_or_default();
    let theorem = get(CheckKind::Theorem);
    let remarks = get(CheckKind::Remark);
    let delprop = get(CheckKind::Delprop);
    let corollary = get(CheckKind::Corollary);
    let exhaustive = corollary.iter().all(|r| {
        let q = r.p.pow(r.k as u32) as usize;
        r.per_sample.len() == q - 2
    });
    let outcomes = vec![
        grade(1, &theorem, 20, |s| s.valuation_ok),
        grade(2, &theorem, 20, residues_agree),
        uniqueness(),
        grade(4, &get(CheckKind::Proposition1), 50, |s| s.pass),
        {
            let o = grade(5, &corollary, 1, |s| s.pass);
            outcome(5, o.pass && exhaustive, format!("{}, exhaustive: {exhaustive}", o.summary))
        },
        grade(6, &get(CheckKind::Maincong), 50, |s| s.valuation_ok && residues_agree(s)),
        grade(7, &get(CheckKind::Maincong), 50, |s| part(s, "coefficientLemma")),
        {
            let o = grade(8, &remarks, 20, |s| s.pass);
            outcome(8, o.pass, format!("{}, min certified digits {}", o.summary, min_digits(&remarks)))
        },
        {
            let o = grade(9, &delprop, 10, |s| s.pass);
            let weight_zero = delprop.iter().filter(|r| r.n == 0).count();
            outcome(
                9,
                o.pass && weight_zero > 0,
                format!("{}, {weight_zero} weight-zero configs, min certified digits {}", o.summary, min_digits(&delprop)),
            )
        },
        grade(10, &get(CheckKind::FLemmas), 10, |s| s.pass),
        constants_and_route(&remarks),
        finite_inversion(),
        infrastructure(),
    ];

    let mut unexpected = 0;
    for o in &outcomes {
        let expected = EXPECTED_FAIL.contains(&o.id);
        let tag = match (o.pass, expected) {
            (true, _) => "PASS",
            (false, true) => "FAIL (expected)",
            (false, false) => "FAIL",
        };
        if !o.pass && !expected {
            unexpected += 1;
        }
        println!("criterion {:>2}: {tag}: {}", o.id, o.summary);
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!(
        "acceptance: {passed}/{} criteria pass, {unexpected} unexpected failures, {:.1} s",
        outcomes.len(),
        start.elapsed().as_secs_f64()
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
