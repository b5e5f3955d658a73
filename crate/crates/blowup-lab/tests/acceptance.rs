//! End-to-end acceptance checks. Each criterion prints one `PASS`/`FAIL` line
//! with its measurements; the test fails if any criterion fails.
//!
//! Tolerances: every order, ridge and level is compared exactly; time limits
//! are wall-clock and include parsing. Run with `--nocapture` to see the lines.

use std::time::{Duration, Instant};

use blowup_core::charts::{BlowupSpec, ChartState, TransformKind};
use blowup_core::kangaroo::Verdict;
use blowup_core::{FieldSpec, Monomial, Polynomial, Ring};
use blowup_lab::fixtures;
use blowup_lab::harness::{parse_family, search, HarnessOptions};
use blowup_lab::replay::Replay;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestRunner};

const CASES: u32 = 128;
const FAMILY: &str = include_str!("../families/sec4.cfg");

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(problems: Vec<String>, measured: String) -> Self {
        let pass = problems.is_empty();
        let detail = if pass {
            measured
        } else {
            format!("{measured}; {}", problems.join("; "))
        };
        Outcome { pass, detail }
    }
}

fn replay_fixture(name: &str) -> (Replay, Duration) {
    let start = Instant::now();
    let r = fixtures::find(name).unwrap().replay().unwrap();
    (r, start.elapsed())
}

/// Levels of the phenomena of all closed transitions, in script order.
fn phenomenon_levels(r: &Replay) -> Vec<usize> {
    let mut levels = Vec::new();
    let mut seen = None;
    for snap in &r.snapshots {
        let Some(t) = &snap.transition else { continue };
        // One transition may be settled several times; count it once.
        if seen == Some(snap.blowups) {
            continue;
        }
        if let Some(level) = t.report.phenomenon.level {
            levels.push(level);
            seen = Some(snap.blowups);
        }
    }
    levels
}

fn fixture_problems(r: &Replay) -> Vec<String> {
    r.failures
        .iter()
        .map(|f| {
            format!(
                "line {}: {} expected {}, got {}",
                f.line, f.key, f.expected, f.actual
            )
        })
        .collect()
}

fn within(elapsed: Duration, limit_secs: u64, problems: &mut Vec<String>) {
    if elapsed > Duration::from_secs(limit_secs) {
        problems.push(format!("took {elapsed:.2?}, limit {limit_secs} s"));
    }
}

fn expect_levels(r: &Replay, want: &[usize], problems: &mut Vec<String>) {
    let got = phenomenon_levels(r);
    if got != want {
        problems.push(format!("phenomenon levels {got:?}, expected {want:?}"));
    }
}

fn criterion_1() -> Outcome {
    let (r, t) = replay_fixture("ex1_IX1");
    let mut problems = fixture_problems(&r);
    expect_levels(&r, &[1], &mut problems);
    within(t, 5, &mut problems);
    Outcome::new(problems, format!("ex1_IX1 {} checks in {t:.2?}", r.checks))
}

fn criterion_2() -> Outcome {
    let (r, t) = replay_fixture("ex1_IX2");
    let mut problems = fixture_problems(&r);
    expect_levels(&r, &[], &mut problems);
    let refined_fails = r
        .snapshots
        .iter()
        .filter_map(|s| s.transition.as_ref())
        .any(|t| t.report.preconditions.a_refined.verdict == Verdict::Fail);
    if !refined_fails {
        problems.push("precondition (a-refined) never fails".into());
    }
    Outcome::new(problems, format!("ex1_IX2 {} checks in {t:.2?}", r.checks))
}

fn criterion_3() -> Outcome {
    let (r, t) = replay_fixture("ex1_IX3");
    let mut problems = fixture_problems(&r);
    expect_levels(&r, &[1], &mut problems);
    Outcome::new(problems, format!("ex1_IX3 {} checks in {t:.2?}", r.checks))
}

fn criterion_4() -> Outcome {
    let (r, t) = replay_fixture("sec3_char2");
    let mut problems = fixture_problems(&r);
    expect_levels(&r, &[2], &mut problems);
    within(t, 10, &mut problems);
    Outcome::new(
        problems,
        format!("sec3_char2 {} checks in {t:.2?}", r.checks),
    )
}

fn criterion_5() -> Outcome {
    let mut problems = Vec::new();
    let mut measured = Vec::new();
    for name in ["sec4_1312", "sec4_2312"] {
        let (r, t) = replay_fixture(name);
        problems.extend(
            fixture_problems(&r)
                .into_iter()
                .map(|p| format!("{name} {p}")),
        );
        let mut own = Vec::new();
        expect_levels(&r, &[3, 1], &mut own);
        problems.extend(own.into_iter().map(|p| format!("{name} {p}")));
        measured.push(format!("{name} {} checks in {t:.2?}", r.checks));
    }
    Outcome::new(problems, measured.join(", "))
}

fn runner() -> TestRunner {
    TestRunner::new(Config {
        cases: CASES,
        rng_seed: RngSeed::Fixed(0x6163_6365),
        failure_persistence: None,
        ..Config::default()
    })
}

fn random_poly() -> impl Strategy<Value = (u64, Polynomial)> {
    prop::sample::select(vec![2u64, 3, 5]).prop_flat_map(|p| {
        prop::collection::vec((prop::collection::vec(0u32..=4, 3), 1..p), 1..=5).prop_map(
            move |t| {
                let field = FieldSpec::new(p).unwrap();
                let terms = t
                    .into_iter()
                    .map(|(e, c)| (Monomial::from_exponents(&e), c));
                (p, Polynomial::from_terms(field, 3, terms))
            },
        )
    })
}

/// Three of the algebraic laws of the full suite in `blowup-core/tests/properties.rs`,
/// each over `CASES` random inputs.
fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut problems = Vec::new();

    let frobenius = runner().run(&(random_poly(), 1u32..=2), |((p, f), e)| {
        prop_assert_eq!(f.pow(p.pow(e)).pth_root(e), Some(f));
        Ok(())
    });
    let transforms = runner().run(&(random_poly(), 0usize..3), |((p, f), chart)| {
        prop_assume!(!f.is_zero() && f.constant_term() == 0);
        let s = ChartState::new(Ring::new(p, &["x", "y", "z"]).unwrap(), vec![f.clone()]);
        let spec = BlowupSpec::point(3, chart);
        let total = s.blowup(&spec, TransformKind::Total).unwrap().ideal()[0].clone();
        let weak = s.blowup(&spec, TransformKind::Weak).unwrap().ideal()[0].clone();
        let mut m = Monomial::one();
        m.set_exp(chart, s.order().unwrap() as u32);
        prop_assert_eq!(weak.mul_term(&m, 1), total);
        Ok(())
    });
    let products = runner().run(&(random_poly(), random_poly()), |((p, f), (q, g))| {
        prop_assume!(p == q && !f.is_zero() && !g.is_zero());
        let order = |h: &Polynomial| blowup_core::order_at_origin(std::slice::from_ref(h)).unwrap();
        prop_assert_eq!(order(&(&f * &g)), order(&f) + order(&g));
        Ok(())
    });
    for (name, result) in [
        ("frobenius", frobenius.map_err(|e| e.to_string())),
        ("transforms", transforms.map_err(|e| e.to_string())),
        ("products", products.map_err(|e| e.to_string())),
    ] {
        if let Err(e) = result {
            problems.push(format!("{name}: {e}"));
        }
    }
    let t = start.elapsed();
    within(t, 60, &mut problems);
    Outcome::new(problems, format!("3 laws x {CASES} cases in {t:.2?}"))
}

fn criterion_7() -> Outcome {
    let family = parse_family(FAMILY).unwrap();
    let opts = |jobs| HarnessOptions {
        depth: 9,
        budget: 200,
        jobs,
    };
    let start = Instant::now();
    let first = search(&family, &opts(1));
    let second = search(&family, &opts(2));
    let t = start.elapsed();

    let mut problems = Vec::new();
    if family.members.len() > 200 {
        problems.push(format!("{} members, limit 200", family.members.len()));
    }
    if first.to_text() != second.to_text() {
        problems.push("catalogs differ between runs".into());
    }
    let distances: Vec<usize> = first.pairs_of("1312").map(|p| p.distance()).collect();
    if !distances.contains(&6) {
        let summary = first
            .members
            .iter()
            .map(|m| {
                format!(
                    "{} {}/{} evaluations, {} phenomena",
                    m.name, m.evaluations, m.budget, m.phenomena
                )
            })
            .collect::<Vec<_>>()
            .join(", ");
        problems.push(format!(
            "no pair at distance 6 for 1312 (pair distances {distances:?}; {summary})"
        ));
    }
    within(t, 600, &mut problems);
    Outcome::new(
        problems,
        format!(
            "{} members, depth 9, two runs in {t:.2?}",
            family.members.len()
        ),
    )
}

#[test]
fn acceptance() {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check); 7] = [
        ("1 I_X1 order 14 and level-1 kangaroo, < 5 s", criterion_1),
        ("2 I_X2 no phenomenon, a-refined fails", criterion_2),
        ("3 I_X3 ridges and level-1 kangaroo", criterion_3),
        (
            "4 char-2 surface override gives level-2 kangaroo, < 10 s",
            criterion_4,
        ),
        (
            "5 1312/2312 roles and kangaroos at levels 3 then 1",
            criterion_5,
        ),
        ("6 property laws, >= 100 cases each, < 60 s", criterion_6),
        (
            "7 harness finds 1312 pair at distance 6, deterministic, < 10 min",
            criterion_7,
        ),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let outcome = check();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name}: {}", outcome.detail);
        if !outcome.pass {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
