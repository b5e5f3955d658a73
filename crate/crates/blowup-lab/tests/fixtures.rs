use blowup_core::charts::TransformKind;
use blowup_core::descent::coefficient_ideal;
use blowup_core::ridge::canonical_cmp;
use blowup_core::{Monomial, Polynomial};
use blowup_lab::fixtures::{self, Fixture};
use blowup_lab::replay::{replay, ReplayOptions};
use blowup_lab::report::{structured_report, text_report};
use blowup_lab::{parse_script, LabError};

fn fixture(name: &str) -> &'static Fixture {
    fixtures::find(name).unwrap_or_else(|| panic!("no fixture {name}"))
}

fn assert_replays_cleanly(name: &str) {
    let r = fixture(name).replay().unwrap();
    let failures: Vec<String> = r
        .failures
        .iter()
        .map(|f| {
            format!(
                "line {}: {} expected {}, got {}",
                f.line, f.key, f.expected, f.actual
            )
        })
        .collect();
    assert!(failures.is_empty(), "{name}: {failures:#?}");
    assert!(r.checks > 0);
}

#[test]
fn ex1_ix1_replays_cleanly() {
    assert_replays_cleanly("ex1_IX1");
}

#[test]
fn ex1_ix2_replays_cleanly() {
    assert_replays_cleanly("ex1_IX2");
}

#[test]
fn ex1_ix3_replays_cleanly() {
    assert_replays_cleanly("ex1_IX3");
}

#[test]
fn sec3_char2_replays_cleanly() {
    assert_replays_cleanly("sec3_char2");
}

#[test]
fn sec4_1312_replays_cleanly() {
    assert_replays_cleanly("sec4_1312");
}

#[test]
fn sec4_2312_replays_cleanly() {
    assert_replays_cleanly("sec4_2312");
}

#[test]
fn printing_and_parsing_round_trips() {
    for f in fixtures::all() {
        let script = f.script().unwrap();
        let printed = script.to_text();
        assert_eq!(parse_script(&printed).unwrap(), script, "{}", f.name);
        assert_eq!(parse_script(&printed).unwrap().to_text(), printed);
    }
}

#[test]
fn exported_states_replay_to_themselves() {
    for f in fixtures::all() {
        let r = f.replay().unwrap();
        for snap in &r.snapshots {
            let exported = parse_script(&snap.state.export_script()).unwrap();
            let again = replay(&exported, &ReplayOptions::default()).unwrap();
            assert_eq!(
                again.last().unwrap().state,
                snap.state,
                "{} line {}",
                f.name,
                snap.line
            );
        }
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for f in fixtures::all() {
        let (a, b) = (f.replay().unwrap(), f.replay().unwrap());
        assert_eq!(text_report(&a), text_report(&b), "{}", f.name);
        assert_eq!(
            structured_report(&a).to_lines(),
            structured_report(&b).to_lines()
        );
    }
}

#[test]
fn statement_counts() {
    let short =
        parse_script("ring 3 x,y,z,w; ideal x^3+z^13-z*w^18; blowup (x,y,z,w) chart w;").unwrap();
    assert_eq!(short.statement_count(), 3);

    // Oracle: the `;`-terminated statements of the committed file.
    let f = fixture("sec3_char2");
    let expected = f
        .source
        .lines()
        .map(|l| l.split('#').next().unwrap())
        .map(|l| l.matches(';').count())
        .sum::<usize>();
    assert_eq!(f.script().unwrap().statement_count(), expected);
}

#[test]
fn non_prime_characteristic_is_rejected() {
    let err = parse_script("ring 4 x;").unwrap_err();
    assert!(err.to_string().contains("4 is not prime"), "{err}");
}

#[test]
fn invalid_center_is_an_input_error() {
    let script = parse_script("ring 3 x,y,z; ideal x^2+y^3+z^5; blowup (y,z) chart y;").unwrap();
    match replay(&script, &ReplayOptions::default()) {
        Err(LabError::Replay { line, source }) => {
            assert_eq!(line, 1);
            assert!(
                source.to_string().contains("order along V(y,z)"),
                "{source}"
            );
        }
        other => panic!(
            "expected an invalid center, got {:?}",
            other.map(|r| r.checks)
        ),
    }
}

/// Transitions of a fixture where the first hypersurface is the transform of
/// the previous one and the order is unchanged: the controlled transform
/// (exponent c!) of the old coefficient ideal must be the new one.
fn commutation_cases(f: &Fixture) -> usize {
    let r = f.replay().unwrap();
    let mut checked = 0;
    for snap in &r.snapshots {
        let Some(t) = &snap.transition else { continue };
        let rec = &t.record;
        if rec.kind != TransformKind::Weak || !rec.steps.is_empty() {
            continue;
        }
        let (Some(old), Some(new)) = (rec.pre_flag.levels.first(), rec.post_flag.levels.first())
        else {
            continue;
        };
        let kept = old.hypersurface.transform_blowup(&rec.blowup);
        let c = rec.pre_state.order().unwrap();
        if kept.as_ref() != Some(&new.hypersurface) || rec.post_state.order().unwrap() != c {
            continue;
        }
        let (Ok(before), Ok(after)) = (
            coefficient_ideal(rec.pre_state.ideal(), &old.hypersurface),
            coefficient_ideal(rec.post_state.ideal(), &new.hypersurface),
        ) else {
            continue;
        };
        let cf: u32 = (1..=c as u32).product();
        let mut div = Monomial::one();
        div.set_exp(rec.blowup.chart, cf);
        let mut controlled: Vec<Polynomial> = before
            .iter()
            .map(|j| {
                j.monomial_substitute(&rec.blowup.center, rec.blowup.chart)
                    .div_monomial(&div)
            })
            .collect();
        let mut after = after;
        controlled.sort_by(canonical_cmp);
        controlled.dedup();
        after.sort_by(canonical_cmp);
        after.dedup();
        assert_eq!(controlled, after, "{} line {}", f.name, snap.line);
        checked += 1;
    }
    checked
}

#[test]
fn coefficient_ideals_commute_with_blowups_on_fixtures() {
    let total: usize = fixtures::all().iter().map(commutation_cases).sum();
    assert!(total >= 3, "only {total} transitions checked");
}
