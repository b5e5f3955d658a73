//! Deterministic reports of a replay: a human-readable text form and a
//! versioned, line-delimited `key=value` form (optionally rendered as JSON).

use std::fmt::Write as _;

use blowup_core::charts::{max_order_locus_ideal, ChartState};
use blowup_core::descent::{invariant_text, level_ridge, ratio_text, DescentLevel, Flag};
use blowup_core::family::Q;
use blowup_core::kangaroo::{Condition, HypersurfaceRole, KangarooReport, Verdict};
use blowup_core::ridge::canonical_cmp;
use blowup_core::Ring;

use crate::replay::{
    basis_text, entry_text, gens_text, level_text, n_ridge_profile, ridge_at, roles_text, Replay,
    Snapshot, TransitionOutcome,
};

/// Version tag of the structured format; bump on any key change.
pub const FORMAT_VERSION: &str = "blowup-lab-report/1";

/// Families and ideals above this many terms are summarized instead of printed.
const PRINT_LIMIT: usize = 64;

fn poly_summary(ring: &Ring, p: &blowup_core::Polynomial) -> String {
    if p.len() <= PRINT_LIMIT {
        ring.show(p)
    } else {
        format!(
            "<{} terms, order {}>",
            p.len(),
            p.order().map_or("-".into(), |o| o.to_string())
        )
    }
}

fn ideal_summary(state: &ChartState) -> String {
    let r = state.ring();
    state
        .ideal()
        .iter()
        .map(|g| poly_summary(r, g))
        .collect::<Vec<_>>()
        .join(", ")
}

fn exceptional_text(state: &ChartState) -> String {
    let r = state.ring();
    if state.exceptionals().is_empty() {
        return "none".into();
    }
    state
        .exceptionals()
        .iter()
        .map(|e| format!("{}=V({})", e.label(), r.var_name(e.var)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn monomial_text(level: &DescentLevel, ring: &Ring) -> String {
    let parts: Vec<String> = level
        .monomial
        .iter()
        .filter(|(_, q)| *q.numer() != 0)
        .map(|(v, q)| {
            if q.is_integer() {
                format!("{}^{q}", ring.var_name(*v))
            } else {
                format!("{}^({q})", ring.var_name(*v))
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn family_summary(flag: &Flag, i: usize, ring: &Ring) -> String {
    let fam = flag.j(i);
    let terms: usize = fam.elements.iter().map(|e| e.base.len()).sum();
    if fam.is_empty() {
        "0".into()
    } else if terms <= PRINT_LIMIT {
        fam.display(ring).to_string()
    } else {
        format!("<{} generators, {} terms>", fam.elements.len(), terms)
    }
}

fn literal_text(flag: &Flag, i: usize) -> String {
    let lit = flag.literal_orders();
    let inv = flag.invariant();
    match (lit.get(i).copied().flatten(), inv.get(i)) {
        (Some(n), _) => n.to_string(),
        (None, Some(o)) if o.finite().is_none() => "inf".into(),
        (None, Some(o)) => format!("~{o}"),
        (None, None) => "-".into(),
    }
}

fn ridge_or_reason(flag: &Flag, i: usize, n: bool, ring: &Ring) -> String {
    match ridge_at(flag, i, n) {
        Ok(mut b) => {
            b.sort_by(canonical_cmp);
            basis_text(&b, ring)
        }
        Err(e) => format!("unavailable ({e})"),
    }
}

fn profile_or_reason(flag: &Flag, i: usize) -> String {
    match n_ridge_profile(flag, i) {
        Ok(p) => crate::replay::profile_text(&p),
        Err(e) => format!("unavailable ({e})"),
    }
}

fn condition_text(c: &Condition) -> String {
    match c.verdict {
        Verdict::NotEvaluated => format!("not evaluated ({})", c.detail),
        v => format!("{v} ({})", c.detail),
    }
}

fn ordinal(n: usize) -> String {
    let suffix = match (n % 10, n % 100) {
        (1, 11) | (2, 12) | (3, 13) => "th",
        (1, _) => "st",
        (2, _) => "nd",
        (3, _) => "rd",
        _ => "th",
    };
    format!("{n}{suffix}")
}

/// "Kangaroo at 3rd coefficient ideal" or "none (...)".
pub fn phenomenon_text(report: &KangarooReport) -> String {
    match report.phenomenon.level {
        Some(l) => format!(
            "Kangaroo at {} coefficient ideal ({})",
            ordinal(l),
            report.phenomenon.note
        ),
        None => format!("none ({})", report.phenomenon.note),
    }
}

fn snapshot_heading(replay: &Replay, idx: usize) -> String {
    let snap = &replay.snapshots[idx];
    let ring = replay.ring();
    let at = if snap.line == 0 {
        "end of script".to_string()
    } else {
        format!("line {}", snap.line)
    };
    match &snap.transition {
        None => format!("state {idx}: before any blow-up ({at})"),
        Some(t) => {
            let mut steps = vec![entry_text(&blowup_entry(t), ring)];
            steps.extend(t.record.steps.iter().map(|s| entry_text(s, ring)));
            format!(
                "state {idx}: after blow-up {} ({at}): {}",
                snap.blowups,
                steps.join(" ")
            )
        }
    }
}

fn blowup_entry(t: &TransitionOutcome) -> blowup_core::charts::HistoryEntry {
    blowup_core::charts::HistoryEntry::Blowup {
        spec: t.record.blowup.clone(),
        kind: t.record.kind,
    }
}

fn role_of(roles: &[HypersurfaceRole], level: usize) -> Option<&HypersurfaceRole> {
    roles.iter().find(|r| r.level == level)
}

/// Human-readable report.
pub fn text_report(replay: &Replay) -> String {
    let ring = replay.ring();
    let mut out = String::new();
    let _ = writeln!(out, "blowup-lab replay report");
    let _ = writeln!(out, "ring: GF({})[{}]", ring.p(), ring.names.join(","));
    let _ = writeln!(
        out,
        "initial ideal: {}",
        gens_text(&replay.script.ideal, ring)
    );
    for idx in 0..replay.snapshots.len() {
        let snap = &replay.snapshots[idx];
        let _ = writeln!(out);
        let _ = writeln!(out, "== {}", snapshot_heading(replay, idx));
        write_snapshot(&mut out, snap, ring);
        if replay.analyses.contains(&idx) {
            write_analysis(&mut out, snap, ring);
        }
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "assertions: {} checked, {} failed",
        replay.checks,
        replay.failures.len()
    );
    for f in &replay.failures {
        let _ = writeln!(
            out,
            "  line {}: expect {}: expected {}, got {} (from {})",
            f.line, f.key, f.expected, f.actual, f.source
        );
    }
    let _ = writeln!(
        out,
        "result: {}",
        if replay.passed() { "ok" } else { "FAILED" }
    );
    out
}

fn write_snapshot(out: &mut String, snap: &Snapshot, ring: &Ring) {
    let flag = &snap.flag;
    let _ = writeln!(out, "ideal: {}", ideal_summary(&snap.state));
    let _ = writeln!(
        out,
        "order: {}",
        snap.state
            .order()
            .map_or("undefined".into(), |o| o.to_string())
    );
    let _ = writeln!(
        out,
        "exceptional divisors: {}",
        exceptional_text(&snap.state)
    );
    let _ = writeln!(
        out,
        "flag ({}; {}): {}",
        if snap.inherit { "inherit" } else { "search" },
        flag.family,
        flag.nested_names(ring).join(", ")
    );
    let _ = writeln!(
        out,
        "  J_0: n-ridge {} profile {}",
        ridge_or_reason(flag, 0, true, ring),
        profile_or_reason(flag, 0)
    );
    for l in &flag.levels {
        let i = l.index;
        let role = role_of(&snap.roles, i).map_or("-".to_string(), |r| r.role.to_string());
        let _ = writeln!(
            out,
            "  H_{i} = V({})  [{}{}{}]  role {role}",
            l.hypersurface.text(ring),
            l.source,
            if l.tie { ", tie" } else { "" },
            if l.normal_crossings {
                ""
            } else {
                ", exceptional pivot"
            }
        );
        let _ = writeln!(
            out,
            "    J_{i}: order {} (literal {}), monomial part {}, non-monomial part {}",
            l.order,
            literal_text(flag, i),
            monomial_text(l, ring),
            family_summary(flag, i, ring)
        );
        let _ = writeln!(
            out,
            "    n-ridge {} profile {}",
            ridge_or_reason(flag, i, true, ring),
            profile_or_reason(flag, i)
        );
    }
    let _ = writeln!(out, "  stop: {}", flag.stop);
    let _ = writeln!(
        out,
        "invariant: {}  ratios {}",
        invariant_text(&flag.invariant()),
        ratio_text(&flag.invariant())
    );
    let _ = writeln!(
        out,
        "roles: {}",
        if snap.roles.is_empty() {
            "none".to_string()
        } else {
            roles_text(&snap.roles)
        }
    );
    if let Some(t) = &snap.transition {
        let r = &t.report;
        let _ = writeln!(
            out,
            "transition: {} -> {}",
            invariant_text(&t.record.pre_invariant()),
            invariant_text(&t.record.post_invariant())
        );
        let _ = writeln!(out, "  phenomenon: {}", phenomenon_text(r));
        let p = &r.preconditions;
        let _ = writeln!(out, "  precondition a: {}", condition_text(&p.a));
        let _ = writeln!(
            out,
            "  precondition a-refined: {}",
            condition_text(&p.a_refined)
        );
        let _ = writeln!(out, "  precondition b: {}", condition_text(&p.b));
        let _ = writeln!(out, "  precondition c: {}", condition_text(&p.c));
        let _ = writeln!(out, "  divisors left: {}", r.divisors_left);
        let _ = writeln!(out, "  roles before: {}", roles_text(&r.pre_roles));
    }
}

/// The read-only diagnostic of `analyze!` and the `analyze` command.
pub fn write_analysis(out: &mut String, snap: &Snapshot, ring: &Ring) {
    let flag = &snap.flag;
    let _ = writeln!(out, "analysis:");
    match snap.state.order() {
        Ok(0) => {
            let _ = writeln!(out, "  resolved (order 0)");
            return;
        }
        Ok(c) => {
            let locus = locus_text(&snap.state, c);
            let _ = writeln!(out, "  order {c}; maximal-order locus {locus}");
        }
        Err(e) => {
            let _ = writeln!(out, "  order undefined ({e})");
            return;
        }
    }
    for i in 0..=flag.levels.len() {
        let full = match level_ridge(flag, i) {
            Ok(b) => b.to_list(ring),
            Err(e) => format!("unavailable ({e})"),
        };
        let _ = writeln!(
            out,
            "  J_{i}: ridge {} n-ridge {} profile {}",
            full,
            ridge_or_reason(flag, i, true, ring),
            profile_or_reason(flag, i)
        );
    }
    for r in &snap.roles {
        let _ = writeln!(out, "  H_{}: {} - {}", r.level, r.role, r.reason);
    }
}

fn locus_text(state: &ChartState, c: u64) -> String {
    const MAX_TERMS: usize = 5_000;
    let terms: usize = state.ideal().iter().map(|g| g.len()).sum();
    if terms > MAX_TERMS {
        return format!("not listed (ideal has {terms} terms)");
    }
    let mut gens = max_order_locus_ideal(state.ideal(), c);
    gens.sort_by(canonical_cmp);
    let ring = state.ring();
    let shown: Vec<String> = gens.iter().take(8).map(|g| ring.show(g)).collect();
    let more = if gens.len() > 8 {
        format!(", ... ({} generators)", gens.len())
    } else {
        String::new()
    };
    format!("V({}{more})", shown.join(", "))
}

/// Ordered `key=value` pairs; keys never collide and no key is a prefix path of another.
#[derive(Default)]
pub struct Structured {
    pairs: Vec<(String, String)>,
}

impl Structured {
    pub fn put(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let key = key.into();
        debug_assert!(
            !self.pairs.iter().any(|(k, _)| *k == key),
            "duplicate key {key}"
        );
        self.pairs.push((key, value.into()));
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    /// One `key=value` line per pair; newlines inside values are escaped.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.pairs {
            let _ = writeln!(out, "{k}={}", v.replace('\\', "\\\\").replace('\n', "\\n"));
        }
        out
    }

    /// Nested JSON object following the dotted key paths.
    pub fn to_json(&self) -> serde_json::Value {
        let mut root = serde_json::Map::new();
        for (k, v) in &self.pairs {
            let parts: Vec<&str> = k.split('.').collect();
            let mut node = &mut root;
            for p in &parts[..parts.len() - 1] {
                let entry = node
                    .entry(p.to_string())
                    .or_insert_with(|| serde_json::Value::Object(serde_json::Map::new()));
                node = entry.as_object_mut().expect("structured keys form a tree");
            }
            node.insert(
                parts[parts.len() - 1].to_string(),
                serde_json::Value::String(v.clone()),
            );
        }
        serde_json::Value::Object(root)
    }
}

fn ratio_value(q: Q) -> String {
    q.to_string()
}

/// The structured report.
pub fn structured_report(replay: &Replay) -> Structured {
    let ring = replay.ring();
    let mut s = Structured::default();
    s.put("format", FORMAT_VERSION);
    s.put("ring.p", ring.p().to_string());
    s.put("ring.vars", ring.names.join(","));
    s.put("script.ideal", gens_text(&replay.script.ideal, ring));
    s.put(
        "script.statements",
        replay.script.statement_count().to_string(),
    );
    s.put("states", replay.snapshots.len().to_string());
    for (idx, snap) in replay.snapshots.iter().enumerate() {
        let k = |rest: &str| format!("state.{idx}.{rest}");
        let flag = &snap.flag;
        s.put(k("line"), snap.line.to_string());
        s.put(k("blowups"), snap.blowups.to_string());
        s.put(k("ideal"), ideal_summary(&snap.state));
        s.put(
            k("order"),
            snap.state
                .order()
                .map_or("undefined".into(), |o| o.to_string()),
        );
        s.put(k("exceptionals"), exceptional_text(&snap.state));
        s.put(
            k("flag.mode"),
            if snap.inherit { "inherit" } else { "search" },
        );
        s.put(k("flag.family"), flag.family.clone());
        s.put(k("flag.stop"), flag.stop.clone());
        s.put(k("flag.nested"), flag.nested_names(ring).join(", "));
        s.put(k("invariant"), invariant_text(&flag.invariant()));
        s.put(k("ratios"), ratio_text(&flag.invariant()));
        s.put(k("nridge.0"), ridge_or_reason(flag, 0, true, ring));
        s.put(k("profile.0"), profile_or_reason(flag, 0));
        s.put(k("levels"), flag.levels.len().to_string());
        for l in &flag.levels {
            let i = l.index;
            let lk = |rest: &str| format!("state.{idx}.level.{i}.{rest}");
            s.put(lk("hypersurface"), l.hypersurface.text(ring));
            s.put(lk("source"), l.source.to_string());
            s.put(lk("tie"), l.tie.to_string());
            s.put(lk("normal_crossings"), l.normal_crossings.to_string());
            s.put(
                lk("order"),
                l.order.finite().map_or("inf".into(), ratio_value),
            );
            s.put(lk("literal_order"), literal_text(flag, i));
            s.put(lk("monomial"), monomial_text(l, ring));
            s.put(lk("nonmonomial"), family_summary(flag, i, ring));
            s.put(lk("nridge"), ridge_or_reason(flag, i, true, ring));
            s.put(lk("profile"), profile_or_reason(flag, i));
            if let Some(r) = role_of(&snap.roles, i) {
                s.put(lk("role"), r.role.to_string());
                s.put(lk("role_reason"), r.reason.clone());
            }
        }
        s.put(k("roles"), roles_text(&snap.roles));
        if let Some(t) = &snap.transition {
            let r = &t.report;
            let tk = |rest: &str| format!("state.{idx}.transition.{rest}");
            s.put(tk("blowup"), entry_text(&blowup_entry(t), ring));
            s.put(
                tk("steps"),
                t.record
                    .steps
                    .iter()
                    .map(|e| entry_text(e, ring))
                    .collect::<Vec<_>>()
                    .join(" "),
            );
            s.put(
                tk("pre_invariant"),
                invariant_text(&t.record.pre_invariant()),
            );
            s.put(
                tk("post_invariant"),
                invariant_text(&t.record.post_invariant()),
            );
            s.put(tk("phenomenon_level"), level_text(r.phenomenon.level));
            s.put(tk("phenomenon"), phenomenon_text(r));
            let p = &r.preconditions;
            for (name, c) in [
                ("a", &p.a),
                ("a_refined", &p.a_refined),
                ("b", &p.b),
                ("c", &p.c),
            ] {
                s.put(
                    tk(&format!("preconditions.{name}.verdict")),
                    c.verdict.to_string(),
                );
                s.put(
                    tk(&format!("preconditions.{name}.detail")),
                    c.detail.clone(),
                );
            }
            s.put(tk("divisors_left"), r.divisors_left.to_string());
            s.put(tk("pre_roles"), roles_text(&r.pre_roles));
        }
    }
    s.put("assertions.checked", replay.checks.to_string());
    s.put("assertions.failed", replay.failures.len().to_string());
    for (i, f) in replay.failures.iter().enumerate() {
        let fk = |rest: &str| format!("failure.{i}.{rest}");
        s.put(fk("line"), f.line.to_string());
        s.put(fk("key"), f.key.clone());
        s.put(fk("expected"), f.expected.clone());
        s.put(fk("actual"), f.actual.clone());
        s.put(fk("source"), f.source.clone());
    }
    s.put(
        "status",
        if replay.passed() {
            "ok"
        } else {
            "assertion_failure"
        },
    );
    s
}
