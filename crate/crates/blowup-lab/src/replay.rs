//! Executes a script: applies blow-ups, translations and overrides in order,
//! settles the flag of weak maximal contact when it is needed, analyzes every
//! transition and checks the expectations.
//!
//! A *transition* opens at a blow-up and stays open until the next blow-up;
//! every settlement in between re-analyzes it against the flag settled just
//! before the blow-up, so an override stated after a coordinate change refers
//! to the same transition.

use blowup_core::charts::{ChartState, HistoryEntry};
use blowup_core::descent::{
    build_flag, invariant_text, level_n_ridge, level_ridge, ratio_text, Flag, FlagPlan,
    Hypersurface, SearchConfig,
};
use blowup_core::family::Order;
use blowup_core::kangaroo::{
    analyze_transition, classify_roles, HypersurfaceRole, KangarooReport, TransitionRecord, Verdict,
};
use blowup_core::ridge::canonical_cmp;
use blowup_core::{CoreError, Polynomial, Ring};

use crate::dsl::{
    statement_text, Expectation, FlagSetting, Literal, Precondition, Script, StatementKind,
};
use crate::error::LabError;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReplayOptions {
    /// Initial degree bound of the tail search (scripts may change it with `flag degree`).
    pub degree_bound: Option<u64>,
}

/// A settled state: the chart together with its flag and roles.
#[derive(Clone, Debug)]
pub struct Snapshot {
    /// Line of the statement that caused the settlement (0 at the end of the script).
    pub line: usize,
    /// Number of blow-ups performed so far.
    pub blowups: usize,
    pub state: ChartState,
    pub flag: Flag,
    /// Whether inherited hypersurfaces were kept (`flag inherit`).
    pub inherit: bool,
    pub roles: Vec<HypersurfaceRole>,
    /// Analysis of the open transition, when there is one.
    pub transition: Option<TransitionOutcome>,
}

#[derive(Clone, Debug)]
pub struct TransitionOutcome {
    pub record: TransitionRecord,
    pub report: KangarooReport,
}

/// One failed expectation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub line: usize,
    pub key: String,
    pub expected: String,
    pub actual: String,
    /// The operation that produced the actual value.
    pub source: String,
}

/// Everything a replay produced.
#[derive(Clone, Debug)]
pub struct Replay {
    pub script: Script,
    pub snapshots: Vec<Snapshot>,
    /// Snapshot indices requested by `analyze!`.
    pub analyses: Vec<usize>,
    pub checks: usize,
    pub failures: Vec<Failure>,
}

impl Replay {
    pub fn ring(&self) -> &Ring {
        &self.script.ring
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn last(&self) -> Option<&Snapshot> {
        self.snapshots.last()
    }
}

struct Open {
    pre: Snapshot,
    record_blowup: HistoryEntry,
    steps: Vec<HistoryEntry>,
}

struct Engine {
    state: ChartState,
    cfg: SearchConfig,
    inherit: bool,
    overrides: Vec<Option<Hypersurface>>,
    inherited: Vec<Option<Hypersurface>>,
    open: Option<Open>,
    stale: bool,
    snapshots: Vec<Snapshot>,
}

impl Engine {
    fn current(&self) -> Option<&Snapshot> {
        if self.stale {
            None
        } else {
            self.snapshots.last()
        }
    }

    fn settle(&mut self, line: usize) -> Result<&Snapshot, LabError> {
        if self.stale || self.snapshots.is_empty() {
            let plan = FlagPlan {
                fixed: self.overrides.clone(),
                inherited: self.inherited.clone(),
                inherit: self.inherit,
            };
            let flag = build_flag(&self.state, &plan, &self.cfg)
                .map_err(|source| LabError::Replay { line, source })?;
            let roles = classify_roles(&flag);
            let transition = self.open.as_ref().map(|open| {
                let (blowup, kind) = match &open.record_blowup {
                    HistoryEntry::Blowup { spec, kind } => (spec.clone(), *kind),
                    _ => unreachable!("transitions open at blow-ups"),
                };
                let record = TransitionRecord {
                    pre_state: open.pre.state.clone(),
                    pre_flag: open.pre.flag.clone(),
                    blowup,
                    kind,
                    steps: open.steps.clone(),
                    post_state: self.state.clone(),
                    post_flag: flag.clone(),
                };
                let report = analyze_transition(&record);
                TransitionOutcome { record, report }
            });
            self.snapshots.push(Snapshot {
                line,
                blowups: self.state.blowup_count(),
                state: self.state.clone(),
                flag,
                inherit: self.inherit,
                roles,
                transition,
            });
            self.stale = false;
        }
        Ok(self.snapshots.last().expect("settled"))
    }
}

/// Replays a parsed script.
pub fn replay(script: &Script, options: &ReplayOptions) -> Result<Replay, LabError> {
    let mut cfg = SearchConfig::default();
    if let Some(d) = options.degree_bound {
        cfg.degree_bound = d;
    }
    let ring = script.ring.clone();
    let mut e = Engine {
        state: ChartState::new(ring.clone(), script.ideal.clone()),
        cfg,
        inherit: false,
        overrides: Vec::new(),
        inherited: Vec::new(),
        open: None,
        stale: true,
        snapshots: Vec::new(),
    };
    let mut analyses = Vec::new();
    let mut failures = Vec::new();
    let mut checks = 0;
    for stmt in &script.body {
        let line = stmt.line;
        match &stmt.kind {
            StatementKind::Blowup { spec, kind } => {
                let pre = e.settle(line)?.clone();
                e.state
                    .validate_center(&spec.center)
                    .map_err(|v| LabError::Replay {
                        line,
                        source: CoreError::InvalidCenter(v.to_string()),
                    })?;
                e.state = e
                    .state
                    .blowup(spec, *kind)
                    .map_err(|source| LabError::Replay { line, source })?;
                e.inherited = pre
                    .flag
                    .levels
                    .iter()
                    .map(|l| l.hypersurface.transform_blowup(spec))
                    .collect();
                e.overrides.clear();
                e.open = Some(Open {
                    pre,
                    record_blowup: HistoryEntry::Blowup {
                        spec: spec.clone(),
                        kind: *kind,
                    },
                    steps: Vec::new(),
                });
                e.stale = true;
            }
            StatementKind::Translate { var, c } => {
                e.state = e.state.translate(*var, *c);
                let c = ring.field.reduce(*c);
                e.inherited = e
                    .inherited
                    .iter()
                    .map(|h| h.as_ref().and_then(|h| h.transform_translate(*var, c)))
                    .collect();
                for (i, h) in e.overrides.iter_mut().enumerate() {
                    if let Some(cur) = h {
                        let moved = cur.transform_translate(*var, c).ok_or_else(|| LabError::Replay {
                            line,
                            source: CoreError::Inadmissible(format!(
                                "override of level {} no longer passes through the origin after the translation",
                                i + 1
                            )),
                        })?;
                        *h = Some(moved);
                    }
                }
                if let Some(open) = &mut e.open {
                    open.steps.push(HistoryEntry::Translate { var: *var, c });
                }
                e.stale = true;
            }
            StatementKind::Hypersurface { level, poly } => {
                let h = Hypersurface::from_poly(poly)
                    .map_err(|source| LabError::Replay { line, source })?;
                if e.overrides.len() < *level {
                    e.overrides.resize(*level, None);
                }
                e.overrides[level - 1] = Some(h);
                e.state = e.state.with_hypersurface(*level, poly.clone());
                if let Some(open) = &mut e.open {
                    open.steps.push(HistoryEntry::Hypersurface {
                        level: *level,
                        poly: poly.clone(),
                    });
                }
                e.stale = true;
            }
            StatementKind::Flag(setting) => {
                match setting {
                    FlagSetting::Search => e.inherit = false,
                    FlagSetting::Inherit => e.inherit = true,
                    FlagSetting::Depth(d) => e.cfg.max_levels = *d,
                    FlagSetting::Degree(d) => e.cfg.degree_bound = *d,
                }
                e.stale = true;
            }
            StatementKind::FlagNow => {
                e.settle(line)?;
            }
            StatementKind::Analyze => {
                e.settle(line)?;
                analyses.push(e.snapshots.len() - 1);
            }
            StatementKind::Expect(x) => {
                checks += 1;
                let outcome = if x.needs_flag() {
                    let snap = e.settle(line)?;
                    check(x, &snap.state, Some(snap), &ring)
                } else {
                    check(x, &e.state, e.current(), &ring)
                };
                if let Err((actual, source)) = outcome {
                    failures.push(Failure {
                        line,
                        key: x.key(),
                        expected: x.value_text(&ring),
                        actual,
                        source,
                    });
                }
            }
        }
    }
    if e.stale {
        e.settle(0)?;
    }
    Ok(Replay {
        script: script.clone(),
        snapshots: e.snapshots,
        analyses,
        checks,
        failures,
    })
}

type Mismatch = (String, String);

fn mismatch(actual: impl Into<String>, source: &str) -> Result<(), Mismatch> {
    Err((actual.into(), source.to_string()))
}

/// Checks one expectation; on mismatch returns the actual value and its source operation.
fn check(
    x: &Expectation,
    state: &ChartState,
    snap: Option<&Snapshot>,
    ring: &Ring,
) -> Result<(), Mismatch> {
    match x {
        Expectation::Order(n) => match state.order() {
            Ok(o) if o == *n => Ok(()),
            Ok(o) => mismatch(o.to_string(), "order_at_origin"),
            Err(err) => mismatch(format!("undefined ({err})"), "order_at_origin"),
        },
        Expectation::Ideal(gens) => {
            if state.ideal() == gens.as_slice() {
                Ok(())
            } else {
                mismatch(gens_text(state.ideal(), ring), "transform")
            }
        }
        Expectation::Exceptionals(vars) => {
            let actual: Vec<usize> = state.exceptionals().iter().map(|e| e.var).collect();
            if actual == *vars {
                Ok(())
            } else {
                mismatch(vars_text(&actual, ring), "blowup")
            }
        }
        _ => {
            let snap = snap.expect("flag-dependent expectations are checked on a settled snapshot");
            check_flag(x, snap, ring)
        }
    }
}

fn check_flag(x: &Expectation, snap: &Snapshot, ring: &Ring) -> Result<(), Mismatch> {
    let flag = &snap.flag;
    let inv = flag.invariant();
    match x {
        Expectation::LevelOrder { level, value } => {
            let lit = flag.literal_orders();
            let actual = match inv.get(*level) {
                None => "absent".to_string(),
                Some(Order::Infinite) => "inf".to_string(),
                Some(Order::Finite(q)) => match lit[*level] {
                    Some(n) => n.to_string(),
                    None => format!("~{q}"),
                },
            };
            let want = match value {
                Literal::Finite(n) => n.to_string(),
                Literal::Infinite => "inf".to_string(),
            };
            if actual == want {
                Ok(())
            } else {
                mismatch(actual, "build_flag")
            }
        }
        Expectation::Ratio { level, value } => match inv.get(*level) {
            Some(o) if o == value => Ok(()),
            Some(o) => mismatch(o.to_string(), "build_flag"),
            None => mismatch("absent", "build_flag"),
        },
        Expectation::Invariant(_) => {
            let actual = invariant_text(&inv);
            if actual == x.value_text(ring) {
                Ok(())
            } else {
                mismatch(actual, "build_flag")
            }
        }
        Expectation::Ratios(v) => {
            if &inv == v {
                Ok(())
            } else {
                mismatch(ratio_text(&inv), "build_flag")
            }
        }
        Expectation::HypersurfaceIs { level, poly } => match flag.levels.get(level - 1) {
            Some(l) if l.hypersurface.defining() == *poly => Ok(()),
            Some(l) => mismatch(l.hypersurface.text(ring), "build_flag"),
            None => mismatch("absent", "build_flag"),
        },
        Expectation::Pivots { vars, prefix } => {
            let actual = flag.pivots();
            if list_matches(&actual, vars, *prefix) {
                Ok(())
            } else {
                mismatch(vars_text(&actual, ring), "build_flag")
            }
        }
        Expectation::Roles {
            roles: want,
            prefix,
        } => {
            let actual: Vec<_> = snap.roles.iter().map(|r| r.role).collect();
            if list_matches(&actual, want, *prefix) {
                Ok(())
            } else {
                mismatch(roles_text(&snap.roles), "classify_roles")
            }
        }
        Expectation::Ridge { level, basis } => match ridge_at(flag, *level, false) {
            Ok(actual) => compare_basis(actual, basis, ring, "ridge"),
            Err(err) => mismatch(format!("unavailable ({err})"), "ridge"),
        },
        Expectation::NRidge { level, basis } => match ridge_at(flag, *level, true) {
            Ok(actual) => compare_basis(actual, basis, ring, "n_ridge"),
            Err(err) => mismatch(format!("unavailable ({err})"), "n_ridge"),
        },
        Expectation::Profile { level, degrees } => match n_ridge_profile(flag, *level) {
            Ok(actual) if actual == *degrees => Ok(()),
            Ok(actual) => mismatch(profile_text(&actual), "n_ridge"),
            Err(err) => mismatch(format!("unavailable ({err})"), "n_ridge"),
        },
        Expectation::Kangaroo(level) => match &snap.transition {
            Some(t) if t.report.phenomenon.level == *level => Ok(()),
            Some(t) => mismatch(level_text(t.report.phenomenon.level), "detect_phenomenon"),
            None => mismatch("no transition", "detect_phenomenon"),
        },
        Expectation::DivisorsLeft(n) => match &snap.transition {
            Some(t) if t.report.divisors_left as u64 == *n => Ok(()),
            Some(t) => mismatch(t.report.divisors_left.to_string(), "divisors_left"),
            None => mismatch("no transition", "divisors_left"),
        },
        Expectation::Precondition { which, pass } => match &snap.transition {
            Some(t) => {
                let p = &t.report.preconditions;
                let cond = match which {
                    Precondition::A => &p.a,
                    Precondition::ARefined => &p.a_refined,
                    Precondition::B => &p.b,
                };
                let want = if *pass { Verdict::Pass } else { Verdict::Fail };
                if cond.verdict == want {
                    Ok(())
                } else {
                    mismatch(
                        format!("{} ({})", cond.verdict, cond.detail),
                        "check_preconditions",
                    )
                }
            }
            None => mismatch("no transition", "check_preconditions"),
        },
        Expectation::Order(_) | Expectation::Ideal(_) | Expectation::Exceptionals(_) => {
            unreachable!("state expectations are checked without the flag")
        }
    }
}

/// The basis of the ridge (`n = false`: all generators) or n-ridge of `J_level`.
/// Exact equality, or (with `prefix`) agreement on the leading entries.
fn list_matches<T: PartialEq>(actual: &[T], want: &[T], prefix: bool) -> bool {
    if prefix {
        actual.len() >= want.len() && actual[..want.len()] == *want
    } else {
        actual == want
    }
}

pub fn ridge_at(flag: &Flag, level: usize, n: bool) -> Result<Vec<Polynomial>, CoreError> {
    if level > flag.levels.len() {
        return Err(CoreError::CoefficientIdeal(format!(
            "the flag has only {} levels",
            flag.levels.len()
        )));
    }
    if n {
        Ok(level_n_ridge(flag, level)?.plain.polys())
    } else {
        Ok(level_ridge(flag, level)?.polys())
    }
}

pub fn n_ridge_profile(flag: &Flag, level: usize) -> Result<Vec<u64>, CoreError> {
    if level > flag.levels.len() {
        return Err(CoreError::CoefficientIdeal(format!(
            "the flag has only {} levels",
            flag.levels.len()
        )));
    }
    Ok(level_n_ridge(flag, level)?.plain.profile())
}

fn compare_basis(
    mut actual: Vec<Polynomial>,
    want: &[Polynomial],
    ring: &Ring,
    source: &str,
) -> Result<(), Mismatch> {
    let mut want = want.to_vec();
    actual.sort_by(canonical_cmp);
    want.sort_by(canonical_cmp);
    if actual == want {
        Ok(())
    } else {
        mismatch(basis_text(&actual, ring), source)
    }
}

pub fn basis_text(basis: &[Polynomial], ring: &Ring) -> String {
    let items: Vec<String> = basis
        .iter()
        .map(|p| format!("\"{}\"", ring.show(p)))
        .collect();
    format!("[{}]", items.join(","))
}

pub fn profile_text(degrees: &[u64]) -> String {
    format!(
        "[{}]",
        degrees
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(",")
    )
}

pub fn gens_text(gens: &[Polynomial], ring: &Ring) -> String {
    gens.iter()
        .map(|g| ring.show(g))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn vars_text(vars: &[usize], ring: &Ring) -> String {
    if vars.is_empty() {
        "none".into()
    } else {
        vars.iter()
            .map(|&v| ring.var_name(v))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

pub fn roles_text(roles: &[HypersurfaceRole]) -> String {
    roles
        .iter()
        .map(|r| r.role.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn level_text(level: Option<usize>) -> String {
    level.map_or("none".to_string(), |l| l.to_string())
}

/// Statement text of a history entry, in script syntax.
pub fn entry_text(entry: &HistoryEntry, ring: &Ring) -> String {
    match entry {
        HistoryEntry::Blowup { spec, kind } => statement_text(
            &StatementKind::Blowup {
                spec: spec.clone(),
                kind: *kind,
            },
            ring,
        ),
        other => other.to_statement(ring),
    }
}
