//! Bounded search for kangaroo phenomena over a family of ideals.
//!
//! Every family member is blown up at the origin, breadth-first over all
//! charts, down to a depth bound. After each blow-up the harness also probes
//! the points of the new exceptional divisor that leave older exceptional
//! divisors (translations of old exceptional coordinates by nonzero constants).
//! Branches where the order drops below the member's initial order are closed.
//! Every transition is analyzed like a replayed one (an order increase counts
//! only when preconditions (a) and (a-refined) hold); the catalog lists each
//! pair of consecutive phenomena on a branch with their distance (number of
//! blow-ups between them) and the order balance at the level of the second.
//!
//! The enumeration is deterministic: members are explored independently with a
//! fixed share of the evaluation budget, children in a fixed order, and the
//! catalog is merged in member order, so the worker count does not matter.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;

use blowup_core::charts::{BlowupSpec, ChartState, TransformKind};
use blowup_core::descent::{
    build_flag, ratio_text, Flag, FlagPlan, Hypersurface, Invariant, SearchConfig,
};
use blowup_core::family::Order;
use blowup_core::kangaroo::{check_preconditions, detect_phenomenon, TransitionRecord, Verdict};
use blowup_core::text::{parse_expr, tokenize, Tok, TokenStream};
use blowup_core::{Polynomial, Ring};

use crate::error::LabError;

pub const CATALOG_VERSION: &str = "blowup-lab-catalog/1";

/// Which points of a new chart are explored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointPolicy {
    /// Only the origin of each chart.
    Origin,
    /// The origin and the points reached by translating up to `max_moved` old
    /// exceptional coordinates by nonzero constants.
    Exceptional { max_moved: usize },
}

/// How the flag of a child node is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlagPolicy {
    /// A fresh hypersurface search at every node.
    Search,
    /// Strict transforms of the parent's flag while admissible, search below.
    Inherit,
    /// The lexicographically larger invariant of `Inherit` and `Search`.
    Best,
}

impl FlagPolicy {
    fn name(self) -> &'static str {
        match self {
            FlagPolicy::Search => "search",
            FlagPolicy::Inherit => "inherit",
            FlagPolicy::Best => "best",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Member {
    pub name: String,
    pub ideal: Vec<Polynomial>,
}

#[derive(Clone, Debug)]
pub struct Family {
    pub name: String,
    pub ring: Ring,
    pub members: Vec<Member>,
    pub points: PointPolicy,
    pub flag: FlagPolicy,
    pub degree_bound: u64,
    /// Nodes kept per depth (highest invariants first); `None` keeps all.
    pub beam: Option<usize>,
    /// Points whose ideal has more terms are closed without evaluation.
    pub max_terms: usize,
}

pub const DEFAULT_MAX_TERMS: usize = 4000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarnessOptions {
    pub depth: usize,
    /// Total number of flag evaluations, shared evenly by the members.
    pub budget: u64,
    pub jobs: usize,
}

/// One blow-up of a branch: the chart and the translations that follow it
/// (`v ↦ v + c`, i.e. the new origin lies at `v = c`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub chart: usize,
    pub moves: Vec<(usize, u64)>,
}

impl Step {
    fn text(&self, ring: &Ring) -> String {
        let mut s = ring.var_name(self.chart).to_string();
        if !self.moves.is_empty() {
            let pts: Vec<String> = self
                .moves
                .iter()
                .map(|&(v, c)| format!("{}={}", ring.var_name(v), balanced(c, ring.p())))
                .collect();
            let _ = write!(s, "({})", pts.join(","));
        }
        s
    }
}

fn balanced(c: u64, p: u64) -> i64 {
    if c > p / 2 {
        c as i64 - p as i64
    } else {
        c as i64
    }
}

/// A phenomenon on a branch.
#[derive(Clone, Debug, PartialEq)]
pub struct Event {
    /// 1-based blow-up count of the transition.
    pub step: usize,
    pub level: usize,
    pub pre: Invariant,
    pub post: Invariant,
}

/// Two consecutive phenomena on one branch.
#[derive(Clone, Debug, PartialEq)]
pub struct Pair {
    pub member: usize,
    pub path: Vec<Step>,
    pub first: Event,
    pub second: Event,
    /// Order of the second event's level right after the first event.
    pub after_first: Option<Order>,
}

impl Pair {
    pub fn distance(&self) -> usize {
        self.second.step - self.first.step
    }

    /// Order of the second level after the second event minus its order right
    /// after the first event (positive: the increase outweighs the drop).
    pub fn balance(&self) -> Option<String> {
        let post = self.second.post.get(self.second.level).copied()?;
        match (post, self.after_first?) {
            (Order::Finite(a), Order::Finite(b)) => Some(signed(a - b)),
            _ => None,
        }
    }
}

fn signed(q: blowup_core::family::Q) -> String {
    if *q.numer() > 0 {
        format!("+{q}")
    } else {
        q.to_string()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MemberSummary {
    pub name: String,
    pub order: Option<u64>,
    pub budget: u64,
    pub evaluations: u64,
    pub nodes: usize,
    /// Points closed because their ideal exceeds the term bound.
    pub oversized: usize,
    pub phenomena: usize,
    /// Order increases rejected because precondition (a) or (a-refined) fails.
    pub rejected: usize,
    pub max_depth: usize,
    pub exhausted: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Catalog {
    pub family: String,
    pub ring: Ring,
    pub depth: usize,
    pub budget: u64,
    pub points: PointPolicy,
    pub flag: FlagPolicy,
    pub beam: Option<usize>,
    pub max_terms: usize,
    pub members: Vec<MemberSummary>,
    /// Sorted by (distance, dimension, member, path).
    pub pairs: Vec<Pair>,
}

impl Catalog {
    /// Whether some member ran out of budget before reaching the depth bound.
    pub fn partial(&self) -> bool {
        self.members.iter().any(|m| m.exhausted)
    }

    pub fn pairs_of<'a>(&'a self, member: &'a str) -> impl Iterator<Item = &'a Pair> + 'a {
        let idx = self.members.iter().position(|m| m.name == member);
        self.pairs.iter().filter(move |p| Some(p.member) == idx)
    }

    pub fn to_text(&self) -> String {
        let ring = &self.ring;
        let mut out = String::new();
        let _ = writeln!(out, "format={CATALOG_VERSION}");
        let _ = writeln!(out, "family={}", self.family);
        let _ = writeln!(out, "ring.p={}", ring.p());
        let _ = writeln!(
            out,
            "ring.vars={}",
            (0..ring.nvars())
                .map(|v| ring.var_name(v))
                .collect::<Vec<_>>()
                .join(",")
        );
        let _ = writeln!(out, "depth={}", self.depth);
        let _ = writeln!(out, "budget={}", self.budget);
        let points = match self.points {
            PointPolicy::Origin => "origin".to_string(),
            PointPolicy::Exceptional { max_moved } => format!("exceptional {max_moved}"),
        };
        let _ = writeln!(out, "points={points}");
        let _ = writeln!(out, "flag={}", self.flag.name());
        let _ = writeln!(
            out,
            "beam={}",
            self.beam.map_or("all".to_string(), |k| k.to_string())
        );
        let _ = writeln!(out, "max_terms={}", self.max_terms);
        let _ = writeln!(out, "members={}", self.members.len());
        for (i, m) in self.members.iter().enumerate() {
            let order = m.order.map_or("undefined".to_string(), |c| c.to_string());
            let _ = writeln!(
                out,
                "member.{i}={} order={order} nodes={} oversized={} evaluations={}/{} phenomena={} rejected={} depth_reached={} status={}",
                m.name,
                m.nodes,
                m.oversized,
                m.evaluations,
                m.budget,
                m.phenomena,
                m.rejected,
                m.max_depth,
                if m.exhausted { "partial" } else { "complete" }
            );
            if let Some(note) = &m.note {
                let _ = writeln!(out, "member.{i}.note={note}");
            }
        }
        let _ = writeln!(out, "pairs={}", self.pairs.len());
        for (i, p) in self.pairs.iter().enumerate() {
            let path: Vec<String> = p.path.iter().map(|s| s.text(ring)).collect();
            let _ = writeln!(
                out,
                "pair.{i}={} distance={} dimension={} steps=({},{}) levels=({},{}) balance={} path={}",
                self.members[p.member].name,
                p.distance(),
                ring.nvars(),
                p.first.step,
                p.second.step,
                p.first.level,
                p.second.level,
                p.balance().unwrap_or_else(|| "undefined".into()),
                path.join(" ")
            );
            let _ = writeln!(
                out,
                "pair.{i}.invariants={} -> {} .. {} -> {}",
                ratio_text(&p.first.pre),
                ratio_text(&p.first.post),
                ratio_text(&p.second.pre),
                ratio_text(&p.second.post)
            );
        }
        let _ = writeln!(
            out,
            "status={}",
            if self.partial() {
                "partial (budget exhausted)"
            } else {
                "complete"
            }
        );
        out
    }
}

// ---------------------------------------------------------------------------
// Family configuration

/// Parses a family configuration: `key = value` lines, `#` comments.
///
/// ```text
/// name = sec4
/// char = 3
/// vars = x,y,z,w,v
/// seed 1312 = w^3+y^6*z^3*v^2+x^9*y^8+x^18*y^2+x^18*v^2
/// template t = w^3+y^6*z^3*v^2+x^{a}*y^8+x^18*y^2
/// range a = 7..9
/// points = exceptional 2
/// flag = search
/// degree_bound = 24
/// ```
///
/// Ranges belong to the latest template; a template expands to the cartesian
/// product of its ranges in declaration order, values ascending.
pub fn parse_family(text: &str) -> Result<Family, LabError> {
    let mut name = String::from("family");
    let mut p: Option<u64> = None;
    let mut vars: Option<Vec<String>> = None;
    let mut points = PointPolicy::Exceptional { max_moved: 2 };
    let mut flag = FlagPolicy::Search;
    let mut degree_bound = SearchConfig::default().degree_bound;
    let mut beam = None;
    let mut max_terms = DEFAULT_MAX_TERMS;
    // (line, name, text, ranges)
    enum Source {
        Seed(usize, String, String),
        Template(usize, String, String, Vec<(String, Vec<u64>)>),
    }
    let mut sources: Vec<Source> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let err = |message: String| LabError::Config { line, message };
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, found `{body}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let mut words = key.split_whitespace();
        let head = words.next().unwrap_or("");
        let arg = words.next();
        if words.next().is_some() {
            return Err(err(format!("malformed key `{key}`")));
        }
        match (head, arg) {
            ("name", None) => name = value.to_string(),
            ("char", None) => {
                p = Some(
                    value
                        .parse()
                        .map_err(|_| err(format!("invalid characteristic `{value}`")))?,
                );
            }
            ("vars", None) => vars = Some(value.split(',').map(|s| s.trim().to_string()).collect()),
            ("seed", Some(n)) => sources.push(Source::Seed(line, n.to_string(), value.to_string())),
            ("template", Some(n)) => sources.push(Source::Template(
                line,
                n.to_string(),
                value.to_string(),
                Vec::new(),
            )),
            ("range", Some(v)) => {
                let values = parse_range(value).ok_or_else(|| {
                    err(format!("invalid range `{value}` (use `lo..hi` or `a,b,c`)"))
                })?;
                match sources.last_mut() {
                    Some(Source::Template(_, _, _, ranges)) => {
                        if ranges.iter().any(|(n, _)| n == v) {
                            return Err(err(format!("range `{v}` given twice")));
                        }
                        ranges.push((v.to_string(), values));
                    }
                    _ => return Err(err("`range` must follow a `template`".into())),
                }
            }
            ("points", None) => {
                points = match value.split_whitespace().collect::<Vec<_>>().as_slice() {
                    ["origin"] => PointPolicy::Origin,
                    ["exceptional"] => PointPolicy::Exceptional { max_moved: 2 },
                    ["exceptional", k] => PointPolicy::Exceptional {
                        max_moved: k.parse().map_err(|_| err(format!("invalid count `{k}`")))?,
                    },
                    _ => {
                        return Err(err(format!(
                            "invalid points policy `{value}` (origin | exceptional [K])"
                        )))
                    }
                }
            }
            ("flag", None) => {
                flag = match value {
                    "search" => FlagPolicy::Search,
                    "inherit" => FlagPolicy::Inherit,
                    "best" => FlagPolicy::Best,
                    _ => {
                        return Err(err(format!(
                            "invalid flag policy `{value}` (search | inherit | best)"
                        )))
                    }
                }
            }
            ("beam", None) => {
                beam = match value {
                    "all" => None,
                    _ => Some(
                        value
                            .parse()
                            .map_err(|_| err(format!("invalid beam `{value}` (all | N)")))?,
                    ),
                }
            }
            ("max_terms", None) => {
                max_terms = value
                    .parse()
                    .map_err(|_| err(format!("invalid term bound `{value}`")))?;
            }
            ("degree_bound", None) => {
                degree_bound = value
                    .parse()
                    .map_err(|_| err(format!("invalid degree bound `{value}`")))?;
            }
            _ => return Err(err(format!("unknown key `{key}`"))),
        }
    }
    let err0 = |message: &str| LabError::Config {
        line: 0,
        message: message.into(),
    };
    let p = p.ok_or_else(|| err0("missing `char`"))?;
    let vars = vars.ok_or_else(|| err0("missing `vars`"))?;
    let ring = Ring::from_names(p, vars).map_err(|e| err0(&e.to_string()))?;
    let mut members = Vec::new();
    for src in sources {
        match src {
            Source::Seed(line, n, t) => members.push(Member {
                ideal: parse_ideal(&t, &ring, line)?,
                name: n,
            }),
            Source::Template(line, n, t, ranges) => {
                for assignment in cartesian(&ranges) {
                    let mut filled = t.clone();
                    let mut label = Vec::new();
                    for ((var, _), value) in ranges.iter().zip(&assignment) {
                        filled = filled.replace(&format!("{{{var}}}"), &value.to_string());
                        label.push(format!("{var}={value}"));
                    }
                    if let Some(start) = filled.find('{') {
                        let end = filled[start..]
                            .find('}')
                            .map_or(filled.len(), |e| start + e + 1);
                        return Err(LabError::Config {
                            line,
                            message: format!(
                                "template placeholder {} has no range",
                                &filled[start..end]
                            ),
                        });
                    }
                    let name = if label.is_empty() {
                        n.clone()
                    } else {
                        format!("{n}[{}]", label.join(","))
                    };
                    members.push(Member {
                        ideal: parse_ideal(&filled, &ring, line)?,
                        name,
                    });
                }
            }
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    for m in &members {
        if !seen.insert(m.name.clone()) {
            return Err(err0(&format!("member `{}` defined twice", m.name)));
        }
    }
    Ok(Family {
        name,
        ring,
        members,
        points,
        flag,
        degree_bound,
        beam,
        max_terms,
    })
}

fn parse_range(value: &str) -> Option<Vec<u64>> {
    if let Some((lo, hi)) = value.split_once("..") {
        let (lo, hi): (u64, u64) = (lo.trim().parse().ok()?, hi.trim().parse().ok()?);
        (lo <= hi).then(|| (lo..=hi).collect())
    } else {
        value.split(',').map(|s| s.trim().parse().ok()).collect()
    }
}

fn cartesian(ranges: &[(String, Vec<u64>)]) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for (_, values) in ranges {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    out
}

fn parse_ideal(text: &str, ring: &Ring, line: usize) -> Result<Vec<Polynomial>, LabError> {
    let config = |message: String| LabError::Config { line, message };
    let tokens = tokenize(text).map_err(|e| config(e.to_string()))?;
    let mut s = TokenStream::new(&tokens);
    let mut gens = vec![parse_expr(&mut s, ring).map_err(|e| config(e.to_string()))?];
    while s.eat(&Tok::Comma) {
        gens.push(parse_expr(&mut s, ring).map_err(|e| config(e.to_string()))?);
    }
    if !matches!(s.peek(), Tok::Eof) {
        return Err(config(format!(
            "unexpected {} after the ideal",
            s.peek().describe()
        )));
    }
    Ok(gens)
}

// ---------------------------------------------------------------------------
// Enumeration

struct Node {
    state: ChartState,
    flag: Flag,
    path: Vec<Step>,
    events: Vec<Event>,
    /// Invariant right after the latest event.
    after_event: Option<Invariant>,
}

struct MemberResult {
    summary: MemberSummary,
    pairs: Vec<Pair>,
}

/// Runs the enumeration. Budget shares: `budget / members`, the remainder to
/// the first members.
pub fn search(family: &Family, opts: &HarnessOptions) -> Catalog {
    let n = family.members.len();
    let shares: Vec<u64> = (0..n as u64)
        .map(|i| opts.budget / n.max(1) as u64 + u64::from(i < opts.budget % n.max(1) as u64))
        .collect();
    let results: Mutex<Vec<Option<MemberResult>>> = Mutex::new((0..n).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = opts.jobs.clamp(1, n.max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, AtomicOrdering::SeqCst);
                if i >= n {
                    break;
                }
                let r = explore(family, i, opts.depth, shares[i]);
                results.lock().expect("no worker panicked")[i] = Some(r);
            });
        }
    });
    let mut members = Vec::new();
    let mut pairs = Vec::new();
    for r in results
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .flatten()
    {
        members.push(r.summary);
        pairs.extend(r.pairs);
    }
    let ring = family.ring.clone();
    pairs.sort_by(|a, b| {
        (a.distance(), ring.nvars(), a.member)
            .cmp(&(b.distance(), ring.nvars(), b.member))
            .then_with(|| path_key(&a.path).cmp(&path_key(&b.path)))
    });
    Catalog {
        family: family.name.clone(),
        ring,
        depth: opts.depth,
        budget: opts.budget,
        points: family.points,
        flag: family.flag,
        beam: family.beam,
        max_terms: family.max_terms,
        members,
        pairs,
    }
}

fn path_key(path: &[Step]) -> Vec<(usize, Vec<(usize, u64)>)> {
    path.iter().map(|s| (s.chart, s.moves.clone())).collect()
}

fn explore(family: &Family, index: usize, depth: usize, budget: u64) -> MemberResult {
    let member = &family.members[index];
    let ring = &family.ring;
    let cfg = SearchConfig {
        degree_bound: family.degree_bound,
        ..SearchConfig::default()
    };
    let mut summary = MemberSummary {
        name: member.name.clone(),
        order: None,
        budget,
        evaluations: 0,
        nodes: 0,
        oversized: 0,
        phenomena: 0,
        rejected: 0,
        max_depth: 0,
        exhausted: false,
        note: None,
    };
    let mut pairs = Vec::new();
    let root = ChartState::new(ring.clone(), member.ideal.clone());
    let c = match root.order() {
        Ok(c) if c >= 2 => c,
        Ok(c) => {
            summary.order = Some(c);
            summary.note = Some(format!("order {c} at the origin; nothing to blow up"));
            return MemberResult { summary, pairs };
        }
        Err(e) => {
            summary.note = Some(format!("order undefined ({e})"));
            return MemberResult { summary, pairs };
        }
    };
    summary.order = Some(c);
    if budget == 0 {
        summary.exhausted = true;
        return MemberResult { summary, pairs };
    }
    summary.evaluations += 1;
    let flag = match build_flag(&root, &FlagPlan::search(), &cfg) {
        Ok(f) => f,
        Err(e) => {
            summary.note = Some(format!("no flag at the origin ({e})"));
            return MemberResult { summary, pairs };
        }
    };
    summary.nodes = 1;
    let mut frontier = vec![Node {
        state: root,
        flag,
        path: Vec::new(),
        events: Vec::new(),
        after_event: None,
    }];
    'levels: for d in 1..=depth {
        let mut next = Vec::new();
        for node in &frontier {
            for (spec, step, state) in children(node, family.points, c) {
                if state.ideal().iter().map(Polynomial::len).sum::<usize>() > family.max_terms {
                    summary.oversized += 1;
                    continue;
                }
                let evals = if family.flag == FlagPolicy::Best {
                    2
                } else {
                    1
                };
                if summary.evaluations + evals > budget {
                    summary.exhausted = true;
                    break 'levels;
                }
                summary.evaluations += evals;
                let Some(flag) = child_flag(node, &spec, &step, &state, family.flag, &cfg) else {
                    continue;
                };
                let t = TransitionRecord {
                    pre_state: node.state.clone(),
                    pre_flag: node.flag.clone(),
                    blowup: spec,
                    kind: TransformKind::Weak,
                    steps: Vec::new(),
                    post_state: state.clone(),
                    post_flag: flag.clone(),
                };
                let mut ph = detect_phenomenon(&t);
                if ph.level.is_some() {
                    let pre = check_preconditions(&t, ph.level);
                    if pre.a.verdict == Verdict::Fail || pre.a_refined.verdict == Verdict::Fail {
                        summary.rejected += 1;
                        ph.level = None;
                    }
                }
                let mut path = node.path.clone();
                path.push(step);
                let mut events = node.events.clone();
                let mut after_event = node.after_event.clone();
                if let Some(level) = ph.level {
                    let event = Event {
                        step: d,
                        level,
                        pre: ph.pre.clone(),
                        post: ph.post.clone(),
                    };
                    summary.phenomena += 1;
                    if let Some(first) = events.last() {
                        pairs.push(Pair {
                            member: index,
                            path: path.clone(),
                            first: first.clone(),
                            second: event.clone(),
                            after_first: after_event
                                .as_ref()
                                .and_then(|inv| inv.get(level).copied()),
                        });
                    }
                    events.push(event);
                    after_event = Some(ph.post);
                }
                summary.nodes += 1;
                summary.max_depth = d;
                next.push(Node {
                    state,
                    flag,
                    path,
                    events,
                    after_event,
                });
            }
        }
        if let Some(k) = family.beam {
            // Stable: equal invariants keep the canonical child order.
            next.sort_by_key(|n| std::cmp::Reverse(n.flag.invariant()));
            next.truncate(k);
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    MemberResult { summary, pairs }
}

/// Children of a node in canonical order: chart variables ascending; per chart
/// the origin first, then translated points by moved variables and constants.
/// Only points where the order is still `c` are kept.
fn children(node: &Node, points: PointPolicy, c: u64) -> Vec<(BlowupSpec, Step, ChartState)> {
    let n = node.state.nvars();
    let p = node.state.ring().p();
    let mut out = Vec::new();
    if node.state.order().ok() != Some(c) {
        return out;
    }
    for chart in 0..n {
        let spec = BlowupSpec::point(n, chart);
        let Ok(blown) = node.state.blowup(&spec, TransformKind::Weak) else {
            continue;
        };
        let movable: Vec<usize> = match points {
            PointPolicy::Origin => Vec::new(),
            PointPolicy::Exceptional { .. } => blown
                .exceptional_vars()
                .into_iter()
                .filter(|&v| v != chart)
                .collect(),
        };
        let max_moved = match points {
            PointPolicy::Origin => 0,
            PointPolicy::Exceptional { max_moved } => max_moved,
        };
        for moves in point_moves(&movable, max_moved, p) {
            let mut s = blown.clone();
            for &(v, k) in &moves {
                s = s.translate(v, k as i64);
            }
            if s.order().ok() == Some(c) {
                out.push((
                    spec.clone(),
                    Step {
                        chart,
                        moves: moves.clone(),
                    },
                    s,
                ));
            }
        }
    }
    out
}

/// The empty move, then every set of at most `max_moved` variables (in
/// increasing size, lexicographic) with every assignment of nonzero constants.
fn point_moves(vars: &[usize], max_moved: usize, p: u64) -> Vec<Vec<(usize, u64)>> {
    let mut out = vec![Vec::new()];
    for k in 1..=max_moved.min(vars.len()) {
        for subset in subsets(vars, k) {
            let mut acc: Vec<Vec<(usize, u64)>> = vec![Vec::new()];
            for &v in &subset {
                acc = acc
                    .into_iter()
                    .flat_map(|prefix| {
                        (1..p).map(move |c| {
                            let mut next = prefix.clone();
                            next.push((v, c));
                            next
                        })
                    })
                    .collect();
            }
            out.extend(acc);
        }
    }
    out
}

fn subsets(vars: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &v) in vars.iter().enumerate() {
        for mut rest in subsets(&vars[i + 1..], k - 1) {
            rest.insert(0, v);
            out.push(rest);
        }
    }
    out
}

fn child_flag(
    node: &Node,
    spec: &BlowupSpec,
    step: &Step,
    state: &ChartState,
    policy: FlagPolicy,
    cfg: &SearchConfig,
) -> Option<Flag> {
    let searched = || build_flag(state, &FlagPlan::search(), cfg).ok();
    let inherited = || {
        let mut seeds: Vec<Option<Hypersurface>> = node
            .flag
            .levels
            .iter()
            .map(|l| l.hypersurface.transform_blowup(spec))
            .collect();
        for &(v, c) in &step.moves {
            seeds = seeds
                .iter()
                .map(|h| h.as_ref().and_then(|h| h.transform_translate(v, c)))
                .collect();
        }
        let plan = FlagPlan {
            inherited: seeds,
            inherit: true,
            ..FlagPlan::default()
        };
        build_flag(state, &plan, cfg).ok()
    };
    match policy {
        FlagPolicy::Search => searched(),
        FlagPolicy::Inherit => inherited(),
        FlagPolicy::Best => match (inherited(), searched()) {
            (Some(a), Some(b)) => Some(if b.invariant() > a.invariant() { b } else { a }),
            (a, b) => a.or(b),
        },
    }
}
