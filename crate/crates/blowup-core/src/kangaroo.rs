//! Kangaroo phenomena: precondition checks, detection of an order increase
//! at some level of the descent across one blow-up, and the
//! neutral/active/dormant roles of the hypersurfaces in a flag.

use std::cmp::Ordering;
use std::fmt;

use crate::charts::{BlowupSpec, ChartState, HistoryEntry, TransformKind};
use crate::descent::{level_full_ridge, Flag, Invariant};
use crate::family::{literal_orders, Order, Q};
use crate::ridge::{self, in_degree_one_span, RidgeMethod};

/// One blow-up together with the coordinate changes and overrides that follow it.
#[derive(Clone, Debug)]
pub struct TransitionRecord {
    pub pre_state: ChartState,
    pub pre_flag: Flag,
    pub blowup: BlowupSpec,
    pub kind: TransformKind,
    /// Translations and hypersurface overrides applied after the blow-up.
    pub steps: Vec<HistoryEntry>,
    pub post_state: ChartState,
    pub post_flag: Flag,
}

impl TransitionRecord {
    pub fn pre_invariant(&self) -> Invariant {
        self.pre_flag.invariant()
    }

    pub fn post_invariant(&self) -> Invariant {
        self.post_flag.invariant()
    }

    pub fn pre_order(&self) -> Order {
        self.pre_flag.ideal_order
    }

    pub fn post_order(&self) -> Order {
        self.post_flag.ideal_order
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail,
    NotEvaluated,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotEvaluated => "not evaluated",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    pub verdict: Verdict,
    pub detail: String,
}

impl Condition {
    fn new(pass: bool, detail: String) -> Self {
        Condition {
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            detail,
        }
    }
}

/// The necessary conditions for a kangaroo point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preconditions {
    /// Order preserved and divisible by the characteristic.
    pub a: Condition,
    /// Some ridge generator of the tangent cone has degree `p^e > 1`.
    pub a_refined: Condition,
    /// The relevant non-monomial order is a multiple of the ideal order.
    pub b: Condition,
    /// Exceptional multiplicity condition; reported raw, never evaluated.
    pub c: Condition,
}

/// Comparison of one level's orders across the transition (1-based; 0 is the ideal).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelComparison {
    pub level: usize,
    pub pre: Option<Order>,
    pub post: Option<Order>,
}

impl LevelComparison {
    pub fn relation(&self) -> Option<Ordering> {
        Some(self.post?.cmp(&self.pre?))
    }
}

/// Result of [`detect_phenomenon`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Phenomenon {
    /// 1-based level of the coefficient ideal whose order increased.
    pub level: Option<usize>,
    pub pre: Invariant,
    pub post: Invariant,
    pub comparison: Vec<LevelComparison>,
    /// The flags differ in length and agree on the common prefix.
    pub truncated: bool,
    pub note: String,
}

/// Compares the invariant vectors: the ideal order must be preserved; the
/// first level where the orders differ is reported when the post order is larger.
pub fn detect_phenomenon(t: &TransitionRecord) -> Phenomenon {
    let pre = t.pre_invariant();
    let post = t.post_invariant();
    let len = pre.len().max(post.len());
    let comparison: Vec<LevelComparison> = (0..len)
        .map(|i| LevelComparison {
            level: i,
            pre: pre.get(i).copied(),
            post: post.get(i).copied(),
        })
        .collect();
    let common = pre.len().min(post.len());
    let first_diff = (0..common).find(|&i| pre[i] != post[i]);
    let truncated = first_diff.is_none() && pre.len() != post.len();
    let (level, note) = match first_diff {
        None if truncated => (
            None,
            format!("orders agree on the common {common} levels; flag lengths differ"),
        ),
        None => (None, "orders unchanged".to_string()),
        Some(0) => (
            None,
            format!("ideal order changed {} -> {}", pre[0], post[0]),
        ),
        Some(i) if post[i] > pre[i] => (
            Some(i),
            format!(
                "order of coefficient ideal {} increased {} -> {}",
                i, pre[i], post[i]
            ),
        ),
        Some(i) => (
            None,
            format!(
                "order of coefficient ideal {} dropped {} -> {}",
                i, pre[i], post[i]
            ),
        ),
    };
    Phenomenon {
        level,
        pre,
        post,
        comparison,
        truncated,
        note,
    }
}

/// Exceptional divisors through the old point (by birth) that miss the new point.
pub fn divisors_left(t: &TransitionRecord) -> usize {
    let post: Vec<usize> = t
        .post_state
        .exceptionals()
        .iter()
        .map(|e| e.birth)
        .collect();
    t.pre_state
        .exceptionals()
        .iter()
        .filter(|e| !post.contains(&e.birth))
        .count()
}

/// Whether the literal order at `level` of the invariant is divisible by `c`
/// (exact while literal orders fit, otherwise via p-adic valuations of the factorial scale).
fn literal_divisible(inv: &Invariant, level: usize, c: u64) -> Option<(bool, String)> {
    let lit = literal_orders(inv);
    let q = inv.get(level)?.finite()?;
    if let Some(v) = lit.get(level).copied().flatten() {
        return Some((
            v % c as u128 == 0,
            format!("{v} = {} * {c} + {}", v / c as u128, v % c as u128),
        ));
    }
    let (num, den) = (*q.numer() as u128, *q.denom() as u128);
    match level.checked_sub(1).and_then(|l| lit.get(l).copied().flatten()) {
        Some(m) => {
            let ok = prime_powers(c).into_iter().all(|(pr, e)| {
                legendre(m, pr) + valuation(num, pr) >= e as u128 + valuation(den, pr)
            });
            Some((ok, format!("{m}! * {q} checked by valuations")))
        }
        None => Some((true, format!("scale is the factorial of a literal order beyond 2^128; {q} has bounded denominator"))),
    }
}

fn legendre(m: u128, p: u64) -> u128 {
    let mut v = 0;
    let mut k = m;
    while k > 0 {
        k /= p as u128;
        v += k;
    }
    v
}

fn valuation(mut n: u128, p: u64) -> u128 {
    let mut v = 0;
    while n > 0 && n.is_multiple_of(p as u128) {
        n /= p as u128;
        v += 1;
    }
    v
}

fn prime_powers(mut c: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= c {
        let mut e = 0;
        while c.is_multiple_of(d) {
            c /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if c > 1 {
        out.push((c, 1));
    }
    out
}

/// Evaluates conditions (a), (a-refined), (b); (c) is surfaced raw. `level` is
/// the level whose order (b) refers to (the phenomenon level, else 1).
pub fn check_preconditions(t: &TransitionRecord, level: Option<usize>) -> Preconditions {
    let p = t.pre_state.ring().p();
    let (pre_c, post_c) = (t.pre_order(), t.post_order());
    let a = match (pre_c, post_c) {
        (Order::Finite(c), Order::Finite(d)) if c.is_integer() && d.is_integer() => {
            let c = c.to_integer() as u64;
            let preserved = pre_c == post_c;
            Condition::new(
                preserved && c > 0 && c.is_multiple_of(p),
                format!(
                    "c={c}, p={p}, order {}",
                    if preserved {
                        "preserved".to_string()
                    } else {
                        format!("changed to {post_c}")
                    }
                ),
            )
        }
        _ => Condition::new(false, format!("orders {pre_c} -> {post_c}")),
    };
    let a_refined = match ridge::n_ridge(t.pre_state.ideal()) {
        Ok(nr) => {
            let r = t.pre_state.ring();
            let higher = nr.plain.has_higher_degree_generator();
            let detail = if higher {
                format!("ridge {} has generators of degree > 1", nr.plain.to_set(r))
            } else {
                format!("ridge {} is generated in degree 1", nr.plain.to_set(r))
            };
            Condition::new(higher, detail)
        }
        Err(e) => Condition::new(false, format!("ridge unavailable: {e}")),
    };
    let lvl = level.unwrap_or(1);
    let pre_inv = t.pre_invariant();
    let divisible = pre_c
        .finite()
        .filter(|c| c.is_integer() && c.to_integer() > 0)
        .and_then(|c| literal_divisible(&pre_inv, lvl, c.to_integer() as u64));
    let b = match divisible {
        Some((ok, why)) => Condition::new(ok, format!("level {lvl}: {why}")),
        None => Condition {
            verdict: Verdict::NotEvaluated,
            detail: format!("level {lvl} absent from the pre-blow-up flag"),
        },
    };
    let ring = t.post_state.ring();
    let exponents: Vec<String> = t
        .post_state
        .exceptionals()
        .iter()
        .map(|e| {
            let q = t
                .post_flag
                .levels
                .first()
                .and_then(|l| {
                    l.monomial
                        .iter()
                        .find(|(v, _)| *v == e.var)
                        .map(|(_, q)| *q)
                })
                .unwrap_or_else(|| Q::from_integer(0));
            format!("{}({})^{q}", e.label(), ring.var_name(e.var))
        })
        .collect();
    let c = Condition {
        verdict: Verdict::NotEvaluated,
        detail: format!(
            "out of scope; exceptional exponents in J_1: {}",
            if exponents.is_empty() {
                "none".into()
            } else {
                exponents.join(" ")
            }
        ),
    };
    Preconditions { a, a_refined, b, c }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Neutral,
    Active,
    Dormant,
    Unclassified,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Neutral => "neutral",
            Role::Active => "active",
            Role::Dormant => "dormant",
            Role::Unclassified => "unclassified",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypersurfaceRole {
    /// 1-based flag level.
    pub level: usize,
    pub role: Role,
    pub reason: String,
}

/// Roles of the flag's hypersurfaces. `H_i` is neutral iff the degree-1 part of
/// its defining polynomial lies in the span of the degree-1 ridge elements of
/// `J_{i-1}`; the ridge is taken of the generators' roots `in(b)` (every element
/// of the normalized family stands for a power `b^{N/s}`, so this is the
/// principal-case unwrap applied generator-wise). The lowest non-neutral level
/// is active, the other non-neutral levels dormant.
pub fn classify_roles(flag: &Flag) -> Vec<HypersurfaceRole> {
    let mut out = Vec::new();
    let mut seen_active = false;
    for l in &flag.levels {
        let i = l.index;
        let j = flag.j(i - 1);
        let branch = if j.lowest().len() == 1 {
            "principal"
        } else {
            "non-principal"
        };
        match level_full_ridge(flag, i - 1) {
            Ok(basis) => {
                let lin = l.hypersurface.linear_part();
                let neutral = in_degree_one_span(&lin, &basis);
                let method = if basis.method == RidgeMethod::Coordinates {
                    ", coordinate ridge"
                } else {
                    ""
                };
                let role = if neutral {
                    Role::Neutral
                } else if !seen_active {
                    seen_active = true;
                    Role::Active
                } else {
                    Role::Dormant
                };
                let reason = format!(
                    "degree-1 part {} the degree-1 ridge span of J_{} ({} branch, ridge profile {}{method})",
                    if neutral { "in" } else { "not in" },
                    i - 1,
                    branch,
                    basis.profile_text()
                );
                out.push(HypersurfaceRole {
                    level: i,
                    role,
                    reason,
                });
            }
            Err(e) => out.push(HypersurfaceRole {
                level: i,
                role: Role::Unclassified,
                reason: format!("hypothesis not met: {e}"),
            }),
        }
    }
    out
}

/// Everything reported for one transition.
#[derive(Clone, Debug)]
pub struct KangarooReport {
    pub preconditions: Preconditions,
    pub phenomenon: Phenomenon,
    pub divisors_left: usize,
    pub pre_roles: Vec<HypersurfaceRole>,
    pub post_roles: Vec<HypersurfaceRole>,
}

pub fn analyze_transition(t: &TransitionRecord) -> KangarooReport {
    let phenomenon = detect_phenomenon(t);
    let preconditions = check_preconditions(t, phenomenon.level);
    KangarooReport {
        preconditions,
        divisors_left: divisors_left(t),
        pre_roles: classify_roles(&t.pre_flag),
        post_roles: classify_roles(&t.post_flag),
        phenomenon,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_power_factorization() {
        assert_eq!(prime_powers(12), vec![(2, 2), (3, 1)]);
        assert_eq!(prime_powers(3), vec![(3, 1)]);
        assert_eq!(legendre(10, 3), 4);
    }

    #[test]
    fn divisibility_through_factorial_scale() {
        use crate::family::Q;
        let inv = vec![
            Order::Finite(Q::from_integer(3)),
            Order::Finite(Q::new(4, 1)),
        ];
        assert_eq!(literal_divisible(&inv, 1, 3).map(|x| x.0), Some(true));
        let inv = vec![
            Order::Finite(Q::from_integer(3)),
            Order::Finite(Q::new(5, 3)),
        ];
        assert_eq!(literal_divisible(&inv, 1, 3).map(|x| x.0), Some(false));
    }
}
