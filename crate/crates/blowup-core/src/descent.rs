//! Coefficient ideals, hypersurfaces and flags of weak maximal contact, and
//! the resolution-invariant vector.
//!
//! Flags are built on normalized families (see [`crate::family`]): level 0 is
//! the ideal itself, level `i` the non-monomial part of the coefficient
//! family obtained by descending through `H_1, …, H_i`. The invariant vector
//! `(ρ_0, ρ_1, …)` compares lexicographically; literal integer orders
//! `o_i = o_{i-1}! · ρ_i` are reported while they fit into 128 bits.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_traits::{ToPrimitive, Zero};

use crate::charts::{BlowupSpec, ChartState};
use crate::error::CoreError;
use crate::family::{literal_orders, Family, FamilyElement, Order, Q};
use crate::gfpoly::{monomial_content, order_at_origin, Monomial, Polynomial};
use crate::ridge::{self, canonical_cmp, NRidge, RidgeBasis};
use crate::text::Ring;

/// `V(x_pivot + tail)` with `tail` free of the pivot and without constant term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Hypersurface {
    pub pivot: usize,
    pub tail: Polynomial,
}

impl Hypersurface {
    pub fn coordinate(ring: &Ring, pivot: usize) -> Self {
        Hypersurface {
            pivot,
            tail: ring.zero(),
        }
    }

    pub fn new(pivot: usize, tail: Polynomial) -> Result<Self, CoreError> {
        if tail.involves(pivot) {
            return Err(CoreError::Inadmissible(
                "the tail involves the pivot variable".into(),
            ));
        }
        if tail.constant_term() != 0 {
            return Err(CoreError::Inadmissible(
                "the hypersurface does not pass through the origin".into(),
            ));
        }
        Ok(Hypersurface { pivot, tail })
    }

    /// Reads `c·x_i + tail` as a hypersurface: the pivot is the first variable
    /// occurring only in a linear term; the polynomial is normalized to `c = 1`.
    pub fn from_poly(f: &Polynomial) -> Result<Self, CoreError> {
        if f.constant_term() != 0 {
            return Err(CoreError::Inadmissible(
                "the hypersurface does not pass through the origin".into(),
            ));
        }
        let field = f.field();
        for i in 0..f.nvars() {
            let lin = f.coefficient(&Monomial::var(i));
            if lin == 0 {
                continue;
            }
            let rest = f - &Polynomial::monomial(field, f.nvars(), Monomial::var(i), lin);
            if rest.involves(i) {
                continue;
            }
            let tail = rest.scale(field.inv(lin));
            return Hypersurface::new(i, tail);
        }
        Err(CoreError::Inadmissible(
            "no variable occurs only linearly; the hypersurface is not in pivot form".into(),
        ))
    }

    pub fn defining(&self) -> Polynomial {
        &self.tail.field_var(self.pivot) + &self.tail
    }

    /// Pivot plus the linear terms of the tail.
    pub fn linear_part(&self) -> Polynomial {
        &self.tail.field_var(self.pivot) + &self.tail.homogeneous_part(1)
    }

    pub fn text(&self, ring: &Ring) -> String {
        ring.show(&self.defining())
    }

    /// Strict transform under a blow-up, expressed in the chart; `None` when it misses the chart origin.
    pub fn transform_blowup(&self, spec: &BlowupSpec) -> Option<Hypersurface> {
        let t = spec.chart;
        if t == self.pivot || !spec.center.contains(&self.pivot) {
            return None;
        }
        let sub = self.tail.monomial_substitute(&spec.center, t);
        if !sub.is_zero() && sub.valuation_in(t) < 1 {
            return None;
        }
        let mut div = Monomial::one();
        div.set_exp(t, 1);
        let tail = if sub.is_zero() {
            sub
        } else {
            sub.div_monomial(&div)
        };
        Hypersurface::new(self.pivot, tail).ok()
    }

    /// Image under `x_var ↦ x_var + c`; `None` when it no longer passes through the origin.
    pub fn transform_translate(&self, var: usize, c: u64) -> Option<Hypersurface> {
        if var == self.pivot && !c.is_multiple_of(self.tail.field().p()) {
            return None;
        }
        Hypersurface::new(self.pivot, self.tail.translate(var, c)).ok()
    }
}

/// Literal coefficient ideal `Σ_{k<c} I_k^{c!/(c-k)}` (all mixed products of the `I_k` generators).
///
/// Only feasible for small orders; larger exponents are rejected.
pub fn coefficient_ideal(
    gens: &[Polynomial],
    h: &Hypersurface,
) -> Result<Vec<Polynomial>, CoreError> {
    const MAX_PRODUCTS: usize = 10_000;
    let c = order_at_origin(gens)?;
    if c == 0 {
        return Err(CoreError::CoefficientIdeal(
            "the ideal is the unit ideal (order 0)".into(),
        ));
    }
    if h.tail.involves(h.pivot) {
        return Err(CoreError::CoefficientIdeal(
            "the pivot occurs in the tail".into(),
        ));
    }
    let shift = -&h.tail;
    let expansions: Vec<_> = gens
        .iter()
        .map(|g| g.shift_by(h.pivot, &shift).coefficients_in(h.pivot))
        .collect();
    let cf = crate::family::factorial(c as u128)
        .ok_or_else(|| CoreError::CoefficientIdeal(format!("{c}! is too large")))?;
    let mut out: Vec<Polynomial> = Vec::new();
    for k in 0..c {
        let ik: Vec<&Polynomial> = expansions
            .iter()
            .filter_map(|e| e.get(&(k as u32)))
            .filter(|a| !a.is_zero())
            .collect();
        if ik.is_empty() {
            continue;
        }
        let exponent = cf / (c as u128 - k as u128);
        let exponent = usize::try_from(exponent)
            .ok()
            .filter(|&e| e <= 4096)
            .ok_or_else(|| {
                CoreError::CoefficientIdeal(format!(
                    "exponent {c}!/({c}-{k}) is too large for literal expansion"
                ))
            })?;
        // Multisets of size `exponent` from `ik`.
        let count = multiset_count(ik.len(), exponent);
        if count.is_none_or(|n| n > MAX_PRODUCTS) {
            return Err(CoreError::CoefficientIdeal(
                "too many mixed products".into(),
            ));
        }
        let mut counts = vec![0usize; ik.len()];
        multisets(ik.len(), exponent, 0, &mut counts, &mut |counts| {
            let mut prod = Polynomial::one(ik[0].field(), ik[0].nvars());
            for (j, &cnt) in counts.iter().enumerate() {
                if cnt > 0 {
                    prod = &prod * &ik[j].pow(cnt as u64);
                }
            }
            if !prod.is_zero() && !out.contains(&prod) {
                out.push(prod);
            }
        });
    }
    Ok(out)
}

fn multiset_count(n: usize, k: usize) -> Option<usize> {
    // binom(n + k - 1, k)
    let mut r: u128 = 1;
    for i in 0..(n.saturating_sub(1)) {
        r = r * (k + i + 1) as u128 / (i + 1) as u128;
        if r > u64::MAX as u128 {
            return None;
        }
    }
    usize::try_from(r).ok()
}

fn multisets(
    n: usize,
    left: usize,
    pos: usize,
    counts: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if pos + 1 == n {
        counts[pos] = left;
        visit(counts);
        counts[pos] = 0;
        return;
    }
    for c in (0..=left).rev() {
        counts[pos] = c;
        multisets(n, left - c, pos + 1, counts, visit);
    }
    counts[pos] = 0;
}

/// Monomial content in the exceptional variables, cofactors, and their order.
pub fn nonmonomial_part(
    gens: &[Polynomial],
    exceptional: &[usize],
) -> (Monomial, Vec<Polynomial>, Option<u64>) {
    let (m, cof) = monomial_content(gens, exceptional);
    let ord = order_at_origin(&cof).ok();
    (m, cof, ord)
}

/// Bodnár's normal-crossing check: the pivot must not define a live exceptional divisor.
pub fn bodnar_check(state: &ChartState, h: &Hypersurface) -> bool {
    !state.is_exceptional(h.pivot)
}

/// Parameters of the weak-maximal-contact search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    /// Maximal degree of a tail monomial in the non-exceptional variables.
    pub degree_bound: u64,
    /// Tail-improvement rounds per pivot.
    pub rounds: usize,
    /// Absorption candidates examined per round.
    pub candidates: usize,
    /// Whether tails are searched at all (pivot-only flags otherwise).
    pub tails: bool,
    /// Maximal number of flag levels (`None`: until the dimension is exhausted).
    pub max_levels: Option<usize>,
    /// Tail candidates whose substitution would expand beyond this many terms are skipped.
    pub expansion_budget: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            degree_bound: 24,
            rounds: 6,
            candidates: 8,
            tails: true,
            max_levels: None,
            expansion_budget: 1_000_000,
        }
    }
}

impl SearchConfig {
    pub fn describe(&self) -> String {
        let levels = self.max_levels.map_or("all".to_string(), |l| l.to_string());
        if self.tails {
            format!(
                "pivots + absorbed tails (free degree <= {}, {} rounds x {} candidates, expansion <= {} terms), levels {levels}",
                self.degree_bound, self.rounds, self.candidates, self.expansion_budget
            )
        } else {
            format!("coordinate pivots only, levels {levels}")
        }
    }
}

/// Invariant vector `(ρ_0, ρ_1, …)`; lexicographic comparison.
pub type Invariant = Vec<Order>;

/// One level `H_i`, `J_i` of a flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentLevel {
    /// 1-based level index.
    pub index: usize,
    pub hypersurface: Hypersurface,
    /// Coefficient family before the exceptional splitting.
    pub coefficient: Family,
    /// Exceptional monomial part `x^μ` (normalized exponents).
    pub monomial: Vec<(usize, Q)>,
    /// Non-monomial part of the coefficient family.
    pub nonmonomial: Family,
    pub order: Order,
    /// Where the hypersurface came from.
    pub source: LevelSource,
    /// Another hypersurface attained the same invariant vector during the search.
    pub tie: bool,
    /// The pivot defines no live exceptional divisor.
    pub normal_crossings: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelSource {
    Searched,
    /// The transform of the previous flag's hypersurface at this level.
    Inherited,
    /// A user-supplied hypersurface; `best` is the order the search attains at this level.
    Override {
        best: Order,
    },
}

/// A flag `H_1 ⊃ … ⊃ H_s` with its descent data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flag {
    pub ideal: Family,
    pub ideal_order: Order,
    pub levels: Vec<DescentLevel>,
    /// Why the descent stopped.
    pub stop: String,
    pub family: String,
}

impl Flag {
    pub fn invariant(&self) -> Invariant {
        resolution_invariant(self)
    }

    pub fn literal_orders(&self) -> Vec<Option<u128>> {
        literal_orders(&self.invariant())
    }

    /// The coefficient family `J_i` (`J_0` is the ideal).
    pub fn j(&self, i: usize) -> &Family {
        if i == 0 {
            &self.ideal
        } else {
            &self.levels[i - 1].nonmonomial
        }
    }

    /// Literal scale `N_i` such that the literal generators of `J_i` are the elements raised to `N_i / s`.
    pub fn literal_scale(&self, i: usize) -> Option<u128> {
        if i == 0 {
            return Some(1);
        }
        let lit = self.literal_orders();
        lit.get(i - 1)
            .copied()
            .flatten()
            .and_then(crate::family::factorial)
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.hypersurface.pivot).collect()
    }

    /// Text like `V(w), V(w,v), V(w,v,z)` (defining polynomials of the nested intersections).
    pub fn nested_names(&self, ring: &Ring) -> Vec<String> {
        let mut acc: Vec<String> = Vec::new();
        let mut out = Vec::new();
        for l in &self.levels {
            acc.push(l.hypersurface.text(ring));
            out.push(format!("V({})", acc.join(",")));
        }
        out
    }
}

/// `(ρ_0, ρ_1, …, ρ_s)`.
pub fn resolution_invariant(flag: &Flag) -> Invariant {
    if flag.ideal.is_empty() {
        return Vec::new();
    }
    let mut v = vec![flag.ideal_order];
    v.extend(flag.levels.iter().map(|l| l.order));
    v
}

/// Renders an invariant with literal orders where available, e.g. `(2, 3, 34)`.
pub fn invariant_text(inv: &Invariant) -> String {
    let lit = literal_orders(inv);
    let parts: Vec<String> = inv
        .iter()
        .zip(lit.iter())
        .map(|(o, l)| match (o, l) {
            (_, Some(n)) => n.to_string(),
            (Order::Infinite, _) => "inf".to_string(),
            (Order::Finite(q), None) => format!("~{q}"),
        })
        .collect();
    format!("({})", parts.join(", "))
}

/// Normalized ratios, e.g. `(3, 11/3, 1)`.
pub fn ratio_text(inv: &Invariant) -> String {
    let parts: Vec<String> = inv.iter().map(|o| o.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn rho_of(f: &Family) -> Order {
    f.order()
}

fn is_terminal(f: &Family) -> bool {
    match f.order() {
        Order::Infinite => true,
        Order::Finite(q) => q.is_zero(),
    }
}

/// Frobenius level of a variable in the initial forms of the lowest elements.
fn variable_levels(f: &Family, nvars: usize) -> Vec<Option<u32>> {
    let mut lv: Vec<Option<u32>> = vec![None; nvars];
    for e in f.lowest() {
        let init = e.base.initial_form().expect("nonzero");
        for (m, _) in init.terms() {
            for i in m.support() {
                let v = init.field().valuation(m.exp(i) as u64);
                lv[i] = Some(lv[i].map_or(v, |w: u32| w.min(v)));
            }
        }
    }
    lv
}

/// Pivots that may start a hypersurface of weak maximal contact: unused and
/// occurring in the initial forms of the lowest-order elements. Exceptional
/// variables are only offered when no other variable qualifies (such levels
/// fail the Bodnár check). Sorted in canonical order: later variables first.
fn admissible_pivots(
    f: &Family,
    avail: &[usize],
    exc: &[usize],
    nvars: usize,
) -> Vec<(usize, u32)> {
    let lv = variable_levels(f, nvars);
    let occurring: Vec<(usize, u32)> = avail
        .iter()
        .filter_map(|&v| lv[v].map(|l| (v, l)))
        .collect();
    let mut out: Vec<(usize, u32)> = occurring
        .iter()
        .copied()
        .filter(|(v, _)| !exc.contains(v))
        .collect();
    if out.is_empty() {
        out = occurring;
    }
    out.sort_by_key(|&(v, _)| std::cmp::Reverse(v));
    out
}

fn level_after(f: &Family, h: &Hypersurface, exc: &[usize]) -> Family {
    f.descend(h.pivot, &h.tail).nonmonomial_part(exc).1
}

struct Searcher<'a> {
    cfg: &'a SearchConfig,
    exc: &'a [usize],
    nvars: usize,
    /// Inherited hypersurfaces tried as starting tails, by 0-based level.
    seeds: &'a [Option<Hypersurface>],
}

#[derive(Clone, Debug)]
struct Choice {
    vector: Invariant,
    chain: Vec<Hypersurface>,
    tie: bool,
}

impl Searcher<'_> {
    fn can_descend(&self, f: &Family, avail: &[usize], depth: usize) -> bool {
        !is_terminal(f) && avail.len() >= 2 && self.cfg.max_levels.is_none_or(|m| depth < m)
    }

    /// Greedy pivot-only continuation used to score tail candidates.
    fn quick(&self, f: &Family, avail: &[usize], depth: usize) -> Invariant {
        if !self.can_descend(f, avail, depth) {
            return Vec::new();
        }
        let mut best: Option<Invariant> = None;
        let adm = admissible_pivots(f, avail, self.exc, self.nvars);
        let mut firsts: Vec<(usize, Family)> = Vec::new();
        for &(piv, _) in &adm {
            let h = Hypersurface {
                pivot: piv,
                tail: Polynomial::zero(f_field(f), self.nvars),
            };
            firsts.push((piv, level_after(f, &h, self.exc)));
        }
        let top = firsts.iter().map(|(_, n)| rho_of(n)).max();
        for (piv, n) in firsts {
            if Some(rho_of(&n)) != top {
                continue;
            }
            let rest: Vec<usize> = avail.iter().copied().filter(|&a| a != piv).collect();
            let mut v = vec![rho_of(&n)];
            v.extend(self.quick(&n, &rest, depth + 1));
            if best.as_ref().is_none_or(|b| v > *b) {
                best = Some(v);
            }
        }
        best.unwrap_or_default()
    }

    fn score(
        &self,
        f: &Family,
        h: &Hypersurface,
        rest: &[usize],
        depth: usize,
    ) -> (Invariant, Family) {
        let n = level_after(f, h, self.exc);
        let mut v = vec![rho_of(&n)];
        v.extend(self.quick(&n, rest, depth + 1));
        (v, n)
    }

    /// Tail monomials `u·m` whose substitution cancels a term `λ M pivot^k` against
    /// the pure power `γ pivot^d` of an element (`d = τ`, `M = m^{d-k}`).
    fn tail_candidates(
        &self,
        f: &Family,
        piv: usize,
        tail: &Polynomial,
    ) -> Vec<(Q, Monomial, u64)> {
        let Order::Finite(rho) = f.order() else {
            return Vec::new();
        };
        let field = f_field(f);
        let p = field.p();
        let shift = -tail;
        let mut cands: BTreeSet<(Q, Monomial, u64)> = BTreeSet::new();
        for e in &f.elements {
            let tau = e.weight * rho;
            if !tau.is_integer() {
                continue;
            }
            let Some(d) = tau.to_integer().to_u32() else {
                continue;
            };
            let b = if tail.is_zero() {
                e.base.clone()
            } else {
                e.base.shift_by(piv, &shift)
            };
            let cs = b.coefficients_in(piv);
            let Some(ad) = cs.get(&d) else { continue };
            let gamma = ad.constant_term();
            if gamma == 0 {
                continue;
            }
            for (&k, ak) in cs.range(..d) {
                let bk = field.binom(d as u64, k as u64);
                if bk == 0 {
                    continue;
                }
                let ex = d - k;
                for (mm, lam) in ak.terms() {
                    if (0..self.nvars).any(|i| mm.exp(i) % ex != 0) {
                        continue;
                    }
                    let mut m = Monomial::one();
                    for i in 0..self.nvars {
                        m.set_exp(i, mm.exp(i) / ex);
                    }
                    let free_degree: u64 = (0..self.nvars)
                        .filter(|v| !self.exc.contains(v))
                        .map(|v| m.exp(v) as u64)
                        .sum();
                    if m.is_one() || free_degree > self.cfg.degree_bound {
                        continue;
                    }
                    for u in 1..p {
                        let t = field.mul(field.mul(gamma, bk), field.pow(field.neg(u), ex as u64));
                        if field.add(t, *lam) == 0 {
                            cands.insert((Q::new(mm.degree() as i64, ex as i64), m, u));
                        }
                    }
                }
            }
        }
        cands.into_iter().take(self.cfg.candidates).collect()
    }

    /// Best tail for a pivot by greedy absorption rounds.
    fn improve_tail(&self, f: &Family, piv: usize, rest: &[usize], depth: usize) -> Hypersurface {
        let field = f_field(f);
        let mut h = Hypersurface {
            pivot: piv,
            tail: Polynomial::zero(field, self.nvars),
        };
        if self.exc.contains(&piv) {
            return h;
        }
        let seed = self.seeds.get(depth).cloned().flatten().filter(|s| {
            s.pivot == piv
                && (0..self.nvars)
                    .all(|v| !s.tail.involves(v) || rest.contains(&v) || self.exc.contains(&v))
        });
        if !self.cfg.tails && seed.is_none() {
            return h;
        }
        let (mut best, _) = self.score(f, &h, rest, depth);
        if let Some(seed) = seed {
            let (s, _) = self.score(f, &seed, rest, depth);
            if s >= best {
                best = s;
                h = seed;
            }
        }
        if !self.cfg.tails {
            return h;
        }
        for _ in 0..self.cfg.rounds {
            let mut improved: Option<(Invariant, Hypersurface)> = None;
            for (_, m, u) in self.tail_candidates(f, piv, &h.tail) {
                let tail = &h.tail + &Polynomial::monomial(field, self.nvars, m, u);
                if expansion_estimate(f, piv, &tail) > self.cfg.expansion_budget {
                    continue;
                }
                let cand = Hypersurface { pivot: piv, tail };
                // A lower first-level order loses regardless of the continuation.
                let n = level_after(f, &cand, self.exc);
                let floor = improved.as_ref().map_or(&best, |(b, _)| b);
                if rho_of(&n) < floor[0] {
                    continue;
                }
                let mut s = vec![rho_of(&n)];
                s.extend(self.quick(&n, rest, depth + 1));
                let beats_round = improved.as_ref().is_none_or(|(b, _)| s > *b);
                if s > best && beats_round {
                    improved = Some((s, cand));
                }
            }
            match improved {
                Some((s, cand)) => {
                    best = s;
                    h = cand;
                }
                None => break,
            }
        }
        h
    }

    fn search(
        &self,
        f: &Family,
        avail: &[usize],
        depth: usize,
        only_first: bool,
    ) -> Option<Choice> {
        if !self.can_descend(f, avail, depth) {
            return None;
        }
        let adm = admissible_pivots(f, avail, self.exc, self.nvars);
        let mut firsts = Vec::new();
        for &(piv, lvl) in &adm {
            let rest: Vec<usize> = avail.iter().copied().filter(|&a| a != piv).collect();
            let h = self.improve_tail(f, piv, &rest, depth);
            let n = level_after(f, &h, self.exc);
            firsts.push((lvl, h, n, rest));
        }
        let top = firsts.iter().map(|(_, _, n, _)| rho_of(n)).max()?;
        let mut best: Option<(Invariant, Choice)> = None;
        let mut tie = false;
        for (_, h, n, rest) in firsts {
            if rho_of(&n) != top {
                continue;
            }
            let mut vector = vec![rho_of(&n)];
            let mut chain = vec![h];
            if !only_first {
                if let Some(sub) = self.search(&n, &rest, depth + 1, false) {
                    vector.extend(sub.vector);
                    chain.extend(sub.chain);
                }
            } else {
                vector.extend(self.quick(&n, &rest, depth + 1));
            }
            // Candidates arrive in canonical order; the first of equal vectors wins.
            match &best {
                None => {
                    best = Some((
                        vector.clone(),
                        Choice {
                            vector,
                            chain,
                            tie: false,
                        },
                    ))
                }
                Some((bv, _)) => match vector.cmp(bv) {
                    Ordering::Greater => {
                        tie = false;
                        best = Some((
                            vector.clone(),
                            Choice {
                                vector,
                                chain,
                                tie: false,
                            },
                        ));
                    }
                    Ordering::Equal => tie = true,
                    Ordering::Less => {}
                },
            }
        }
        best.map(|(_, mut c)| {
            c.tie = tie;
            c
        })
    }
}

/// Upper bound for the number of terms produced by shifting the pivot by `tail` in every base.
fn expansion_estimate(f: &Family, piv: usize, tail: &Polynomial) -> u64 {
    let t = tail.len() as u64;
    f.elements
        .iter()
        .map(|e| {
            e.base
                .terms()
                .iter()
                .map(|(m, _)| (m.exp(piv) as u64 + 1).saturating_mul(t.pow(m.exp(piv).min(4))))
                .sum::<u64>()
        })
        .sum()
}

fn f_field(f: &Family) -> crate::field::FieldSpec {
    f.elements[0].base.field()
}

/// Searches `pivot + tail` maximizing the next non-monomial order (then the
/// downstream vector); returns the hypersurface and the order it attains.
pub fn search_weak_maximal_contact(
    state: &ChartState,
    family: &Family,
    used: &[usize],
    cfg: &SearchConfig,
) -> Result<(Hypersurface, Order), CoreError> {
    let exc = state.exceptional_vars();
    let avail: Vec<usize> = (0..state.nvars()).filter(|v| !used.contains(v)).collect();
    let s = Searcher {
        cfg,
        exc: &exc,
        nvars: state.nvars(),
        seeds: &[],
    };
    let c = s.search(family, &avail, used.len(), true).ok_or_else(|| {
        CoreError::NoPivot("no non-exceptional variable occurs in the lowest initial forms".into())
    })?;
    Ok((c.chain[0].clone(), c.vector[0]))
}

/// Per-level instructions for [`build_flag`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlagPlan {
    /// User overrides by 0-based level; must be admissible.
    pub fixed: Vec<Option<Hypersurface>>,
    /// Transformed hypersurfaces of the previous flag by 0-based level.
    pub inherited: Vec<Option<Hypersurface>>,
    /// Keep inherited hypersurfaces while they stay admissible (otherwise they only seed the search).
    pub inherit: bool,
}

impl FlagPlan {
    pub fn search() -> Self {
        FlagPlan::default()
    }

    pub fn with_overrides(fixed: Vec<Option<Hypersurface>>) -> Self {
        FlagPlan {
            fixed,
            ..FlagPlan::default()
        }
    }

    fn fixed_at(&self, i: usize) -> Option<&Hypersurface> {
        self.fixed.get(i).and_then(|h| h.as_ref())
    }

    fn inherited_at(&self, i: usize) -> Option<&Hypersurface> {
        self.inherited.get(i).and_then(|h| h.as_ref())
    }
}

/// Builds a flag level by level: fixed hypersurfaces first, then (in inherit
/// mode) the inherited ones while they remain admissible, otherwise the search.
pub fn build_flag(
    state: &ChartState,
    plan: &FlagPlan,
    cfg: &SearchConfig,
) -> Result<Flag, CoreError> {
    let exc = state.exceptional_vars();
    let n = state.nvars();
    let searcher = Searcher {
        cfg,
        exc: &exc,
        nvars: n,
        seeds: &plan.inherited,
    };
    let ideal = Family::from_ideal(state.ideal());
    let ideal_order = ideal.order();
    let mut levels: Vec<DescentLevel> = Vec::new();
    let mut current = ideal.clone();
    let mut avail: Vec<usize> = (0..n).collect();
    let mut inheriting = plan.inherit;
    let stop;
    let mut planned: Vec<(Hypersurface, bool)> = Vec::new();
    loop {
        let depth = levels.len();
        let pending_fixed = (depth..plan.fixed.len()).any(|i| plan.fixed_at(i).is_some());
        if !searcher.can_descend(&current, &avail, depth) {
            stop = if current.is_empty() {
                "coefficient ideal is zero (infinite order)".into()
            } else if is_terminal(&current) {
                "non-monomial part is trivial (order 0)".into()
            } else if avail.len() < 2 {
                "dimension exhausted".into()
            } else {
                "level limit reached".into()
            };
            if pending_fixed {
                return Err(CoreError::Inadmissible(format!(
                    "override beyond the last flag level {depth} ({stop})"
                )));
            }
            break;
        }
        let inherited = if inheriting {
            match plan.inherited_at(depth) {
                Some(h) if check_override(state, h, &avail, depth + 1, false).is_ok() => {
                    Some(h.clone())
                }
                _ => {
                    inheriting = false;
                    None
                }
            }
        } else {
            None
        };
        let constrained_below = (depth + 1..plan.fixed.len()).any(|i| plan.fixed_at(i).is_some())
            || (inheriting && plan.inherited_at(depth + 1).is_some());
        let (h, source, tie) = if let Some(h) = plan.fixed_at(depth) {
            check_override(state, h, &avail, depth + 1, true)?;
            let best = searcher
                .search(&current, &avail, depth, true)
                .map_or(Order::Finite(Q::zero()), |c| c.vector[0]);
            planned.clear();
            (h.clone(), LevelSource::Override { best }, false)
        } else if let Some(h) = inherited {
            planned.clear();
            (h, LevelSource::Inherited, false)
        } else {
            if planned.is_empty() {
                match searcher.search(&current, &avail, depth, constrained_below) {
                    Some(c) => {
                        let tie = c.tie;
                        planned = c.chain.into_iter().map(|h| (h, false)).collect();
                        planned[0].1 = tie;
                    }
                    None => {
                        stop = "no admissible pivot (no unused variable occurs in the lowest initial forms)".into();
                        if pending_fixed {
                            return Err(CoreError::NoPivot(stop));
                        }
                        break;
                    }
                }
            }
            let (h, tie) = planned.remove(0);
            if constrained_below {
                planned.clear();
            }
            (h, LevelSource::Searched, tie)
        };
        let h_pivot = h.pivot;
        let coefficient = current.descend(h.pivot, &h.tail);
        let (monomial, nonmonomial) = coefficient.nonmonomial_part(&exc);
        let order = nonmonomial.order();
        avail.retain(|&v| v != h.pivot);
        levels.push(DescentLevel {
            index: depth + 1,
            hypersurface: h,
            coefficient,
            monomial,
            nonmonomial: nonmonomial.clone(),
            order,
            source,
            tie,
            normal_crossings: !exc.contains(&h_pivot),
        });
        current = nonmonomial;
    }
    Ok(Flag {
        ideal,
        ideal_order,
        levels,
        stop,
        family: cfg.describe(),
    })
}

/// Admissibility of a prescribed hypersurface. An explicit override may use an
/// exceptional pivot (the level is then reported without normal crossings, like
/// the search's fallback); inherited hypersurfaces may not.
fn check_override(
    state: &ChartState,
    h: &Hypersurface,
    avail: &[usize],
    level: usize,
    allow_exceptional: bool,
) -> Result<(), CoreError> {
    if !avail.contains(&h.pivot) {
        return Err(CoreError::Inadmissible(format!(
            "level {level}: pivot {} is already used by a higher level",
            state.ring().var_name(h.pivot)
        )));
    }
    if !allow_exceptional && !bodnar_check(state, h) {
        return Err(CoreError::Inadmissible(format!(
            "level {level}: pivot {} defines an exceptional divisor (no normal crossings)",
            state.ring().var_name(h.pivot)
        )));
    }
    let used: Vec<usize> = (0..state.nvars()).filter(|v| !avail.contains(v)).collect();
    if let Some(&v) = used.iter().find(|&&v| h.tail.involves(v)) {
        return Err(CoreError::Inadmissible(format!(
            "level {level}: the tail involves {}, which is not a coordinate of the enclosing hypersurface",
            state.ring().var_name(v)
        )));
    }
    Ok(())
}

/// Initial forms of the literal generators `x^{r·m} b^m`, `m = N/s`, of the
/// given elements of `J_i`. When a literal power is unknown or too large the
/// base's initial form is returned with the p-adic valuation of `m` (if known),
/// by which its ridge has to be Frobenius-lifted.
fn literal_initial_forms(
    flag: &Flag,
    i: usize,
    elements: &[&FamilyElement],
) -> (Vec<Polynomial>, Vec<Option<u32>>, bool) {
    const MAX_LITERAL_POWER: u128 = 64;
    let scale = flag.literal_scale(i);
    let mut input = Vec::new();
    let mut lifts: Vec<Option<u32>> = Vec::new();
    let mut literal = true;
    for e in elements {
        let field = e.base.field();
        let init = e.base.initial_form().expect("nonzero");
        let m = scale.and_then(|s| {
            let q = num_rational::Ratio::new(s as i128, 1)
                / num_rational::Ratio::new(*e.weight.numer() as i128, *e.weight.denom() as i128);
            if q.is_integer() {
                q.to_integer().to_u128()
            } else {
                None
            }
        });
        match m {
            Some(m) if m <= MAX_LITERAL_POWER => {
                let mut mono = Monomial::one();
                let mut ok = true;
                for v in 0..e.base.nvars() {
                    let ex = e.r[v] * Q::from_integer(m as i64);
                    if !ex.is_integer() {
                        ok = false;
                    }
                    mono.set_exp(v, ex.to_integer().max(0) as u32);
                }
                if ok {
                    input.push(init.pow(m as u64).mul_term(&mono, 1));
                    lifts.push(Some(0));
                    continue;
                }
                literal = false;
                input.push(init);
                lifts.push(Some(field.valuation(m as u64)));
            }
            Some(m) => {
                literal = false;
                input.push(init);
                lifts.push(Some(valuation_u128(field.p(), m)));
            }
            None => {
                literal = false;
                input.push(init);
                lifts.push(None);
            }
        }
    }
    (input, lifts, literal)
}

/// n-ridge of a flag level (`0` is the ideal): ridge of the initial forms of the
/// lowest literal generators `x^{r·m} b^m`, `m = N/s`. When the literal
/// multiplicities are too large the bases' ridge is Frobenius-lifted by `v_p(m)`.
pub fn level_n_ridge(flag: &Flag, i: usize) -> Result<NRidge, CoreError> {
    let fam = flag.j(i);
    let lowest = fam.lowest();
    if lowest.is_empty() {
        return Err(CoreError::InfiniteOrder);
    }
    let (input, lifts, literal) = literal_initial_forms(flag, i, &lowest);
    if literal {
        return ridge::n_ridge(&input);
    }
    // Lift by the smallest known valuation (a lower bound for every element).
    let lift = lifts.iter().flatten().min().copied().unwrap_or(0);
    let base = ridge::n_ridge(&input)?;
    Ok(NRidge {
        input: base.input.clone(),
        plain: base.plain.lift(lift),
        unwrapped: base.unwrapped,
    })
}

/// Ridge of a flag level (`0` is the ideal): ridge of the initial forms of all
/// literal generators `x^{r·m} b^m`, exceptional monomial included.
pub fn level_ridge(flag: &Flag, i: usize) -> Result<RidgeBasis, CoreError> {
    let fam = flag.j(i);
    if fam.elements.is_empty() {
        return Err(CoreError::InfiniteOrder);
    }
    let all: Vec<&FamilyElement> = fam.elements.iter().collect();
    let (input, lifts, literal) = literal_initial_forms(flag, i, &all);
    let basis = ridge::ridge(&input)?;
    if literal {
        return Ok(basis);
    }
    let lift = lifts.iter().flatten().min().copied().unwrap_or(0);
    Ok(basis.lift(lift))
}

fn valuation_u128(p: u64, mut m: u128) -> u32 {
    let mut v = 0;
    while m.is_multiple_of(p as u128) {
        m /= p as u128;
        v += 1;
    }
    v
}

/// Ridge of the initial forms of every non-unit base of `J_i`; used for the role
/// classification. Unit bases are skipped: taken generator-wise they lie in every
/// subalgebra and impose no condition.
pub fn level_full_ridge(flag: &Flag, i: usize) -> Result<RidgeBasis, CoreError> {
    let fam = flag.j(i);
    let inits: Vec<Polynomial> = fam
        .elements
        .iter()
        .map(|e| e.base.initial_form().expect("nonzero"))
        .filter(|p| !p.is_constant())
        .collect();
    if inits.is_empty() {
        return match fam.elements.first() {
            Some(e) => Ok(RidgeBasis::empty(e.base.field(), e.base.nvars())),
            None => Err(CoreError::InfiniteOrder),
        };
    }
    ridge::ridge(&inits)
}

impl fmt::Display for LevelSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelSource::Searched => f.write_str("searched"),
            LevelSource::Inherited => f.write_str("inherited"),
            LevelSource::Override { best } => write!(f, "override (search attains {best})"),
        }
    }
}

/// Compares two hypersurfaces in canonical order of their defining polynomials.
pub fn hypersurface_cmp(a: &Hypersurface, b: &Hypersurface) -> Ordering {
    canonical_cmp(&a.defining(), &b.defining())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::TransformKind;

    #[test]
    fn literal_coefficient_ideals() {
        let r = Ring::new(2, &["x", "y", "z", "w"]).unwrap();
        let f = r.poly("x^2+w^3+y^25+y*z^16");
        let j1 = coefficient_ideal(&[f], &Hypersurface::coordinate(&r, 0)).unwrap();
        assert_eq!(j1, vec![r.poly("w^3+y^25+y*z^16")]);
        let j2 = coefficient_ideal(&j1, &Hypersurface::coordinate(&r, 3)).unwrap();
        assert_eq!(j2, vec![r.poly("y^50+y^2*z^32")]);
    }

    #[test]
    fn pivot_form_parsing() {
        let r = Ring::new(2, &["x", "y", "z", "w"]).unwrap();
        let h = Hypersurface::from_poly(&r.poly("x+y^4*z^21")).unwrap();
        assert_eq!(h.pivot, 0);
        assert_eq!(h.text(&r), "x+y^4*z^21");
        assert!(Hypersurface::from_poly(&r.poly("x^2+y^3")).is_err());
        assert!(Hypersurface::from_poly(&r.poly("x+1")).is_err());
    }

    #[test]
    fn char_two_initial_flag() {
        let r = Ring::new(2, &["x", "y", "z", "w"]).unwrap();
        let s = ChartState::new(r.clone(), vec![r.poly("x^2+w^3+y^25+y*z^16")]);
        let cfg = SearchConfig {
            max_levels: Some(2),
            ..SearchConfig::default()
        };
        let flag = build_flag(&s, &FlagPlan::search(), &cfg).unwrap();
        assert_eq!(invariant_text(&flag.invariant()), "(2, 3, 34)");
        assert_eq!(flag.nested_names(&r), vec!["V(x)", "V(x,w)"]);
    }

    #[test]
    fn strict_transform_of_hypersurface() {
        let r = Ring::new(2, &["x", "y", "z", "w"]).unwrap();
        let h = Hypersurface::new(0, r.poly("y^4*z^21")).unwrap();
        let t = h.transform_blowup(&BlowupSpec::point(4, 2)).unwrap();
        assert_eq!(t.text(&r), "x+y^4*z^24");
        assert!(h.transform_blowup(&BlowupSpec::point(4, 0)).is_none());
        let s = ChartState::new(r.clone(), vec![r.poly("x^2+y^3")]);
        assert!(s
            .blowup(&BlowupSpec::point(4, 1), TransformKind::Weak)
            .is_ok());
    }
}
