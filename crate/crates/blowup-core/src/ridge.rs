//! Ridges of homogeneous ideals: minimal sets of additive forms
//! `Σ a_i x_i^{p^e}` whose algebra contains a generating set.
//!
//! The algebra `k[P_1, …, P_r]` generated by additive forms is closed under
//! all Hasse derivatives (because `P(x + t) = P(x) + P(t)`), so any algebra
//! containing the generators contains every additive polynomial in the span
//! of their Hasse derivatives. The ridge is therefore computed as the algebra
//! generated by those additive polynomials, and the result is checked with
//! the independent membership oracle [`subalgebra_membership`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::CoreError;
use crate::field::FieldSpec;
use crate::gfpoly::{Monomial, Polynomial};
use crate::linalg::{invert, solve, Echelon};
use crate::text::Ring;

/// `Σ a_i x_i^{p^level}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AdditiveForm {
    pub level: u32,
    pub coeffs: Vec<u64>,
}

impl AdditiveForm {
    pub fn degree(&self, field: FieldSpec) -> u64 {
        field.p().pow(self.level)
    }

    pub fn to_poly(&self, field: FieldSpec) -> Polynomial {
        let q = u32::try_from(field.p().pow(self.level)).expect("ridge degree overflow");
        let n = self.coeffs.len();
        Polynomial::from_terms(
            field,
            n,
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| {
                    let mut m = Monomial::one();
                    m.set_exp(i, q);
                    (m, c)
                }),
        )
    }

    /// The same coefficient vector one Frobenius level up (`P ↦ P^p` in a prime field).
    pub fn lift(&self, by: u32) -> AdditiveForm {
        AdditiveForm {
            level: self.level + by,
            coeffs: self.coeffs.clone(),
        }
    }
}

/// How a ridge basis was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RidgeMethod {
    /// Additive polynomials in the Hasse-derivative span.
    Derivatives,
    /// Per-variable Frobenius levels (always regenerates; used when the derivative search is too large).
    Coordinates,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RidgeBasis {
    pub field: FieldSpec,
    pub nvars: usize,
    pub forms: Vec<AdditiveForm>,
    pub method: RidgeMethod,
    /// Every input generator passed the membership oracle.
    pub verified: bool,
}

impl RidgeBasis {
    pub fn empty(field: FieldSpec, nvars: usize) -> Self {
        RidgeBasis {
            field,
            nvars,
            forms: Vec::new(),
            method: RidgeMethod::Derivatives,
            verified: true,
        }
    }

    pub fn polys(&self) -> Vec<Polynomial> {
        self.forms.iter().map(|f| f.to_poly(self.field)).collect()
    }

    pub fn profile(&self) -> Vec<u64> {
        self.forms.iter().map(|f| f.degree(self.field)).collect()
    }

    pub fn texts(&self, ring: &Ring) -> Vec<String> {
        self.polys().iter().map(|p| ring.show(p)).collect()
    }

    /// `["z^3","w^3"]`.
    pub fn to_list(&self, ring: &Ring) -> String {
        let items: Vec<String> = self
            .texts(ring)
            .into_iter()
            .map(|t| format!("\"{t}\""))
            .collect();
        format!("[{}]", items.join(","))
    }

    /// `{z^3, w^3}`.
    pub fn to_set(&self, ring: &Ring) -> String {
        format!("{{{}}}", self.texts(ring).join(", "))
    }

    pub fn profile_text(&self) -> String {
        let items: Vec<String> = self.profile().iter().map(|d| d.to_string()).collect();
        format!("[{}]", items.join(","))
    }

    /// Lifts every form by `by` Frobenius levels.
    pub fn lift(&self, by: u32) -> RidgeBasis {
        let mut b = self.clone();
        b.forms = b.forms.iter().map(|f| f.lift(by)).collect();
        b
    }

    pub fn has_higher_degree_generator(&self) -> bool {
        self.forms.iter().any(|f| f.level > 0)
    }
}

/// Canonical polynomial order: compare term lists from the leading term.
pub fn canonical_cmp(a: &Polynomial, b: &Polynomial) -> Ordering {
    for (ta, tb) in a.terms().iter().zip(b.terms().iter()) {
        match ta.0.cmp(&tb.0).then(ta.1.cmp(&tb.1)) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Cap on the number of Hasse derivatives evaluated before falling back to coordinates.
const DERIVATIVE_BUDGET: usize = 200_000;
/// Cap on the number of monomials in the forms tried by the membership oracle.
const MEMBERSHIP_BUDGET: usize = 20_000;

/// Ridge of the ideal generated by homogeneous polynomials.
pub fn ridge(gens: &[Polynomial]) -> Result<RidgeBasis, CoreError> {
    let gens: Vec<&Polynomial> = gens.iter().filter(|g| !g.is_zero()).collect();
    let Some(first) = gens.first() else {
        return Err(CoreError::ZeroPolynomial);
    };
    let (field, n) = (first.field(), first.nvars());
    if gens.iter().any(|g| !g.is_homogeneous()) {
        return Err(CoreError::NotHomogeneous);
    }
    if gens.iter().any(|g| g.is_constant()) {
        return Ok(RidgeBasis::empty(field, n));
    }
    let mut basis = match derivative_ridge(field, n, &gens) {
        Some(forms) => RidgeBasis {
            field,
            nvars: n,
            forms,
            method: RidgeMethod::Derivatives,
            verified: false,
        },
        None => coordinate_ridge(field, n, &gens),
    };
    basis.verified = gens
        .iter()
        .all(|g| matches!(subalgebra_membership(g, &basis), Some(Membership::Yes(_))));
    if !basis.verified && basis.method == RidgeMethod::Derivatives {
        let fallback = coordinate_ridge(field, n, &gens);
        let ok = gens.iter().all(|g| {
            matches!(
                subalgebra_membership(g, &fallback),
                Some(Membership::Yes(_))
            )
        });
        basis = RidgeBasis {
            verified: ok,
            ..fallback
        };
    }
    Ok(basis)
}

fn sort_forms(field: FieldSpec, forms: &mut [AdditiveForm]) {
    forms.sort_by(|a, b| canonical_cmp(&b.to_poly(field), &a.to_poly(field)));
}

/// Per-variable levels: `x_i^{p^{e_i}}` with `e_i` the minimal p-adic valuation of its exponents.
fn coordinate_ridge(field: FieldSpec, n: usize, gens: &[&Polynomial]) -> RidgeBasis {
    let mut level: BTreeMap<usize, u32> = BTreeMap::new();
    for g in gens {
        for (m, _) in g.terms() {
            for i in m.support() {
                let v = field.valuation(m.exp(i) as u64);
                let e = level.entry(i).or_insert(v);
                *e = (*e).min(v);
            }
        }
    }
    let mut forms: Vec<AdditiveForm> = level
        .into_iter()
        .map(|(i, e)| {
            let mut coeffs = vec![0; n];
            coeffs[i] = 1;
            AdditiveForm { level: e, coeffs }
        })
        .collect();
    sort_forms(field, &mut forms);
    RidgeBasis {
        field,
        nvars: n,
        forms,
        method: RidgeMethod::Coordinates,
        verified: false,
    }
}

/// Multi-indices `α ≤ m` (digit-wise in base p, so `binom(m, α) ≠ 0`) with `|α| = target`.
fn lucas_subindices(
    field: FieldSpec,
    m: &Monomial,
    n: usize,
    target: u64,
    out: &mut BTreeSet<Vec<u32>>,
) {
    let choices: Vec<Vec<u32>> = (0..n)
        .map(|i| {
            let e = m.exp(i);
            (0..=e)
                .filter(|&a| field.binom(e as u64, a as u64) != 0)
                .collect()
        })
        .collect();
    let max_rest: Vec<u64> = (0..=n)
        .map(|i| choices[i..].iter().map(|c| *c.last().unwrap() as u64).sum())
        .collect();
    let mut alpha = vec![0u32; n];
    fn rec(
        i: usize,
        left: u64,
        choices: &[Vec<u32>],
        max_rest: &[u64],
        alpha: &mut Vec<u32>,
        out: &mut BTreeSet<Vec<u32>>,
    ) {
        if i == choices.len() {
            if left == 0 {
                out.insert(alpha.clone());
            }
            return;
        }
        if max_rest[i] < left {
            return;
        }
        for &a in &choices[i] {
            if a as u64 > left {
                break;
            }
            alpha[i] = a;
            rec(i + 1, left - a as u64, choices, max_rest, alpha, out);
        }
        alpha[i] = 0;
    }
    rec(0, target, &choices, &max_rest, &mut alpha, out);
}

fn derivative_ridge(field: FieldSpec, n: usize, gens: &[&Polynomial]) -> Option<Vec<AdditiveForm>> {
    let p = field.p();
    let max_deg = gens.iter().filter_map(|g| g.order()).max()?;
    let mut levels = Vec::new();
    let mut q = 1u64;
    let mut e = 0u32;
    while q <= max_deg {
        levels.push((e, q));
        e += 1;
        q = q.checked_mul(p)?;
    }
    let mut budget = DERIVATIVE_BUDGET;
    let mut lifted = Echelon::new(field, n);
    let mut forms = Vec::new();
    for (e, q) in levels {
        let qexp = u32::try_from(q).ok()?;
        // Derivatives D^α g with |α| = deg g − q span the degree-q part of the derivative closure.
        let mut derivs: Vec<Polynomial> = Vec::new();
        for g in gens {
            let d = g.order().unwrap();
            if d < q {
                continue;
            }
            let mut alphas = BTreeSet::new();
            for (m, _) in g.terms() {
                lucas_subindices(field, m, n, d - q, &mut alphas);
                if alphas.len() > budget {
                    return None;
                }
            }
            budget -= alphas.len();
            for a in alphas {
                let dp = g.hasse_derivative(&a);
                if !dp.is_zero() {
                    derivs.push(dp);
                }
            }
        }
        if derivs.is_empty() {
            continue;
        }
        // Column order: non-additive monomials first, then x_0^q, …, x_{n-1}^q.
        let additive: Vec<Monomial> = (0..n)
            .map(|i| {
                let mut m = Monomial::one();
                m.set_exp(i, qexp);
                m
            })
            .collect();
        let mut others: BTreeSet<Monomial> = BTreeSet::new();
        for d in &derivs {
            for (m, _) in d.terms() {
                if !additive.contains(m) {
                    others.insert(*m);
                }
            }
        }
        let others: Vec<Monomial> = others.into_iter().collect();
        let ncols = others.len() + n;
        let mut ech = Echelon::new(field, ncols);
        for d in &derivs {
            let mut v = vec![0u64; ncols];
            for (m, c) in d.terms() {
                let col = match additive.iter().position(|a| a == m) {
                    Some(i) => others.len() + i,
                    None => others.binary_search(m).unwrap(),
                };
                v[col] = *c;
            }
            ech.insert(&v);
        }
        // Rows pivoting in the additive block lie entirely in it: a basis of span ∩ additive forms.
        let mut fresh = Echelon::new(field, n);
        for (piv, row) in ech.rows() {
            if piv >= others.len() {
                let rem = lifted.reduce(&row[others.len()..]);
                fresh.insert(&rem);
            }
        }
        for (_, row) in fresh.rows() {
            forms.push(AdditiveForm {
                level: e,
                coeffs: row.clone(),
            });
        }
        for (_, row) in fresh.rows() {
            lifted.insert(row);
        }
    }
    sort_forms(field, &mut forms);
    Some(forms)
}

/// Result of the membership oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    /// `f = Σ c · Π P_j^{k_j}`, listed as `(k, c)`.
    Yes(Vec<(Vec<u32>, u64)>),
    No,
}

/// Decides `f ∈ k[P_1, …, P_r]` by exact linear algebra over the monomials in the forms of degree `deg f`.
/// Returns `None` when the search exceeds the internal budget.
pub fn subalgebra_membership(f: &Polynomial, basis: &RidgeBasis) -> Option<Membership> {
    if f.is_zero() {
        return Some(Membership::Yes(Vec::new()));
    }
    if !f.is_homogeneous() {
        return Some(Membership::No);
    }
    if let Some(answer) = membership_by_coordinates(f, basis) {
        return Some(answer);
    }
    let d = f.order().unwrap();
    let field = basis.field;
    let degs: Vec<u64> = basis.profile();
    let mut exps: Vec<Vec<u32>> = Vec::new();
    let mut k = vec![0u32; degs.len()];
    fn rec(
        i: usize,
        left: u64,
        degs: &[u64],
        k: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
        cap: usize,
    ) -> bool {
        if out.len() > cap {
            return false;
        }
        if i == degs.len() {
            if left == 0 {
                out.push(k.clone());
            }
            return true;
        }
        let mut a = 0u32;
        loop {
            let used = a as u64 * degs[i];
            if used > left {
                break;
            }
            k[i] = a;
            if !rec(i + 1, left - used, degs, k, out, cap) {
                return false;
            }
            a += 1;
        }
        k[i] = 0;
        true
    }
    if !rec(0, d, &degs, &mut k, &mut exps, MEMBERSHIP_BUDGET) {
        return None;
    }
    if exps.is_empty() {
        return Some(Membership::No);
    }
    let polys = basis.polys();
    let mut powers: BTreeMap<(usize, u32), Polynomial> = BTreeMap::new();
    let products: Vec<Polynomial> = exps
        .iter()
        .map(|k| {
            let mut acc = Polynomial::one(field, f.nvars());
            for (j, &kj) in k.iter().enumerate() {
                if kj > 0 {
                    let pw = powers
                        .entry((j, kj))
                        .or_insert_with(|| polys[j].pow(kj as u64));
                    acc = &acc * pw;
                }
            }
            acc
        })
        .collect();
    let mut monos: BTreeSet<Monomial> = f.terms().iter().map(|(m, _)| *m).collect();
    for pr in &products {
        monos.extend(pr.terms().iter().map(|(m, _)| *m));
    }
    let monos: Vec<Monomial> = monos.into_iter().collect();
    let vectorize = |p: &Polynomial| -> Vec<u64> {
        let mut v = vec![0u64; monos.len()];
        for (m, c) in p.terms() {
            v[monos.binary_search(m).unwrap()] = *c;
        }
        v
    };
    let columns: Vec<Vec<u64>> = products.iter().map(vectorize).collect();
    match solve(field, &columns, &vectorize(f)) {
        None => Some(Membership::No),
        Some(x) => {
            let mut w: Vec<(Vec<u32>, u64)> =
                exps.into_iter().zip(x).filter(|(_, c)| *c != 0).collect();
            w.sort_by(|a, b| b.0.cmp(&a.0));
            Some(Membership::Yes(w))
        }
    }
}

/// Membership for forms `P_j = ℓ_j^{q_j}` with linearly independent `ℓ_j`.
///
/// In coordinates `u` that extend the `ℓ_j` to a basis of linear forms,
/// `k[P_1, …, P_r] = k[u_1^{q_1}, …, u_r^{q_r}]`, so `f` is a member iff every
/// term of `f` rewritten in `u` is a monomial in those powers; the witness is
/// then unique.  Returns `None` when the `ℓ_j` are dependent.
fn membership_by_coordinates(f: &Polynomial, basis: &RidgeBasis) -> Option<Membership> {
    let field = basis.field;
    let n = f.nvars();
    let r = basis.forms.len();
    let mut rows: Vec<Vec<u64>> = basis.forms.iter().map(|fm| fm.coeffs.clone()).collect();
    let mut span = Echelon::new(field, n);
    for row in &rows {
        if !span.insert(row) {
            return None;
        }
    }
    for i in 0..n {
        let mut unit = vec![0u64; n];
        unit[i] = 1;
        if span.insert(&unit) {
            rows.push(unit);
        }
    }
    // x = M^{-1} u, one linear polynomial in u per x_i.
    let inverse = invert(field, &rows)?;
    let images: Vec<Polynomial> = inverse
        .iter()
        .map(|row| {
            Polynomial::from_terms(
                field,
                n,
                (0..n)
                    .filter(|&k| row[k] != 0)
                    .map(|k| (Monomial::var(k), row[k])),
            )
        })
        .collect();
    let mut powers: BTreeMap<(usize, u32), Polynomial> = BTreeMap::new();
    let mut terms = Vec::new();
    for (m, c) in f.terms() {
        let mut t = Polynomial::constant(field, n, *c as i64);
        for i in m.support() {
            let pw = powers
                .entry((i, m.exp(i)))
                .or_insert_with(|| linear_power(&images[i], m.exp(i) as u64));
            t = &t * pw;
        }
        terms.extend_from_slice(t.terms());
    }
    let g = Polynomial::from_terms(field, n, terms);
    let degs = basis.profile();
    let mut witness = Vec::with_capacity(g.len());
    for (m, c) in g.terms() {
        if (r..n).any(|j| m.exp(j) != 0) {
            return Some(Membership::No);
        }
        let mut k = Vec::with_capacity(r);
        for (j, &q) in degs.iter().enumerate() {
            let e = m.exp(j) as u64;
            if !e.is_multiple_of(q) {
                return Some(Membership::No);
            }
            k.push((e / q) as u32);
        }
        witness.push((k, *c));
    }
    witness.sort_by(|a, b| b.0.cmp(&a.0));
    Some(Membership::Yes(witness))
}

/// `ℓ^e` for a linear polynomial, through the base-p digits of `e`.
fn linear_power(l: &Polynomial, mut e: u64) -> Polynomial {
    if l.len() == 1 {
        return l.pow(e);
    }
    let p = l.field().p();
    let mut acc = Polynomial::one(l.field(), l.nvars());
    let mut level = 0;
    while e > 0 {
        let digit = e % p;
        if digit > 0 {
            acc = &acc * &l.frobenius(level).pow(digit);
        }
        e /= p;
        level += 1;
    }
    acc
}

/// Expands a membership witness back into a polynomial.
pub fn expand_witness(witness: &[(Vec<u32>, u64)], basis: &RidgeBasis) -> Polynomial {
    let polys = basis.polys();
    let mut acc = Polynomial::zero(basis.field, basis.nvars);
    for (k, c) in witness {
        let mut t = Polynomial::constant(basis.field, basis.nvars, *c as i64);
        for (j, &kj) in k.iter().enumerate() {
            t = &t * &polys[j].pow(kj as u64);
        }
        acc = &acc + &t;
    }
    acc
}

/// Human-readable witness, e.g. `(z^3)^4+(z^3)^2*(w^3)^2+(w^3)^4`.
pub fn witness_text(witness: &[(Vec<u32>, u64)], basis: &RidgeBasis, ring: &Ring) -> String {
    let texts = basis.texts(ring);
    let mut parts = Vec::new();
    for (k, c) in witness {
        let factors: Vec<String> = k
            .iter()
            .enumerate()
            .filter(|(_, &kj)| kj > 0)
            .map(|(j, &kj)| {
                if kj == 1 {
                    format!("({})", texts[j])
                } else {
                    format!("({})^{kj}", texts[j])
                }
            })
            .collect();
        let s = ring.field.signed(*c);
        let body = if factors.is_empty() {
            "1".to_string()
        } else {
            factors.join("*")
        };
        let coeff = if s == 1 {
            String::new()
        } else {
            format!("{s}*")
        };
        parts.push(format!("{coeff}{body}"));
    }
    parts.join("+").replace("+-", "-")
}

/// Span (over GF(p)) of the degree-1 forms of a basis, as linear polynomials in RREF.
pub fn degree_one_span(basis: &RidgeBasis) -> Vec<Polynomial> {
    let mut e = Echelon::new(basis.field, basis.nvars);
    for f in basis.forms.iter().filter(|f| f.level == 0) {
        e.insert(&f.coeffs);
    }
    e.rows()
        .map(|(_, row)| {
            AdditiveForm {
                level: 0,
                coeffs: row.clone(),
            }
            .to_poly(basis.field)
        })
        .collect()
}

/// Whether a linear form lies in the degree-1 span of the basis.
pub fn in_degree_one_span(linear: &Polynomial, basis: &RidgeBasis) -> bool {
    let mut e = Echelon::new(basis.field, basis.nvars);
    for f in basis.forms.iter().filter(|f| f.level == 0) {
        e.insert(&f.coeffs);
    }
    let v: Vec<u64> = (0..basis.nvars)
        .map(|i| linear.coefficient(&Monomial::var(i)))
        .collect();
    e.contains(&v)
}

/// The n-ridge: ridge of the initial forms of the lowest-order generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NRidge {
    /// The homogeneous set actually fed to [`ridge`].
    pub input: Vec<Polynomial>,
    pub plain: RidgeBasis,
    /// When the input is a single p^e-th power: `e` and the ridge of its root.
    pub unwrapped: Option<(u32, RidgeBasis)>,
}

pub fn n_ridge(gens: &[Polynomial]) -> Result<NRidge, CoreError> {
    let ord = crate::gfpoly::order_at_origin(gens)?;
    let input: Vec<Polynomial> = gens
        .iter()
        .filter(|g| g.order() == Some(ord))
        .map(|g| g.initial_form().expect("nonzero"))
        .collect();
    let plain = ridge(&input)?;
    let unwrapped = if input.len() == 1 {
        let lvl = input[0].frobenius_level();
        if lvl > 0 && lvl != u32::MAX {
            let root = input[0].pth_root(lvl).expect("frobenius level");
            Some((lvl, ridge(&[root])?))
        } else {
            None
        }
    } else {
        None
    };
    Ok(NRidge {
        input,
        plain,
        unwrapped,
    })
}

impl fmt::Display for AdditiveForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "level {} {:?}", self.level, self.coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(r: &Ring, gens: &[&str]) -> Vec<String> {
        let g: Vec<Polynomial> = gens.iter().map(|s| r.poly(s)).collect();
        ridge(&g).unwrap().texts(r)
    }

    #[test]
    fn ridges_of_small_forms() {
        let r3 = Ring::new(3, &["x", "y", "z", "w"]).unwrap();
        assert_eq!(texts(&r3, &["x^3"]), vec!["x^3"]);
        assert_eq!(texts(&r3, &["z^12+z^6*w^6+w^12"]), vec!["z^3", "w^3"]);
        assert_eq!(texts(&r3, &["x^2*y"]), vec!["x", "y"]);
        let r2 = Ring::new(2, &["y", "z"]).unwrap();
        assert_eq!(texts(&r2, &["y^16+z^16"]), vec!["y^16+z^16"]);
        assert_eq!(texts(&r2, &["y^2*z^32"]), vec!["y^2", "z^32"]);
    }

    #[test]
    fn membership_witness_expands() {
        let r = Ring::new(3, &["z", "w"]).unwrap();
        let f = r.poly("z^12+z^6*w^6+w^12");
        let b = ridge(std::slice::from_ref(&f)).unwrap();
        let Some(Membership::Yes(w)) = subalgebra_membership(&f, &b) else {
            panic!("not a member")
        };
        assert_eq!(expand_witness(&w, &b), f);
        assert_eq!(witness_text(&w, &b, &r), "(z^3)^4+(z^3)^2*(w^3)^2+(w^3)^4");
    }

    #[test]
    fn degree_mismatch_is_not_member() {
        let r = Ring::new(3, &["x", "y"]).unwrap();
        let b = ridge(&[r.poly("x^3")]).unwrap();
        assert_eq!(
            subalgebra_membership(&r.poly("x^2*y"), &b),
            Some(Membership::No)
        );
        assert!(degree_one_span(&b).is_empty());
    }
}
