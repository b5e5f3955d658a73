//! Sparse multivariate polynomials over GF(p).
//!
//! Terms are kept sorted in descending lexicographic order of their exponent
//! vectors (the first variable is the most significant), which makes equality,
//! hashing and printing canonical.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::CoreError;
use crate::field::FieldSpec;

/// Maximum number of ambient variables supported by a chart.
pub const MAX_VARS: usize = 8;

/// An exponent vector. Unused trailing slots are always zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exps: [u32; MAX_VARS],
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        assert!(exps.len() <= MAX_VARS, "too many exponents");
        let mut m = Monomial::default();
        m.exps[..exps.len()].copy_from_slice(exps);
        m
    }

    pub fn var(i: usize) -> Self {
        let mut m = Monomial::default();
        m.exps[i] = 1;
        m
    }

    #[inline]
    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i]
    }

    #[inline]
    pub fn set_exp(&mut self, i: usize, e: u32) {
        self.exps[i] = e;
    }

    pub fn exponents(&self, nvars: usize) -> &[u32] {
        &self.exps[..nvars]
    }

    pub fn degree(&self) -> u64 {
        self.exps.iter().map(|&e| e as u64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = *self;
        for (a, b) in m.exps.iter_mut().zip(other.exps.iter()) {
            *a += b;
        }
        m
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        let mut m = *other;
        for (a, b) in m.exps.iter_mut().zip(self.exps.iter()) {
            *a -= b;
        }
        m
    }

    /// Component-wise minimum (the gcd of two monomials).
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut m = *self;
        for (a, b) in m.exps.iter_mut().zip(other.exps.iter()) {
            *a = (*a).min(*b);
        }
        m
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..MAX_VARS).filter(move |&i| self.exps[i] > 0)
    }

    /// Formats the monomial with the given variable names, factors joined by `*`.
    pub fn display<'a>(&'a self, names: &'a [String]) -> MonomialDisplay<'a> {
        MonomialDisplay { mono: self, names }
    }
}

pub struct MonomialDisplay<'a> {
    mono: &'a Monomial,
    names: &'a [String],
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, name) in self.names.iter().enumerate() {
            let e = self.mono.exps[i];
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// A sparse polynomial over GF(p) in a fixed number of variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    field: FieldSpec,
    nvars: usize,
    /// Nonzero terms, strictly descending by monomial.
    terms: Vec<(Monomial, u64)>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.nvars);
        write!(f, "{}", self.display(&names))
    }
}

/// Names `x0, x1, …` used when no chart context is available.
pub fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

impl Polynomial {
    pub fn zero(field: FieldSpec, nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables");
        Polynomial {
            field,
            nvars,
            terms: Vec::new(),
        }
    }

    pub fn constant(field: FieldSpec, nvars: usize, c: i64) -> Self {
        Self::monomial(field, nvars, Monomial::one(), field.reduce(c))
    }

    pub fn one(field: FieldSpec, nvars: usize) -> Self {
        Self::constant(field, nvars, 1)
    }

    pub fn var(field: FieldSpec, nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        Self::monomial(field, nvars, Monomial::var(i), 1)
    }

    pub fn monomial(field: FieldSpec, nvars: usize, m: Monomial, c: u64) -> Self {
        let mut p = Self::zero(field, nvars);
        let c = c % field.p();
        if c != 0 {
            p.terms.push((m, c));
        }
        p
    }

    /// Builds a polynomial from arbitrary (possibly repeated, unsorted) terms.
    pub fn from_terms<I>(field: FieldSpec, nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, u64)>,
    {
        let mut v: Vec<(Monomial, u64)> =
            terms.into_iter().map(|(m, c)| (m, c % field.p())).collect();
        normalize(field, &mut v);
        Polynomial {
            field,
            nvars,
            terms: v,
        }
    }

    /// Same context (field and variable count), zero polynomial.
    pub fn zero_like(&self) -> Self {
        Self::zero(self.field, self.nvars)
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Monomial, u64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Same as [`Polynomial::is_zero`]: the zero polynomial has no terms.
    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    /// Coefficient of the constant term.
    pub fn constant_term(&self) -> u64 {
        self.coefficient(&Monomial::one())
    }

    pub fn coefficient(&self, m: &Monomial) -> u64 {
        self.terms
            .binary_search_by(|(t, _)| m.cmp(t))
            .map(|i| self.terms[i].1)
            .unwrap_or(0)
    }

    pub fn same_context(&self, other: &Polynomial) -> bool {
        self.field == other.field && self.nvars == other.nvars
    }

    fn check(&self, other: &Polynomial) -> Result<(), CoreError> {
        if self.same_context(other) {
            Ok(())
        } else {
            Err(CoreError::ContextMismatch {
                p1: self.field.p(),
                n1: self.nvars,
                p2: other.field.p(),
                n2: other.nvars,
            })
        }
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial, CoreError> {
        self.check(other)?;
        let f = self.field;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = self.terms[i];
            let (mb, cb) = other.terms[j];
            match ma.cmp(&mb) {
                Ordering::Greater => {
                    out.push((ma, ca));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((mb, cb));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = f.add(ca, cb);
                    if c != 0 {
                        out.push((ma, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Ok(Polynomial {
            field: f,
            nvars: self.nvars,
            terms: out,
        })
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial, CoreError> {
        self.check(other)?;
        let f = self.field;
        if self.is_zero() || other.is_zero() {
            return Ok(self.zero_like());
        }
        if other.terms.len() == 1 {
            let (m, c) = other.terms[0];
            return Ok(self.mul_term(&m, c));
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms[0];
            return Ok(other.mul_term(&m, c));
        }
        let mut acc: Vec<(Monomial, u64)> =
            Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                acc.push((ma.mul(mb), f.mul(*ca, *cb)));
            }
        }
        normalize(f, &mut acc);
        Ok(Polynomial {
            field: f,
            nvars: self.nvars,
            terms: acc,
        })
    }

    /// Multiplies by the single term `c·m`.
    pub fn mul_term(&self, m: &Monomial, c: u64) -> Polynomial {
        let f = self.field;
        let c = c % f.p();
        if c == 0 {
            return self.zero_like();
        }
        // Multiplying every monomial by a fixed monomial preserves lex order.
        let terms = self
            .terms
            .iter()
            .map(|(t, d)| (t.mul(m), f.mul(*d, c)))
            .collect();
        Polynomial {
            field: f,
            nvars: self.nvars,
            terms,
        }
    }

    pub fn scale(&self, c: u64) -> Polynomial {
        self.mul_term(&Monomial::one(), c)
    }

    /// Power by repeated squaring; `f^0 = 1`.
    pub fn pow(&self, mut e: u64) -> Polynomial {
        let mut result = Polynomial::one(self.field, self.nvars);
        if e == 0 {
            return result;
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms[0];
            let mut mm = m;
            for i in 0..self.nvars {
                mm.exps[i] = u32::try_from(m.exps[i] as u64 * e).expect("exponent overflow");
            }
            return Polynomial::monomial(self.field, self.nvars, mm, self.field.pow(c, e));
        }
        let mut base = self.clone();
        loop {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = &base * &base;
        }
        result
    }

    /// The p^e-th Frobenius power, computed termwise: `(Σ c m)^{p^e} = Σ c m^{p^e}`.
    pub fn frobenius(&self, e: u32) -> Polynomial {
        let q = self.field.p().pow(e);
        let terms = self.terms.iter().map(|(m, c)| {
            let mut mm = *m;
            for x in mm.exps.iter_mut() {
                *x = u32::try_from(*x as u64 * q).expect("exponent overflow");
            }
            // c^{p^e} = c in the prime field.
            (mm, *c)
        });
        Polynomial {
            field: self.field,
            nvars: self.nvars,
            terms: terms.collect(),
        }
    }

    /// Minimal exponent of variable `i` over all terms (0 for the zero polynomial).
    pub fn valuation_in(&self, i: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.exps[i]).min().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.exps[i]).max().unwrap_or(0)
    }

    pub fn involves(&self, i: usize) -> bool {
        self.terms.iter().any(|(m, _)| m.exps[i] > 0)
    }

    /// Total degree (maximal term degree); `None` for zero.
    pub fn total_degree(&self) -> Option<u64> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    /// Order at the origin: the minimal term degree; `None` for zero.
    pub fn order(&self) -> Option<u64> {
        self.terms.iter().map(|(m, _)| m.degree()).min()
    }

    /// Sum of the terms of minimal total degree.
    pub fn initial_form(&self) -> Result<Polynomial, CoreError> {
        let d = self.order().ok_or(CoreError::ZeroPolynomial)?;
        Ok(self.homogeneous_part(d))
    }

    pub fn homogeneous_part(&self, d: u64) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() == d)
            .copied()
            .collect();
        Polynomial {
            field: self.field,
            nvars: self.nvars,
            terms,
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.order() {
            None => true,
            Some(d) => self.terms.iter().all(|(m, _)| m.degree() == d),
        }
    }

    /// Divides by a monomial that divides every term.
    pub fn div_monomial(&self, m: &Monomial) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|(t, c)| {
                assert!(m.divides(t), "monomial does not divide polynomial");
                (m.quotient_of(t), *c)
            })
            .collect();
        Polynomial {
            field: self.field,
            nvars: self.nvars,
            terms,
        }
    }

    /// Gcd of all terms' monomials restricted to `allowed` variables.
    pub fn monomial_gcd(&self, allowed: &[usize]) -> Monomial {
        let mut g = Monomial::one();
        if self.is_zero() {
            return g;
        }
        for &i in allowed {
            g.exps[i] = self.valuation_in(i);
        }
        g
    }

    /// Expansion in powers of variable `i`: map `k ↦` coefficient of `x_i^k` (free of `x_i`).
    pub fn coefficients_in(&self, i: usize) -> BTreeMap<u32, Polynomial> {
        let mut buckets: BTreeMap<u32, Vec<(Monomial, u64)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let k = m.exps[i];
            let mut mm = *m;
            mm.exps[i] = 0;
            buckets.entry(k).or_default().push((mm, *c));
        }
        buckets
            .into_iter()
            .map(|(k, v)| {
                // Removing one coordinate from lex-sorted monomials with equal x_i keeps the order.
                (
                    k,
                    Polynomial {
                        field: self.field,
                        nvars: self.nvars,
                        terms: v,
                    },
                )
            })
            .collect()
    }

    /// Replaces variable `i` by `g` and expands.
    pub fn substitute(&self, i: usize, g: &Polynomial) -> Polynomial {
        assert!(self.same_context(g), "substitution across contexts");
        let coeffs = self.coefficients_in(i);
        let Some((&top, _)) = coeffs.iter().next_back() else {
            return self.zero_like();
        };
        // Horner scheme over the exponents present: f = (((a_top) g^{d1} + a) g^{d2} + …).
        let mut acc = self.zero_like();
        let mut prev = top;
        let mut powers: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (&k, a) in coeffs.iter().rev() {
            let gap = prev - k;
            if gap > 0 {
                let gp = powers
                    .entry(gap)
                    .or_insert_with(|| g.pow(gap as u64))
                    .clone();
                acc = &acc * &gp;
            }
            acc = &acc + a;
            prev = k;
        }
        if prev > 0 {
            acc = &acc * &g.pow(prev as u64);
        }
        acc
    }

    /// `f(x_i + h)` for `h` free of `x_i`, expanded as `Σ_j h^j · D_j f` with the
    /// Hasse derivatives `D_j` in `x_i` (binomials vanishing mod p are skipped).
    pub fn shift_by(&self, i: usize, h: &Polynomial) -> Polynomial {
        assert!(self.same_context(h), "substitution across contexts");
        assert!(!h.involves(i), "shift must be free of the variable");
        if h.is_zero() {
            return self.clone();
        }
        let f = self.field;
        let mut buckets: BTreeMap<u32, Vec<(Monomial, u64)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exps[i];
            for j in 0..=e {
                let b = f.binom(e as u64, j as u64);
                if b == 0 {
                    continue;
                }
                let mut mm = *m;
                mm.exps[i] = e - j;
                buckets.entry(j).or_default().push((mm, f.mul(*c, b)));
            }
        }
        let mut acc: Vec<(Monomial, u64)> = Vec::new();
        let mut hp = Polynomial::one(f, self.nvars);
        let mut hp_exp = 0u32;
        for (j, terms) in buckets {
            while hp_exp < j {
                hp = &hp * h;
                hp_exp += 1;
            }
            for (hm, hc) in &hp.terms {
                acc.extend(terms.iter().map(|(m, c)| (m.mul(hm), f.mul(*c, *hc))));
            }
        }
        normalize(f, &mut acc);
        Polynomial {
            field: f,
            nvars: self.nvars,
            terms: acc,
        }
    }

    /// Applies a monomial substitution `x_j ↦ x_j · x_t` for every `j` in `vars` (j ≠ t).
    pub fn monomial_substitute(&self, vars: &[usize], t: usize) -> Polynomial {
        let terms = self.terms.iter().map(|(m, c)| {
            let mut mm = *m;
            let add: u32 = vars.iter().filter(|&&j| j != t).map(|&j| m.exps[j]).sum();
            mm.exps[t] += add;
            (mm, *c)
        });
        Polynomial::from_terms(self.field, self.nvars, terms)
    }

    /// Replaces `x_i` by `x_i + c`, moving the point `x_i = -c` to the origin.
    pub fn translate(&self, i: usize, c: u64) -> Polynomial {
        let f = self.field;
        let c = c % f.p();
        if c == 0 {
            return self.clone();
        }
        let mut acc = Vec::new();
        let mut cpow: Vec<u64> = vec![1];
        for (m, a) in &self.terms {
            let n = m.exps[i];
            while cpow.len() <= n as usize {
                let last = *cpow.last().unwrap();
                cpow.push(f.mul(last, c));
            }
            for k in 0..=n {
                let b = f.binom(n as u64, k as u64);
                if b == 0 {
                    continue;
                }
                let mut mm = *m;
                mm.exps[i] = k;
                acc.push((mm, f.mul(*a, f.mul(b, cpow[(n - k) as usize]))));
            }
        }
        Polynomial::from_terms(f, self.nvars, acc)
    }

    /// Hasse derivative `D^α`: the coefficient of `t^α` in `f(x + t)`.
    pub fn hasse_derivative(&self, alpha: &[u32]) -> Polynomial {
        let f = self.field;
        let mut acc = Vec::new();
        'terms: for (m, c) in &self.terms {
            let mut coeff = *c;
            let mut mm = *m;
            for (i, &a) in alpha.iter().enumerate() {
                if a > m.exps[i] {
                    continue 'terms;
                }
                coeff = f.mul(coeff, f.binom(m.exps[i] as u64, a as u64));
                if coeff == 0 {
                    continue 'terms;
                }
                mm.exps[i] -= a;
            }
            acc.push((mm, coeff));
        }
        Polynomial::from_terms(f, self.nvars, acc)
    }

    /// Unwraps a p^e-th power: returns `g` with `g^{p^e} = self`, or `None`.
    pub fn pth_root(&self, e: u32) -> Option<Polynomial> {
        assert!(e >= 1, "pth_root needs e >= 1");
        let q = self.field.p().checked_pow(e)?;
        let q = u32::try_from(q).ok()?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut mm = *m;
            for x in mm.exps.iter_mut() {
                if *x % q != 0 {
                    return None;
                }
                *x /= q;
            }
            terms.push((mm, *c));
        }
        Some(Polynomial {
            field: self.field,
            nvars: self.nvars,
            terms,
        })
    }

    /// Largest `e` such that `self` is a p^e-th power (0 when it is not a p-th power; `u32::MAX` for constants).
    pub fn frobenius_level(&self) -> u32 {
        let mut level = u32::MAX;
        for (m, _) in &self.terms {
            for &x in m.exps.iter().filter(|&&x| x > 0) {
                level = level.min(self.field.valuation(x as u64));
                if level == 0 {
                    return 0;
                }
            }
        }
        level
    }

    /// Evaluates the polynomial at a point of GF(p)^n.
    pub fn evaluate(&self, point: &[u64]) -> u64 {
        let f = self.field;
        let mut s = 0;
        for (m, c) in &self.terms {
            let mut v = *c;
            for (i, &x) in point.iter().enumerate().take(self.nvars) {
                if m.exps[i] > 0 {
                    v = f.mul(v, f.pow(x, m.exps[i] as u64));
                }
            }
            s = f.add(s, v);
        }
        s
    }

    /// Restriction to the coordinate subspace where every variable in `vars` is zero.
    pub fn restrict_zero(&self, vars: &[usize]) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| vars.iter().all(|&i| m.exps[i] == 0))
            .copied()
            .collect();
        Polynomial {
            field: self.field,
            nvars: self.nvars,
            terms,
        }
    }

    /// Terms of total degree at most `d` (truncation).
    pub fn truncate(&self, d: u64) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.degree() <= d)
            .copied()
            .collect();
        Polynomial {
            field: self.field,
            nvars: self.nvars,
            terms,
        }
    }

    /// Canonical text using the given variable names.
    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }

    pub fn to_text(&self, names: &[String]) -> String {
        self.display(names).to_string()
    }
}

fn normalize(f: FieldSpec, v: &mut Vec<(Monomial, u64)>) {
    v.sort_unstable_by_key(|&(m, _)| std::cmp::Reverse(m));
    let mut out: Vec<(Monomial, u64)> = Vec::with_capacity(v.len());
    for &(m, c) in v.iter() {
        match out.last_mut() {
            Some((lm, lc)) if *lm == m => *lc = f.add(*lc, c),
            _ => out.push((m, c)),
        }
    }
    out.retain(|(_, c)| *c != 0);
    *v = out;
}

pub struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        let field = self.poly.field;
        for (idx, (m, c)) in self.poly.terms.iter().enumerate() {
            let s = field.signed(*c);
            let mag = s.unsigned_abs();
            if s < 0 {
                f.write_str("-")?;
            } else if idx > 0 {
                f.write_str("+")?;
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag == 1 {
                write!(f, "{}", m.display(self.names))?;
            } else {
                write!(f, "{mag}*{}", m.display(self.names))?;
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs)
            .expect("polynomial addition across contexts")
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(&-rhs)
            .expect("polynomial subtraction across contexts")
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs)
            .expect("polynomial multiplication across contexts")
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        let f = self.field;
        let terms = self.terms.iter().map(|(m, c)| (*m, f.neg(*c))).collect();
        Polynomial {
            field: f,
            nvars: self.nvars,
            terms,
        }
    }
}

/// Order of the ideal generated by `gens` at the origin (minimum over generators).
pub fn order_at_origin(gens: &[Polynomial]) -> Result<u64, CoreError> {
    gens.iter()
        .filter_map(|g| g.order())
        .min()
        .ok_or(CoreError::InfiniteOrder)
}

/// Largest monomial in the `allowed` variables dividing every generator, and the cofactors.
pub fn monomial_content(gens: &[Polynomial], allowed: &[usize]) -> (Monomial, Vec<Polynomial>) {
    let mut content: Option<Monomial> = None;
    for g in gens.iter().filter(|g| !g.is_zero()) {
        let m = g.monomial_gcd(allowed);
        content = Some(match content {
            None => m,
            Some(c) => c.gcd(&m),
        });
    }
    let content = content.unwrap_or_default();
    let cofactors = gens
        .iter()
        .map(|g| {
            if g.is_zero() {
                g.clone()
            } else {
                g.div_monomial(&content)
            }
        })
        .collect();
    (content, cofactors)
}
