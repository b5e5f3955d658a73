//! Normalized coefficient-ideal families.
//!
//! The literal coefficient ideal raises the pivot coefficients `a_k` to the
//! powers `c!/(c-k)`, which explodes after two levels of descent. A family
//! instead stores each contribution as a triple `(r, b, s)` standing for the
//! "weighted generator" `x^r · b` of weight `s`, i.e. formally `(x^r b)^{1/s}`.
//! Its order is `ρ = min (|r| + ord b) / s`; the literal ideal of a level is
//! recovered by raising every element to the common power `N/s`, which
//! multiplies every ratio by the same factor `N`. Comparisons between flags
//! therefore only need the ratios.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use crate::gfpoly::{Monomial, Polynomial, MAX_VARS};
use crate::text::Ring;

pub type Q = Ratio<i64>;

/// One weighted generator `(x^r · b)^{1/s}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FamilyElement {
    /// Rational exponents of a residual exceptional monomial.
    pub r: [Q; MAX_VARS],
    /// Polynomial part (never zero).
    pub base: Polynomial,
    /// Weight (positive).
    pub weight: Q,
}

impl FamilyElement {
    pub fn plain(base: Polynomial) -> Self {
        FamilyElement {
            r: [Q::zero(); MAX_VARS],
            base,
            weight: Q::one(),
        }
    }

    pub fn monomial_degree(&self) -> Q {
        self.r.iter().copied().fold(Q::zero(), |a, b| a + b)
    }

    /// `(|r| + ord b) / s`.
    pub fn ratio(&self) -> Q {
        let ord = self.base.order().expect("family bases are nonzero") as i64;
        (self.monomial_degree() + Q::from_integer(ord)) / self.weight
    }
}

/// A coefficient ideal encoded as a finite set of weighted generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Family {
    pub elements: Vec<FamilyElement>,
}

/// Order of a family: finite, or infinite when the family is empty (zero ideal).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    Finite(Q),
    Infinite,
}

impl Order {
    pub fn finite(&self) -> Option<Q> {
        match self {
            Order::Finite(q) => Some(*q),
            Order::Infinite => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Order::Finite(q) if q.is_zero())
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(q) => write!(f, "{q}"),
            Order::Infinite => f.write_str("inf"),
        }
    }
}

impl Family {
    /// The ideal generated by `gens` itself (weights 1).
    pub fn from_ideal(gens: &[Polynomial]) -> Self {
        Family {
            elements: gens
                .iter()
                .filter(|g| !g.is_zero())
                .cloned()
                .map(FamilyElement::plain)
                .collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn order(&self) -> Order {
        match self.elements.iter().map(|e| e.ratio()).min() {
            Some(q) => Order::Finite(q),
            None => Order::Infinite,
        }
    }

    /// Elements attaining the minimal ratio.
    pub fn lowest(&self) -> Vec<&FamilyElement> {
        match self.order() {
            Order::Infinite => Vec::new(),
            Order::Finite(rho) => self.elements.iter().filter(|e| e.ratio() == rho).collect(),
        }
    }

    /// Splits off the largest exceptional monomial: per exceptional variable
    /// `y`, `μ_y = min (r_y + val_y b) / s`. Returns `μ` and the non-monomial part.
    pub fn nonmonomial_part(&self, exceptional: &[usize]) -> (Vec<(usize, Q)>, Family) {
        if self.is_empty() {
            return (
                exceptional.iter().map(|&y| (y, Q::zero())).collect(),
                self.clone(),
            );
        }
        let mu: Vec<(usize, Q)> = exceptional
            .iter()
            .map(|&y| {
                let m = self
                    .elements
                    .iter()
                    .map(|e| (e.r[y] + Q::from_integer(e.base.valuation_in(y) as i64)) / e.weight)
                    .min()
                    .unwrap();
                (y, m)
            })
            .collect();
        let elements = self
            .elements
            .iter()
            .map(|e| {
                let mut r = e.r;
                let mut shift = Monomial::one();
                for &(y, m) in &mu {
                    let v = e.base.valuation_in(y);
                    shift.set_exp(y, v);
                    r[y] = r[y] + Q::from_integer(v as i64) - m * e.weight;
                }
                FamilyElement {
                    r,
                    base: e.base.div_monomial(&shift),
                    weight: e.weight,
                }
            })
            .collect();
        (mu, Family { elements })
    }

    /// Descends through `V(pivot + tail)`: substitutes `pivot ↦ pivot − tail`,
    /// and collects `(r, a_k, τ − k)` for every pivot coefficient `a_k` with
    /// `k < τ = s·ρ`. A residual exceptional weight `r_pivot` (only possible for
    /// coordinate pivots) shifts the pivot degree to `k + r_pivot`.
    pub fn descend(&self, pivot: usize, tail: &Polynomial) -> Family {
        let rho = match self.order() {
            Order::Finite(q) => q,
            Order::Infinite => return self.clone(),
        };
        let shift = if tail.is_zero() { None } else { Some(-tail) };
        let mut elements = Vec::new();
        for e in &self.elements {
            let rp = e.r[pivot];
            debug_assert!(
                rp.is_zero() || shift.is_none(),
                "tail on a pivot carrying an exceptional weight"
            );
            let mut r = e.r;
            r[pivot] = Q::zero();
            let tau = e.weight * rho;
            let b = match &shift {
                None => e.base.clone(),
                Some(h) => e.base.shift_by(pivot, h),
            };
            for (k, a) in b.coefficients_in(pivot) {
                let k = Q::from_integer(k as i64) + rp;
                if k < tau && !a.is_zero() {
                    elements.push(FamilyElement {
                        r,
                        base: a,
                        weight: tau - k,
                    });
                }
            }
        }
        Family { elements }
    }

    /// Literal multiplicity `N / s` of each element when the level is scaled by `N`.
    pub fn literal_exponents(&self, scale: u128) -> Option<Vec<u128>> {
        self.elements
            .iter()
            .map(|e| {
                let q = Ratio::new(scale as i128, 1)
                    / Ratio::new(*e.weight.numer() as i128, *e.weight.denom() as i128);
                if q.is_integer() {
                    q.to_integer().to_u128()
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn display<'a>(&'a self, ring: &'a Ring) -> FamilyDisplay<'a> {
        FamilyDisplay { family: self, ring }
    }
}

impl Polynomial {
    /// The variable `x_i` in this polynomial's context.
    pub fn field_var(&self, i: usize) -> Polynomial {
        Polynomial::var(self.field(), self.nvars(), i)
    }
}

pub struct FamilyDisplay<'a> {
    family: &'a Family,
    ring: &'a Ring,
}

impl fmt::Display for FamilyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.family.elements.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            let mono: Vec<String> = (0..self.ring.nvars())
                .filter(|&v| !e.r[v].is_zero())
                .map(|v| format!("{}^({})", self.ring.var_name(v), e.r[v]))
                .collect();
            if !mono.is_empty() {
                write!(f, "{}*", mono.join("*"))?;
            }
            write!(f, "({})^(1/{})", self.ring.show(&e.base), e.weight)?;
        }
        Ok(())
    }
}

/// `n!` when it fits into 128 bits.
pub fn factorial(n: u128) -> Option<u128> {
    (1..=n).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

/// Literal orders `o_0 = ρ_0`, `o_i = o_{i-1}! · ρ_i` while they fit into 128 bits.
pub fn literal_orders(ratios: &[Order]) -> Vec<Option<u128>> {
    let mut out = Vec::with_capacity(ratios.len());
    let mut scale: Option<u128> = Some(1);
    for (i, r) in ratios.iter().enumerate() {
        let lit = match (scale, r) {
            (Some(n), Order::Finite(q)) => {
                let v =
                    Ratio::new(n as i128, 1) * Ratio::new(*q.numer() as i128, *q.denom() as i128);
                if v.is_integer() {
                    v.to_integer().to_u128()
                } else {
                    None
                }
            }
            _ => None,
        };
        out.push(lit);
        // The next level's literal ideal is scaled by (this literal order)!.
        scale = if i + 1 < ratios.len() {
            lit.and_then(factorial)
        } else {
            None
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Ratio::new(n, d)
    }

    #[test]
    fn char_two_descent_orders() {
        let r = Ring::new(2, &["x", "y", "z", "w"]).unwrap();
        let j0 = Family::from_ideal(&[r.poly("x^2+w^3+y^25+y*z^16")]);
        assert_eq!(j0.order(), Order::Finite(q(2, 1)));
        let j1 = j0.descend(0, &r.zero());
        assert_eq!(j1.order(), Order::Finite(q(3, 2)));
        let j2 = j1.descend(3, &r.zero());
        assert_eq!(j2.order(), Order::Finite(q(17, 3)));
        let orders = literal_orders(&[j0.order(), j1.order(), j2.order()]);
        assert_eq!(orders, vec![Some(2), Some(3), Some(34)]);
        assert_eq!(j2.literal_exponents(6), Some(vec![2]));
    }

    #[test]
    fn nonmonomial_split_removes_exceptional_content() {
        let r = Ring::new(3, &["x", "z", "w"]).unwrap();
        let j0 = Family::from_ideal(&[r.poly("x^3+z^14*w^10*(z^6-w^6)")]);
        let j1 = j0.descend(0, &r.zero());
        let (mu, n) = j1.nonmonomial_part(&[1, 2]);
        assert_eq!(mu, vec![(1, q(14, 3)), (2, q(10, 3))]);
        assert_eq!(n.order(), Order::Finite(q(2, 1)));
        assert_eq!(
            literal_orders(&[j0.order(), n.order()]),
            vec![Some(3), Some(12)]
        );
    }

    #[test]
    fn zero_coefficient_ideal_is_infinite() {
        let r = Ring::new(3, &["x", "y"]).unwrap();
        let j = Family::from_ideal(&[r.poly("x^3")]).descend(0, &r.zero());
        assert!(j.is_empty());
        assert_eq!(j.order(), Order::Infinite);
    }
}
