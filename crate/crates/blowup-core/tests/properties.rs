//! Randomized algebraic laws of the engine (fixed seed, 128 cases each).

use blowup_core::charts::{BlowupSpec, ChartState, TransformKind};
use blowup_core::descent::{coefficient_ideal, Hypersurface};
use blowup_core::linalg::Echelon;
use blowup_core::ridge::{
    expand_witness, ridge, subalgebra_membership, AdditiveForm, Membership, RidgeBasis, RidgeMethod,
};
use blowup_core::{monomial_content, order_at_origin, FieldSpec, Monomial, Polynomial, Ring};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 128,
        rng_seed: RngSeed::Fixed(0x6b61_6e67),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5])
}

type Terms = Vec<(Vec<u32>, u64)>;

fn terms(n: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = Terms> {
    prop::collection::vec(
        (prop::collection::vec(0..=max_exp, n), 1u64..=4),
        1..=max_terms,
    )
}

fn build(p: u64, n: usize, t: &Terms) -> Polynomial {
    let field = FieldSpec::new(p).unwrap();
    Polynomial::from_terms(
        field,
        n,
        t.iter()
            .map(|(e, c)| (Monomial::from_exponents(e), c % p))
            .filter(|(_, c)| *c != 0),
    )
}

fn ring(p: u64, n: usize) -> Ring {
    let names = ["x", "y", "z", "w"];
    Ring::new(p, &names[..n]).unwrap()
}

fn order(f: &Polynomial) -> u64 {
    order_at_origin(std::slice::from_ref(f)).unwrap()
}

/// All exponent vectors with entries `≤ bound`.
fn boxes(n: usize, bound: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=bound).map(move |e| {
                    let mut w = v.clone();
                    w.push(e);
                    w
                })
            })
            .collect();
    }
    out
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn order_is_additive_under_products(p in prime(), a in terms(3, 4, 5), b in terms(3, 4, 5)) {
        let (f, g) = (build(p, 3, &a), build(p, 3, &b));
        prop_assume!(!f.is_zero() && !g.is_zero());
        prop_assert_eq!(order(&(&f * &g)), order(&f) + order(&g));
    }

    #[test]
    fn pth_power_multiplies_exponents(p in prime(), a in terms(3, 3, 4)) {
        let f = build(p, 3, &a);
        let powered = f.pow(p);
        prop_assert_eq!(powered.len(), f.len());
        for ((m, c), (mp, cp)) in f.terms().iter().zip(powered.terms()) {
            prop_assert_eq!(c, cp);
            for i in 0..3 {
                prop_assert_eq!(mp.exp(i), m.exp(i) * p as u32);
            }
        }
        prop_assert_eq!(&powered, &f.frobenius(1));
    }

    #[test]
    fn pth_root_undoes_frobenius(p in prime(), a in terms(3, 3, 4), e in 1u32..=2) {
        let g = build(p, 3, &a);
        let lifted = g.pow(p.pow(e));
        prop_assert_eq!(lifted.pth_root(e), Some(g));
    }

    #[test]
    fn hasse_derivatives_detect_the_order(p in prime(), a in terms(3, 3, 5)) {
        let f = build(p, 3, &a);
        prop_assume!(!f.is_zero());
        let by_derivatives = boxes(3, 3)
            .into_iter()
            .filter(|alpha| f.hasse_derivative(alpha).constant_term() != 0)
            .map(|alpha| alpha.iter().map(|&e| e as u64).sum::<u64>())
            .min()
            .unwrap();
        prop_assert_eq!(order(&f), by_derivatives);
    }

    #[test]
    fn monomial_content_reassembles(
        p in prime(),
        gens in prop::collection::vec(terms(4, 5, 4), 1..=3),
        allowed in prop::collection::vec(any::<bool>(), 4),
    ) {
        let gens: Vec<Polynomial> = gens.iter().map(|t| build(p, 4, t)).collect();
        prop_assume!(gens.iter().all(|g| !g.is_zero()));
        let allowed: Vec<usize> = (0..4).filter(|&i| allowed[i]).collect();
        let (m, cofactors) = monomial_content(&gens, &allowed);
        for i in (0..4).filter(|i| !allowed.contains(i)) {
            prop_assert_eq!(m.exp(i), 0);
        }
        for (g, cof) in gens.iter().zip(&cofactors) {
            prop_assert_eq!(&cof.mul_term(&m, 1), g);
        }
        // Nothing further divides: the cofactors share no allowed variable.
        let (rest, _) = monomial_content(&cofactors, &allowed);
        prop_assert!(rest.is_one());
    }

    #[test]
    fn transforms_times_exceptional_power_give_the_total(
        p in prime(),
        a in terms(3, 4, 5),
        chart in 0usize..3,
    ) {
        let r = ring(p, 3);
        let f = build(p, 3, &a);
        prop_assume!(!f.is_zero() && f.constant_term() == 0);
        let s = ChartState::new(r, vec![f.clone()]);
        let spec = BlowupSpec::point(3, chart);
        let total = s.blowup(&spec, TransformKind::Total).unwrap().ideal()[0].clone();
        prop_assert_eq!(&total, &f.monomial_substitute(&[0, 1, 2], chart));
        let power = |d: u64| {
            let mut m = Monomial::one();
            m.set_exp(chart, d as u32);
            m
        };
        let c = order(&f);
        let weak = s.blowup(&spec, TransformKind::Weak).unwrap().ideal()[0].clone();
        prop_assert_eq!(&weak.mul_term(&power(c), 1), &total);
        let strict = s.blowup(&spec, TransformKind::Strict).unwrap().ideal()[0].clone();
        prop_assert_eq!(strict.valuation_in(chart), 0);
        prop_assert_eq!(&strict.mul_term(&power(total.valuation_in(chart) as u64), 1), &total);
        for d in 0..=c {
            let controlled = s.blowup(&spec, TransformKind::Controlled(d)).unwrap().ideal()[0].clone();
            prop_assert_eq!(&controlled.mul_term(&power(d), 1), &total);
        }
    }

    #[test]
    fn total_transform_is_the_pullback(
        p in prime(),
        a in terms(3, 4, 5),
        chart in 0usize..3,
        q in prop::collection::vec(0u64..5, 3),
    ) {
        let f = build(p, 3, &a);
        prop_assume!(!f.is_zero() && f.constant_term() == 0);
        let s = ChartState::new(ring(p, 3), vec![f.clone()]);
        let total = s.blowup(&BlowupSpec::point(3, chart), TransformKind::Total).unwrap();
        let q: Vec<u64> = q.iter().map(|c| c % p).collect();
        let image: Vec<u64> = (0..3)
            .map(|j| if j == chart { q[j] } else { q[j] * q[chart] % p })
            .collect();
        prop_assert_eq!(total.ideal()[0].evaluate(&q), f.evaluate(&image));
    }

    #[test]
    fn coefficient_ideal_commutes_with_the_controlled_transform(
        c in 2u64..=3,
        tails in prop::collection::vec(terms(3, 4, 3), 3),
        chart in 1usize..4,
    ) {
        // f = x^c + Σ_{k<c} x^k a_k blown up at the origin away from the pivot x.
        // Terms of a_k of degree ≥ 2(c-k) keep the order c in every chart, so
        // H_1 = V(x) keeps maximal contact.
        let p = 3;
        let r = ring(p, 4);
        let mut f = r.var(0).pow(c);
        for (k, t) in tails.iter().take(c as usize).enumerate() {
            let a = build(p, 3, t);
            let lifted: Vec<(Monomial, u64)> = a
                .terms()
                .iter()
                .filter(|(m, _)| m.degree() >= 2 * (c - k as u64))
                .map(|(m, coef)| {
                    let mut e = vec![k as u32];
                    e.extend((0..3).map(|i| m.exp(i)));
                    (Monomial::from_exponents(&e), *coef)
                })
                .collect();
            f = &f + &Polynomial::from_terms(r.field, 4, lifted);
        }
        let h = Hypersurface::coordinate(&r, 0);
        let s = ChartState::new(r.clone(), vec![f.clone()]);
        let spec = BlowupSpec::point(4, chart);
        let weak = s.blowup(&spec, TransformKind::Weak).unwrap();
        prop_assert_eq!(weak.order().unwrap(), c);
        let before = coefficient_ideal(&[f], &h).unwrap();
        let after = coefficient_ideal(weak.ideal(), &h).unwrap();
        let cf: u64 = (1..=c).product();
        let mut div = Monomial::one();
        div.set_exp(chart, cf as u32);
        let mut controlled: Vec<Polynomial> = before
            .iter()
            .map(|j| {
                let total = j.monomial_substitute(&[0, 1, 2, 3], chart);
                assert!(div.divides(&total.monomial_gcd(&[chart])));
                total.div_monomial(&div)
            })
            .collect();
        let mut after = after;
        controlled.sort_by(blowup_core::ridge::canonical_cmp);
        after.sort_by(blowup_core::ridge::canonical_cmp);
        prop_assert_eq!(controlled, after);
    }
}

/// Homogeneous polynomials built from random additive forms.
fn additive_inputs() -> impl Strategy<Value = (u64, Vec<AdditiveForm>, Vec<Polynomial>)> {
    (prop::sample::select(vec![2u64, 3]), 1usize..=2).prop_flat_map(|(p, r)| {
        let max_level = if p == 2 { 2u32 } else { 1 };
        let form = (0..=max_level, prop::collection::vec(0..p, 3))
            .prop_filter("nonzero form", |(_, c)| c.iter().any(|&x| x != 0))
            .prop_map(|(level, coeffs)| AdditiveForm { level, coeffs });
        (
            Just(p),
            prop::collection::vec(form, r),
            prop::collection::vec(prop::collection::vec((0u32..=3, 1..p), r), 1..=2),
        )
            .prop_map(move |(p, forms, products)| {
                let field = FieldSpec::new(p).unwrap();
                let polys: Vec<Polynomial> = forms.iter().map(|f| f.to_poly(field)).collect();
                // One product of forms per generator, truncated to its top degree so that
                // the ideal is homogeneous.
                let gens = products
                    .iter()
                    .map(|ks| {
                        let mut g = Polynomial::one(field, 3);
                        for ((k, _), q) in ks.iter().zip(&polys) {
                            g = &g * &q.pow(*k as u64);
                        }
                        g.scale(ks[0].1)
                    })
                    .filter(|g| !g.is_constant())
                    .collect();
                (p, forms, gens)
            })
    })
}

fn regenerates(basis: &RidgeBasis, gens: &[Polynomial]) -> bool {
    gens.iter()
        .all(|g| matches!(subalgebra_membership(g, basis), Some(Membership::Yes(_))))
}

/// Every normalized additive form in three variables up to `max_level`.
fn all_forms(p: u64, max_level: u32) -> Vec<AdditiveForm> {
    let mut out = Vec::new();
    for level in 0..=max_level {
        for coeffs in boxes(3, p as u32 - 1) {
            let coeffs: Vec<u64> = coeffs.iter().map(|&c| c as u64).collect();
            if coeffs.iter().find(|&&c| c != 0) == Some(&1) {
                out.push(AdditiveForm { level, coeffs });
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn ridge_regenerates_and_is_minimal((p, _forms, gens) in additive_inputs()) {
        prop_assume!(!gens.is_empty());
        let basis = ridge(&gens).unwrap();
        prop_assert!(basis.verified);
        for g in &gens {
            match subalgebra_membership(g, &basis) {
                Some(Membership::Yes(w)) => prop_assert_eq!(&expand_witness(&w, &basis), g),
                other => prop_assert!(false, "generator not in the ridge algebra: {:?}", other),
            }
        }
        prop_assume!(basis.method == RidgeMethod::Derivatives);
        let field = FieldSpec::new(p).unwrap();
        let top = gens.iter().map(|g| g.order().unwrap()).max().unwrap();
        let max_level = (0..).take_while(|&e| p.pow(e) <= top).last().unwrap();
        let candidates = all_forms(p, max_level);
        // No basis with fewer forms regenerates the ideal.
        let smaller: Vec<Vec<AdditiveForm>> = match basis.forms.len() {
            0 | 1 => vec![vec![]],
            2 => std::iter::once(vec![]).chain(candidates.iter().map(|f| vec![f.clone()])).collect(),
            _ => Vec::new(),
        };
        for forms in smaller {
            let trial = RidgeBasis { forms, ..RidgeBasis::empty(field, 3) };
            prop_assert!(!regenerates(&trial, &gens), "smaller basis {:?} also works", trial.forms);
        }
        // No form can be raised one Frobenius level.
        for i in 0..basis.forms.len() {
            let mut trial = basis.clone();
            trial.forms[i] = trial.forms[i].lift(1);
            prop_assert!(!regenerates(&trial, &gens), "form {} can be lifted", i);
        }
    }

    #[test]
    fn linear_ideals_have_their_span_as_ridge(
        p in prime(),
        rows in prop::collection::vec(prop::collection::vec(0u64..5, 3), 1..=3),
    ) {
        let field = FieldSpec::new(p).unwrap();
        let gens: Vec<Polynomial> = rows
            .iter()
            .map(|r| AdditiveForm { level: 0, coeffs: r.iter().map(|c| c % p).collect() }.to_poly(field))
            .filter(|g| !g.is_zero())
            .collect();
        prop_assume!(!gens.is_empty());
        let basis = ridge(&gens).unwrap();
        prop_assert!(basis.forms.iter().all(|f| f.level == 0));
        let mut span = Echelon::new(field, 3);
        for r in &rows {
            span.insert(&r.iter().map(|c| c % p).collect::<Vec<u64>>());
        }
        let rank = span.rank();
        prop_assert_eq!(basis.forms.len(), rank);
        prop_assert!(regenerates(&basis, &gens));
    }

    #[test]
    fn ridge_of_a_pth_power_is_never_larger(p in prime(), a in terms(3, 3, 3)) {
        let f = build(p, 3, &a);
        let top = f.total_degree().unwrap_or(0);
        let g = f.homogeneous_part(top);
        prop_assume!(!g.is_constant());
        let base = ridge(std::slice::from_ref(&g)).unwrap();
        let gp = g.pow(p);
        let lifted = ridge(std::slice::from_ref(&gp)).unwrap();
        prop_assert!(regenerates(&lifted, &[gp]));
        prop_assert!(lifted.forms.len() <= base.forms.len());
        if lifted.forms.len() == base.forms.len() {
            prop_assert!(lifted.profile() >= base.lift(1).profile());
        }
    }
}
