use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use blowup_core::charts::{BlowupSpec, ChartState, TransformKind};
use blowup_core::descent::{build_flag, coefficient_ideal, FlagPlan, Hypersurface, SearchConfig};
use blowup_core::kangaroo::classify_roles;
use blowup_core::ridge::ridge;
use blowup_core::Ring;

fn polynomial_arithmetic(c: &mut Criterion) {
    let r = Ring::new(3, &["x", "y", "z", "w"]).unwrap();
    let f = r.poly("x^3+z^14*w^10*(z^6-w^6)+y^5*z^18+y^19*w");
    let g = r.poly("(x+y+z+w)^4");
    c.bench_function("poly/mul", |b| b.iter(|| black_box(&f) * black_box(&g)));
    c.bench_function("poly/translate", |b| {
        b.iter(|| black_box(&f).translate(2, 1))
    });
    c.bench_function("poly/hasse", |b| {
        b.iter(|| black_box(&f).hasse_derivative(&[0, 0, 3, 3]))
    });
}

fn blowups(c: &mut Criterion) {
    let r = Ring::new(3, &["x", "y", "z", "w", "v"]).unwrap();
    let s = ChartState::new(
        r.clone(),
        vec![r.poly("w^3+x*y^9*z^9*v+x^7*y^20*v+x^34*y^2*v+x^46*v")],
    );
    let spec = BlowupSpec::point(5, 0);
    c.bench_function("chart/point_blowup_weak", |b| {
        b.iter(|| black_box(&s).blowup(&spec, TransformKind::Weak).unwrap())
    });
}

fn coefficient_ideals(c: &mut Criterion) {
    let r = Ring::new(3, &["x", "y", "z", "w"]).unwrap();
    let gens = vec![r.poly("x^3+z^14*w^10*(z^6-w^6)")];
    let h = Hypersurface::coordinate(&r, 0);
    c.bench_function("descent/coefficient_ideal", |b| {
        b.iter(|| coefficient_ideal(black_box(&gens), &h).unwrap())
    });
}

fn ridges(c: &mut Criterion) {
    let r = Ring::new(2, &["x", "y", "z", "w"]).unwrap();
    let forms = vec![r.poly("(y^8+z^8)^2"), r.poly("x^4*y^12+x^4*z^12")];
    c.bench_function("ridge/additive", |b| {
        b.iter(|| ridge(black_box(&forms)).unwrap())
    });
}

fn flags(c: &mut Criterion) {
    let cfg = SearchConfig::default();
    let r = Ring::new(2, &["x", "y", "z", "w"]).unwrap();
    let surface = ChartState::new(r.clone(), vec![r.poly("x^2+w^3+y^25+y*z^16")]);
    c.bench_function("flag/search_char2", |b| {
        b.iter(|| build_flag(black_box(&surface), &FlagPlan::search(), &cfg).unwrap())
    });
    let r5 = Ring::new(3, &["x", "y", "z", "w", "v"]).unwrap();
    let seed = ChartState::new(
        r5.clone(),
        vec![r5.poly("w^3+y^6*z^3*v^2+x^9*y^8+x^18*y^2+x^18*v^2")],
    );
    c.bench_function("flag/search_1312_with_roles", |b| {
        b.iter(|| {
            let flag = build_flag(black_box(&seed), &FlagPlan::search(), &cfg).unwrap();
            classify_roles(&flag)
        })
    });
}

criterion_group!(
    benches,
    polynomial_arithmetic,
    blowups,
    coefficient_ideals,
    ridges,
    flags
);
criterion_main!(benches);
