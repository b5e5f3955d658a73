use blowup_core::charts::{BlowupSpec, ChartState, TransformKind};
use blowup_core::descent::{build_flag, ratio_text, FlagPlan, Hypersurface, SearchConfig};
use blowup_core::kangaroo::{classify_roles, detect_phenomenon, TransitionRecord};
use blowup_core::Ring;

fn point_blowup(s: &ChartState, chart: &str) -> ChartState {
    let spec = BlowupSpec::point(s.nvars(), s.ring().var_index(chart).unwrap());
    s.blowup(&spec, TransformKind::Weak).unwrap()
}

#[test]
fn weak_transforms_of_example_one() {
    // x^3+z^13-z*w^18 blown up at the origin in the charts w, z, w; every
    // transform here was worked out by hand.
    let r = Ring::new(3, &["x", "y", "z", "w"]).unwrap();
    let s = ChartState::new(r.clone(), vec![r.poly("x^3+z^13-z*w^18")]);
    let s1 = point_blowup(&s, "w");
    assert_eq!(s1.ideal(), [r.poly("x^3+z^13*w^10-z*w^16")]);
    let s2 = point_blowup(&s1, "z");
    assert_eq!(s2.ideal(), [r.poly("x^3+z^20*w^10-z^14*w^16")]);
    let s3 = point_blowup(&s2, "w");
    assert_eq!(s3.ideal(), [r.poly("x^3+z^20*w^27-z^14*w^27")]);
    assert_eq!(s3.exceptional_vars(), [2, 3]);

    // At z = 1 the tail is w^27*(z+1)^14*((z+1)^6-1) = w^27*(z+1)^14*z^3*(z^3-1).
    let s4 = s3.translate(2, 1);
    assert_eq!(s4.order().unwrap(), 3);
    let tail = r.poly("w^27*(z+1)^14*z^3*(z^3-1)");
    assert_eq!(s4.ideal(), [r.poly("x^3").try_add(&tail).unwrap()]);
}

#[test]
fn translation_agrees_with_substitution() {
    let r = Ring::new(5, &["x", "y", "z"]).unwrap();
    let f = r.poly("x^7*y^2-3*x^5*z+y^9+2");
    for c in [1i64, 2, 4] {
        let shifted = r.poly(&format!("x+{c}"));
        let by_substitution = f.substitute(0, &shifted);
        assert_eq!(f.translate(0, r.field.reduce(c)), by_substitution);
        assert_eq!(f.shift_by(0, &r.constant(c)), by_substitution);
    }
    let h = r.poly("y*z^2-y^3");
    assert_eq!(
        f.shift_by(0, &h),
        f.substitute(0, &r.var(0).try_add(&h).unwrap())
    );
}

#[test]
fn first_transition_of_1312_under_inheritance() {
    // Blowing up the origin of the 1312 seed in the x-chart and inheriting
    // the flag keeps every hypersurface and gives the roles active, neutral,
    // dormant, neutral with no phenomenon.
    let r = Ring::new(3, &["x", "y", "z", "w", "v"]).unwrap();
    let cfg = SearchConfig::default();
    let s = ChartState::new(
        r.clone(),
        vec![r.poly("w^3+y^6*z^3*v^2+x^9*y^8+x^18*y^2+x^18*v^2")],
    );
    let pre_flag = build_flag(&s, &FlagPlan::search(), &cfg).unwrap();
    assert_eq!(
        pre_flag.nested_names(&r),
        ["V(w)", "V(w,v)", "V(w,v,z)", "V(w,v,z,y)"]
    );

    let spec = BlowupSpec::point(5, 0);
    let post = s.blowup(&spec, TransformKind::Weak).unwrap();
    let seeds: Vec<Option<Hypersurface>> = pre_flag
        .levels
        .iter()
        .map(|l| l.hypersurface.transform_blowup(&spec))
        .collect();
    let plan = FlagPlan {
        inherited: seeds,
        inherit: true,
        ..FlagPlan::default()
    };
    let post_flag = build_flag(&post, &plan, &cfg).unwrap();
    assert_eq!(post_flag.nested_names(&r), pre_flag.nested_names(&r));
    assert_eq!(ratio_text(&post_flag.invariant()), "(3, 11/3, 1, 1, 0)");
    let roles: Vec<String> = classify_roles(&post_flag)
        .iter()
        .map(|c| c.role.to_string())
        .collect();
    assert_eq!(roles, ["active", "neutral", "dormant", "neutral"]);

    let t = TransitionRecord {
        pre_state: s,
        pre_flag,
        blowup: spec,
        kind: TransformKind::Weak,
        steps: vec![],
        post_state: post,
        post_flag,
    };
    assert_eq!(detect_phenomenon(&t).level, None);
}
