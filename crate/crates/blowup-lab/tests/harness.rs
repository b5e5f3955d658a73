use blowup_lab::harness::{parse_family, search, FlagPolicy, HarnessOptions, PointPolicy};
use blowup_lab::LabError;

const SMALL: &str = "\
# two members and a template
name = small
char = 3
vars = x,y,z,w
seed a = x^3+z^13-z*w^18
template t = x^3+y^{e}*z^{f}   # expands row-major
range e = 4..5
range f = 7,8
points = exceptional 1
beam = 6
";

fn opts(depth: usize, budget: u64, jobs: usize) -> HarnessOptions {
    HarnessOptions {
        depth,
        budget,
        jobs,
    }
}

#[test]
fn templates_expand_in_declaration_order() {
    let f = parse_family(SMALL).unwrap();
    let names: Vec<&str> = f.members.iter().map(|m| m.name.as_str()).collect();
    assert_eq!(
        names,
        ["a", "t[e=4,f=7]", "t[e=4,f=8]", "t[e=5,f=7]", "t[e=5,f=8]"]
    );
    assert_eq!(f.ring.show(&f.members[4].ideal[0]), "x^3+y^5*z^8");
    assert_eq!(f.points, PointPolicy::Exceptional { max_moved: 1 });
    assert_eq!(f.flag, FlagPolicy::Search);
    assert_eq!(f.beam, Some(6));
}

fn config_error(text: &str) -> (usize, String) {
    match parse_family(text) {
        Err(LabError::Config { line, message }) => (line, message),
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn config_errors_name_the_line() {
    let (line, msg) = config_error("char = 3\nvars = x\ncolour = blue\n");
    assert_eq!(line, 3);
    assert!(msg.contains("unknown key `colour`"), "{msg}");

    let (line, msg) = config_error("char = 3\nvars = x\nrange a = 1..2\n");
    assert_eq!(line, 3);
    assert!(msg.contains("must follow a `template`"), "{msg}");

    let (line, msg) =
        config_error("char = 3\nvars = x,y\ntemplate t = x^{a}+y^{b}\nrange a = 1..2\n");
    assert_eq!(line, 3);
    assert!(msg.contains("{b}"), "{msg}");

    let (_, msg) = config_error("vars = x\nseed s = x^2\n");
    assert!(msg.contains("missing `char`"), "{msg}");

    let (line, msg) = config_error("char = 3\nvars = x\nseed s = x^2+q\n");
    assert_eq!(line, 3);
    assert!(msg.contains('q'), "{msg}");
}

#[test]
fn empty_family_gives_an_empty_catalog() {
    let f = parse_family("name = none\nchar = 2\nvars = x,y\n").unwrap();
    let c = search(&f, &opts(4, 100, 2));
    assert!(c.members.is_empty());
    assert!(c.pairs.is_empty());
    assert!(!c.partial());
    assert!(c.to_text().ends_with("pairs=0\nstatus=complete\n"));
}

#[test]
fn ridge_of_degree_one_gives_no_phenomena() {
    // Every member has a degree-1 ridge generator in its tangent cone, so
    // precondition (a-refined) fails on every transition.
    let text = "\
char = 3
vars = x,y,z,w
template s = x^2*y+z^{a}+w^7
range a = 5..6
points = exceptional 1
";
    let f = parse_family(text).unwrap();
    let c = search(&f, &opts(3, 400, 1));
    assert!(c.pairs.is_empty());
    assert!(
        c.members.iter().all(|m| m.phenomena == 0),
        "{}",
        c.to_text()
    );
}

#[test]
fn catalog_does_not_depend_on_the_worker_count() {
    let f = parse_family(SMALL).unwrap();
    let one = search(&f, &opts(3, 150, 1)).to_text();
    let three = search(&f, &opts(3, 150, 3)).to_text();
    assert_eq!(one, three);
}

#[test]
fn exhausted_budget_marks_the_catalog_partial() {
    let f = parse_family(SMALL).unwrap();
    let c = search(&f, &opts(6, 10, 1));
    assert!(c.partial());
    assert!(c.members.iter().all(|m| m.evaluations <= m.budget));
    assert_eq!(c.members.iter().map(|m| m.budget).sum::<u64>(), 10);
    assert!(c.to_text().ends_with("status=partial (budget exhausted)\n"));
}

#[test]
fn members_of_order_one_are_skipped() {
    let f = parse_family("char = 3\nvars = x,y\nseed smooth = x+y^2\n").unwrap();
    let c = search(&f, &opts(3, 10, 1));
    assert_eq!(c.members[0].nodes, 0);
    assert!(c.members[0]
        .note
        .as_deref()
        .unwrap()
        .contains("nothing to blow up"));
}
