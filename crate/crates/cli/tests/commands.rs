use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn oddsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oddsym"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn with_file(cmd: &str, name: &str, extra: &[&str]) -> Output {
    let path = fixture(name);
    let mut args = vec![cmd, "--file", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    oddsym(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sl2_is_poisson() {
    let o = with_file("check-poisson", "sl2.ini", &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS {π, π} = 0"));
}

#[test]
fn perturbed_sl2_fails_with_witness() {
    let o = with_file("check-poisson", "perturbed.ini", &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL {π, π} = 0: witness {π, π} = -2*θ3*p_θ1*p_θ2*p_θ3"));

    let o = with_file("check-deformation", "perturbed.ini", &["--samples", "20"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL associativity and d² = 0: witness"));
}

#[test]
fn malformed_file_is_a_parse_error() {
    let o = with_file("check-poisson", "malformed.ini", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));
    assert_eq!(with_file("check-poisson", "missing.ini", &[]).status.code(), Some(2));
    assert_eq!(oddsym(&["normalize"]).status.code(), Some(2));
}

#[test]
fn non_transversal_composition_is_a_domain_error() {
    let o = with_file("compose", "tangent.ini", &[]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn normalize_prints_canonical_forms() {
    let o = with_file("normalize", "darboux.ini", &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "-1 + x * d(xi)\n");
    // d(x) d(ξ) x² = x² d(x) d(ξ) − 2x d(x), from [x², dξ] = 2x
    let o = with_file("normalize", "darboux.ini", &["--expr", "d(x)*d(xi)*x^2"]);
    assert_eq!(stdout(&o), "-2*x * d(x) + x^2 * d(x) d(xi)\n");
}

#[test]
fn scalings_compose_to_their_product() {
    let o = with_file("compose", "relations.ini", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("((-1/6*ξ + ξ') * delta(x - 1/6*x'))"));
}

#[test]
fn example_commands_pass() {
    for args in [
        vec!["crossed-product"],
        vec!["demo-groupoid", "--n", "1", "--max-filtration", "1"],
        vec!["fourier-check", "--samples", "20"],
        vec!["bv-verify", "--samples", "20", "--seed", "3"],
    ] {
        let o = oddsym(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}\n{}", stdout(&o));
    }
    let sl2 = fixture("sl2.ini");
    let o = oddsym(&["crossed-product", "--file", sl2.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    let a = oddsym(&["bv-verify", "--samples", "10", "--seed", "11"]);
    let b = oddsym(&["bv-verify", "--samples", "10", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn only_text_reports() {
    assert_eq!(oddsym(&["check-poisson", "--report", "json"]).status.code(), Some(2));
    let sl2 = fixture("sl2.ini");
    let o = oddsym(&["check-poisson", "--report=text", "--file", sl2.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}
