use mrkit::{Arith, Eps, Jet, Rational, Ring, Scalar};
use mrkit_cli::config::{RunConfig, Task, DEFAULT_EPS_CEILING, DEFAULT_N_X, DEFAULT_N_XI};
use mrkit_cli::emit;
use serde_json::json;

fn parse_err(text: &str) -> String {
    RunConfig::parse(text).unwrap_err().0
}

#[test]
fn defaults_apply() {
    let cfg = RunConfig::parse(r#"{"q": [[0, 0, "1"]], "r": []}"#).unwrap();
    assert_eq!((cfg.n_x, cfg.n_xi, cfg.eps_ceiling), (DEFAULT_N_X, DEFAULT_N_XI, DEFAULT_EPS_CEILING));
    assert!(cfg.tasks.is_empty());
    assert!(!cfg.json);
    assert_eq!(cfg.seed, 0);
}

#[test]
fn triples_build_the_jet() {
    let cfg = RunConfig::parse(r#"{"q": [[0, 0, "1"], [2, -1, "-3/4"], [2, 0, 2]], "r": [[1, 1, "1/2"]]}"#).unwrap();
    let d = cfg.initial_data();
    let two = Eps::constant(Rational::from_i64(2));
    let x2 = Eps::monomial(Rational::from_ratio(-3, 4), -1).add(&two);
    assert_eq!(d.q.coeff(2), x2);
    assert_eq!(d.r.coeff(1), Eps::monomial(Rational::from_ratio(1, 2), 1));
    assert!(d.q.sub(&Jet::from_coeffs(vec![Eps::constant(Rational::from_i64(1)), Eps::exact_zero(), x2], 12)).is_zero());
}

#[test]
fn tasks_parse_as_names_or_objects() {
    let cfg = RunConfig::parse(
        r#"{"q": [[0, 0, "1"]], "r": [], "output": "json",
            "tasks": ["flows", {"task": "npoint", "k": 3, "imax": 1}, {"task": "omega", "imax": 2}]}"#,
    )
    .unwrap();
    assert!(cfg.json);
    assert_eq!(
        cfg.tasks,
        vec![Task::Flows { order: 2 }, Task::Npoint { k: 3, imax: 1 }, Task::Omega { imax: 2, jmax: 4 }]
    );
}

#[test]
fn malformed_input_is_located() {
    assert!(parse_err("{\n  \"q\": [,]\n}").starts_with("line 2 column"));
    assert!(parse_err(r#"{"q": [[0, 0, "1/0"]], "r": []}"#).contains("`q[0][2]`"));
    assert!(parse_err(r#"{"q": [[0, 0]], "r": []}"#).contains("`q[0]`"));
    assert!(parse_err(r#"{"q": [[13, 0, "1"]], "r": []}"#).contains("exceeds N_X = 12"));
    assert!(parse_err(r#"{"q": [], "r": [], "truncation": {"n_x": 3}}"#).contains("truncation.n_x"));
    assert!(parse_err(r#"{"q": []}"#).contains("`r`"));
    assert!(parse_err(r#"{"q": [], "r": [], "tasks": ["nope"]}"#).contains("unknown task"));
}

#[test]
fn wave_tasks_need_invertible_q() {
    let err = parse_err(r#"{"q": [[1, 0, "1"]], "r": [], "tasks": ["wave"]}"#);
    assert!(err.contains("X^0 coefficient of q"));
    assert!(RunConfig::parse(r#"{"q": [[1, 0, "1"]], "r": [], "tasks": ["flows"]}"#).is_ok());
}

#[test]
fn eps_values_encode_compactly() {
    assert_eq!(emit::eps(&Eps::constant(Rational::from_ratio(-1, 2))), json!("-1/2"));
    assert_eq!(emit::eps(&Eps::monomial(Rational::from_i64(3), 1)), json!({"ε^1": "3"}));
    let truncated = Eps::constant(Rational::from_i64(1)).add(&Eps::monomial(Rational::from_i64(2), 3)).with_ceiling(4);
    assert_eq!(emit::eps(&truncated), json!({"ε^0": "1", "ε^3": "2", "O": "ε^5"}));
}

#[test]
fn jets_encode_their_window() {
    let j = Jet::from_rationals(vec![Rational::from_i64(1), Rational::from_i64(0), Rational::from_i64(-1)], 12);
    assert_eq!(emit::xjet(&j), json!({"X^0": "1", "X^2": "-1"}));
    let inv = Jet::from_rationals(vec![Rational::from_i64(1), Rational::from_i64(1)], 3).invert(8).unwrap();
    assert_eq!(emit::xjet(&inv), json!({"X^0": "1", "X^1": "-1", "X^2": "1", "X^3": "-1", "O": "X^4"}));
}
