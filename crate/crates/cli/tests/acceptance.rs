//! One line per acceptance criterion; exits non-zero if any fails.

use std::path::PathBuf;
use std::process::{Command, ExitCode, Output};

use mrkit::correlators::{compare, npoint_mr_data, npoint_wave_data, omega3_flow, symmetry_check, CorrelatorTable};
use mrkit::resolvent::{mr_coeffs, mr_coeffs_symbolic, mr_verify, nabla_check, omega_order, omega_table};
use mrkit::waves::{a_table, rp_check, wave_run, wave_suite};
use mrkit::{Arith, Data, DiffAlgebra, Eps, FlowTable, Jet, Poly, Rational, Ring};
use mrkit_cli::config::RunConfig;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn data_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn load(name: &str) -> Data {
    RunConfig::load(&data_file(name)).expect("shipped data file parses").initial_data()
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn report(rep: mrkit::Report) -> Outcome {
    match rep.first_failure() {
        None => Ok(()),
        Some(c) => Err(format!("{} at {}", c.name, c.locus.clone().unwrap_or_default())),
    }
}

fn symbolic_resolvent() -> Outcome {
    report(mr_verify::<Rational, Poly>(&Poly::q(0), &Poly::r(0), 8, None))
}

fn derivation_identity() -> Outcome {
    report(nabla_check::<Rational>(5, 5, None).map_err(|e| e.to_string())?)
}

fn two_point_table() -> Outcome {
    let bound = 4;
    let t = omega_table(&mr_coeffs_symbolic::<Rational>(omega_order(bound, bound), None), bound, bound)
        .map_err(|e| e.to_string())?;
    let (q, r) = (Poly::q(0), Poly::r(0));
    ensure(*t.get(0, 0) == q.mul(&r), || "Ω(0,0) ≠ qr".into())?;
    let om10 = Poly::q(1).mul(&r).sub(&q.mul(&Poly::r(1))).scale(&Eps::eps());
    ensure(*t.get(1, 0) == om10, || "Ω(1,0) ≠ ε(q_X r − q r_X)".into())?;
    ensure(t.asymmetry().is_none(), || format!("asymmetric at {:?}", t.asymmetry()))?;
    let flat = Data::polynomial(&[1, 2, -1], &[0], 12, 8, 8);
    let t0 = omega_table(&mr_coeffs(&flat.q, &flat.r, omega_order(bound, bound), None), bound, bound)
        .map_err(|e| e.to_string())?;
    ensure(t0.entries.values().all(Ring::is_zero), || "r ≡ 0 gives a nonzero entry".into())
}

fn flows() -> Outcome {
    let ft = FlowTable::<Rational>::new(2);
    ensure(ft.flow_poly(0) == (&Poly::q(1), &Poly::r(1)), || "flow 0 is not (q_X, r_X)".into())?;
    let c = ft.commutator_check(2, 6);
    ensure(c.passed, || format!("{} at {}", c.name, c.locus.clone().unwrap_or_default()))
}

fn wave_suites() -> Outcome {
    for name in ["DATA1.json", "DATA2.json"] {
        let d = load(name);
        ensure(d.n_x == 12 && d.n_xi == 8, || format!("{name} truncation is ({}, {})", d.n_x, d.n_xi))?;
        let run = wave_run(&d).map_err(|e| format!("{name}: {e}"))?;
        report(wave_suite(&run)).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(())
}

fn rank_one() -> Outcome {
    for name in ["DATA1.json", "DATA2.json"] {
        let d = load(name);
        let run = wave_run(&d.with_truncation(16, d.n_xi)).map_err(|e| e.to_string())?;
        let c = rp_check(&run.pot, &run.pair, 6, 8).map_err(|e| e.to_string())?;
        ensure(c.passed, || format!("{name}: {}", c.locus.clone().unwrap_or_default()))?;
    }
    Ok(())
}

fn affine_purity() -> Outcome {
    let d = load("DATA2.json");
    let run = wave_run(&d).map_err(|e| e.to_string())?;
    a_table(&run.pot, &run.pair, 6, None).map_err(|e| e.to_string())?;
    let flat = load("FLAT.json");
    let run = wave_run(&flat).map_err(|e| e.to_string())?;
    let t = a_table(&run.pot, &run.pair, 6, None).map_err(|e| e.to_string())?;
    ensure(t.is_zero(), || "constant q with r = 0 gives a nonzero affine entry".into())
}

fn agree(name: &str, a: &CorrelatorTable<Jet>, b: &CorrelatorTable<Jet>) -> Outcome {
    let c = compare(a, b);
    ensure(c.passed, || format!("{name}: {}", c.locus.clone().unwrap_or_default()))
}

fn npoint_routes() -> Outcome {
    for name in ["DATA1.json", "DATA2.json"] {
        let d = load(name);
        let e = |e: mrkit::Error| format!("{name}: {e}");
        let mr2 = npoint_mr_data(&d, 2, 3).map_err(e)?;
        let wave2 = npoint_wave_data(&d, 2, 3, None).map_err(e)?;
        let om = omega_table(&mr_coeffs(&d.q, &d.r, omega_order(3, 3), None), 3, 3).map_err(e)?;
        agree(&format!("{name} k=2 wave vs mr"), &wave2, &mr2)?;
        agree(&format!("{name} k=2 mr vs omega"), &mr2, &CorrelatorTable::from_omega(&om, 3))?;
        let mr3 = npoint_mr_data(&d, 3, 2).map_err(e)?;
        let wave3 = npoint_wave_data(&d, 3, 2, None).map_err(e)?;
        agree(&format!("{name} k=3 wave vs mr"), &wave3, &mr3)?;
        agree(&format!("{name} k=3 mr vs flow"), &mr3, &omega3_flow(&d, 2).map_err(e)?)?;
        let sym = symmetry_check(&mr3);
        ensure(sym.passed, || format!("{name} k=3 asymmetric at {}", sym.locus.clone().unwrap_or_default()))?;
    }
    Ok(())
}

fn mrkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrkit")).args(args).output().expect("binary runs")
}

fn negative_controls() -> Outcome {
    let data = data_file("DATA2.json");
    let data = data.to_str().expect("utf-8 path");
    let cases = [
        ("recursion-constant", "resolvent", "FAIL resolvent.consistency at j=1"),
        ("drop-diagonal", "resolvent", "FAIL nabla.identity at ν^-1 ξ^-1 entry (1,2)"),
        ("kernel-sign", "waves", "FAIL waves.affine_purity at ξ^-1 ν^0"),
        ("a-entry", "npoint", "FAIL npoint.k2.wave_vs_mr at index (0,0) at X^0 ε^0"),
    ];
    for (fault, suite, want) in cases {
        let out = mrkit(&["verify", suite, "--data", data, "--inject-fault", fault]);
        ensure(out.status.code() == Some(1), || format!("{fault}: exit {:?}", out.status.code()))?;
        let text = String::from_utf8_lossy(&out.stdout);
        ensure(text.lines().any(|l| l.starts_with(want)), || format!("{fault}: no line `{want}`"))?;
    }
    Ok(())
}

fn determinism() -> Outcome {
    let data = data_file("DATA2.json");
    let data = data.to_str().expect("utf-8 path");
    let a = mrkit(&["verify", "--data", data, "--json"]);
    let b = mrkit(&["verify", "--data", data, "--json"]);
    ensure(a.status.code() == Some(0), || format!("exit {:?}", a.status.code()))?;
    ensure(a.stdout == b.stdout, || "two runs differ".into())?;
    ensure(a.stdout.ends_with(b"\n") && a.stdout.len() > 100, || "empty report".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("symbolic resolvent suite at N=8", symbolic_resolvent),
        ("derivation identity to ν^-5, ξ^-5", derivation_identity),
        ("two-point table low entries, symmetry, r = 0", two_point_table),
        ("first flow is translation, flows commute", flows),
        ("wave suite on DATA1 and DATA2", wave_suites),
        ("rank-one resolvent to ξ^-6 at X^8", rank_one),
        ("affine purity to order 6, flat data gives zero", affine_purity),
        ("k-point routes agree for k = 2, 3 on DATA1 and DATA2", npoint_routes),
        ("negative controls exit 1 at the injected locus", negative_controls),
        ("verify report is deterministic", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(()) => println!("PASS criterion {}: {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
