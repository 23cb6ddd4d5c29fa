use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mrkit::correlators::{compare, npoint_mr_data, npoint_wave_data, CorrelatorTable};
use mrkit::resolvent::{mr_coeffs, mr_coeffs_symbolic, mr_matrix, omega_order, omega_table, FlowTable};
use mrkit::waves::{a_table, wave_run};
use mrkit::{Error, Fault, InitialData, Rational, Report};
use mrkit_cli::config::{RunConfig, Task};
use mrkit_cli::emit;
use mrkit_cli::verify::{self, Options};
use serde_json::{json, Map, Value};

#[derive(Parser, Debug)]
#[command(name = "mrkit", version, about = "Exact matrix-resolvent and wave-function computations for AKNS")]
struct Cli {
    /// Run configuration (initial data and truncation) as JSON.
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    /// Write output to FILE instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the randomized checks of `verify all`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Deliberately corrupt one step of the computation.
    #[arg(long, global = true, hide = true)]
    inject_fault: Option<String>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Resolvent levels A_j, B_j, C_j.
    Resolvent {
        #[arg(long, default_value_t = 8)]
        order: usize,
        /// Differential polynomials in q, r instead of values on the data.
        #[arg(long)]
        symbolic: bool,
    },
    /// Flow polynomials (P^q_j, P^r_j) for j ≤ order.
    Flows {
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
    /// Two-point functions Ω_{i,j}.
    Omega {
        #[arg(long, default_value_t = 4)]
        imax: usize,
        #[arg(long, default_value_t = 4)]
        jmax: usize,
        #[arg(long)]
        symbolic: bool,
    },
    /// Wave pair, normalization and affine table.
    Wave {
        #[arg(long)]
        xi_order: Option<usize>,
    },
    /// k-point correlation functions.
    Npoint {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        imax: usize,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 8)]
        order: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        imax: Option<usize>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Mr,
    Wave,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Resolvent,
    Waves,
    Npoint,
    All,
}

enum Failure {
    Mismatch(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::IdentityViolation { .. } => Failure::Mismatch(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

struct Output {
    json: Value,
    text: String,
    passed: bool,
}

impl Output {
    fn data(json: Value, text: String) -> Self {
        Output { json, text, passed: true }
    }

    fn report(r: &Report) -> Self {
        Output { json: emit::report(r), text: emit::report_text(r), passed: r.passed() }
    }
}

struct Ctx {
    config: Option<RunConfig>,
    fault: Option<Fault>,
    seed: u64,
}

impl Ctx {
    fn config(&self) -> Result<&RunConfig, Failure> {
        self.config.as_ref().ok_or_else(|| Failure::Input("this command needs --data FILE".into()))
    }

    fn data(&self) -> Result<InitialData<Rational>, Failure> {
        Ok(self.config()?.initial_data())
    }

    fn wave_data(&self) -> Result<InitialData<Rational>, Failure> {
        let cfg = self.config()?;
        cfg.require_wave_data().map_err(|e| Failure::Input(e.to_string()))?;
        Ok(cfg.initial_data())
    }
}

fn resolvent(ctx: &Ctx, order: usize, symbolic: bool) -> Result<Output, Failure> {
    if symbolic {
        let mr = mr_coeffs_symbolic::<Rational>(order, ctx.fault);
        let text = (0..=order)
            .map(|j| format!("A{j} = {}\nB{j} = {}\nC{j} = {}\n", mr.a[j], mr.b[j], mr.c[j]))
            .collect();
        return Ok(Output::data(emit::mr_data(&mr, emit::diffpoly), text));
    }
    let d = ctx.data()?;
    let mr = mr_coeffs(&d.q, &d.r, order, ctx.fault);
    let rm = mr_matrix(&mr);
    let text = format!("R11 = {}\nR12 = {}\nR21 = {}\nR22 = {}\n", rm.a, rm.b, rm.c, rm.d);
    Ok(Output::data(emit::mr_data(&mr, emit::xjet), text))
}

fn flows(order: usize) -> Output {
    let table = FlowTable::<Rational>::new(order);
    let mut m = Map::new();
    let mut text = String::new();
    for j in 0..=order {
        let (pq, pr) = table.flow_poly(j);
        m.insert(j.to_string(), json!({ "q": emit::diffpoly(pq), "r": emit::diffpoly(pr) }));
        text.push_str(&format!("P{j}^q = {pq}\nP{j}^r = {pr}\n"));
    }
    Output::data(Value::Object(m), text)
}

fn omega(ctx: &Ctx, imax: usize, jmax: usize, symbolic: bool) -> Result<Output, Failure> {
    let order = omega_order(imax, jmax);
    if symbolic {
        let t = omega_table(&mr_coeffs_symbolic::<Rational>(order, ctx.fault), imax, jmax)?;
        let text = t.entries.iter().map(|((i, j), c)| format!("Ω({i},{j}) = {c}\n")).collect();
        return Ok(Output::data(emit::omega(&t, emit::diffpoly), text));
    }
    let d = ctx.data()?;
    let t = omega_table(&mr_coeffs(&d.q, &d.r, order, ctx.fault), imax, jmax)?;
    let text = t.entries.iter().map(|((i, j), c)| format!("Ω({i},{j}) = {c}\n")).collect();
    Ok(Output::data(emit::omega(&t, emit::xjet), text))
}

fn wave(ctx: &Ctx, xi_order: Option<usize>) -> Result<Output, Failure> {
    let mut d = ctx.wave_data()?;
    if let Some(n) = xi_order {
        d = d.with_truncation(d.n_x, n);
    }
    let run = wave_run(&d)?;
    let l = d.n_xi.saturating_sub(1);
    let a = a_table(&run.pot, &run.pair, l, ctx.fault)?;
    let mut m = emit::wave_pair(&run.pair);
    m.insert("a_table".into(), emit::a_table(&a));
    let mut text = format!("phi_A = {}\nphi_B = {}\nd = {}\n", run.pair.phi_a, run.pair.phi_b, run.pair.d);
    if let Some(mult) = &run.pair.multiplier {
        text.push_str(&format!("multiplier = {mult}\n"));
    }
    for ((i, j), c) in &a.entries {
        text.push_str(&format!("A({i},{j}) = {c}\n"));
    }
    Ok(Output::data(Value::Object(m), text))
}

fn table_text(t: &CorrelatorTable<mrkit::XJet<Rational>>) -> String {
    t.entries
        .iter()
        .map(|(idx, c)| {
            let parts: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
            format!("{}({}) = {c}\n", t.source, parts.join(","))
        })
        .collect()
}

fn npoint(ctx: &Ctx, k: usize, imax: usize, method: Method) -> Result<Output, Failure> {
    if !(2..=4).contains(&k) {
        return Err(Failure::Input(format!("--k must lie in 2..=4, got {k}")));
    }
    let d = if method == Method::Mr { ctx.data()? } else { ctx.wave_data()? };
    let mut m = Map::new();
    let mut text = String::new();
    let mut passed = true;
    let mr = if method != Method::Wave { Some(npoint_mr_data(&d, k, imax)?) } else { None };
    let wave = if method != Method::Mr { Some(npoint_wave_data(&d, k, imax, ctx.fault)?) } else { None };
    for t in mr.iter().chain(wave.iter()) {
        m.insert(t.source.to_string(), emit::correlator(t));
        text.push_str(&table_text(t));
    }
    if let (Some(a), Some(b)) = (&mr, &wave) {
        let c = compare(b, a);
        passed = c.passed;
        m.insert("agree".into(), Value::Bool(c.passed));
        text.push_str(&emit::report_text(&Report { checks: vec![c] }));
    }
    Ok(Output { json: Value::Object(m), text, passed })
}

fn run_verify(ctx: &Ctx, suite: Suite, order: usize, k: Option<usize>, imax: Option<usize>) -> Result<Output, Failure> {
    let opts = Options { fault: ctx.fault, order, k, imax, seed: ctx.seed, ..Options::default() };
    let rep = match suite {
        Suite::Resolvent => verify::resolvent_suite(ctx.config.as_ref().map(|c| c.initial_data()).as_ref(), &opts)?,
        Suite::Waves => verify::waves_suite(&ctx.wave_data()?, &opts)?,
        Suite::Npoint => verify::npoint_suite(&ctx.wave_data()?, &opts)?,
        Suite::All => verify::all(&ctx.wave_data()?, &opts)?,
    };
    Ok(Output::report(&rep))
}

/// Runs the task list of the configuration in order.
fn run_tasks(ctx: &Ctx) -> Result<Output, Failure> {
    let cfg = ctx.config()?;
    if cfg.tasks.is_empty() {
        return Err(Failure::Input("no subcommand given and the configuration lists no tasks".into()));
    }
    let mut results = Vec::new();
    let mut text = String::new();
    let mut passed = true;
    for task in &cfg.tasks {
        let (name, out) = match *task {
            Task::Resolvent { order } => ("resolvent", resolvent(ctx, order, false)?),
            Task::Flows { order } => ("flows", flows(order)),
            Task::Omega { imax, jmax } => ("omega", omega(ctx, imax, jmax, false)?),
            Task::Wave { xi_order } => ("wave", wave(ctx, Some(xi_order))?),
            Task::Npoint { k, imax } => ("npoint", npoint(ctx, k, imax, Method::Both)?),
            Task::VerifyAll => ("verify-all", run_verify(ctx, Suite::All, 8, None, None)?),
        };
        passed &= out.passed;
        results.push(json!({ "task": name, "result": out.json }));
        text.push_str(&format!("== {name}\n{}", out.text));
    }
    Ok(Output { json: Value::Array(results), text, passed })
}

fn run(cli: &Cli, config: Option<RunConfig>) -> Result<Output, Failure> {
    let fault = match &cli.inject_fault {
        Some(s) => Some(Fault::parse(s).ok_or_else(|| Failure::Input(format!("unknown fault `{s}`")))?),
        None => None,
    };
    let seed = cli.seed.or(config.as_ref().map(|c| c.seed)).unwrap_or(0);
    let ctx = Ctx { config, fault, seed };
    match &cli.command {
        None => run_tasks(&ctx),
        Some(Command::Resolvent { order, symbolic }) => resolvent(&ctx, *order, *symbolic),
        Some(Command::Flows { order }) => Ok(flows(*order)),
        Some(Command::Omega { imax, jmax, symbolic }) => omega(&ctx, *imax, *jmax, *symbolic),
        Some(Command::Wave { xi_order }) => wave(&ctx, *xi_order),
        Some(Command::Npoint { k, imax, method }) => npoint(&ctx, *k, *imax, *method),
        Some(Command::Verify { suite, order, k, imax }) => run_verify(&ctx, *suite, *order, *k, *imax),
    }
}

fn write(cli: &Cli, body: &str) -> Result<(), String> {
    match &cli.out {
        Some(p) => std::fs::write(p, body).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let config = match cli.data.as_ref().map(|p| RunConfig::load(p)).transpose() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("mrkit: {e}");
            return ExitCode::from(2);
        }
    };
    let json = cli.json || config.as_ref().is_some_and(|c| c.json);
    match run(&cli, config) {
        Ok(out) => {
            let body = if json { emit::to_bytes(&out.json) } else { out.text };
            if let Err(e) = write(&cli, &body) {
                eprintln!("mrkit: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if out.passed { 0 } else { 1 })
        }
        Err(Failure::Mismatch(m)) => {
            eprintln!("mrkit: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("mrkit: {m}");
            ExitCode::from(2)
        }
    }
}
