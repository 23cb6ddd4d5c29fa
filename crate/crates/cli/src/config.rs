//! Run configuration: one JSON document holding the initial data, the
//! truncation and an optional task list.

use std::path::Path;

use mrkit::{EpsLaurent, InitialData, Rational, XJet};
use serde_json::Value;

pub const DEFAULT_N_X: usize = 12;
pub const DEFAULT_N_XI: usize = 8;
pub const DEFAULT_EPS_CEILING: i64 = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Task {
    Resolvent { order: usize },
    Flows { order: usize },
    Omega { imax: usize, jmax: usize },
    Wave { xi_order: usize },
    Npoint { k: usize, imax: usize },
    VerifyAll,
}

impl Task {
    pub fn needs_wave(&self) -> bool {
        matches!(self, Task::Wave { .. } | Task::Npoint { .. } | Task::VerifyAll)
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// (X-power, ε-power, coefficient) triples.
    pub q: Vec<(usize, i64, Rational)>,
    pub r: Vec<(usize, i64, Rational)>,
    pub n_x: usize,
    pub n_xi: usize,
    pub eps_ceiling: i64,
    pub tasks: Vec<Task>,
    pub json: bool,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

fn as_usize(v: &Value, field: &str) -> Result<usize, ConfigError> {
    match v.as_u64() {
        Some(n) => Ok(n as usize),
        None => err(format!("field `{field}`: expected a non-negative integer, got {v}")),
    }
}

fn as_i64(v: &Value, field: &str) -> Result<i64, ConfigError> {
    match v.as_i64() {
        Some(n) => Ok(n),
        None => err(format!("field `{field}`: expected an integer, got {v}")),
    }
}

pub fn parse_rational(s: &str, field: &str) -> Result<Rational, ConfigError> {
    s.trim()
        .parse()
        .map_err(|_| ConfigError(format!("field `{field}`: `{s}` is not a rational of the form p/q")))
}

fn parse_triples(v: &Value, field: &str, n_x: usize) -> Result<Vec<(usize, i64, Rational)>, ConfigError> {
    let Some(list) = v.as_array() else {
        return err(format!("field `{field}`: expected a list of [X-power, ε-power, \"p/q\"] triples"));
    };
    let mut out = Vec::with_capacity(list.len());
    for (i, t) in list.iter().enumerate() {
        let f = format!("{field}[{i}]");
        let Some([x, e, c]) = t.as_array().map(Vec::as_slice).and_then(|s| <&[Value; 3]>::try_from(s).ok()) else {
            return err(format!("field `{f}`: expected [X-power, ε-power, \"p/q\"]"));
        };
        let x = as_usize(x, &format!("{f}[0]"))?;
        if x > n_x {
            return err(format!("field `{f}[0]`: X-power {x} exceeds N_X = {n_x}"));
        }
        let e = as_i64(e, &format!("{f}[1]"))?;
        let c = match c {
            Value::String(s) => parse_rational(s, &format!("{f}[2]"))?,
            Value::Number(n) if n.is_i64() => parse_rational(&n.to_string(), &format!("{f}[2]"))?,
            other => return err(format!("field `{f}[2]`: expected a \"p/q\" string, got {other}")),
        };
        out.push((x, e, c));
    }
    Ok(out)
}

fn parse_task(v: &Value, i: usize) -> Result<Task, ConfigError> {
    let f = format!("tasks[{i}]");
    let (name, obj) = match v {
        Value::String(s) => (s.as_str(), None),
        Value::Object(m) => match m.get("task").and_then(Value::as_str) {
            Some(s) => (s, Some(m)),
            None => return err(format!("field `{f}.task`: missing task name")),
        },
        _ => return err(format!("field `{f}`: expected a task name or object")),
    };
    let get = |key: &str, default: usize| -> Result<usize, ConfigError> {
        match obj.and_then(|m| m.get(key)) {
            Some(v) => as_usize(v, &format!("{f}.{key}")),
            None => Ok(default),
        }
    };
    Ok(match name {
        "resolvent" => Task::Resolvent { order: get("order", 8)? },
        "flows" => Task::Flows { order: get("order", 2)? },
        "omega" => Task::Omega { imax: get("imax", 4)?, jmax: get("jmax", 4)? },
        "wave" => Task::Wave { xi_order: get("xi_order", DEFAULT_N_XI)? },
        "npoint" => Task::Npoint { k: get("k", 2)?, imax: get("imax", 3)? },
        "verify-all" => Task::VerifyAll,
        other => return err(format!("field `{f}`: unknown task `{other}`")),
    })
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let doc: Value = serde_json::from_str(text)
            .map_err(|e| ConfigError(format!("line {} column {}: {e}", e.line(), e.column())))?;
        let Some(obj) = doc.as_object() else {
            return err("top level: expected a JSON object");
        };
        let trunc = obj.get("truncation");
        let tget = |key: &str| trunc.and_then(|t| t.get(key));
        let n_x = tget("n_x").map(|v| as_usize(v, "truncation.n_x")).transpose()?.unwrap_or(DEFAULT_N_X);
        let n_xi = tget("n_xi").map(|v| as_usize(v, "truncation.n_xi")).transpose()?.unwrap_or(DEFAULT_N_XI);
        let eps_ceiling = tget("eps_ceiling")
            .map(|v| as_i64(v, "truncation.eps_ceiling"))
            .transpose()?
            .unwrap_or(DEFAULT_EPS_CEILING);
        if n_x < 4 {
            return err(format!("field `truncation.n_x`: N_X = {n_x} is below the minimum 4"));
        }
        if n_xi < 4 {
            return err(format!("field `truncation.n_xi`: N_ξ = {n_xi} is below the minimum 4"));
        }
        let q = parse_triples(obj.get("q").ok_or(ConfigError("field `q`: missing".into()))?, "q", n_x)?;
        let r = parse_triples(obj.get("r").ok_or(ConfigError("field `r`: missing".into()))?, "r", n_x)?;
        let tasks = match obj.get("tasks") {
            None => Vec::new(),
            Some(Value::Array(list)) => list.iter().enumerate().map(|(i, t)| parse_task(t, i)).collect::<Result<_, _>>()?,
            Some(_) => return err("field `tasks`: expected a list"),
        };
        let json = match obj.get("output").map(|v| v.as_str()) {
            None | Some(Some("text")) => false,
            Some(Some("json")) => true,
            Some(_) => return err("field `output`: expected \"json\" or \"text\""),
        };
        let seed = obj.get("seed").map(|v| as_usize(v, "seed")).transpose()?.unwrap_or(0) as u64;
        let cfg = RunConfig { q, r, n_x, n_xi, eps_ceiling, tasks, json, seed };
        if cfg.tasks.iter().any(Task::needs_wave) {
            cfg.require_wave_data()?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
    }

    /// The X⁰ coefficient of q must be invertible for the wave construction.
    pub fn require_wave_data(&self) -> Result<(), ConfigError> {
        if jet(&self.q, self.n_x).at_zero().is_empty() {
            return err("field `q`: the X^0 coefficient of q vanishes, wave functions need it invertible");
        }
        Ok(())
    }

    pub fn initial_data(&self) -> InitialData<Rational> {
        InitialData::new(jet(&self.q, self.n_x), jet(&self.r, self.n_x), self.n_x, self.n_xi, self.eps_ceiling)
    }
}

fn jet(triples: &[(usize, i64, Rational)], n_x: usize) -> XJet<Rational> {
    let deg = triples.iter().map(|t| t.0).max().unwrap_or(0);
    let mut coeffs = vec![EpsLaurent::exact_zero(); deg + 1];
    for (x, e, c) in triples {
        coeffs[*x] = mrkit::Arith::add(&coeffs[*x], &EpsLaurent::monomial(c.clone(), *e));
    }
    XJet::from_coeffs(coeffs, n_x)
}
