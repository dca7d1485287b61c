//! Strict JSON run configuration.
//!
//! ```json
//! {"drift": 2, "sigma2": 0,
//!  "jumps": {"intensity": 1, "mixture": [{"weight": 1, "rate": 1}]},
//!  "run": {"q": 0.1, "b": 2, "x0": 1}}
//! ```
//!
//! `jumps` and `run` are optional; any other key is rejected.

use std::path::{Path, PathBuf};

use levyfluct::{Backend, JumpComponent, ProcessSpec};
use serde_json::{Map, Number, Value};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("malformed JSON: {0}")]
    Parse(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        reason: reason.into(),
    }
}

/// Command parameters that may come from the config file; flags override them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunParams {
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub theta: Option<f64>,
    pub x0: Option<f64>,
    pub b: Option<f64>,
    pub backend: Option<Backend>,
    pub dt: Option<f64>,
    pub n_paths: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub process: ProcessSpec<f64>,
    pub run: RunParams,
}

const PROCESS_KEYS: [&str; 4] = ["drift", "sigma2", "jumps", "run"];
const JUMP_KEYS: [&str; 2] = ["intensity", "mixture"];
const COMPONENT_KEYS: [&str; 2] = ["weight", "rate"];
const RUN_KEYS: [&str; 10] = [
    "q", "alpha", "theta", "x0", "b", "backend", "dt", "n_paths", "seed", "out",
];

fn object<'a>(v: &'a Value, key: &str) -> Result<&'a Map<String, Value>, ConfigError> {
    v.as_object()
        .ok_or_else(|| invalid(key, "expected an object"))
}

fn reject_unknown(
    map: &Map<String, Value>,
    allowed: &[&str],
    prefix: &str,
) -> Result<(), ConfigError> {
    match map.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(ConfigError::UnknownKey(format!("{prefix}{k}"))),
        None => Ok(()),
    }
}

fn number(map: &Map<String, Value>, key: &str, path: &str) -> Result<Option<f64>, ConfigError> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| invalid(path, "expected a number")),
    }
}

fn required(map: &Map<String, Value>, key: &str, path: &str) -> Result<f64, ConfigError> {
    number(map, key, path)?.ok_or_else(|| invalid(path, "missing"))
}

fn integer(map: &Map<String, Value>, key: &str, path: &str) -> Result<Option<u64>, ConfigError> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .map(Some)
            .ok_or_else(|| invalid(path, "expected a nonnegative integer")),
    }
}

fn parse_process(root: &Map<String, Value>) -> Result<ProcessSpec<f64>, ConfigError> {
    let drift = required(root, "drift", "drift")?;
    let sigma2 = required(root, "sigma2", "sigma2")?;
    let (intensity, mixture) = match root.get("jumps") {
        None => (0.0, Vec::new()),
        Some(j) => {
            let j = object(j, "jumps")?;
            reject_unknown(j, &JUMP_KEYS, "jumps.")?;
            let intensity = required(j, "intensity", "jumps.intensity")?;
            let list = j
                .get("mixture")
                .ok_or_else(|| invalid("jumps.mixture", "missing"))?
                .as_array()
                .ok_or_else(|| invalid("jumps.mixture", "expected an array"))?;
            let mut mixture = Vec::with_capacity(list.len());
            for (i, c) in list.iter().enumerate() {
                let path = format!("jumps.mixture[{i}]");
                let c = object(c, &path)?;
                reject_unknown(c, &COMPONENT_KEYS, &format!("{path}."))?;
                mixture.push(JumpComponent::new(
                    required(c, "weight", &format!("{path}.weight"))?,
                    required(c, "rate", &format!("{path}.rate"))?,
                ));
            }
            (intensity, mixture)
        }
    };
    ProcessSpec::new(drift, sigma2, intensity, mixture).map_err(|e| {
        let key = match &e {
            levyfluct::Error::BadMixture(_) => "jumps.mixture",
            levyfluct::Error::NegativeParameter { name, .. } => match *name {
                "sigma2" => "sigma2",
                "jump intensity" => "jumps.intensity",
                other => other,
            },
            levyfluct::Error::Domain(_) => "drift",
            _ => "process",
        };
        invalid(key, e.to_string())
    })
}

fn parse_run(v: &Value) -> Result<RunParams, ConfigError> {
    let m = object(v, "run")?;
    reject_unknown(m, &RUN_KEYS, "run.")?;
    let backend = match m.get("backend") {
        None => None,
        Some(Value::String(s)) => Some(
            s.parse()
                .map_err(|_| invalid("run.backend", format!("unknown backend {s:?}")))?,
        ),
        Some(_) => return Err(invalid("run.backend", "expected a string")),
    };
    let out = match m.get("out") {
        None => None,
        Some(Value::String(s)) => Some(PathBuf::from(s)),
        Some(_) => return Err(invalid("run.out", "expected a string")),
    };
    let n_paths = integer(m, "n_paths", "run.n_paths")?.map(|n| n as usize);
    Ok(RunParams {
        q: number(m, "q", "run.q")?,
        alpha: number(m, "alpha", "run.alpha")?,
        theta: number(m, "theta", "run.theta")?,
        x0: number(m, "x0", "run.x0")?,
        b: number(m, "b", "run.b")?,
        backend,
        dt: number(m, "dt", "run.dt")?,
        n_paths,
        seed: integer(m, "seed", "run.seed")?,
        out,
    })
}

/// Parses configuration text.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let root: Value = serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let map = object(&root, "<root>")?;
    reject_unknown(map, &PROCESS_KEYS, "")?;
    let process = parse_process(map)?;
    let run = map
        .get("run")
        .map(parse_run)
        .transpose()?
        .unwrap_or_default();
    Ok(RunConfig { process, run })
}

pub fn parse_config_file(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_config(&text)
}

fn num(v: f64) -> Value {
    Number::from_f64(v).map_or(Value::Null, Value::Number)
}

/// Serialises a configuration in the form accepted by [`parse_config`].
pub fn emit_config(config: &RunConfig) -> String {
    let p = &config.process;
    let mut root = Map::new();
    root.insert("drift".into(), num(p.drift()));
    root.insert("sigma2".into(), num(p.gaussian_sq()));
    if !p.jump_mixture().is_empty() {
        let mixture = p
            .jump_mixture()
            .iter()
            .map(|c| {
                let mut m = Map::new();
                m.insert("weight".into(), num(c.weight));
                m.insert("rate".into(), num(c.rate));
                Value::Object(m)
            })
            .collect();
        let mut jumps = Map::new();
        jumps.insert("intensity".into(), num(p.jump_intensity()));
        jumps.insert("mixture".into(), Value::Array(mixture));
        root.insert("jumps".into(), Value::Object(jumps));
    }
    let r = &config.run;
    let mut run = Map::new();
    for (key, v) in [
        ("q", r.q),
        ("alpha", r.alpha),
        ("theta", r.theta),
        ("x0", r.x0),
        ("b", r.b),
        ("dt", r.dt),
    ] {
        if let Some(v) = v {
            run.insert(key.into(), num(v));
        }
    }
    if let Some(b) = r.backend {
        run.insert("backend".into(), Value::String(b.as_str().into()));
    }
    if let Some(n) = r.n_paths {
        run.insert("n_paths".into(), Value::from(n as u64));
    }
    if let Some(s) = r.seed {
        run.insert("seed".into(), Value::from(s));
    }
    if let Some(o) = &r.out {
        run.insert("out".into(), Value::String(o.display().to_string()));
    }
    if !run.is_empty() {
        root.insert("run".into(), Value::Object(run));
    }
    serde_json::to_string_pretty(&Value::Object(root)).expect("JSON values serialise")
}
