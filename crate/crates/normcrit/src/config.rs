//! # Run configuration: strict flat `key = value` files
//!
//! Experiments are described by UTF-8 text files of dotted-section keys,
//! one assignment per line:
//!
//! ```text
//! # canonical fixture
//! params.dim   = 3
//! params.p     = 3.0
//! grid.r_max   = 1600.0
//! bubble.n_values = 64,128,256
//! ```
//!
//! `#` starts a comment, blank lines are skipped, and the schema is
//! strict: unknown keys, duplicate keys, and malformed values are errors
//! carrying the offending line number. Every numeric invariant of the
//! nested types is validated at parse time (e.g. the critical coupling
//! α + β = 2N/(N−2) and the open subcritical windows for p, q), so a
//! config that parses is a config that runs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::functionals::{ParamsError, ProblemParams};
use crate::grid::GridLaw;
use crate::localmin::LocalMinOptions;
use crate::mountain::MountainOptions;

/// Default bubble concentration indices for gap/asymptotics runs.
pub const DEFAULT_N_VALUES: [u32; 3] = [64, 128, 256];
/// Default coupling sweep for the decoupling-limit experiment.
pub const DEFAULT_NU_LIST: [f64; 5] = [1e-2, 3e-3, 1e-3, 3e-4, 1e-4];
/// Default seed for randomized scans when neither config nor CLI set one.
pub const DEFAULT_SEED: u64 = 42;

/// Mesh description (dimension comes from `params.dim`).
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub r_max: f64,
    pub nodes: usize,
    pub law: GridLaw,
}

/// Local-minimizer solver controls.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iters: usize,
    pub step0: f64,
    pub ball_check: bool,
}

/// Mountain-pass solver controls.
#[derive(Debug, Clone, Copy)]
pub struct MpConfig {
    pub tol: f64,
    pub max_iters: usize,
}

/// Everything a subcommand needs, validated.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: ProblemParams,
    pub grid: GridSpec,
    pub solver: SolverConfig,
    pub mp: MpConfig,
    /// Concentration indices for bubble families and gap tables.
    pub n_values: Vec<u32>,
    /// Extra subcritical exponents traced through the asymptotics table.
    pub etas: Vec<f64>,
    /// Coupling strengths for the decoupling sweep.
    pub nu_list: Vec<f64>,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl RunConfig {
    /// Translate the solver section into flow options (no warm start).
    pub fn localmin_options(&self) -> LocalMinOptions {
        LocalMinOptions {
            flow_tol: self.solver.tol,
            max_iters: self.solver.max_iters,
            step0: self.solver.step0,
            ball_check: self.solver.ball_check,
            ..LocalMinOptions::default()
        }
    }

    /// Translate the mp section into saddle-solver options; the caller
    /// supplies the floor and window once the minimizer level is known.
    pub fn mountain_options(&self, k0: f64, window: Option<(f64, f64)>) -> MountainOptions {
        MountainOptions { pg_tol: self.mp.tol, max_iters: self.mp.max_iters, k0, window }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key '{key}'")]
    DuplicateKey { line: usize, key: String },
    #[error("missing required key '{0}'")]
    MissingKey(&'static str),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("invalid parameters: {0}")]
    Params(#[from] ParamsError),
}

const KNOWN_KEYS: &[&str] = &[
    "params.dim",
    "params.p",
    "params.q",
    "params.alpha",
    "params.beta",
    "params.mu1",
    "params.mu2",
    "params.nu",
    "params.a",
    "params.b",
    "grid.r_max",
    "grid.nodes",
    "grid.law",
    "grid.exponent",
    "solver.tol",
    "solver.max_iters",
    "solver.step0",
    "solver.ball_check",
    "mp.tol",
    "mp.max_iters",
    "bubble.n_values",
    "bubble.etas",
    "nu_list",
    "output_dir",
    "seed",
];

struct Entries(BTreeMap<String, (usize, String)>);

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.0.remove(key)
    }

    fn parse<T: std::str::FromStr>(
        &mut self,
        key: &'static str,
        what: &str,
    ) -> Result<Option<T>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((line, raw)) => raw.parse::<T>().map(Some).map_err(|_| ConfigError::Parse {
                line,
                message: format!("'{key}' expects {what} (got '{raw}')"),
            }),
        }
    }

    fn req<T: std::str::FromStr>(&mut self, key: &'static str, what: &str) -> Result<T, ConfigError> {
        self.parse(key, what)?.ok_or(ConfigError::MissingKey(key))
    }

    fn parse_list<T: std::str::FromStr>(
        &mut self,
        key: &'static str,
        what: &str,
    ) -> Result<Option<Vec<T>>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((line, raw)) => raw
                .split(',')
                .map(|tok| tok.trim().parse::<T>())
                .collect::<Result<Vec<T>, _>>()
                .map(Some)
                .map_err(|_| ConfigError::Parse {
                    line,
                    message: format!("'{key}' expects a comma-separated list of {what} (got '{raw}')"),
                }),
        }
    }

    fn parse_bool(&mut self, key: &'static str) -> Result<Option<bool>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((line, raw)) => match raw.as_str() {
                "true" => Ok(Some(true)),
                "false" => Ok(Some(false)),
                _ => Err(ConfigError::Parse {
                    line,
                    message: format!("'{key}' expects true or false (got '{raw}')"),
                }),
            },
        }
    }
}

/// Parse and validate a config file.
pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

/// Parse and validate config text (the file-free core of [`parse_config`]).
pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let mut map: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            continue;
        }
        let Some((k, v)) = stripped.split_once('=') else {
            return Err(ConfigError::Parse {
                line,
                message: format!("expected 'key = value' (got '{stripped}')"),
            });
        };
        let key = k.trim();
        let value = v.trim();
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Parse {
                line,
                message: "empty key or value".to_string(),
            });
        }
        if !KNOWN_KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey { line, key: key.to_string() });
        }
        if map.contains_key(key) {
            return Err(ConfigError::DuplicateKey { line, key: key.to_string() });
        }
        map.insert(key.to_string(), (line, value.to_string()));
    }
    let mut e = Entries(map);

    let params = ProblemParams {
        dim: e.req("params.dim", "a positive integer")?,
        p: e.req("params.p", "a real")?,
        q: e.req("params.q", "a real")?,
        alpha: e.req("params.alpha", "a real")?,
        beta: e.req("params.beta", "a real")?,
        mu1: e.req("params.mu1", "a real")?,
        mu2: e.req("params.mu2", "a real")?,
        nu: e.req("params.nu", "a real")?,
        a: e.req("params.a", "a real")?,
        b: e.req("params.b", "a real")?,
    };
    params.validate()?;

    let r_max: f64 = e.req("grid.r_max", "a positive real")?;
    let nodes: usize = e.req("grid.nodes", "an integer >= 256")?;
    let law_name = e.take("grid.law");
    let exponent = e.parse::<f64>("grid.exponent", "a real >= 1")?;
    let law = match law_name.as_ref().map(|(_, s)| s.as_str()).unwrap_or("graded") {
        "graded" => GridLaw::Graded { exponent: exponent.unwrap_or(4.0) },
        "uniform" => {
            if exponent.is_some() {
                return Err(ConfigError::Invalid(
                    "grid.exponent only applies to the graded law".to_string(),
                ));
            }
            GridLaw::Uniform
        }
        other => {
            let line = law_name.as_ref().map(|(l, _)| *l).unwrap_or(0);
            return Err(ConfigError::Parse {
                line,
                message: format!("'grid.law' expects graded or uniform (got '{other}')"),
            });
        }
    };
    if !(r_max > 0.0) {
        return Err(ConfigError::Invalid(format!("grid.r_max must be positive (got {r_max})")));
    }
    if nodes < 256 {
        return Err(ConfigError::Invalid(format!("grid.nodes must be >= 256 (got {nodes})")));
    }

    let defaults = LocalMinOptions::default();
    let solver = SolverConfig {
        tol: e.parse("solver.tol", "a positive real")?.unwrap_or(defaults.flow_tol),
        max_iters: e.parse("solver.max_iters", "an integer")?.unwrap_or(defaults.max_iters),
        step0: e.parse("solver.step0", "a positive real")?.unwrap_or(defaults.step0),
        ball_check: e.parse_bool("solver.ball_check")?.unwrap_or(defaults.ball_check),
    };
    if !(solver.tol > 0.0 && solver.step0 > 0.0) {
        return Err(ConfigError::Invalid(format!(
            "solver.tol and solver.step0 must be positive (got {}, {})",
            solver.tol, solver.step0
        )));
    }
    let mp_defaults = MountainOptions::default();
    let mp = MpConfig {
        tol: e.parse("mp.tol", "a positive real")?.unwrap_or(mp_defaults.pg_tol),
        max_iters: e.parse("mp.max_iters", "an integer")?.unwrap_or(mp_defaults.max_iters),
    };
    if !(mp.tol > 0.0) {
        return Err(ConfigError::Invalid(format!("mp.tol must be positive (got {})", mp.tol)));
    }

    let n_values: Vec<u32> =
        e.parse_list("bubble.n_values", "integers")?.unwrap_or_else(|| DEFAULT_N_VALUES.to_vec());
    if n_values.is_empty() || n_values.iter().any(|&n| n < 4) {
        return Err(ConfigError::Invalid(
            "bubble.n_values must be a nonempty list of integers >= 4".to_string(),
        ));
    }
    let etas: Vec<f64> = e.parse_list("bubble.etas", "reals")?.unwrap_or_default();
    let two_star = params.two_star();
    if etas.iter().any(|&eta| eta < 1.0 || eta >= two_star) {
        return Err(ConfigError::Invalid(format!(
            "bubble.etas must lie in [1, 2*) = [1, {two_star}) — only subcritical norms vanish"
        )));
    }
    let nu_list: Vec<f64> =
        e.parse_list("nu_list", "reals")?.unwrap_or_else(|| DEFAULT_NU_LIST.to_vec());
    if nu_list.is_empty() || nu_list.iter().any(|&nu| nu <= 0.0) {
        return Err(ConfigError::Invalid(
            "nu_list must be a nonempty list of positive reals".to_string(),
        ));
    }

    let output_dir = e
        .take("output_dir")
        .map(|(_, s)| PathBuf::from(s))
        .unwrap_or_else(|| PathBuf::from("out"));
    let seed = e.parse("seed", "an unsigned integer")?.unwrap_or(DEFAULT_SEED);

    debug_assert!(e.0.is_empty(), "all known keys must be consumed");
    Ok(RunConfig {
        params,
        grid: GridSpec { r_max, nodes, law },
        solver,
        mp,
        n_values,
        etas,
        nu_list,
        output_dir,
        seed,
    })
}
