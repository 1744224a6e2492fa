//! Run configuration: defaults, flat `key=value` config files and
//! command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Parser;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::sse::{Unraveling, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Exact four-amplitude solution of the two-mode TLA.
    Exact,
    /// Lindblad master equation (Markov limit reference).
    Master,
    /// Stochastic Schrödinger equation ensemble.
    Sse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Emit {
    Ensemble,
    Trajectory,
    Both,
}

/// Integration scheme for the SSE. Only the linear heterodyne equation has a
/// midpoint (Stratonovich) variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Euler,
    Midpoint,
}

macro_rules! keyword_enum {
    ($ty:ty, $field:literal, { $($s:literal => $v:expr),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.trim() {
                    $($s => Ok($v),)+
                    other => Err(Error::config(
                        $field,
                        format!("unknown value `{other}` (expected one of: {})", [$($s),+].join(", ")),
                    )),
                }
            }
        }
    };
}

keyword_enum!(Mode, "mode", { "exact" => Mode::Exact, "master" => Mode::Master, "sse" => Mode::Sse });
keyword_enum!(Emit, "emit", { "ensemble" => Emit::Ensemble, "trajectory" => Emit::Trajectory, "both" => Emit::Both });
keyword_enum!(Scheme, "scheme", { "euler" => Scheme::Euler, "midpoint" => Scheme::Midpoint });
keyword_enum!(Unraveling, "unraveling", {
    "coherent" => Unraveling::Coherent,
    "quadrature" => Unraveling::Quadrature,
    "heterodyne" => Unraveling::Heterodyne,
    "homodyne" => Unraveling::Homodyne,
});
keyword_enum!(Variant, "variant", { "linear" => Variant::Linear, "actual" => Variant::Actual });

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Master => "master",
            Mode::Sse => "sse",
        }
    }
}

impl Emit {
    pub fn as_str(self) -> &'static str {
        match self {
            Emit::Ensemble => "ensemble",
            Emit::Trajectory => "trajectory",
            Emit::Both => "both",
        }
    }
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Euler => "euler",
            Scheme::Midpoint => "midpoint",
        }
    }
}

/// Everything needed to run one scenario. Times and rates are in units of the
/// coupling `g` (which defaults to 1).
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub mode: Mode,
    pub unraveling: Unraveling,
    pub variant: Variant,
    pub scheme: Scheme,
    pub g: f64,
    pub delta: f64,
    pub gamma: Option<f64>,
    pub dt: f64,
    pub t_final: f64,
    pub n_traj: u64,
    pub master_seed: u64,
    pub output_path: Option<PathBuf>,
    pub emit: Emit,
    pub threads: Option<usize>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Sse,
            unraveling: Unraveling::Coherent,
            variant: Variant::Actual,
            scheme: Scheme::Euler,
            g: 1.0,
            delta: 2.0,
            gamma: None,
            dt: 1e-4,
            t_final: 3.0,
            n_traj: 1000,
            master_seed: 0,
            output_path: None,
            emit: Emit::Ensemble,
            threads: None,
        }
    }
}

impl ScenarioConfig {
    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::covering(self.dt, self.t_final)
    }

    /// Markov rate; errors if unset.
    pub fn gamma(&self) -> Result<f64> {
        self.gamma
            .ok_or_else(|| Error::config("gamma", "required for this scenario"))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::config("dt", format!("must be > 0, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final >= self.dt) {
            return Err(Error::config(
                "t_final",
                format!("must be >= dt, got {}", self.t_final),
            ));
        }
        if self.n_traj == 0 {
            return Err(Error::config("n_traj", "must be >= 1"));
        }
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(Error::config("g", format!("must be >= 0, got {}", self.g)));
        }
        if !self.delta.is_finite() {
            return Err(Error::config("delta", "must be finite"));
        }
        if let Some(gamma) = self.gamma {
            if !(gamma.is_finite() && gamma >= 0.0) {
                return Err(Error::config("gamma", format!("must be >= 0, got {gamma}")));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::config("threads", "must be >= 1"));
        }
        let needs_gamma =
            self.mode == Mode::Master || (self.mode == Mode::Sse && self.unraveling.is_markov());
        if needs_gamma {
            match self.gamma {
                Some(g) if g > 0.0 => {}
                _ => {
                    return Err(Error::config(
                        "gamma",
                        format!(
                            "{} requires --gamma > 0",
                            if self.mode == Mode::Master {
                                "mode master"
                            } else {
                                self.unraveling.as_str()
                            }
                        ),
                    ))
                }
            }
        }
        if self.scheme == Scheme::Midpoint
            && !(self.mode == Mode::Sse
                && self.unraveling == Unraveling::Heterodyne
                && self.variant == Variant::Linear)
        {
            return Err(Error::config(
                "scheme",
                "midpoint is only available for the linear heterodyne SSE",
            ));
        }
        Ok(())
    }

    /// Sets one field from its config-file spelling (`-` or `_` in keys).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let k = key.as_str();
        let v = value.trim();
        match k {
            "mode" => self.mode = v.parse()?,
            "unraveling" => self.unraveling = v.parse()?,
            "variant" => self.variant = v.parse()?,
            "scheme" => self.scheme = v.parse()?,
            "g" => self.g = number(k, v)?,
            "delta" => self.delta = number(k, v)?,
            "gamma" => self.gamma = Some(number(k, v)?),
            "dt" => self.dt = number(k, v)?,
            "t_final" => self.t_final = number(k, v)?,
            "n_traj" => self.n_traj = number(k, v)?,
            "seed" => self.master_seed = number(k, v)?,
            "output" => self.output_path = Some(PathBuf::from(v)),
            "emit" => self.emit = v.parse()?,
            "threads" => self.threads = Some(number(k, v)?),
            _ => return Err(Error::config(k, "unknown key")),
        }
        Ok(())
    }

    /// Canonical text form; every field that affects the numbers is listed.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            s.push_str(k);
            s.push('=');
            s.push_str(&v);
            s.push('\n');
        };
        kv("mode", self.mode.as_str().into());
        kv("unraveling", self.unraveling.as_str().into());
        kv("variant", self.variant.as_str().into());
        kv("scheme", self.scheme.as_str().into());
        kv("g", format!("{:e}", self.g));
        kv("delta", format!("{:e}", self.delta));
        kv(
            "gamma",
            self.gamma.map_or_else(|| "none".to_string(), |g| format!("{g:e}")),
        );
        kv("dt", format!("{:e}", self.dt));
        kv("t_final", format!("{:e}", self.t_final));
        kv("n_traj", self.n_traj.to_string());
        kv("seed", self.master_seed.to_string());
        s
    }

    /// Short opaque identifier of the numerical configuration.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Command-line flags. Anything left unset falls back to the config file,
/// then to the built-in defaults.
#[derive(Debug, Default, Parser)]
#[command(name = "nmsse", version, about = "Non-Markovian SSE trajectories and ensembles")]
pub struct CliArgs {
    /// exact | master | sse
    #[arg(long)]
    pub mode: Option<String>,
    /// coherent | quadrature | heterodyne | homodyne
    #[arg(long)]
    pub unraveling: Option<String>,
    /// linear | actual
    #[arg(long)]
    pub variant: Option<String>,
    /// euler | midpoint
    #[arg(long)]
    pub scheme: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    /// Detuning in units of g.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
    /// Markov decay rate in units of g.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub dt: Option<String>,
    #[arg(long = "t-final", allow_hyphen_values = true)]
    pub t_final: Option<String>,
    #[arg(long = "n-traj", allow_hyphen_values = true)]
    pub n_traj: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub seed: Option<String>,
    /// Output CSV path (stdout if omitted).
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    /// ensemble | trajectory | both
    #[arg(long)]
    pub emit: Option<String>,
    /// Worker threads; defaults to $NMSSE_THREADS, then to all cores.
    #[arg(long, env = "NMSSE_THREADS")]
    pub threads: Option<String>,
    /// Flat key=value file with the same keys as the long flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Compare the result against the exact (or Lindblad) reference and fail
    /// if any Bloch component deviates by more than this.
    #[arg(long, allow_hyphen_values = true)]
    pub tolerance: Option<String>,
}

const KEYS: &[&str] = &[
    "mode",
    "unraveling",
    "variant",
    "scheme",
    "g",
    "delta",
    "gamma",
    "dt",
    "t_final",
    "n_traj",
    "seed",
    "output",
    "emit",
    "threads",
    "tolerance",
];

/// Parses a flat `key=value` file. Blank lines and `#` comments are skipped;
/// `-` in keys is read as `_`.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::config("config", format!("line {}: expected key=value", n + 1))
        })?;
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::config(key, format!("line {}: unknown key", n + 1)));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

fn number<T: FromStr>(field: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::config(field, format!("`{v}` is not a valid number")))
}

/// Result of argument parsing: the scenario plus CLI-only settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedArgs {
    pub config: ScenarioConfig,
    pub tolerance: Option<f64>,
}

/// Merges defaults, an optional config file and flags (flags win), then
/// validates.
pub fn parse_config(args: &CliArgs, file: Option<&Path>) -> Result<ParsedArgs> {
    let mut values = match file.or(args.config.as_deref()) {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
            parse_config_text(&text)?
        }
        None => BTreeMap::new(),
    };
    let flags: [(&str, &Option<String>); 14] = [
        ("mode", &args.mode),
        ("unraveling", &args.unraveling),
        ("variant", &args.variant),
        ("scheme", &args.scheme),
        ("g", &args.g),
        ("delta", &args.delta),
        ("gamma", &args.gamma),
        ("dt", &args.dt),
        ("t_final", &args.t_final),
        ("n_traj", &args.n_traj),
        ("seed", &args.seed),
        ("emit", &args.emit),
        ("threads", &args.threads),
        ("tolerance", &args.tolerance),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            values.insert(k.to_string(), v.clone());
        }
    }
    if let Some(out) = &args.output {
        values.insert("output".into(), out.display().to_string());
    }

    let mut cfg = ScenarioConfig::default();
    let mut tolerance = None;
    for (k, v) in &values {
        match k.as_str() {
            "tolerance" => {
                let t: f64 = number(k, v)?;
                if !(t >= 0.0) {
                    return Err(Error::config(k.as_str(), "must be >= 0"));
                }
                tolerance = Some(t);
            }
            _ => cfg.set(k, v)?,
        }
    }

    if cfg.mode != Mode::Sse {
        for field in ["unraveling", "variant", "scheme", "n_traj", "emit"] {
            if values.contains_key(field) {
                return Err(Error::config(
                    field,
                    format!("not applicable with mode={}", cfg.mode.as_str()),
                ));
            }
        }
    }
    if cfg.mode != Mode::Sse && tolerance.is_some() {
        return Err(Error::config(
            "tolerance",
            format!("not applicable with mode={}", cfg.mode.as_str()),
        ));
    }
    if cfg.mode == Mode::Exact && values.contains_key("gamma") {
        return Err(Error::config("gamma", "not applicable with mode=exact"));
    }
    cfg.validate()?;
    Ok(ParsedArgs {
        config: cfg,
        tolerance,
    })
}

/// Convenience for tests and embedding: parse an argv-style list.
pub fn parse_args<I, S>(argv: I) -> Result<ParsedArgs>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = CliArgs::try_parse_from(
        std::iter::once(std::ffi::OsString::from("nmsse")).chain(argv.into_iter().map(Into::into)),
    )
    .map_err(|e| {
        let kind = e.kind();
        let field = match kind {
            clap::error::ErrorKind::UnknownArgument => "argument",
            _ => "arguments",
        };
        Error::config(field, e.to_string().lines().next().unwrap_or_default().to_string())
    })?;
    parse_config(&args, None)
}
