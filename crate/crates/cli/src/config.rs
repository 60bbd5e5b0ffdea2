//! Run configuration: `key = value` files, flag overrides and validation.
//!
//! A config file holds one `key = value` pair per line. `#` starts a comment
//! that runs to the end of the line, blank lines are ignored, and keys are the
//! long flag names (`t-window`, `kernel-dt`, …). Repeating a key is an error.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use limitsets::dynamics::DefectReading;
use limitsets::systems::Preset;

use crate::CliError;

/// Every accepted key with a one-line description, in help order.
pub const KEYS: &[(&str, &str)] = &[
    (
        "experiment",
        "approximate, orbit-dist, chain, embed or adpt",
    ),
    (
        "preset",
        "torus-golden, two-mass-default or circle-rotation",
    ),
    ("rho", "growth exponent ρ"),
    ("sigma", "growth constant σ"),
    (
        "margin",
        "two-mass margin ε: the second atom has mass σ/2 - ε",
    ),
    ("epsilon", "chain link tolerance ε"),
    ("s", "chain lower time bound s"),
    ("periods", "half-periods P, as `a..b` or a comma list"),
    (
        "t-window",
        "orbit window T for orbit-dist (default: largest period)",
    ),
    ("dt", "orbit sampling step"),
    ("family-size", "number K of test functions in the metric"),
    ("t-cut", "kernel truncation T_cut"),
    ("kernel-dt", "kernel quadrature step δt"),
    (
        "anchors",
        "number N of Keller anchors (at least this many are sampled)",
    ),
    ("y-min", "lower end of the y grid"),
    ("y-max", "upper end of the y grid"),
    ("dy", "y grid step δy"),
    ("tau", "shift τ for the equivariance check (multiple of dy)"),
    ("point", "base point, comma-separated coordinates"),
    ("point2", "second point for the injectivity check"),
    ("t", "curve time t for adpt"),
    ("window", "adpt increments run over [0, window]"),
    ("tau-step", "adpt increment step"),
    ("curve", "adpt curve: trajectory or constant"),
    ("curve-dt", "adpt curve sampling step"),
    ("t-max", "adpt curve length"),
    ("reading", "adpt comparison: increment or literal"),
    ("cover", "number of cover samples for the density defect"),
    ("format", "output format: csv or json"),
    ("output", "output file (default: standard output)"),
    (
        "cylinder-output",
        "embed: also write the cylinder measure here",
    ),
];

pub type Settings = BTreeMap<String, String>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

fn known_key(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

/// Parses a config file body into settings.
pub fn parse_config(text: &str) -> Result<Settings, CliError> {
    let mut out = Settings::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(invalid(format!("line {line}: expected `key = value`")));
        };
        let (key, value) = (key.trim(), value.trim());
        if !known_key(key) {
            return Err(invalid(format!("line {line}: unknown key {key:?}")));
        }
        if value.is_empty() {
            return Err(invalid(format!("line {line}: empty value for {key}")));
        }
        if out.insert(key.to_string(), value.to_string()).is_some() {
            return Err(invalid(format!("line {line}: duplicate key {key}")));
        }
    }
    Ok(out)
}

/// Writes settings in the config file grammar, one pair per line.
pub fn format_config(settings: &Settings) -> String {
    settings
        .iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect()
}

/// Parses `a..b` (every value `a, a+1, …` up to `b`) or `p1,p2,…`.
pub fn parse_periods(text: &str) -> Result<Vec<f64>, CliError> {
    let text = text.trim();
    let number = |s: &str| -> Result<f64, CliError> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| invalid(format!("bad period {s:?}")))?;
        if !v.is_finite() {
            return Err(invalid(format!("bad period {s:?}")));
        }
        Ok(v)
    };
    let periods = if let Some((a, b)) = text.split_once("..") {
        let (a, b) = (number(a)?, number(b)?);
        if !(a <= b) || b - a > 100_000.0 {
            return Err(invalid(
                "period range must satisfy a <= b with at most 100000 values",
            ));
        }
        let count = (b - a + 1e-9).floor() as usize + 1;
        (0..count).map(|k| a + k as f64).collect()
    } else {
        text.split(',').map(number).collect::<Result<Vec<_>, _>>()?
    };
    if periods.iter().any(|p| !(*p > 0.0)) {
        return Err(invalid("periods must be positive"));
    }
    if periods.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("periods must be strictly increasing"));
    }
    Ok(periods)
}

/// Comma list that [`parse_periods`] reads back exactly.
pub fn format_periods(periods: &[f64]) -> String {
    periods
        .iter()
        .map(|p| format!("{p:?}"))
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Approximate,
    OrbitDist,
    Chain,
    Embed,
    Adpt,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::Approximate,
        Experiment::OrbitDist,
        Experiment::Chain,
        Experiment::Embed,
        Experiment::Adpt,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Approximate => "approximate",
            Experiment::OrbitDist => "orbit-dist",
            Experiment::Chain => "chain",
            Experiment::Embed => "embed",
            Experiment::Adpt => "adpt",
        }
    }

    /// Whether the experiment emits a table that can be written as CSV.
    pub fn tabular(&self) -> bool {
        matches!(self, Experiment::Approximate | Experiment::OrbitDist)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| invalid(format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Trajectory,
    Constant,
}

/// A validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub preset: Preset,
    pub rho: f64,
    pub sigma: f64,
    pub margin: f64,
    pub epsilon: f64,
    pub s: f64,
    pub periods: Vec<f64>,
    pub t_window: Option<f64>,
    pub dt: f64,
    pub family_size: usize,
    pub t_cut: f64,
    pub kernel_dt: f64,
    pub anchors: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub dy: f64,
    pub tau: f64,
    pub point: Option<Vec<f64>>,
    pub point2: Option<Vec<f64>>,
    pub t: f64,
    pub window: f64,
    pub tau_step: f64,
    pub curve: CurveKind,
    pub curve_dt: f64,
    pub t_max: f64,
    pub reading: DefectReading,
    pub cover: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub cylinder_output: Option<PathBuf>,
}

struct Reader<'a> {
    settings: &'a Settings,
}

impl Reader<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.settings.get(key).map(String::as_str)
    }

    fn number(&self, key: &str, default: f64) -> Result<f64, CliError> {
        let Some(text) = self.raw(key) else {
            return Ok(default);
        };
        let v: f64 = text
            .trim()
            .parse()
            .map_err(|_| invalid(format!("{key}: not a number: {text:?}")))?;
        if !v.is_finite() {
            return Err(invalid(format!("{key}: must be finite")));
        }
        Ok(v)
    }

    fn positive(&self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = self.number(key, default)?;
        if !(v > 0.0) {
            return Err(invalid(format!("{key}: must be positive, got {v}")));
        }
        Ok(v)
    }

    fn count(&self, key: &str, default: usize) -> Result<usize, CliError> {
        let Some(text) = self.raw(key) else {
            return Ok(default);
        };
        let v: usize = text
            .trim()
            .parse()
            .map_err(|_| invalid(format!("{key}: not a positive integer: {text:?}")))?;
        if v == 0 {
            return Err(invalid(format!("{key}: must be positive")));
        }
        Ok(v)
    }

    fn coords(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        let Some(text) = self.raw(key) else {
            return Ok(None);
        };
        let v = text
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| invalid(format!("{key}: bad coordinate {c:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Some(v))
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.raw(key).map(PathBuf::from)
    }
}

impl RunConfig {
    /// Validates merged settings. Defaults depend on the experiment.
    pub fn from_settings(settings: &Settings) -> Result<Self, CliError> {
        if let Some(key) = settings.keys().find(|k| !known_key(k)) {
            return Err(invalid(format!("unknown key {key:?}")));
        }
        let r = Reader { settings };
        let experiment: Experiment = r
            .raw("experiment")
            .ok_or_else(|| invalid("no experiment given"))?
            .parse()?;
        let measure_run = matches!(experiment, Experiment::Approximate | Experiment::OrbitDist);
        let preset = match r.raw("preset") {
            Some(name) => name.parse::<Preset>().map_err(|e| invalid(e.to_string()))?,
            None if measure_run => Preset::TwoMassDefault,
            None => Preset::TorusGolden,
        };
        if measure_run != (preset == Preset::TwoMassDefault) {
            return Err(invalid(format!(
                "preset {preset} does not apply to experiment {experiment}"
            )));
        }
        let periods = match r.raw("periods") {
            Some(text) => parse_periods(text)?,
            None if experiment == Experiment::OrbitDist => vec![2.0, 4.0, 8.0, 16.0],
            None => (1..=20).map(f64::from).collect(),
        };
        let format = match r.raw("format") {
            None if experiment.tabular() => Format::Csv,
            None => Format::Json,
            Some("json") => Format::Json,
            Some("csv") if experiment.tabular() => Format::Csv,
            Some("csv") => return Err(invalid(format!("{experiment} only writes json"))),
            Some(other) => return Err(invalid(format!("unknown format {other:?}"))),
        };
        let curve = match r.raw("curve") {
            None | Some("trajectory") => CurveKind::Trajectory,
            Some("constant") => CurveKind::Constant,
            Some(other) => return Err(invalid(format!("unknown curve {other:?}"))),
        };
        let reading = match r.raw("reading") {
            None | Some("increment") => DefectReading::Increment,
            Some("literal") => DefectReading::Literal,
            Some(other) => return Err(invalid(format!("unknown reading {other:?}"))),
        };
        let t_window = match r.raw("t-window") {
            Some(_) => Some(r.positive("t-window", 0.0)?),
            None => None,
        };
        let cfg = RunConfig {
            experiment,
            preset,
            rho: r.positive("rho", 1.0)?,
            sigma: r.positive("sigma", 1.0)?,
            margin: r.number("margin", 0.1)?,
            epsilon: r.positive("epsilon", 0.1)?,
            s: r.positive("s", 10.0)?,
            periods,
            t_window,
            dt: r.positive("dt", 0.01)?,
            family_size: r.count("family-size", limitsets::measure::DEFAULT_FAMILY_SIZE)?,
            t_cut: r.positive("t-cut", 8.0)?,
            kernel_dt: r.positive("kernel-dt", 0.01)?,
            anchors: r.count("anchors", 16)?,
            y_min: r.number("y-min", -4.0)?,
            y_max: r.number("y-max", 4.0)?,
            dy: r.positive("dy", 0.05)?,
            tau: r.number("tau", 0.5)?,
            point: r.coords("point")?,
            point2: r.coords("point2")?,
            t: r.number("t", 5.0)?,
            window: r.number("window", 1.0)?,
            tau_step: r.positive("tau-step", 0.01)?,
            curve,
            curve_dt: r.positive("curve-dt", 0.01)?,
            t_max: r.positive("t-max", 10.0)?,
            reading,
            cover: r.count("cover", 64)?,
            format,
            output: r.path("output"),
            cylinder_output: r.path("cylinder-output"),
        };
        if cfg.y_min > cfg.y_max {
            return Err(invalid("y-min must not exceed y-max"));
        }
        if cfg.window < 0.0 {
            return Err(invalid("window must be nonnegative"));
        }
        if cfg.cylinder_output.is_some() && experiment != Experiment::Embed {
            return Err(invalid("cylinder-output only applies to embed"));
        }
        Ok(cfg)
    }
}
