//! Run configuration: defaults, optional key=value config file, CLI flags.
//! Later layers win; flags sit on top.

use std::collections::HashMap;
use std::path::PathBuf;
use std::str::FromStr;

use qmirror::model::PhysicalParams;
use qmirror::MCFunction;

use crate::CliError;

/// Which column groups a run emits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outputs {
    pub trace: bool,
    pub speed: bool,
    pub flow: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            trace: true,
            speed: true,
            flow: true,
        }
    }
}

impl Outputs {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let mut out = Outputs {
            trace: false,
            speed: false,
            flow: false,
        };
        for item in s.split(',') {
            match item.trim() {
                "trace" => out.trace = true,
                "speed" => out.speed = true,
                "flow" => out.flow = true,
                other => {
                    return Err(CliError::Invalid(format!(
                        "unknown output group '{other}' (expected trace, speed, flow)"
                    )))
                }
            }
        }
        if out == (Outputs { trace: false, speed: false, flow: false }) {
            return Err(CliError::Invalid("empty outputs selection".into()));
        }
        Ok(out)
    }

    pub fn echo(&self) -> String {
        let mut parts = Vec::new();
        if self.trace {
            parts.push("trace");
        }
        if self.speed {
            parts.push("speed");
        }
        if self.flow {
            parts.push("flow");
        }
        parts.join(",")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Svg,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            other => Err(CliError::Invalid(format!(
                "unknown format '{other}' (expected csv or svg)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepVariable {
    Phi,
    Omega,
    TDelay,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::Phi => "phi",
            SweepVariable::Omega => "omega",
            SweepVariable::TDelay => "t_delay",
        }
    }

    pub fn apply(&self, params: &mut PhysicalParams<f64>, value: f64) {
        match self {
            SweepVariable::Phi => params.phi = value,
            SweepVariable::Omega => params.omega = value,
            SweepVariable::TDelay => params.t_delay = value,
        }
    }

    pub fn get(&self, params: &PhysicalParams<f64>) -> f64 {
        match self {
            SweepVariable::Phi => params.phi,
            SweepVariable::Omega => params.omega,
            SweepVariable::TDelay => params.t_delay,
        }
    }
}

impl FromStr for SweepVariable {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim().replace('-', "_").as_str() {
            "phi" => Ok(SweepVariable::Phi),
            "omega" => Ok(SweepVariable::Omega),
            "t_delay" => Ok(SweepVariable::TDelay),
            other => Err(CliError::Invalid(format!(
                "unknown sweep variable '{other}' (expected phi, omega, t_delay)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepSpec {
    pub fn points(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.start + step * i as f64)
            .collect()
    }
}

/// Physical and run parameters shared by every subcommand.
#[derive(clap::Args, Clone, Debug, Default)]
pub struct CommonOpts {
    /// Spontaneous emission rate into the waveguide
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Classical driving strength
    #[arg(long)]
    pub omega: Option<f64>,
    /// Drive-qubit detuning
    #[arg(long)]
    pub delta: Option<f64>,
    /// Mirror round-trip phase
    #[arg(long)]
    pub phi: Option<f64>,
    /// Photon round-trip delay
    #[arg(long = "t-delay")]
    pub t_delay: Option<f64>,
    /// Initial superposition weight in [0, 1]
    #[arg(long)]
    pub beta: Option<f64>,
    /// Observation horizon
    #[arg(long)]
    pub tau: Option<f64>,
    /// Metric name: wigner-yanase (wy), min, max
    #[arg(long)]
    pub metric: Option<String>,
    /// Grid steps per delay interval (at least 100)
    #[arg(long = "grid-n")]
    pub grid_n: Option<usize>,
    /// Cross-check the series solution against the step integrator
    #[arg(long)]
    pub verify: bool,
    /// Divide V and V_a by this constant
    #[arg(long)]
    pub normalize: Option<f64>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Comma list of column groups: trace,speed,flow
    #[arg(long)]
    pub outputs: Option<String>,
    /// key=value config file; flags override its entries
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Sweep grid flags for the `sweep` subcommand.
#[derive(clap::Args, Clone, Debug, Default)]
pub struct SweepOpts {
    /// Swept parameter: phi, omega or t_delay
    #[arg(long)]
    pub variable: Option<String>,
    /// First grid value
    #[arg(long)]
    pub start: Option<f64>,
    /// Last grid value
    #[arg(long)]
    pub stop: Option<f64>,
    /// Number of grid points (at least 2)
    #[arg(long)]
    pub count: Option<usize>,
}

/// One override layer; `None` means "no opinion".
#[derive(Clone, Debug, Default)]
pub struct Layer {
    pub gamma: Option<f64>,
    pub omega: Option<f64>,
    pub delta: Option<f64>,
    pub phi: Option<f64>,
    pub t_delay: Option<f64>,
    pub beta: Option<f64>,
    pub tau: Option<f64>,
    pub metric: Option<String>,
    pub grid_n: Option<usize>,
    pub verify: Option<bool>,
    pub normalize: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub outputs: Option<Outputs>,
    pub variable: Option<SweepVariable>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: Option<usize>,
}

impl Layer {
    /// Apply `self` on top of `base`.
    fn over(self, base: Layer) -> Layer {
        Layer {
            gamma: self.gamma.or(base.gamma),
            omega: self.omega.or(base.omega),
            delta: self.delta.or(base.delta),
            phi: self.phi.or(base.phi),
            t_delay: self.t_delay.or(base.t_delay),
            beta: self.beta.or(base.beta),
            tau: self.tau.or(base.tau),
            metric: self.metric.or(base.metric),
            grid_n: self.grid_n.or(base.grid_n),
            verify: self.verify.or(base.verify),
            normalize: self.normalize.or(base.normalize),
            output: self.output.or(base.output),
            format: self.format.or(base.format),
            outputs: self.outputs.or(base.outputs),
            variable: self.variable.or(base.variable),
            start: self.start.or(base.start),
            stop: self.stop.or(base.stop),
            count: self.count.or(base.count),
        }
    }

    pub fn from_flags(common: &CommonOpts, sweep: Option<&SweepOpts>) -> Result<Layer, CliError> {
        let mut layer = Layer {
            gamma: common.gamma,
            omega: common.omega,
            delta: common.delta,
            phi: common.phi,
            t_delay: common.t_delay,
            beta: common.beta,
            tau: common.tau,
            metric: common.metric.clone(),
            grid_n: common.grid_n,
            verify: common.verify.then_some(true),
            normalize: common.normalize,
            output: common.output.clone(),
            format: common.format,
            outputs: common.outputs.as_deref().map(Outputs::parse).transpose()?,
            ..Layer::default()
        };
        if let Some(s) = sweep {
            layer.variable = s.variable.as_deref().map(str::parse).transpose()?;
            layer.start = s.start;
            layer.stop = s.stop;
            layer.count = s.count;
        }
        Ok(layer)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Layer, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("reading {}: {e}", path.display())))?;
        let mut map = HashMap::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Invalid(format!(
                    "{}:{}: expected key=value, got '{line}'",
                    path.display(),
                    ln + 1
                ))
            })?;
            map.insert(key.trim().replace('_', "-"), value.trim().to_string());
        }
        let mut layer = Layer::default();
        for (key, value) in map {
            match key.as_str() {
                "gamma" => layer.gamma = Some(parse_f64(&key, &value)?),
                "omega" => layer.omega = Some(parse_f64(&key, &value)?),
                "delta" => layer.delta = Some(parse_f64(&key, &value)?),
                "phi" => layer.phi = Some(parse_f64(&key, &value)?),
                "t-delay" => layer.t_delay = Some(parse_f64(&key, &value)?),
                "beta" => layer.beta = Some(parse_f64(&key, &value)?),
                "tau" => layer.tau = Some(parse_f64(&key, &value)?),
                "metric" => layer.metric = Some(value),
                "grid-n" => layer.grid_n = Some(parse_usize(&key, &value)?),
                "verify" => layer.verify = Some(parse_bool(&key, &value)?),
                "normalize" => layer.normalize = Some(parse_f64(&key, &value)?),
                "output" => layer.output = Some(PathBuf::from(value)),
                "format" => layer.format = Some(value.parse()?),
                "outputs" => layer.outputs = Some(Outputs::parse(&value)?),
                "variable" => layer.variable = Some(value.parse()?),
                "start" => layer.start = Some(parse_f64(&key, &value)?),
                "stop" => layer.stop = Some(parse_f64(&key, &value)?),
                "count" => layer.count = Some(parse_usize(&key, &value)?),
                other => {
                    return Err(CliError::Invalid(format!(
                        "unknown config key '{other}' in {}",
                        path.display()
                    )))
                }
            }
        }
        Ok(layer)
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Invalid(format!("{key}: '{value}' is not a number")))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Invalid(format!("{key}: '{value}' is not a nonnegative integer")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        _ => Err(CliError::Invalid(format!(
            "{key}: '{value}' is not a boolean"
        ))),
    }
}

/// A fully resolved run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub params: PhysicalParams<f64>,
    pub metric_name: String,
    pub grid_n: usize,
    pub outputs: Outputs,
    pub format: Format,
    pub normalize: Option<f64>,
    pub verify: bool,
    pub output: Option<PathBuf>,
    pub sweep: Option<SweepSpec>,
}

impl RunConfig {
    /// defaults <- config file <- pins <- flags.
    pub fn resolve(
        common: &CommonOpts,
        sweep: Option<&SweepOpts>,
        pins: Layer,
    ) -> Result<RunConfig, CliError> {
        let flags = Layer::from_flags(common, sweep)?;
        let file = match &common.config {
            Some(path) => Layer::from_file(path)?,
            None => Layer::default(),
        };
        let merged = flags.over(pins.over(file));

        let defaults = PhysicalParams::default();
        let params = PhysicalParams {
            gamma: merged.gamma.unwrap_or(defaults.gamma),
            omega: merged.omega.unwrap_or(defaults.omega),
            delta: merged.delta.unwrap_or(defaults.delta),
            phi: merged.phi.unwrap_or(defaults.phi),
            t_delay: merged.t_delay.unwrap_or(defaults.t_delay),
            beta: merged.beta.unwrap_or(defaults.beta),
            tau: merged.tau.unwrap_or(defaults.tau),
        }
        .validated()?;

        let metric_name = merged.metric.unwrap_or_else(|| "wigner-yanase".into());
        MCFunction::<f64>::from_name(&metric_name)?;

        let grid_n = merged.grid_n.unwrap_or(1000);
        if grid_n < qmirror::amplitude::MIN_STEPS_PER_DELAY {
            return Err(CliError::Invalid(format!(
                "grid-n must be at least {}, got {grid_n}",
                qmirror::amplitude::MIN_STEPS_PER_DELAY
            )));
        }
        if let Some(x) = merged.normalize {
            if !(x.is_finite() && x > 0.0) {
                return Err(CliError::Invalid(format!(
                    "normalize must be a positive finite constant, got {x}"
                )));
            }
        }

        let sweep_fields = [
            merged.variable.is_some(),
            merged.start.is_some(),
            merged.stop.is_some(),
            merged.count.is_some(),
        ];
        let sweep = if sweep_fields.iter().any(|&b| b) {
            if !sweep_fields.iter().all(|&b| b) {
                return Err(CliError::Invalid(
                    "a sweep needs all of --variable, --start, --stop, --count".into(),
                ));
            }
            let (start, stop) = (merged.start.unwrap(), merged.stop.unwrap());
            let count = merged.count.unwrap();
            if !start.is_finite() || !stop.is_finite() {
                return Err(CliError::Invalid("sweep bounds must be finite".into()));
            }
            if start >= stop {
                return Err(CliError::Invalid(format!(
                    "sweep runs in ascending order; start {start} must be below stop {stop}"
                )));
            }
            if count < 2 {
                return Err(CliError::Invalid(format!(
                    "sweep count must be at least 2, got {count}"
                )));
            }
            Some(SweepSpec {
                variable: merged.variable.unwrap(),
                start,
                stop,
                count,
            })
        } else {
            None
        };

        Ok(RunConfig {
            params,
            metric_name,
            grid_n,
            outputs: merged.outputs.unwrap_or_default(),
            format: merged.format.unwrap_or_default(),
            normalize: merged.normalize,
            verify: merged.verify.unwrap_or(false),
            output: merged.output,
            sweep,
        })
    }

    pub fn metric(&self) -> MCFunction<f64> {
        MCFunction::from_name(&self.metric_name).expect("metric name validated at resolve time")
    }

    /// Parameter echo for CSV comment headers, one key=value per line,
    /// keys spelled like the config-file keys.
    pub fn echo_lines(&self) -> Vec<String> {
        let p = &self.params;
        let mut lines = vec![
            format!("gamma={}", p.gamma),
            format!("omega={}", p.omega),
            format!("delta={}", p.delta),
            format!("phi={}", p.phi),
            format!("t-delay={}", p.t_delay),
            format!("beta={}", p.beta),
            format!("tau={}", p.tau),
            format!("metric={}", self.metric_name),
            format!("grid-n={}", self.grid_n),
            format!("outputs={}", self.outputs.echo()),
        ];
        if let Some(x) = self.normalize {
            lines.push(format!("normalize={x}"));
        }
        if let Some(s) = &self.sweep {
            lines.push(format!("variable={}", s.variable.name()));
            lines.push(format!("start={}", s.start));
            lines.push(format!("stop={}", s.stop));
            lines.push(format!("count={}", s.count));
        }
        lines.push(format!("version={}", env!("CARGO_PKG_VERSION")));
        lines
    }
}
