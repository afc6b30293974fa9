//! Builds row tables from amplitude traces: time traces with per-sample
//! diagnostics and parallel one-parameter sweeps of scalar measures.

use qmirror::amplitude::steady_population;
use qmirror::geometry::{average_speed, metric_speed};
use qmirror::infoflow::{flow_report, sigma_rate};
use qmirror::model::{derive_frame, PhysicalParams};
use qmirror::qstate::{evolve_state_with, spectral_decompose, state_derivative_with};
use qmirror::{AmplitudeTrace, Coherence, DressedFrame};
use rayon::prelude::*;

use crate::config::{Outputs, RunConfig, SweepSpec};
use crate::table::Table;
use crate::CliError;

/// Scalar measures of one run; fields are populated for the selected
/// output groups only.
#[derive(Clone, Debug)]
pub struct MeasureReport {
    pub params: PhysicalParams<f64>,
    pub v_a: Option<f64>,
    pub aleph: Option<f64>,
    pub aleph_total: Option<f64>,
    pub p_tau: Option<f64>,
    pub p_steady: Option<f64>,
}

impl MeasureReport {
    /// Column names for the selected groups, in emission order.
    pub fn columns(outputs: &Outputs) -> Vec<&'static str> {
        let mut cols = Vec::new();
        if outputs.speed {
            cols.push("V_a");
        }
        if outputs.flow {
            cols.push("aleph");
            cols.push("aleph_total");
        }
        if outputs.trace {
            cols.push("P_tau");
            cols.push("P_steady");
        }
        cols
    }

    /// Values matching `columns` for the same selection.
    pub fn values(&self, outputs: &Outputs) -> Vec<f64> {
        let mut vals = Vec::new();
        let take = |v: Option<f64>| v.expect("measure populated for its output group");
        if outputs.speed {
            vals.push(take(self.v_a));
        }
        if outputs.flow {
            vals.push(take(self.aleph));
            vals.push(take(self.aleph_total));
        }
        if outputs.trace {
            vals.push(take(self.p_tau));
            vals.push(take(self.p_steady));
        }
        vals
    }
}

fn param_echo(p: &PhysicalParams<f64>) -> String {
    format!(
        "gamma={} omega={} delta={} phi={} t-delay={} beta={} tau={}",
        p.gamma, p.omega, p.delta, p.phi, p.t_delay, p.beta, p.tau
    )
}

/// Cross-check the closed-form trace against the step integrator on the
/// shared grid. Disagreement beyond 1e-6 is a verification failure.
fn verify_trace(
    trace: &AmplitudeTrace<f64>,
    frame: &DressedFrame<f64>,
    grid_n: usize,
    horizon: f64,
) -> Result<(), CliError> {
    let check = AmplitudeTrace::dde(frame, grid_n, horizon)?;
    let mut worst = 0.0_f64;
    let mut worst_t = 0.0_f64;
    for ((&t, a), b) in trace
        .times()
        .iter()
        .zip(trace.amplitudes())
        .zip(check.amplitudes())
    {
        let d = (a - b).norm();
        if d > worst {
            worst = d;
            worst_t = t;
        }
    }
    if worst > 1e-6 {
        return Err(CliError::Verification(format!(
            "closed form and step integrator disagree by {worst:.3e} at t={worst_t} (limit 1e-6)"
        )));
    }
    Ok(())
}

/// Compute the scalar measures of one parameter point.
pub fn measure(params: PhysicalParams<f64>, cfg: &RunConfig) -> Result<MeasureReport, CliError> {
    let params = params.validated()?;
    let frame = derive_frame(params);
    let trace = AmplitudeTrace::series(&frame, cfg.grid_n, params.tau)?;
    if cfg.verify {
        verify_trace(&trace, &frame, cfg.grid_n, params.tau)?;
    }
    let mut report = MeasureReport {
        params,
        v_a: None,
        aleph: None,
        aleph_total: None,
        p_tau: None,
        p_steady: None,
    };
    if cfg.outputs.speed {
        let metric = cfg.metric();
        let mut v = average_speed(&trace, params.beta, &metric, params.tau)?;
        if let Some(x) = cfg.normalize {
            v /= x;
        }
        report.v_a = Some(v);
    }
    if cfg.outputs.flow {
        let flow = flow_report(&trace);
        if flow.aleph_total < flow.aleph {
            return Err(CliError::Invalid(format!(
                "flow decomposition inconsistent ({} < {}) at {}",
                flow.aleph_total,
                flow.aleph,
                param_echo(&params)
            )));
        }
        report.aleph = Some(flow.aleph);
        report.aleph_total = Some(flow.aleph_total);
    }
    if cfg.outputs.trace {
        let (c, _) = trace.eval(params.tau);
        report.p_tau = Some(c.norm_sqr());
        report.p_steady = Some(steady_population(&frame));
    }
    for v in [
        report.v_a,
        report.aleph,
        report.aleph_total,
        report.p_tau,
        report.p_steady,
    ]
    .into_iter()
    .flatten()
    {
        if !v.is_finite() {
            return Err(CliError::Invalid(format!(
                "non-finite measure at {}",
                param_echo(&params)
            )));
        }
    }
    Ok(report)
}

/// Full time trace as a table; columns follow the selected output groups.
pub fn run_trace(cfg: &RunConfig) -> Result<Table, CliError> {
    if cfg.sweep.is_some() {
        return Err(CliError::Invalid(
            "trace does not take sweep settings; use the sweep subcommand".into(),
        ));
    }
    let params = cfg.params;
    let frame = derive_frame(params);
    let trace = AmplitudeTrace::series(&frame, cfg.grid_n, params.tau)?;
    if cfg.verify {
        verify_trace(&trace, &frame, cfg.grid_n, params.tau)?;
    }
    Ok(trace_table(cfg, &trace))
}

/// Row table over the trace grid for the selected output groups.
pub fn trace_table(cfg: &RunConfig, trace: &AmplitudeTrace<f64>) -> Table {
    let mut columns = vec!["t".to_string()];
    if cfg.outputs.trace {
        columns.extend(["re_c", "im_c", "P"].map(String::from));
    }
    if cfg.outputs.speed {
        columns.push("V".into());
    }
    if cfg.outputs.flow {
        columns.extend(["sigma", "R"].map(String::from));
    }
    let mut table = Table::new(columns);
    for line in cfg.echo_lines() {
        table.comment(line);
    }

    let metric = cfg.metric();
    let beta = cfg.params.beta;
    let sigma = sigma_rate(trace);
    let samples = trace
        .times()
        .iter()
        .zip(trace.amplitudes().iter().zip(trace.derivatives()));
    for (i, (&t, (c, cdot))) in samples.enumerate() {
        let mut row = vec![t];
        if cfg.outputs.trace {
            row.extend([c.re, c.im, c.norm_sqr()]);
        }
        if cfg.outputs.speed {
            let state = evolve_state_with(beta, *c, Coherence::Complex, t);
            let decomp = spectral_decompose(&state);
            let rhodot = state_derivative_with(beta, *c, *cdot, Coherence::Complex);
            let mut v = metric_speed(&decomp, &rhodot, &metric);
            if let Some(x) = cfg.normalize {
                v /= x;
            }
            row.push(v);
        }
        if cfg.outputs.flow {
            row.push(sigma[i]);
            row.push(sigma[i].abs());
        }
        table.push(row);
    }
    table
}

/// Measures over the sweep grid, one point per worker, in ascending order.
/// The first failing point aborts the sweep with its parameters attached.
pub fn sweep_reports(
    cfg: &RunConfig,
    spec: &SweepSpec,
    points: &[f64],
) -> Result<Vec<MeasureReport>, CliError> {
    let results: Vec<Result<MeasureReport, CliError>> = points
        .par_iter()
        .map(|&v| {
            let mut p = cfg.params;
            spec.variable.apply(&mut p, v);
            measure(p, cfg).map_err(|e| annotate(e, &p))
        })
        .collect();
    results.into_iter().collect()
}

fn annotate(e: CliError, p: &PhysicalParams<f64>) -> CliError {
    let at = param_echo(p);
    match e {
        CliError::Invalid(m) => CliError::Invalid(format!("sweep point [{at}]: {m}")),
        CliError::Verification(m) => CliError::Verification(format!("sweep point [{at}]: {m}")),
        other => other,
    }
}

/// One-parameter sweep as a table: the swept value plus the selected
/// measures per row.
pub fn run_sweep(cfg: &RunConfig) -> Result<Table, CliError> {
    let spec = cfg.sweep.ok_or_else(|| {
        CliError::Invalid("sweep needs --variable, --start, --stop and --count".into())
    })?;
    let points = spec.points();
    let reports = sweep_reports(cfg, &spec, &points)?;

    let mut columns = vec![spec.variable.name().to_string()];
    columns.extend(MeasureReport::columns(&cfg.outputs).iter().map(|s| s.to_string()));
    let mut table = Table::new(columns);
    for line in cfg.echo_lines() {
        table.comment(line);
    }
    for r in &reports {
        // The key column comes from the report's own parameter echo, which
        // matches the requested grid by construction.
        let mut row = vec![spec.variable.get(&r.params)];
        row.extend(r.values(&cfg.outputs));
        table.push(row);
    }
    Ok(table)
}
