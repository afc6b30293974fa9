//! Canned parameter studies fig2..fig7. Each pins the regime it illustrates,
//! lets harmless flags override, and rejects flags that would fight the
//! preset's own sweep.

use std::f64::consts::PI;

use crate::config::{CommonOpts, Layer, Outputs, RunConfig, SweepVariable};
use crate::report::{run_trace, sweep_reports, MeasureReport};
use crate::table::Table;
use crate::CliError;

const SPEED: Outputs = Outputs {
    trace: false,
    speed: true,
    flow: false,
};
const FLOW: Outputs = Outputs {
    trace: false,
    speed: false,
    flow: true,
};
const TRACE: Outputs = Outputs {
    trace: true,
    speed: false,
    flow: false,
};

pub fn run(
    name: &str,
    count: Option<usize>,
    common: &CommonOpts,
) -> Result<(Table, RunConfig), CliError> {
    match name {
        "fig2" => fig2(count, common),
        "fig3" => fig3(count, common),
        "fig4" => fig4(count, common),
        "fig5" => fig5(count, common),
        "fig6" => fig6(count, common),
        "fig7" => fig7(count, common),
        other => Err(CliError::Invalid(format!(
            "unknown preset '{other}' (expected one of fig2..fig7)"
        ))),
    }
}

fn reject(cond: bool, preset: &str, flag: &str, why: &str) -> Result<(), CliError> {
    if cond {
        Err(CliError::Invalid(format!(
            "{preset}: {flag} conflicts with this preset ({why})"
        )))
    } else {
        Ok(())
    }
}

/// Compact value for a column-label suffix.
fn fmt_short(v: f64) -> String {
    let s = format!("{v}");
    if s.len() > 6 {
        format!("{v:.4}")
    } else {
        s
    }
}

struct Curve {
    suffix: String,
    cfg: RunConfig,
}

/// Shared sweep-table assembly: all curves share the base grid; measure
/// columns carry a bracketed suffix when more than one curve is drawn.
fn sweep_table(
    base: &RunConfig,
    curves: &[Curve],
    lead_comments: &[String],
) -> Result<Table, CliError> {
    let spec = base.sweep.expect("presets pin their sweep");
    let points = spec.points();
    let mut columns = vec![spec.variable.name().to_string()];
    let mut per_curve = Vec::new();
    for curve in curves {
        for name in MeasureReport::columns(&curve.cfg.outputs) {
            columns.push(format!("{name}{}", curve.suffix));
        }
        per_curve.push(sweep_reports(&curve.cfg, &spec, &points)?);
    }
    let mut table = Table::new(columns);
    for line in lead_comments {
        table.comment(line.clone());
    }
    for line in base.echo_lines() {
        table.comment(line);
    }
    for (i, &v) in points.iter().enumerate() {
        let mut row = vec![v];
        for (curve, reports) in curves.iter().zip(&per_curve) {
            row.extend(reports[i].values(&curve.cfg.outputs));
        }
        table.push(row);
    }
    Ok(table)
}

/// Average speed against the mirror phase, one curve per delay.
fn fig2(count: Option<usize>, common: &CommonOpts) -> Result<(Table, RunConfig), CliError> {
    reject(common.phi.is_some(), "fig2", "--phi", "phi is the swept variable")?;
    let delays = match common.t_delay {
        Some(v) => vec![v],
        None => vec![0.2, 2.0, 20.0],
    };
    let pins = Layer {
        omega: Some(0.0),
        delta: Some(0.0),
        beta: Some(1.0),
        tau: Some(10.0),
        outputs: Some(SPEED),
        variable: Some(SweepVariable::Phi),
        start: Some(0.0),
        stop: Some(2.0 * PI),
        count: Some(count.unwrap_or(65)),
        ..Layer::default()
    };
    let base = RunConfig::resolve(common, None, pins)?;
    let curves: Vec<Curve> = delays
        .iter()
        .map(|&td| {
            let mut cfg = base.clone();
            cfg.params.t_delay = td;
            Curve {
                suffix: if delays.len() > 1 {
                    format!("[t_delay={}]", fmt_short(td))
                } else {
                    String::new()
                },
                cfg,
            }
        })
        .collect();
    let comments = vec![
        "preset=fig2".to_string(),
        format!(
            "curves: t-delay in {{{}}}",
            delays.iter().map(|v| fmt_short(*v)).collect::<Vec<_>>().join(", ")
        ),
        "choice: undriven qubit; phi grid spans one full turn".to_string(),
    ];
    let table = sweep_table(&base, &curves, &comments)?;
    Ok((table, base))
}

/// Average speed against the driving strength, curves over delay and phase.
fn fig3(count: Option<usize>, common: &CommonOpts) -> Result<(Table, RunConfig), CliError> {
    reject(common.omega.is_some(), "fig3", "--omega", "omega is the swept variable")?;
    let delays = match common.t_delay {
        Some(v) => vec![v],
        None => vec![0.2, 2.0],
    };
    let phases = match common.phi {
        Some(v) => vec![v],
        None => vec![0.0, PI / 2.0, PI],
    };
    let pins = Layer {
        delta: Some(0.0),
        beta: Some(1.0),
        tau: Some(10.0),
        outputs: Some(SPEED),
        variable: Some(SweepVariable::Omega),
        start: Some(0.1),
        stop: Some(2.0),
        count: Some(count.unwrap_or(20)),
        ..Layer::default()
    };
    let base = RunConfig::resolve(common, None, pins)?;
    let mut curves = Vec::new();
    for &td in &delays {
        for &phi in &phases {
            let mut cfg = base.clone();
            cfg.params.t_delay = td;
            cfg.params.phi = phi;
            let mut parts = Vec::new();
            if delays.len() > 1 {
                parts.push(format!("t_delay={}", fmt_short(td)));
            }
            if phases.len() > 1 {
                parts.push(format!("phi={}", fmt_short(phi)));
            }
            let suffix = if parts.is_empty() {
                String::new()
            } else {
                format!("[{}]", parts.join(","))
            };
            curves.push(Curve { suffix, cfg });
        }
    }
    let comments = vec![
        "preset=fig3".to_string(),
        "choice: omega grid starts at 0.1; the undriven point is a distinct regime".to_string(),
    ];
    let table = sweep_table(&base, &curves, &comments)?;
    Ok((table, base))
}

/// Population trace showing trapping (phi=0) against plain decay.
fn fig4(count: Option<usize>, common: &CommonOpts) -> Result<(Table, RunConfig), CliError> {
    reject(count.is_some(), "fig4", "--count", "fig4 draws a time trace, not a sweep")?;
    let pins = Layer {
        omega: Some(0.0),
        delta: Some(0.0),
        phi: Some(0.0),
        t_delay: Some(2.0),
        beta: Some(1.0),
        tau: Some(50.0),
        outputs: Some(TRACE),
        ..Layer::default()
    };
    let cfg = RunConfig::resolve(common, None, pins)?;
    let mut table = run_trace(&cfg)?;
    table.comments.insert(0, "preset=fig4".to_string());
    table.comments.insert(
        1,
        "choice: horizon 50 shows the trapped plateau; pass --phi to detune it".to_string(),
    );
    Ok((table, cfg))
}

/// Backflow against the mirror phase at fixed delay.
fn fig5(count: Option<usize>, common: &CommonOpts) -> Result<(Table, RunConfig), CliError> {
    reject(common.phi.is_some(), "fig5", "--phi", "phi is the swept variable")?;
    let pins = Layer {
        omega: Some(0.0),
        delta: Some(0.0),
        beta: Some(1.0),
        t_delay: Some(2.0),
        tau: Some(10.0),
        outputs: Some(FLOW),
        variable: Some(SweepVariable::Phi),
        start: Some(0.0),
        stop: Some(PI),
        count: Some(count.unwrap_or(65)),
        ..Layer::default()
    };
    let base = RunConfig::resolve(common, None, pins)?;
    let curves = [Curve {
        suffix: String::new(),
        cfg: base.clone(),
    }];
    let comments = vec![
        "preset=fig5".to_string(),
        "choice: undriven qubit; phi grid spans a half turn".to_string(),
    ];
    let table = sweep_table(&base, &curves, &comments)?;
    Ok((table, base))
}

/// Evolution speed beside the unsigned flow rate over one trace.
fn fig6(count: Option<usize>, common: &CommonOpts) -> Result<(Table, RunConfig), CliError> {
    reject(count.is_some(), "fig6", "--count", "fig6 draws a time trace, not a sweep")?;
    let pins = Layer {
        omega: Some(0.0),
        delta: Some(0.0),
        phi: Some(0.0),
        t_delay: Some(2.0),
        beta: Some(1.0),
        tau: Some(10.0),
        outputs: Some(Outputs {
            trace: false,
            speed: true,
            flow: true,
        }),
        ..Layer::default()
    };
    let cfg = RunConfig::resolve(common, None, pins)?;
    let full = run_trace(&cfg)?;

    // Keep t, V and R; the rows before the first echo are dropped because a
    // pure initial state makes the speed diverge as t -> 0.
    let keep: Vec<usize> = ["t", "V", "R"]
        .iter()
        .map(|name| {
            full.columns
                .iter()
                .position(|c| c == name)
                .expect("trace table carries t, V, R")
        })
        .collect();
    let mut table = Table::new(keep.iter().map(|&i| full.columns[i].clone()).collect());
    table.comments = full.comments.clone();
    table.comments.insert(0, "preset=fig6".to_string());
    table.comments.insert(
        1,
        "choice: rows start at the first echo t=t-delay; V diverges at t -> 0".to_string(),
    );
    let td = cfg.params.t_delay;
    for row in &full.rows {
        if row[0] >= td - 1e-12 {
            table.push(keep.iter().map(|&i| row[i]).collect());
        }
    }
    Ok((table, cfg))
}

/// Total flow against the driving strength, one curve per delay.
fn fig7(count: Option<usize>, common: &CommonOpts) -> Result<(Table, RunConfig), CliError> {
    reject(common.omega.is_some(), "fig7", "--omega", "omega is the swept variable")?;
    let delays = match common.t_delay {
        Some(v) => vec![v],
        None => vec![0.2, 2.0],
    };
    let pins = Layer {
        delta: Some(0.0),
        phi: Some(0.0),
        beta: Some(1.0),
        tau: Some(10.0),
        outputs: Some(FLOW),
        variable: Some(SweepVariable::Omega),
        start: Some(0.1),
        stop: Some(0.1 + PI),
        count: Some(count.unwrap_or(65)),
        ..Layer::default()
    };
    let base = RunConfig::resolve(common, None, pins)?;
    let curves: Vec<Curve> = delays
        .iter()
        .map(|&td| {
            let mut cfg = base.clone();
            cfg.params.t_delay = td;
            Curve {
                suffix: if delays.len() > 1 {
                    format!("[t_delay={}]", fmt_short(td))
                } else {
                    String::new()
                },
                cfg,
            }
        })
        .collect();
    let comments = vec![
        "preset=fig7".to_string(),
        format!(
            "curves: t-delay in {{{}}}",
            delays.iter().map(|v| fmt_short(*v)).collect::<Vec<_>>().join(", ")
        ),
        "choice: phi=0; omega grid spans pi so the half-turn recurrence is on-grid".to_string(),
    ];
    let table = sweep_table(&base, &curves, &comments)?;
    Ok((table, base))
}
