//! Minimal standalone SVG line plots: one curve per table column, ticks on
//! a 1/2/5 ladder, legend and axis labels taken from the column names.

use std::fmt::Write as _;

use crate::table::Table;
use crate::CliError;

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 540.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 24.0;
const MARGIN_B: f64 = 56.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// Render the table as a line plot: first column on x, every other column
/// as one curve. Non-finite samples split a curve into segments.
pub fn emit_svg(table: &Table) -> Result<String, CliError> {
    if table.is_empty() {
        return Err(CliError::Invalid(
            "cannot plot an empty table (no rows or no value columns)".into(),
        ));
    }
    let xs: Vec<f64> = table.rows.iter().map(|r| r[0]).collect();
    let (x_lo, x_hi) = finite_range(xs.iter().copied())
        .ok_or_else(|| CliError::Invalid("x column has no finite values".into()))?;
    let (y_lo, y_hi) = finite_range(
        table
            .rows
            .iter()
            .flat_map(|r| r[1..].iter().copied()),
    )
    .ok_or_else(|| CliError::Invalid("value columns have no finite values".into()))?;
    let (x_lo, x_hi) = pad_degenerate(x_lo, x_hi);
    let (y_lo, y_hi) = pad_degenerate(y_lo, y_hi);

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let px = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |y: f64| MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"13\">"
    );
    for c in &table.comments {
        let _ = writeln!(s, "<!-- {} -->", c.replace("--", "- -"));
    }
    let _ = writeln!(
        s,
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );

    // Grid and tick labels.
    for t in ticks(x_lo, x_hi) {
        let x = px(t);
        let _ = writeln!(
            s,
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#ddd\"/>",
            MARGIN_T,
            MARGIN_T + plot_h
        );
        let _ = writeln!(
            s,
            "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            MARGIN_T + plot_h + 18.0,
            label(t)
        );
    }
    for t in ticks(y_lo, y_hi) {
        let y = py(t);
        let _ = writeln!(
            s,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#ddd\"/>",
            MARGIN_L,
            MARGIN_L + plot_w
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            MARGIN_L - 8.0,
            y + 4.0,
            label(t)
        );
    }
    let _ = writeln!(
        s,
        "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"#333\"/>"
    );

    // Curves, split at non-finite samples.
    for (ci, name) in table.columns[1..].iter().enumerate() {
        let color = PALETTE[ci % PALETTE.len()];
        let mut points = String::new();
        let flush = |pts: &mut String, out: &mut String| {
            if pts.matches(' ').count() >= 1 {
                let _ = writeln!(
                    out,
                    "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
                    pts.trim_end()
                );
            }
            pts.clear();
        };
        for row in &table.rows {
            let (x, y) = (row[0], row[ci + 1]);
            if x.is_finite() && y.is_finite() {
                let _ = write!(points, "{:.2},{:.2} ", px(x), py(y));
            } else {
                flush(&mut points, &mut s);
            }
        }
        flush(&mut points, &mut s);
        let _ = name;
    }

    // Legend.
    let lx = MARGIN_L + plot_w - 190.0;
    for (ci, name) in table.columns[1..].iter().enumerate() {
        let color = PALETTE[ci % PALETTE.len()];
        let ly = MARGIN_T + 16.0 + 18.0 * ci as f64;
        let _ = writeln!(
            s,
            "<line x1=\"{lx:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" \
             stroke=\"{color}\" stroke-width=\"2\"/>",
            lx + 28.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
            lx + 34.0,
            ly + 4.0,
            escape(name)
        );
    }

    // Axis labels from the column names.
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 12.0,
        escape(&table.columns[0])
    );
    let ylab = table.columns[1..].join(", ");
    let _ = writeln!(
        s,
        "<text x=\"18\" y=\"{:.2}\" text-anchor=\"middle\" \
         transform=\"rotate(-90 18 {:.2})\">{}</text>",
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0,
        escape(&ylab)
    );
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

fn finite_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo <= hi).then_some((lo, hi))
}

fn pad_degenerate(lo: f64, hi: f64) -> (f64, f64) {
    if lo < hi {
        (lo, hi)
    } else {
        let pad = lo.abs().max(1.0) * 0.1;
        (lo - pad, hi + pad)
    }
}

/// Tick positions on the 1/2/5 ladder, aiming for about six intervals.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    } * mag;
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + step * 1e-9 {
        out.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
        t += step;
    }
    out
}

fn label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if !(1e-4..1e6).contains(&a) {
        return format!("{v:e}");
    }
    let mut s = format!("{v:.6}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_table() -> Table {
        let mut t = Table::new(vec!["t".into(), "V".into(), "R".into()]);
        for i in 0..20 {
            let x = i as f64 * 0.5;
            t.push(vec![x, (x * 0.7).sin(), (x * 0.7).cos()]);
        }
        t
    }

    #[test]
    fn rejects_empty_tables() {
        let t = Table::new(vec!["t".into(), "V".into()]);
        assert!(emit_svg(&t).is_err());
        let only_key = Table::new(vec!["t".into()]);
        assert!(emit_svg(&only_key).is_err());
    }

    #[test]
    fn draws_one_curve_per_column() {
        let svg = emit_svg(&sample_table()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">t</text>"));
        assert!(svg.contains("V, R"));
    }

    #[test]
    fn non_finite_samples_split_curves() {
        let mut t = sample_table();
        t.rows[10][1] = f64::NAN;
        let svg = emit_svg(&t).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
    }

    #[test]
    fn tick_ladder_uses_round_steps() {
        let ts = ticks(0.0, 10.0);
        assert!(ts.contains(&0.0) && ts.contains(&10.0));
        let steps: Vec<f64> = ts.windows(2).map(|w| w[1] - w[0]).collect();
        for s in steps {
            assert!((s - 2.0).abs() < 1e-12);
        }
    }
}
