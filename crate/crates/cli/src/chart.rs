//! Deterministic SVG bar chart of per-model relative error.
//!
//! The chart is a fixed 640x400 canvas with one bar per model, in the order
//! the evaluation report lists them. Bar height is linear in relative MAE,
//! the exact value is printed above each bar, and the title reminds the
//! reader that lower is better. Output depends only on the report contents,
//! so identical reports produce byte-identical SVG.

use testimate_core::regress::EvalReport;
use thiserror::Error;

/// Canvas and plot-area geometry, fixed so output is reproducible.
const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 50.0;
const MARGIN_RIGHT: f64 = 10.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 60.0;
const PLOT_WIDTH: f64 = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
const PLOT_HEIGHT: f64 = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
const BASELINE_Y: f64 = HEIGHT - MARGIN_BOTTOM;
const BAR_FILL: &str = "#4878a8";

#[derive(Debug, Error)]
pub enum ChartError {
    /// The report contains no model entries, so there is nothing to draw.
    #[error("report has no model entries")]
    EmptyReport,
    /// A model entry has no relative MAE (mean target was not positive).
    #[error("model {0} has no relative MAE to plot")]
    MissingRelative(String),
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

/// Renders the report as an SVG document string.
pub fn render_chart(report: &EvalReport) -> Result<String, ChartError> {
    if report.models.is_empty() {
        return Err(ChartError::EmptyReport);
    }
    let mut values = Vec::with_capacity(report.models.len());
    for model in &report.models {
        let v = model
            .relative_mae_percent
            .ok_or_else(|| ChartError::MissingRelative(model.kind.clone()))?;
        values.push(v);
    }
    let max = values.iter().cloned().fold(0.0_f64, f64::max);

    let n = values.len();
    let slot = PLOT_WIDTH / n as f64;
    let bar_width = 0.6 * slot;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" \
         viewBox=\"0 0 {} {}\">\n",
        WIDTH as u32, HEIGHT as u32, WIDTH as u32, HEIGHT as u32
    ));
    svg.push_str(&format!(
        "  <title>Relative MAE by model (lower is better)</title>\n  \
         <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"14\" \
         text-anchor=\"middle\">Relative MAE % by model (lower is better)</text>\n",
        fmt(WIDTH / 2.0),
        fmt(18.0)
    ));
    // Axes.
    svg.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(MARGIN_LEFT),
        fmt(BASELINE_Y),
        fmt(WIDTH - MARGIN_RIGHT),
        fmt(BASELINE_Y)
    ));
    svg.push_str(&format!(
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(MARGIN_LEFT),
        fmt(MARGIN_TOP),
        fmt(MARGIN_LEFT),
        fmt(BASELINE_Y)
    ));
    // Y-axis reference values: zero at the baseline, the maximum at the top.
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"10\" \
         text-anchor=\"end\">{}</text>\n",
        fmt(MARGIN_LEFT - 5.0),
        fmt(BASELINE_Y + 4.0),
        fmt(0.0)
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"10\" \
         text-anchor=\"end\">{}</text>\n",
        fmt(MARGIN_LEFT - 5.0),
        fmt(MARGIN_TOP + 4.0),
        fmt(max)
    ));

    for (i, (model, value)) in report.models.iter().zip(&values).enumerate() {
        let height = if max > 0.0 {
            value / max * PLOT_HEIGHT
        } else {
            0.0
        };
        let x = MARGIN_LEFT + i as f64 * slot + 0.2 * slot;
        let y = BASELINE_Y - height;
        svg.push_str(&format!(
            "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
            fmt(x),
            fmt(y),
            fmt(bar_width),
            fmt(height),
            BAR_FILL
        ));
        let center = MARGIN_LEFT + i as f64 * slot + slot / 2.0;
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"middle\">{}</text>\n",
            fmt(center),
            fmt(y - 5.0),
            fmt(*value)
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" \
             text-anchor=\"middle\">{}</text>\n",
            fmt(center),
            fmt(BASELINE_Y + 15.0),
            model.kind
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
