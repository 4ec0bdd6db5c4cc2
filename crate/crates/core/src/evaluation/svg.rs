//! Hand-rolled SVG rendering for ROC curves. Every coordinate is formatted at
//! fixed precision so identical inputs always produce identical bytes.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::evaluation::metrics::RocPoint;

pub const SVM_COLOR: &str = "#FF00FF";
pub const FOREST_COLOR: &str = "#0000FF";

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub name: String,
    pub color: String,
    pub points: Vec<RocPoint>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 610.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 420.0;

fn x_pix(fpr: f64) -> f64 {
    LEFT + fpr * (RIGHT - LEFT)
}

fn y_pix(tpr: f64) -> f64 {
    BOTTOM - tpr * (BOTTOM - TOP)
}

fn px(v: f64) -> String {
    format!("{v:.2}")
}

/// Renders the curves onto a fixed 640x480 canvas with 0-1 axes, 0.2 ticks,
/// and a dashed diagonal reference line.
pub fn render_roc_svg(title: &str, curves: &[RocCurve]) -> Result<String> {
    if curves.is_empty() {
        return Err(Error::Invalid("no curves to render".into()));
    }
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"monospace\" font-size=\"14\">"
    );
    let _ = writeln!(
        svg,
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#FFFFFF\"/>"
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>",
        px((LEFT + RIGHT) / 2.0),
        title
    );
    let _ = writeln!(
        svg,
        "  <path d=\"M {} {} L {} {} L {} {}\" fill=\"none\" stroke=\"#000000\"/>",
        px(LEFT),
        px(TOP),
        px(LEFT),
        px(BOTTOM),
        px(RIGHT),
        px(BOTTOM)
    );
    for i in 0..=5 {
        let v = i as f64 * 0.2;
        let x = x_pix(v);
        let y = y_pix(v);
        let _ = writeln!(
            svg,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000000\"/>",
            px(x),
            px(BOTTOM),
            px(x),
            px(BOTTOM + 6.0)
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{:.1}</text>",
            px(x),
            px(BOTTOM + 22.0),
            v
        );
        let _ = writeln!(
            svg,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000000\"/>",
            px(LEFT - 6.0),
            px(y),
            px(LEFT),
            px(y)
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.1}</text>",
            px(LEFT - 10.0),
            px(y + 5.0),
            v
        );
    }
    let _ = writeln!(
        svg,
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\">False positive rate</text>",
        px((LEFT + RIGHT) / 2.0),
        px(BOTTOM + 44.0)
    );
    let _ = writeln!(
        svg,
        "  <text x=\"20\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {})\">\
         True positive rate</text>",
        px((TOP + BOTTOM) / 2.0),
        px((TOP + BOTTOM) / 2.0)
    );
    let _ = writeln!(
        svg,
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#808080\" \
         stroke-dasharray=\"6 4\"/>",
        px(LEFT),
        px(BOTTOM),
        px(RIGHT),
        px(TOP)
    );
    for curve in curves {
        let points: Vec<String> = curve
            .points
            .iter()
            .map(|p| format!("{},{}", px(x_pix(p.fpr)), px(y_pix(p.tpr))))
            .collect();
        let _ = writeln!(
            svg,
            "  <polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>",
            curve.color,
            points.join(" ")
        );
    }
    for (i, curve) in curves.iter().enumerate() {
        let y = TOP + 24.0 + i as f64 * 20.0;
        let _ = writeln!(
            svg,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>",
            px(LEFT + 20.0),
            px(y),
            px(LEFT + 48.0),
            px(y),
            curve.color
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\">{}</text>",
            px(LEFT + 56.0),
            px(y + 5.0),
            curve.name
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
