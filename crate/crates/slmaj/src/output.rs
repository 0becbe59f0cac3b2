//! Plot-data and SVG emission for sweep results.

use sl_majorant::bounds::{format_sig17, BoundCurve};

/// Gnuplot-compatible whitespace-separated data: one two-column block per
/// curve (`gamma value`), blocks separated by two blank lines so they are
/// addressable with `index`.
pub fn plot_data(curve: &BoundCurve) -> String {
    let mut out = String::new();
    out.push_str("# lower bound L(gamma)\n");
    for p in &curve.points {
        if let Some(l) = p.lower {
            out.push_str(&format!("{} {}\n", format_sig17(p.gamma), format_sig17(l)));
        }
    }
    out.push_str("\n\n# upper bound U(gamma)\n");
    for p in &curve.points {
        if let Some(u) = p.upper {
            out.push_str(&format!("{} {}\n", format_sig17(p.gamma), format_sig17(u)));
        }
    }
    out
}

/// Self-contained SVG line chart of L and U against γ.
pub fn svg_chart(curve: &BoundCurve) -> String {
    const W: f64 = 800.0;
    const H: f64 = 500.0;
    const ML: f64 = 70.0; // margins
    const MR: f64 = 20.0;
    const MT: f64 = 30.0;
    const MB: f64 = 50.0;

    let lower_pts: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter_map(|p| p.lower.map(|v| (p.gamma, v)))
        .collect();
    let upper_pts: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter_map(|p| p.upper.map(|v| (p.gamma, v)))
        .collect();

    let xs: Vec<f64> = curve.points.iter().map(|p| p.gamma).collect();
    let ys: Vec<f64> = lower_pts
        .iter()
        .chain(upper_pts.iter())
        .map(|&(_, v)| v)
        .collect();
    let (x0, x1) = span(&xs, 0.0);
    let (y0, y1) = span(&ys, std::f64::consts::PI * std::f64::consts::PI);
    let sx = move |x: f64| ML + (x - x0) / (x1 - x0).max(1e-12) * (W - ML - MR);
    let sy = move |y: f64| H - MB - (y - y0) / (y1 - y0).max(1e-12) * (H - MT - MB);

    let poly = |pts: &[(f64, f64)]| -> String {
        pts.iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect::<Vec<_>>()
            .join(" ")
    };

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n"
    ));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // Axes.
    s.push_str(&format!(
        "<line x1=\"{ML}\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"black\"/>\n",
        H - MB,
        W - MR
    ));
    s.push_str(&format!(
        "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - MB
    ));
    // Tick labels at the corners of the data window.
    s.push_str(&format!(
        "<text x=\"{ML}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{x0:.3}</text>\n",
        H - MB + 18.0
    ));
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{x1:.3}</text>\n",
        sx(x1),
        H - MB + 18.0
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{y0:.4}</text>\n",
        ML - 6.0,
        sy(y0) + 4.0
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"end\">{y1:.4}</text>\n",
        ML - 6.0,
        sy(y1) + 4.0
    ));
    s.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">gamma</text>\n",
        (ML + W - MR) / 2.0,
        H - 12.0
    ));
    if !lower_pts.is_empty() {
        s.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            poly(&lower_pts)
        ));
    }
    if !upper_pts.is_empty() {
        s.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            poly(&upper_pts)
        ));
    }
    // Legend.
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" fill=\"#1f77b4\">L(gamma): search lower bound</text>\n",
        ML + 10.0,
        MT + 16.0
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"13\" fill=\"#d62728\">U(gamma): certificate upper bound</text>\n",
        ML + 10.0,
        MT + 34.0
    ));
    s.push_str("</svg>\n");
    s
}

fn span(vals: &[f64], fallback: f64) -> (f64, f64) {
    if vals.is_empty() {
        return (fallback - 0.5, fallback + 0.5);
    }
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < 1e-9 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}
