//! Self-contained SVG bifurcation diagrams: `s = ⟨e_K, v⟩` against `λ`.

use std::fmt::Write as _;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BranchPlot {
    pub label: String,
    /// `(λ, s)`, ordered along the branch.
    pub points: Vec<(f64, f64)>,
    /// `(λ, s, text)`, e.g. Morse indices.
    pub annotations: Vec<(f64, f64, String)>,
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(vals: impl Iterator<Item = f64>, fallback: (f64, f64)) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    if !lo.is_finite() {
        return fallback;
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
    (lo - pad, hi + pad)
}

/// Renders the branches with axes, the trivial branch `s = 0` and a legend.
pub fn branch_diagram(title: &str, plots: &[BranchPlot]) -> String {
    let (x0, x1) = range(plots.iter().flat_map(|p| p.points.iter().map(|q| q.0)), (0.0, 1.0));
    let (y0, y1) = range(plots.iter().flat_map(|p| p.points.iter().map(|q| q.1)).chain([0.0]), (-1.0, 1.0));
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let mut o = String::new();
    let _ = writeln!(o, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(o, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(o, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
    // Axes box and ticks.
    let _ = writeln!(o, r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#, W - 2.0 * PAD, H - 2.0 * PAD);
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let _ = writeln!(o, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{:.3}</text>"#, sx(xv), H - PAD + 18.0, xv);
        let _ = writeln!(o, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.3}</text>"#, PAD - 6.0, sy(yv) + 4.0, yv);
    }
    let _ = writeln!(o, r#"<text x="{}" y="{}" text-anchor="middle">λ</text>"#, W / 2.0, H - 16.0);
    let _ = writeln!(o, r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">s</text>"#, H / 2.0, H / 2.0);
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(o, r#"<line x1="{PAD}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="4 3"/>"#, sy(0.0), W - PAD, sy(0.0));
    }
    for (i, p) in plots.iter().enumerate() {
        let c = COLORS[i % COLORS.len()];
        if !p.points.is_empty() {
            let pts: Vec<String> = p.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(o, r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="2"/>"#, pts.join(" "));
        }
        for (x, y, text) in &p.annotations {
            let _ = writeln!(o, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{c}"/>"#, sx(*x), sy(*y));
            let _ = writeln!(o, r#"<text x="{:.2}" y="{:.2}" fill="{c}">{}</text>"#, sx(*x) + 5.0, sy(*y) - 5.0, escape(text));
        }
        let _ = writeln!(o, r#"<text x="{:.2}" y="{:.2}" fill="{c}">{}</text>"#, W - PAD - 150.0, PAD + 16.0 * (i as f64 + 1.0), escape(&p.label));
    }
    o.push_str("</svg>\n");
    o
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_diagram_has_axes() {
        let s = branch_diagram("empty", &[]);
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(s.contains("<rect x=") && !s.contains("<polyline"));
    }

    #[test]
    fn branch_is_drawn() {
        let p = BranchPlot { label: "a<b".into(), points: vec![(1.0, -0.1), (2.0, 0.0), (1.0, 0.1)], annotations: vec![(1.0, 0.1, "i=2".into())] };
        let s = branch_diagram("t", &[p]);
        assert!(s.contains("<polyline") && s.contains("a&lt;b") && s.contains("i=2"));
    }
}
