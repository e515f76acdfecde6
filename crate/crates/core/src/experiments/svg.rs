//! Minimal self-contained SVG plots.

use std::fmt::Write as _;

use super::{BifurcationPoint, GridCell, SweepPoint};
use crate::analysis::Stability;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) =
        values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
        return (lo - 0.5, hi + 0.5);
    }
    (lo, hi)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn frame(out: &mut String, title: &str, xlabel: &str, ylabel: &str, x: (f64, f64), y: (f64, f64)) {
    let _ = write!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>
<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>
<text x="{}" y="{}" text-anchor="middle">{}</text>
<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>
"##,
        W / 2.0,
        escape(title),
        W - LEFT - RIGHT,
        H - TOP - BOTTOM,
        LEFT + (W - LEFT - RIGHT) / 2.0,
        H - 10.0,
        escape(xlabel),
        TOP + (H - TOP - BOTTOM) / 2.0,
        TOP + (H - TOP - BOTTOM) / 2.0,
        escape(ylabel),
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let px = LEFT + f * (W - LEFT - RIGHT);
        let py = H - BOTTOM - f * (H - TOP - BOTTOM);
        let _ = writeln!(
            out,
            r#"<text x="{px}" y="{}" text-anchor="middle">{:.3e}</text>"#,
            H - BOTTOM + 16.0,
            x.0 + f * (x.1 - x.0)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end">{:.3e}</text>"#,
            LEFT - 4.0,
            py + 4.0,
            y.0 + f * (y.1 - y.0)
        );
    }
}

fn project(x: (f64, f64), y: (f64, f64)) -> impl Fn(f64, f64) -> (f64, f64) {
    move |a, b| {
        (LEFT + (a - x.0) / (x.1 - x.0) * (W - LEFT - RIGHT), H - BOTTOM - (b - y.0) / (y.1 - y.0) * (H - TOP - BOTTOM))
    }
}

pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let all = || series.iter().flat_map(|s| s.points.iter());
    let x = bounds(all().map(|p| p.0));
    let y = bounds(all().map(|p| p.1));
    let mut out = String::new();
    frame(&mut out, title, xlabel, ylabel, x, y);
    let to = project(x, y);
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(a, b)| {
                let (px, py) = to(a, b);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        if path.is_empty() {
            continue;
        }
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
            path.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            W - RIGHT - 150.0,
            TOP + 16.0 + 14.0 * i as f64,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// C against R0: stable branches solid, unstable ones dashed.
pub fn bifurcation_plot(points: &[BifurcationPoint]) -> String {
    let mut series = Vec::new();
    let mut cfe_stable = Vec::new();
    let mut cfe_unstable = Vec::new();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for p in points {
        let Some(r) = p.r0_value else { continue };
        match p.cfe_stability {
            Some(Stability::Stable) => cfe_stable.push((r, 0.0)),
            Some(_) => cfe_unstable.push((r, 0.0)),
            None => {}
        }
        for b in &p.branches {
            let target = if b.stability == Stability::Stable { &mut upper } else { &mut lower };
            target.push((r, b.c));
        }
    }
    for (label, pts, dashed) in [
        ("crime-free, stable", cfe_stable, false),
        ("crime-free, unstable", cfe_unstable, true),
        ("endemic, stable", upper, false),
        ("endemic, unstable", lower, true),
    ] {
        if !pts.is_empty() {
            series.push(Series { label: label.into(), points: pts, dashed });
        }
    }
    line_plot("Equilibrium branches", "R0", "C*", &series)
}

pub fn sweep_plot(points: &[SweepPoint]) -> String {
    let series: Vec<Series> = points
        .iter()
        .filter_map(|p| {
            let t = p.trajectory.as_ref()?;
            let stride = (t.times.len() / 1000).max(1);
            Some(Series {
                label: format!("alpha = {:e}", p.alpha),
                points: t.times.iter().zip(&t.states).step_by(stride).map(|(a, y)| (*a, y.c)).collect(),
                dashed: false,
            })
        })
        .collect();
    line_plot("Criminal class under varying imitation", "t", "C(t)", &series)
}

/// Filled-cell heat map of R0 over (sigma, gamma); inadmissible cells grey.
pub fn contour_plot(cells: &[GridCell], nx: usize, ny: usize) -> String {
    let x = bounds(cells.iter().map(|c| c.sigma));
    let y = bounds(cells.iter().map(|c| c.gamma));
    let z = bounds(cells.iter().filter_map(|c| c.r0));
    let mut out = String::new();
    frame(&mut out, "R0 over (sigma, gamma)", "sigma", "gamma", x, y);
    let cw = (W - LEFT - RIGHT) / nx as f64;
    let ch = (H - TOP - BOTTOM) / ny as f64;
    for (k, c) in cells.iter().enumerate() {
        let (i, j) = (k / ny, k % ny);
        let fill = match c.r0 {
            Some(r) => {
                let f = (r - z.0) / (z.1 - z.0);
                format!("rgb({},{},{})", (255.0 * f) as u8, 64, (255.0 * (1.0 - f)) as u8)
            }
            None => "#bbbbbb".into(),
        };
        let _ = writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
            LEFT + i as f64 * cw,
            H - BOTTOM - (j + 1) as f64 * ch,
            cw + 0.3,
            ch + 0.3
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="end">R0 from {:.4} (blue) to {:.4} (red)</text>"#,
        W - RIGHT,
        TOP - 4.0,
        z.0,
        z.1
    );
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plot_is_well_formed() {
        let s = line_plot(
            "a < b",
            "x",
            "y",
            &[Series { label: "one".into(), points: vec![(0.0, 1.0), (1.0, 2.0)], dashed: true }],
        );
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains("a &lt; b"));
        assert!(s.contains("stroke-dasharray"));
        assert!(!s.contains("href"));
    }

    #[test]
    fn empty_input_still_renders() {
        let s = bifurcation_plot(&[]);
        assert!(s.contains("</svg>"));
    }
}
