//! Minimal static SVG charts; no interactivity, fixed layout.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 420.0;
const M: f64 = 60.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    log: bool,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone, log: bool) -> Self {
        let tr = |v: f64| if log { v.max(1e-300).log10() } else { v };
        let (mut x0, mut x1) = bounds(xs.map(tr));
        let (mut y0, mut y1) = bounds(ys.map(tr));
        if x1 - x0 < 1e-12 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if y1 - y0 < 1e-12 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        Self { x0, x1, y0, y1, log }
    }

    fn tr(&self, v: f64) -> f64 {
        if self.log {
            v.max(1e-300).log10()
        } else {
            v
        }
    }

    fn px(&self, x: f64) -> f64 {
        M + (self.tr(x) - self.x0) / (self.x1 - self.x0) * (W - 2.0 * M)
    }

    fn py(&self, y: f64) -> f64 {
        H - M - (self.tr(y) - self.y0) / (self.y1 - self.y0) * (H - 2.0 * M)
    }
}

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    v.filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)))
}

fn header(title: &str, xlabel: &str, ylabel: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{title}</text>"#, W / 2.0);
    let _ = writeln!(
        s,
        r#"<line x1="{M}" y1="{}" x2="{}" y2="{}" stroke="black"/><line x1="{M}" y1="{M}" x2="{M}" y2="{}" stroke="black"/>"#,
        H - M,
        W - M,
        H - M,
        H - M
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#, W / 2.0, H - 15.0);
    let _ = writeln!(
        s,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{ylabel}</text>"#,
        H / 2.0,
        H / 2.0
    );
    s
}

fn ticks(s: &mut String, f: &Frame, xs: &[f64], ys: &[f64]) {
    for &x in xs {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#, f.px(x), H - M + 16.0, label(x));
    }
    for &y in ys {
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, M - 6.0, f.py(y) + 4.0, label(y));
    }
}

fn label(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.0e}")
    } else if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

/// Entropy against d, dotted blue line with markers.
pub fn entropy_chart(points: &[(usize, f64)]) -> String {
    let f = Frame::new(points.iter().map(|p| p.0 as f64), points.iter().map(|p| p.1), false);
    let mut s = header("Certified randomness vs number of outcomes", "d", "H (bits)");
    let xs: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    ticks(&mut s, &f, &xs, &[f.y0, (f.y0 + f.y1) / 2.0, f.y1]);
    let path: Vec<String> = points
        .iter()
        .map(|&(d, h)| format!("{:.2},{:.2}", f.px(d as f64), f.py(h)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="blue" stroke-width="1.5" stroke-dasharray="3 3" points="{}"/>"#,
        path.join(" ")
    );
    for &(d, h) in points {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="blue"/>"#, f.px(d as f64), f.py(h));
    }
    s.push_str("</svg>\n");
    s
}

/// Log-log scatter of measured deviation against its bound, with the y = x line.
pub fn robustness_scatter(points: &[(f64, f64, bool)]) -> String {
    let pos: Vec<&(f64, f64, bool)> = points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).collect();
    let all = pos.iter().flat_map(|p| [p.0, p.1]);
    let f = Frame::new(all.clone(), all, true);
    let mut s = header("Robustness: deviation vs bound", "bound", "deviation");
    let decades: Vec<f64> = (f.x0.floor() as i32..=f.x1.ceil() as i32).map(|e| 10f64.powi(e)).collect();
    ticks(&mut s, &f, &decades, &decades);
    let lo = 10f64.powf(f.x0);
    let hi = 10f64.powf(f.x1);
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="4 2"/>"#,
        f.px(lo),
        f.py(lo),
        f.px(hi),
        f.py(hi)
    );
    for (bound, dev, ok) in pos {
        let color = if *ok { "seagreen" } else { "crimson" };
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{color}" fill-opacity="0.6"/>"#, f.px(*bound), f.py(*dev));
    }
    s.push_str("</svg>\n");
    s
}
