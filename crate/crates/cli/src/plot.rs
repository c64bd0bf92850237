//! Fixed-style SVG figures: streamline fan with velocity arrows, and drift
//! profile with orbit overlay. Data values ride along as attributes so the
//! geometry can be checked without rasterising.

use std::f64::consts::PI;
use std::fmt::Write;

use hodowave::fields::FieldSample;
use hodowave::kinematics::{LevelDrift, Streamline, Trajectory};
use hodowave::PhysicalFrame;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

/// Maps a data rectangle onto a pixel rectangle, y upwards.
struct Axes {
    x: (f64, f64),
    y: (f64, f64),
    left: f64,
    top: f64,
    w: f64,
    h: f64,
}

impl Axes {
    fn new(x: (f64, f64), y: (f64, f64), left: f64, top: f64, w: f64, h: f64) -> Self {
        let pad = |(a, b): (f64, f64)| if b > a { (a, b) } else { (a - 0.5, a + 0.5) };
        Self { x: pad(x), y: pad(y), left, top, w, h }
    }

    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x.0) / (self.x.1 - self.x.0) * self.w
    }

    fn py(&self, y: f64) -> f64 {
        self.top + self.h - (y - self.y.0) / (self.y.1 - self.y.0) * self.h
    }

    fn frame(&self, out: &mut String, xlabel: &str, ylabel: &str) {
        let _ = writeln!(
            out,
            r#"<rect class="axes" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black" stroke-width="1"/>"#,
            self.left, self.top, self.w, self.h
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{xlabel}</text>"#,
            self.left + 0.5 * self.w,
            self.top + self.h + 30.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{ylabel}</text>"#,
            self.left - 30.0,
            self.top + 0.5 * self.h,
            self.left - 30.0,
            self.top + 0.5 * self.h
        );
    }

    fn polyline(&self, pts: impl Iterator<Item = (f64, f64)>) -> String {
        pts.map(|(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn header(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

/// Streamlines over one period, crest at x = 0, with fixed-frame velocity arrows.
pub fn streamline_figure(frame: &PhysicalFrame, lines: &[Streamline], lattice: &[FieldSample]) -> String {
    let top = frame.eta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ax = Axes::new(
        (-PI, PI),
        (-frame.depth, top + 0.05 * frame.depth),
        MARGIN,
        MARGIN,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN,
    );
    let mut out = header(WIDTH, HEIGHT);
    ax.frame(&mut out, "x", "y");
    for line in lines {
        // close the period: σ(π) = σ(-π)
        let pts = line.x.iter().zip(&line.sigma).map(|(x, s)| (*x, *s)).chain(std::iter::once((PI, line.sigma[0])));
        let _ = writeln!(
            out,
            r#"<polyline class="streamline" data-p="{}" points="{}" fill="none" stroke="steelblue" stroke-width="1"/>"#,
            line.p,
            ax.polyline(pts)
        );
    }
    let vmax = lattice.iter().fold(0.0f64, |m, s| m.max(s.u.hypot(s.v)));
    let cell = ax.w / 24.0;
    let scale = if vmax > 0.0 { 0.8 * cell / vmax } else { 0.0 };
    for s in lattice {
        let (x1, y1) = (ax.px(s.x), ax.py(s.y));
        let _ = writeln!(
            out,
            r#"<line class="arrow" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" data-x="{}" data-y="{}" data-u="{}" data-v="{}" stroke="crimson" stroke-width="1"/>"#,
            x1,
            y1,
            x1 + scale * s.u,
            y1 - scale * s.v,
            s.x,
            s.y,
            s.u,
            s.v
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Drift per period against stream level, beside particle paths relative to
/// their starting points.
pub fn drift_figure(profile: &[LevelDrift], traces: &[(f64, Trajectory)]) -> String {
    let panel = 0.5 * (WIDTH - 3.0 * MARGIN);
    let h = HEIGHT - 2.0 * MARGIN;
    let dmin = profile.iter().fold(f64::INFINITY, |m, l| m.min(l.drift)).min(0.0);
    let dmax = profile.iter().fold(f64::NEG_INFINITY, |m, l| m.max(l.drift));
    let p0 = profile.first().map_or(-1.0, |l| l.p);
    let left = Axes::new((dmin, dmax), (p0, 0.0), MARGIN, MARGIN, panel, h);
    let mut out = header(WIDTH, HEIGHT);
    left.frame(&mut out, "D", "p");
    let _ = writeln!(
        out,
        r#"<polyline class="drift" points="{}" fill="none" stroke="darkgreen" stroke-width="1.5"/>"#,
        left.polyline(profile.iter().map(|l| (l.drift, l.p)))
    );
    for l in profile {
        let _ = writeln!(
            out,
            r#"<circle class="level" cx="{:.2}" cy="{:.2}" r="2" data-p="{}" data-drift="{}" fill="darkgreen"/>"#,
            left.px(l.drift),
            left.py(l.p),
            l.p,
            l.drift
        );
    }
    let rel = |tr: &Trajectory| -> Vec<(f64, f64)> {
        let s0 = &tr.samples[0];
        tr.samples.iter().map(|s| (s.big_x - s0.big_x, s.big_y - s0.big_y)).collect()
    };
    let paths: Vec<(f64, Vec<(f64, f64)>)> = traces.iter().map(|(p, tr)| (*p, rel(tr))).collect();
    let (mut xr, mut yr) = ((0.0f64, 0.0f64), (0.0f64, 0.0f64));
    for (_, pts) in &paths {
        for &(x, y) in pts {
            xr = (xr.0.min(x), xr.1.max(x));
            yr = (yr.0.min(y), yr.1.max(y));
        }
    }
    let right = Axes::new(xr, yr, 2.0 * MARGIN + panel, MARGIN, panel, h);
    right.frame(&mut out, "X - X(0)", "Y - Y(0)");
    const COLORS: [&str; 4] = ["black", "steelblue", "crimson", "darkorange"];
    for (n, (p, pts)) in paths.iter().enumerate() {
        let _ = writeln!(
            out,
            r#"<polyline class="orbit" data-p="{}" points="{}" fill="none" stroke="{}" stroke-width="1"/>"#,
            p,
            right.polyline(pts.iter().step_by(10).cloned().chain(pts.last().cloned())),
            COLORS[n % COLORS.len()]
        );
    }
    out.push_str("</svg>\n");
    out
}
