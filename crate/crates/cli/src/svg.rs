//! Self-contained SVG rendering for phase-diagram heatmaps and contour
//! overlays. No plotting dependency: the files are simple enough (rect mesh,
//! polylines, tick labels) that emitting the XML directly is less code than
//! configuring a chart crate, and the output is deterministic.

use std::fmt::Write as _;

use mottlobe_core::phase::PhaseDiagramGrid;

const PLOT_W: f64 = 480.0;
const PLOT_H: f64 = 400.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 96.0;
const MARGIN_T: f64 = 42.0;
const MARGIN_B: f64 = 56.0;
const TICKS: usize = 5;

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Dark-to-bright perceptual ramp (viridis anchors, linearly interpolated).
fn ramp(x: f64) -> (u8, u8, u8) {
    const ANCHORS: [(f64, f64, f64); 6] = [
        (0.267, 0.005, 0.329),
        (0.254, 0.265, 0.530),
        (0.164, 0.471, 0.558),
        (0.135, 0.659, 0.518),
        (0.478, 0.821, 0.318),
        (0.993, 0.906, 0.144),
    ];
    let x = x.clamp(0.0, 1.0) * (ANCHORS.len() - 1) as f64;
    let k = (x.floor() as usize).min(ANCHORS.len() - 2);
    let f = x - k as f64;
    let mix = |a: f64, b: f64| ((a + (b - a) * f) * 255.0).round() as u8;
    let (a, b) = (ANCHORS[k], ANCHORS[k + 1]);
    (mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn of(grid: &PhaseDiagramGrid<f64>) -> Self {
        let (mx, kx) = (grid.mu_axis(), grid.kappa_axis());
        Self {
            x0: mx[0],
            x1: *mx.last().unwrap(),
            y0: kx[0],
            y1: *kx.last().unwrap(),
        }
    }

    /// Data → pixel; degenerate (single-value) axes land mid-plot.
    fn px(&self, x: f64) -> f64 {
        let span = self.x1 - self.x0;
        if span == 0.0 {
            return MARGIN_L + PLOT_W / 2.0;
        }
        MARGIN_L + (x - self.x0) / span * PLOT_W
    }

    fn py(&self, y: f64) -> f64 {
        let span = self.y1 - self.y0;
        if span == 0.0 {
            return MARGIN_T + PLOT_H / 2.0;
        }
        // SVG y grows downward; the κ/U axis grows upward.
        MARGIN_T + PLOT_H - (y - self.y0) / span * PLOT_H
    }
}

fn document(body: &str, title: &str) -> String {
    let width = MARGIN_L + PLOT_W + MARGIN_R;
    let height = MARGIN_T + PLOT_H + MARGIN_B;
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n\
         <text x=\"{tx}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{title}</text>\n\
         {body}</svg>\n",
        tx = MARGIN_L + PLOT_W / 2.0,
        title = esc(title),
    )
}

fn axes(out: &mut String, frame: &Frame) {
    let bx0 = MARGIN_L;
    let by1 = MARGIN_T + PLOT_H;
    write!(
        out,
        "<rect x=\"{bx0}\" y=\"{MARGIN_T}\" width=\"{PLOT_W}\" height=\"{PLOT_H}\" \
         fill=\"none\" stroke=\"black\"/>\n"
    )
    .unwrap();
    for k in 0..TICKS {
        let f = k as f64 / (TICKS - 1) as f64;
        let xv = frame.x0 + (frame.x1 - frame.x0) * f;
        let yv = frame.y0 + (frame.y1 - frame.y0) * f;
        let xp = frame.px(xv);
        let yp = frame.py(yv);
        write!(
            out,
            "<line x1=\"{xp}\" y1=\"{by1}\" x2=\"{xp}\" y2=\"{t}\" stroke=\"black\"/>\n\
             <text x=\"{xp}\" y=\"{ly}\" text-anchor=\"middle\">{lx}</text>\n",
            t = by1 + 5.0,
            ly = by1 + 20.0,
            lx = tick_label(xv),
        )
        .unwrap();
        write!(
            out,
            "<line x1=\"{l}\" y1=\"{yp}\" x2=\"{bx0}\" y2=\"{yp}\" stroke=\"black\"/>\n\
             <text x=\"{tx}\" y=\"{ty}\" text-anchor=\"end\">{lv}</text>\n",
            l = bx0 - 5.0,
            tx = bx0 - 8.0,
            ty = yp + 4.0,
            lv = tick_label(yv),
        )
        .unwrap();
    }
    write!(
        out,
        "<text x=\"{cx}\" y=\"{cy}\" text-anchor=\"middle\">mu/U</text>\n\
         <text x=\"18\" y=\"{my}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {my})\">kappa/U</text>\n",
        cx = MARGIN_L + PLOT_W / 2.0,
        cy = MARGIN_T + PLOT_H + 42.0,
        my = MARGIN_T + PLOT_H / 2.0,
    )
    .unwrap();
}

fn polyline(out: &mut String, frame: &Frame, line: &[(f64, f64)], color: &str, width: f64) {
    if line.len() < 2 {
        return;
    }
    let mut points = String::new();
    for &(x, y) in line {
        write!(points, "{:.2},{:.2} ", frame.px(x), frame.py(y)).unwrap();
    }
    write!(
        out,
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\"/>\n",
        points.trim_end(),
    )
    .unwrap();
}

/// Cell boundaries at midpoints between axis values, extended half a step at
/// the edges, so every grid point is centered in its cell.
fn edges(axis: &[f64]) -> Vec<f64> {
    let n = axis.len();
    if n == 1 {
        return vec![axis[0] - 0.5, axis[0] + 0.5];
    }
    let mut e = Vec::with_capacity(n + 1);
    e.push(axis[0] - (axis[1] - axis[0]) / 2.0);
    for w in axis.windows(2) {
        e.push((w[0] + w[1]) / 2.0);
    }
    e.push(axis[n - 1] + (axis[n - 1] - axis[n - 2]) / 2.0);
    e
}

/// Heatmap of ψ with optional contour overlays at `levels`.
pub fn heatmap_svg(grid: &PhaseDiagramGrid<f64>, levels: &[f64], title: &str) -> String {
    let frame = Frame::of(grid);
    let finite: Vec<f64> = grid.values().iter().copied().filter(|v| v.is_finite()).collect();
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if finite.is_empty() || lo == hi { (0.0, 1.0) } else { (lo, hi) };

    let mut body = String::new();
    let xe = edges(grid.mu_axis());
    let ye = edges(grid.kappa_axis());
    for i in 0..grid.mu_axis().len() {
        for j in 0..grid.kappa_axis().len() {
            let v = grid.value(i, j);
            let fill = if v.is_finite() {
                let (r, g, b) = ramp((v - lo) / (hi - lo));
                format!("rgb({r},{g},{b})")
            } else {
                "rgb(187,187,187)".into()
            };
            // Cells may poke past the frame by half a step; clamp to the box.
            let (x0, x1) = (frame.px(xe[i]).max(MARGIN_L), frame.px(xe[i + 1]).min(MARGIN_L + PLOT_W));
            let (y1, y0) = (frame.py(ye[j]).min(MARGIN_T + PLOT_H), frame.py(ye[j + 1]).max(MARGIN_T));
            write!(
                body,
                "<rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"{fill}\"/>\n",
                w = (x1 - x0).max(0.0),
                h = (y1 - y0).max(0.0),
            )
            .unwrap();
        }
    }
    for &level in levels {
        for line in grid.boundary_contours(level) {
            polyline(&mut body, &frame, &line, "white", 1.5);
        }
    }
    axes(&mut body, &frame);
    colorbar(&mut body, lo, hi);
    document(&body, title)
}

fn colorbar(out: &mut String, lo: f64, hi: f64) {
    let x = MARGIN_L + PLOT_W + 24.0;
    let w = 18.0;
    let n = 64;
    let step = PLOT_H / n as f64;
    for k in 0..n {
        let f = (k as f64 + 0.5) / n as f64;
        let (r, g, b) = ramp(f);
        // Bright end on top.
        let y = MARGIN_T + PLOT_H - (k + 1) as f64 * step;
        write!(
            out,
            "<rect x=\"{x}\" y=\"{y:.2}\" width=\"{w}\" height=\"{h:.2}\" fill=\"rgb({r},{g},{b})\"/>\n",
            h = step + 0.5,
        )
        .unwrap();
    }
    write!(
        out,
        "<rect x=\"{x}\" y=\"{MARGIN_T}\" width=\"{w}\" height=\"{PLOT_H}\" fill=\"none\" stroke=\"black\"/>\n\
         <text x=\"{tx}\" y=\"{ty0}\">{top}</text>\n\
         <text x=\"{tx}\" y=\"{ty1}\">{bottom}</text>\n\
         <text x=\"{tx}\" y=\"{ty2}\">psi</text>\n",
        tx = x + w + 6.0,
        ty0 = MARGIN_T + 10.0,
        ty1 = MARGIN_T + PLOT_H,
        ty2 = MARGIN_T - 10.0,
        top = tick_label(hi),
        bottom = tick_label(lo),
    )
    .unwrap();
}

/// Contours of two maps on one frame (solid vs dashed) for eyeballing how
/// well the boundaries line up.
pub fn overlay_svg(
    a: &PhaseDiagramGrid<f64>,
    b: &PhaseDiagramGrid<f64>,
    levels: &[f64],
    title: &str,
) -> String {
    let frame = Frame::of(a);
    let mut body = String::new();
    for &level in levels {
        for line in a.boundary_contours(level) {
            polyline(&mut body, &frame, &line, "#1f77b4", 2.0);
        }
        for line in b.boundary_contours(level) {
            polyline(&mut body, &frame, &line, "#d62728", 2.0);
        }
    }
    axes(&mut body, &frame);
    write!(
        body,
        "<text x=\"{x}\" y=\"{y0}\" fill=\"#1f77b4\">{la}</text>\n\
         <text x=\"{x}\" y=\"{y1}\" fill=\"#d62728\">{lb}</text>\n",
        x = MARGIN_L + PLOT_W + 12.0,
        y0 = MARGIN_T + 16.0,
        y1 = MARGIN_T + 34.0,
        la = a.source(),
        lb = b.source(),
    )
    .unwrap();
    document(&body, title)
}
