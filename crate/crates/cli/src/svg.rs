//! Deterministic SVG figures of a section: the ribbon on the cylinder, its
//! image in the square and its raster.

use std::fmt::Write;

use symwrap::sections::SectionDescription;
use symwrap::topology::{square_slit, Raster};

const SIZE: f64 = 400.0;
const MARGIN: f64 = 20.0;
const RIBBON_FILL: &str = "#c0392b";
const SLIT_STROKE: &str = "#1f4e79";

struct Svg {
    body: String,
    width: f64,
    height: f64,
}

impl Svg {
    fn new(width: f64, height: f64) -> Self {
        Svg {
            body: String::new(),
            width,
            height,
        }
    }

    fn push(&mut self, element: &str) {
        self.body.push_str("  ");
        self.body.push_str(element);
        self.body.push('\n');
    }

    fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n{}</svg>\n",
            self.body,
            w = num(self.width),
            h = num(self.height),
        )
    }
}

fn num(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

/// Maps `[0,1] × [0,h]` to pixels with the y axis pointing up.
fn px(x: f64, y: f64, h: f64) -> (String, String) {
    (num(MARGIN + x * SIZE), num(MARGIN + (h - y) * SIZE))
}

fn frame(svg: &mut Svg, h: f64) {
    let (x, y) = px(0.0, h, h);
    svg.push(&format!(
        "<rect x=\"{x}\" y=\"{y}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>",
        num(SIZE),
        num(h * SIZE)
    ));
}

fn caption(svg: &mut Svg, text: &str) {
    svg.push(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\">{}</text>",
        num(MARGIN),
        num(MARGIN - 6.0),
        escape(text)
    ));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn z_label(section: &SectionDescription) -> String {
    let coords: Vec<String> = section.z.iter().map(|v| num(*v)).collect();
    format!("z = ({})", coords.join(", "))
}

fn placeholder(section: &SectionDescription, what: &str) -> String {
    let mut svg = Svg::new(SIZE + 2.0 * MARGIN, SIZE + 2.0 * MARGIN);
    frame(&mut svg, 1.0);
    caption(&mut svg, &format!("{what}: {}", z_label(section)));
    svg.push(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"16\" text-anchor=\"middle\">empty section ({:?})</text>",
        num(MARGIN + SIZE / 2.0),
        num(MARGIN + SIZE / 2.0),
        section.status
    ));
    svg.finish()
}

/// The ribbon `V × W` on the unrolled cylinder `[0,1) × (0,1)` with the slit.
pub fn ribbon_svg(section: &SectionDescription) -> String {
    let Some(slit) = section.slit_angle() else {
        return placeholder(section, "ribbon");
    };
    let mut svg = Svg::new(SIZE + 2.0 * MARGIN, SIZE + 2.0 * MARGIN);
    caption(&mut svg, &format!("ribbon V x W, {}", z_label(section)));
    for iv in section.w.intervals() {
        let (x, y) = px(0.0, iv.end, 1.0);
        svg.push(&format!(
            "<rect x=\"{x}\" y=\"{y}\" width=\"{}\" height=\"{}\" fill=\"{RIBBON_FILL}\"/>",
            num(SIZE),
            num(iv.length() * SIZE)
        ));
    }
    let (x0, y0) = px(slit, 0.0, 1.0);
    let (x1, y1) = px(slit, 1.0, 1.0);
    svg.push(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y1}\" stroke=\"{SLIT_STROKE}\" stroke-width=\"2\" stroke-dasharray=\"6 4\"/>"
    ));
    frame(&mut svg, 1.0);
    svg.finish()
}

fn square_path(half: f64) -> String {
    let pts = [
        (0.5 - half, 0.5 - half),
        (0.5 + half, 0.5 - half),
        (0.5 + half, 0.5 + half),
        (0.5 - half, 0.5 + half),
    ];
    let mut d = String::new();
    for (k, (x, y)) in pts.iter().enumerate() {
        let (a, b) = px(*x, *y, 1.0);
        let _ = write!(d, "{}{a} {b} ", if k == 0 { "M" } else { "L" });
    }
    d.push('Z');
    d
}

/// The section in the unit square: nested square bands with the straight slit to `y₀`.
pub fn square_svg(section: &SectionDescription) -> String {
    let Some([a, b]) = square_slit(section) else {
        return placeholder(section, "square");
    };
    let mut svg = Svg::new(SIZE + 2.0 * MARGIN, SIZE + 2.0 * MARGIN);
    caption(&mut svg, &format!("section in the square, {}", z_label(section)));
    // the level set of height p is the square of half-side √(1 − p)/2
    let half = |p: f64| (1.0 - p).max(0.0).sqrt() / 2.0;
    for iv in section.w.intervals() {
        svg.push(&format!(
            "<path d=\"{} {}\" fill=\"{RIBBON_FILL}\" fill-rule=\"evenodd\"/>",
            square_path(half(iv.start)),
            square_path(half(iv.end))
        ));
    }
    let (x0, y0) = px(a[0], a[1], 1.0);
    let (x1, y1) = px(b[0], b[1], 1.0);
    svg.push(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y1}\" stroke=\"{SLIT_STROKE}\" stroke-width=\"2\"/>"
    ));
    svg.push(&format!(
        "<circle cx=\"{x1}\" cy=\"{y1}\" r=\"3\" fill=\"white\" stroke=\"{SLIT_STROKE}\"/>"
    ));
    frame(&mut svg, 1.0);
    svg.finish()
}

/// Occupied cells as one rectangle per horizontal run.
pub fn raster_svg(section: &SectionDescription, raster: &Raster) -> String {
    if !section.is_generic() {
        return placeholder(section, "raster");
    }
    let (w, h) = (raster.width(), raster.height());
    let scale = SIZE / w.max(h) as f64;
    let mut svg = Svg::new(w as f64 * scale + 2.0 * MARGIN, h as f64 * scale + 2.0 * MARGIN);
    caption(&mut svg, &format!("raster N = {}, {}", raster.resolution(), z_label(section)));
    let mut d = String::new();
    for j in 0..h {
        let row_y = MARGIN + (h - 1 - j) as f64 * scale;
        let mut i = 0;
        while i < w {
            if !raster.get(i, j) {
                i += 1;
                continue;
            }
            let start = i;
            while i < w && raster.get(i, j) {
                i += 1;
            }
            let _ = write!(
                d,
                "M{} {}h{}v{}h-{}Z",
                num(MARGIN + start as f64 * scale),
                num(row_y),
                num((i - start) as f64 * scale),
                num(scale),
                num((i - start) as f64 * scale)
            );
        }
    }
    svg.push(&format!("<path d=\"{d}\" fill=\"black\"/>"));
    svg.push(&format!(
        "<rect x=\"{m}\" y=\"{m}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"gray\"/>",
        num(w as f64 * scale),
        num(h as f64 * scale),
        m = num(MARGIN)
    ));
    svg.finish()
}
