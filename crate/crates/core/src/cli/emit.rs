//! Text emitters. Numbers use Rust's shortest round-trip formatting so
//! outputs are stable byte for byte.

use std::f64::consts::PI;
use std::fmt::Write;

use crate::curves::PolyCurve;
use crate::moebius::Complex;
use crate::schottky::{Circle, LimitSample};

/// `#`-prefixed header line carrying the config snapshot.
pub fn csv_header(config_json: &str) -> String {
    format!("# config: {config_json}\n")
}

pub fn limit_set_csv(config_json: &str, samples: &[LimitSample]) -> String {
    let mut out = csv_header(config_json);
    out.push_str("re,im,word\n");
    for s in samples {
        let _ = writeln!(out, "{},{},{}", s.point.re, s.point.im, s.word);
    }
    out
}

/// Contents of an SVG figure, each drawn in its own layer.
#[derive(Debug, Default)]
pub struct Figure<'a> {
    pub circles: &'a [Circle],
    pub points: &'a [Complex],
    pub curve: Option<&'a PolyCurve>,
}

fn bounds(fig: &Figure) -> (Complex, Complex) {
    let mut lo = Complex::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Complex::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut grow = |a: Complex, b: Complex| {
        lo = Complex::new(lo.re.min(a.re), lo.im.min(a.im));
        hi = Complex::new(hi.re.max(b.re), hi.im.max(b.im));
    };
    for c in fig.circles {
        let r = Complex::new(c.radius, c.radius);
        grow(c.center - r, c.center + r);
    }
    for p in fig.points {
        grow(*p, *p);
    }
    if let Some(curve) = fig.curve {
        for (a, b) in curve.bboxes() {
            grow(a, b);
        }
    }
    if !lo.re.is_finite() {
        return (Complex::new(-1.0, -1.0), Complex::new(1.0, 1.0));
    }
    let pad = 0.05 * (hi - lo).norm().max(1e-9);
    (lo - Complex::new(pad, pad), hi + Complex::new(pad, pad))
}

fn comment_safe(text: &str) -> String {
    text.replace("--", "- -")
}

/// Layered SVG: `circles`, `limit-set` and `curve` groups, y axis pointing up.
pub fn render_svg(header: &str, fig: &Figure) -> String {
    let (lo, hi) = bounds(fig);
    let size = hi - lo;
    let dot = 0.002 * size.re.max(size.im);
    let mut out = String::new();
    let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(out, "<!-- {} -->", comment_safe(header));
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"800\" height=\"800\">",
        lo.re, -hi.im, size.re, size.im
    );
    let _ = writeln!(out, "<g transform=\"scale(1,-1)\" fill=\"none\" stroke-width=\"1\">");

    let _ = writeln!(out, "<g id=\"circles\" stroke=\"#1f5fa8\">");
    for c in fig.circles {
        let _ = writeln!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" vector-effect=\"non-scaling-stroke\"/>",
            c.center.re, c.center.im, c.radius
        );
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, "<g id=\"limit-set\" fill=\"#000000\" stroke=\"none\">");
    for p in fig.points {
        let _ = writeln!(out, "<circle class=\"sample\" cx=\"{}\" cy=\"{}\" r=\"{}\"/>", p.re, p.im, dot);
    }
    let _ = writeln!(out, "</g>");

    let _ = writeln!(out, "<g id=\"curve\" stroke=\"#b8321a\">");
    if let Some(curve) = fig.curve {
        for piece in curve.pieces() {
            let d = match piece.circle() {
                None => format!(
                    "M {} {} L {} {}",
                    piece.start.re, piece.start.im, piece.end.re, piece.end.im
                ),
                Some(c) => format!(
                    "M {} {} A {} {} 0 {} {} {} {}",
                    piece.start.re,
                    piece.start.im,
                    c.radius,
                    c.radius,
                    u8::from(piece.sweep() > PI),
                    u8::from(piece.is_ccw()),
                    piece.end.re,
                    piece.end.im
                ),
            };
            let _ = writeln!(
                out,
                "<path class=\"piece\" d=\"{d}\" vector-effect=\"non-scaling-stroke\"/>"
            );
        }
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    out
}
