//! Static SVG emission: persistence diagrams, barcodes, and Euler-curve step
//! plots. Layout is computed in integer pixels from stratum indices, so the
//! output is deterministic and free of floating point.

use std::fmt::Write;

use crate::barcode_k::{Barcode, DiagCoord, Diagram, K0Class};

const WIDTH: i64 = 800;
const HEIGHT: i64 = 600;
const MARGIN: i64 = 60;

fn header() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    )
}

/// Map a diagram coordinate onto a pixel axis. `max_twice` is the largest
/// doubled stratum index of the line; ±∞ sit one slot outside the range.
fn axis_pos(c: DiagCoord, max_twice: usize, span: i64) -> i64 {
    let slots = max_twice as i64 + 3;
    let slot = match c {
        DiagCoord::NegInf => 0,
        DiagCoord::Finite(t) => t as i64 + 1,
        DiagCoord::PosInf => slots - 1,
    };
    MARGIN + slot * span / slots
}

/// A persistence diagram: points above (or on) the diagonal, with the
/// diagonal drawn. Multiplicities above one are printed next to the point.
pub fn diagram_svg(points: &[(DiagCoord, DiagCoord, i64)], max_twice: usize) -> String {
    let span = WIDTH.min(HEIGHT) - 2 * MARGIN;
    let mut out = header();
    let lo = MARGIN;
    let hi = MARGIN + span;
    let _ = writeln!(
        out,
        "<line x1=\"{lo}\" y1=\"{}\" x2=\"{hi}\" y2=\"{}\" stroke=\"gray\"/>",
        flip(lo),
        flip(hi)
    );
    for &(birth, death, mult) in points {
        let x = axis_pos(birth, max_twice, span);
        let y = flip(axis_pos(death, max_twice, span));
        let color = if mult >= 0 { "black" } else { "firebrick" };
        let _ = writeln!(out, "<circle cx=\"{x}\" cy=\"{y}\" r=\"4\" fill=\"{color}\"/>");
        if mult.abs() > 1 || mult < 0 {
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>",
                x + 6,
                y - 6,
                mult
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

fn flip(y: i64) -> i64 {
    HEIGHT - y
}

/// A barcode: stacked horizontal bars in stratum coordinates.
pub fn barcode_svg(b: &Barcode) -> String {
    let max_twice = b.line().num_strata();
    let span = WIDTH - 2 * MARGIN;
    let slots = max_twice as i64 + 2;
    let mut out = header();
    let mut row: i64 = 0;
    let bars: i64 = b.iter().map(|(_, &m)| m as i64).sum();
    let row_h = ((HEIGHT - 2 * MARGIN) / bars.max(1)).clamp(2, 24);
    for (interval, &mult) in b.iter() {
        for _ in 0..mult {
            let x1 = MARGIN + interval.lo.twice() as i64 * span / slots;
            let x2 = MARGIN + (interval.hi.twice() as i64 + 1) * span / slots;
            let y = MARGIN + row * row_h;
            let _ = writeln!(
                out,
                "<line x1=\"{x1}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"black\" stroke-width=\"{}\"/>",
                (row_h - 1).min(6)
            );
            row += 1;
        }
    }
    out.push_str("</svg>\n");
    out
}

/// An Euler curve: one horizontal step per stratum at height equal to the
/// coefficient, with the zero axis drawn.
pub fn euler_svg(k: &K0Class) -> String {
    let n = k.coeffs().len() as i64;
    let span = WIDTH - 2 * MARGIN;
    let max_abs = k.coeffs().iter().map(|c| c.abs()).max().unwrap_or(0).max(1);
    let scale = (HEIGHT / 2 - MARGIN) / max_abs;
    let zero_y = HEIGHT / 2;
    let mut out = header();
    let _ = writeln!(
        out,
        "<line x1=\"{MARGIN}\" y1=\"{zero_y}\" x2=\"{}\" y2=\"{zero_y}\" stroke=\"gray\"/>",
        MARGIN + span
    );
    for (i, &c) in k.coeffs().iter().enumerate() {
        let x1 = MARGIN + i as i64 * span / n.max(1);
        let x2 = MARGIN + (i as i64 + 1) * span / n.max(1);
        let y = zero_y - c * scale;
        let _ = writeln!(
            out,
            "<line x1=\"{x1}\" y1=\"{y}\" x2=\"{x2}\" y2=\"{y}\" stroke=\"black\" stroke-width=\"3\"/>"
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Convenience for diagram SVG from a [`Diagram`].
pub fn diagram_to_svg(d: &Diagram, max_twice: usize) -> String {
    let pts: Vec<(DiagCoord, DiagCoord, i64)> =
        d.iter().map(|(&(b, dth), &m)| (b, dth, m as i64)).collect();
    diagram_svg(&pts, max_twice)
}
