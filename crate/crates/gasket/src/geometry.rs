//! Planar realization: the contraction pieces, their convex hull, the
//! overlap region, the expanding map with the overlap as a hole, a survivor
//! grid estimator, and SVG rendering of the first generation.

use crate::expansion::Beta;
use crate::interval::{Dyadic, RealInterval, Trivalent, DEFAULT_PREC};
use crate::symbolic::Digit;
use serde::Serialize;
use std::cmp::Ordering;
use std::fmt::Write as _;

/// Point with certified coordinates.
#[derive(Clone, Debug)]
pub struct Point2 {
    pub x: RealInterval,
    pub y: RealInterval,
}

impl Point2 {
    pub fn new(x: RealInterval, y: RealInterval) -> Self {
        Point2 { x, y }
    }
}

/// Closed triangle, stored by its three vertices.
#[derive(Clone, Debug)]
pub struct Triangle {
    pub vertices: [Point2; 3],
}

/// Convex hull of the attractor: legs of length `M/(beta-1)` on the axes.
pub fn hull(beta: &Beta, prec: u32) -> Triangle {
    let leg = leg_length(beta, prec);
    let zero = RealInterval::zero();
    Triangle {
        vertices: [
            Point2::new(zero.clone(), zero.clone()),
            Point2::new(leg.clone(), zero.clone()),
            Point2::new(zero, leg),
        ],
    }
}

fn leg_length(beta: &Beta, prec: u32) -> RealInterval {
    RealInterval::from_int(beta.m as i64)
        .div(&beta.value().sub(&RealInterval::from_int(1), prec), prec)
}

/// One contraction step `p -> (p + d) / beta`.
pub fn apply_f(d: Digit, p: &Point2, beta: &Beta, prec: u32) -> Point2 {
    let bv = beta.value();
    Point2 {
        x: p.x.add(&RealInterval::from_int(d.i as i64), prec).div(bv, prec),
        y: p.y.add(&RealInterval::from_int(d.j as i64), prec).div(bv, prec),
    }
}

/// Inverse branch `p -> beta p - d` of the expanding map.
pub fn apply_f_inverse(d: Digit, p: &Point2, beta: &Beta, prec: u32) -> Point2 {
    let bv = beta.value();
    Point2 {
        x: bv.mul(&p.x, prec).sub(&RealInterval::from_int(d.i as i64), prec),
        y: bv.mul(&p.y, prec).sub(&RealInterval::from_int(d.j as i64), prec),
    }
}

/// Containment of `p` in the piece of digit `d`:
/// `x >= i/b`, `y >= j/b`, `x + y <= (i+j)/b + leg/b`.
fn piece_contains(d: Digit, p: &Point2, beta: &Beta, strict: bool, prec: u32) -> Trivalent {
    let bv = beta.value();
    let xi = RealInterval::from_int(d.i as i64).div(bv, prec);
    let yj = RealInterval::from_int(d.j as i64).div(bv, prec);
    let hyp = RealInterval::from_int((d.i + d.j) as i64)
        .add(&leg_length(beta, prec), prec)
        .div(bv, prec);
    let sum = p.x.add(&p.y, prec);
    let (a, b, c) = if strict {
        (p.x.gt(&xi), p.y.gt(&yj), sum.lt(&hyp))
    } else {
        (p.x.ge(&xi), p.y.ge(&yj), sum.le(&hyp))
    };
    if a.is_true() && b.is_true() && c.is_true() {
        Trivalent::True
    } else if a.is_false() || b.is_false() || c.is_false() {
        Trivalent::False
    } else {
        Trivalent::Undecided
    }
}

/// Three-valued overlap membership: inside when certainly interior to at
/// least two pieces, outside when at most one piece can contain the point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OverlapStatus {
    Inside,
    Outside,
    Boundary,
}

pub fn in_overlap(p: &Point2, beta: &Beta, prec: u32) -> OverlapStatus {
    let mut interior = 0usize;
    let mut possible = 0usize;
    for d in Digit::alphabet(beta.m) {
        match piece_contains(d, p, beta, true, prec) {
            Trivalent::True => {
                interior += 1;
                possible += 1;
            }
            Trivalent::Undecided => possible += 1,
            Trivalent::False => {
                if piece_contains(d, p, beta, false, prec) != Trivalent::False {
                    possible += 1;
                }
            }
        }
    }
    if interior >= 2 {
        OverlapStatus::Inside
    } else if possible <= 1 {
        OverlapStatus::Outside
    } else {
        OverlapStatus::Boundary
    }
}

/// Digits whose closed piece can contain `p`, with the certainly-interior
/// subset; used by the expanding map and the survivor grid.
pub fn containing_pieces(p: &Point2, beta: &Beta, prec: u32) -> (Vec<Digit>, Vec<Digit>) {
    let mut interior = Vec::new();
    let mut possible = Vec::new();
    for d in Digit::alphabet(beta.m) {
        match piece_contains(d, p, beta, true, prec) {
            Trivalent::True => {
                interior.push(d);
                possible.push(d);
            }
            Trivalent::Undecided => possible.push(d),
            Trivalent::False => {
                if piece_contains(d, p, beta, false, prec) != Trivalent::False {
                    possible.push(d);
                }
            }
        }
    }
    (interior, possible)
}

/// Whether the attractor fills its hull: true exactly for
/// `beta <= (M+2)/2`, three-valued on enclosures straddling the threshold.
pub fn s_equals_hull(beta: &Beta) -> Trivalent {
    let prec = DEFAULT_PREC;
    let threshold = RealInterval::from_ratio(beta.m as i64 + 2, 2, prec);
    beta.value().le(&threshold)
}

/// Distinct maximal overlap triangles. Every pairwise intersection of two
/// pieces is an axis-corner triangle `{x >= i/b, y >= j/b, x+y <= C_ij}`
/// with `C_ij = (i+j-1)/b + leg/b`; the maximal ones sit at corners
/// `(i,0)`, `(0,j)` for `1 <= i,j <= M` and `(i,j)` with `i,j >= 1`,
/// `i+j <= M+1`, all with legs `(M+1-beta)/(beta(beta-1))`.
pub fn overlap_corners(m: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for i in 1..=m {
        out.push((i, 0));
    }
    for j in 1..=m {
        out.push((0, j));
    }
    for i in 1..=m {
        for j in 1..=(m + 1 - i) {
            out.push((i, j));
        }
    }
    out
}

/// Census of first-generation counts: number of pieces and of distinct
/// maximal overlap triangles.
pub fn first_generation_census(m: u32) -> (usize, usize) {
    let light = ((m + 1) * (m + 2) / 2) as usize;
    let dark = overlap_corners(m).len();
    (light, dark)
}

/// Cell verdict of the survivor grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CellStatus {
    /// survived every iteration
    Survives,
    /// robustly hit the overlap hole at this step
    Dead(u32),
    /// left every piece at this step (cannot belong to the attractor)
    OutsideGasket(u32),
}

#[derive(Clone, Debug)]
pub struct SurvivorGrid {
    pub resolution: usize,
    pub iterations: u32,
    pub cells: Vec<CellStatus>,
    /// world-coordinate cell width
    pub cell_width: f64,
}

impl SurvivorGrid {
    pub fn survivors(&self) -> usize {
        self.cells.iter().filter(|c| matches!(c, CellStatus::Survives)).count()
    }

    pub fn survivor_fraction(&self) -> f64 {
        let considered = self
            .cells
            .iter()
            .filter(|c| !matches!(c, CellStatus::OutsideGasket(0)))
            .count()
            .max(1);
        self.survivors() as f64 / considered as f64
    }

    /// 8-bit PGM dump: survived-step count, 255 for full survivors.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.resolution, self.resolution).into_bytes();
        for c in &self.cells {
            out.push(match c {
                CellStatus::Survives => 255,
                CellStatus::Dead(s) => (*s).min(254) as u8,
                CellStatus::OutsideGasket(s) => (*s).min(127) as u8,
            });
        }
        out
    }
}

const GRID_RESOLUTION_CAP: usize = 4096;
const GRID_ITERATIONS_CAP: u32 = 64;

/// Per-piece margins at an f64 point: robust-interior count against the
/// slack, loose-closure count, and the deepest branch.
fn classify_point(
    px: f64,
    py: f64,
    b: f64,
    leg: f64,
    slack: f64,
    alphabet: &[Digit],
) -> (usize, usize, Option<Digit>) {
    let mut robust = 0;
    let mut loose = 0;
    let mut best: Option<(f64, Digit)> = None;
    for &d in alphabet {
        let x0 = d.i as f64 / b;
        let y0 = d.j as f64 / b;
        let hyp = (d.i + d.j) as f64 / b + leg / b;
        let margin = (px - x0).min(py - y0).min(hyp - px - py);
        if margin > slack {
            robust += 1;
        }
        if margin >= -slack {
            loose += 1;
        }
        if best.as_ref().map_or(true, |(bm, _)| margin > *bm) {
            best = Some((margin, d));
        }
    }
    (robust, loose, best.map(|(_, d)| d))
}

/// Orbit fate of one point under the expanding map with the overlap hole.
pub fn point_status(beta: &Beta, x: f64, y: f64, iterations: u32, slack: f64) -> CellStatus {
    let b = beta.value().mid().to_f64();
    let leg = beta.m as f64 / (b - 1.0);
    let alphabet = Digit::alphabet(beta.m);
    let (mut px, mut py) = (x, y);
    for step in 0..iterations {
        let (robust, loose, best) = classify_point(px, py, b, leg, slack, &alphabet);
        if robust >= 2 {
            return CellStatus::Dead(step);
        }
        if loose == 0 {
            return CellStatus::OutsideGasket(step);
        }
        let d = best.expect("nonempty alphabet");
        px = b * px - d.i as f64;
        py = b * py - d.j as f64;
    }
    CellStatus::Survives
}

/// Iterates the expanding map with the overlap as a hole on a grid of cell
/// centers, in plain f64: an estimator, with half-cell slack applied so a
/// cell dies only when its center is robustly inside the hole. Surviving
/// all iterations is a necessary condition for unique-coding membership.
pub fn survivor_grid(beta: &Beta, resolution: usize, iterations: u32) -> SurvivorGrid {
    assert!(resolution >= 2 && resolution <= GRID_RESOLUTION_CAP, "resolution out of range");
    assert!(iterations >= 1 && iterations <= GRID_ITERATIONS_CAP, "iterations out of range");
    let m = beta.m as f64;
    let b = beta.value().mid().to_f64();
    let leg = m / (b - 1.0);
    let cell = leg / resolution as f64;
    let slack = 0.5 * cell;
    let mut cells = Vec::with_capacity(resolution * resolution);
    for row in 0..resolution {
        for col in 0..resolution {
            let px = (col as f64 + 0.5) * cell;
            let py = (row as f64 + 0.5) * cell;
            if px + py > leg + slack {
                cells.push(CellStatus::OutsideGasket(0));
                continue;
            }
            cells.push(point_status(beta, px, py, iterations, slack));
        }
    }
    SurvivorGrid { resolution, iterations, cells, cell_width: cell }
}

/// Row-parallel variant of [`survivor_grid`]; results are identical.
pub fn survivor_grid_threaded(
    beta: &Beta,
    resolution: usize,
    iterations: u32,
    threads: usize,
) -> SurvivorGrid {
    assert!(resolution >= 2 && resolution <= GRID_RESOLUTION_CAP, "resolution out of range");
    assert!(iterations >= 1 && iterations <= GRID_ITERATIONS_CAP, "iterations out of range");
    let threads = threads.clamp(1, 64);
    if threads == 1 {
        return survivor_grid(beta, resolution, iterations);
    }
    let m = beta.m as f64;
    let b = beta.value().mid().to_f64();
    let leg = m / (b - 1.0);
    let cell = leg / resolution as f64;
    let slack = 0.5 * cell;
    let mut cells = vec![CellStatus::OutsideGasket(0); resolution * resolution];
    let chunk = resolution.div_ceil(threads);
    std::thread::scope(|scope| {
        for (t, slice) in cells.chunks_mut(chunk * resolution).enumerate() {
            let beta = beta.clone();
            scope.spawn(move || {
                let row0 = t * chunk;
                for (offset, cell_slot) in slice.iter_mut().enumerate() {
                    let row = row0 + offset / resolution;
                    let col = offset % resolution;
                    let px = (col as f64 + 0.5) * cell;
                    let py = (row as f64 + 0.5) * cell;
                    *cell_slot = if px + py > leg + slack {
                        CellStatus::OutsideGasket(0)
                    } else {
                        point_status(&beta, px, py, iterations, slack)
                    };
                }
            });
        }
    });
    SurvivorGrid { resolution, iterations, cells, cell_width: cell }
}

/// First-generation SVG: hull outline, light pieces, dark overlap
/// triangles, axis tick labels `i/b` and the leg label.
pub fn render_first_generation(beta: &Beta) -> String {
    let m = beta.m;
    let prec = DEFAULT_PREC;
    let b = beta.value().mid().to_f64();
    let leg = m as f64 / (b - 1.0);
    let side = 720.0f64;
    let pad = 60.0f64;
    let scale = (side - 2.0 * pad) / leg;
    let tx = |x: f64| pad + x * scale;
    let ty = |y: f64| side - pad - y * scale;
    let tri = |x0: f64, y0: f64, l: f64| {
        format!(
            "{:.3},{:.3} {:.3},{:.3} {:.3},{:.3}",
            tx(x0),
            ty(y0),
            tx(x0 + l),
            ty(y0),
            tx(x0),
            ty(y0 + l)
        )
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{side}\" height=\"{side}\" viewBox=\"0 0 {side} {side}\">"
    );
    let _ = writeln!(svg, "  <!-- first generation, M={m}, beta={b:.6} -->");

    // light pieces
    let piece_leg = leg / b;
    for d in Digit::alphabet(m) {
        let _ = writeln!(
            svg,
            "  <polygon class=\"light\" fill=\"#cccccc\" stroke=\"black\" stroke-width=\"0.6\" points=\"{}\"/>",
            tri(d.i as f64 / b, d.j as f64 / b, piece_leg)
        );
    }

    // dark overlap triangles (empty when beta >= M+1)
    let dark_leg = (m as f64 + 1.0 - b) / (b * (b - 1.0));
    if dark_leg > 0.0 {
        for (i, j) in overlap_corners(m) {
            let _ = writeln!(
                svg,
                "  <polygon class=\"dark\" fill=\"#999999\" stroke=\"black\" stroke-width=\"0.4\" points=\"{}\"/>",
                tri(i as f64 / b, j as f64 / b, dark_leg)
            );
        }
    }

    // hull outline
    let _ = writeln!(
        svg,
        "  <polygon class=\"hull\" fill=\"none\" stroke=\"black\" stroke-width=\"1.2\" points=\"{}\"/>",
        tri(0.0, 0.0, leg)
    );

    // axis tick labels i/beta and the leg label M/(beta-1)
    for i in 1..=m {
        let x = i as f64 / b;
        let _ = writeln!(
            svg,
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"14\" text-anchor=\"middle\">{i}/\u{3b2}</text>",
            tx(x),
            ty(0.0) + 22.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"14\" text-anchor=\"end\">{i}/\u{3b2}</text>",
            tx(0.0) - 8.0,
            ty(x) + 5.0
        );
    }
    let _ = writeln!(
        svg,
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"14\" text-anchor=\"middle\">{m}/(\u{3b2}\u{2212}1)</text>",
        tx(leg),
        ty(0.0) + 22.0
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"14\" text-anchor=\"end\">{m}/(\u{3b2}\u{2212}1)</text>",
        tx(0.0) - 8.0,
        ty(leg) + 5.0
    );
    let _ = prec;
    svg.push_str("</svg>\n");
    svg
}
