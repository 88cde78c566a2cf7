//! Closed polygonal contours on the cover: tapered stadiums around pairs of
//! branch points, lifted to the curve by tracking cut crossings.

use std::f64::consts::PI;

use crate::curve::{cross, HyperellipticCurve};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_segment, QuadStats};
use crate::C64;

/// A straight piece of a lifted loop on which `y = sheet · Y₁(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub a: C64,
    pub b: C64,
    pub sheet: f64,
}

/// Boundary of the convex hull of the disks `D(a, ra)` and `D(b, rb)`, counterclockwise.
/// Arcs use an odd number of chords so no vertex sits on the axis through `a` and `b`.
pub fn stadium(a: C64, ra: f64, b: C64, rb: f64, chords_per_half_turn: usize) -> Vec<C64> {
    let len = (b - a).norm();
    let dir = (b - a).arg();
    let psi = ((ra - rb) / len).clamp(-0.99, 0.99).asin();
    let open = PI / 2.0 - psi;
    let mut pts = Vec::new();
    let mut arc = |centre: C64, r: f64, from: f64, span: f64| {
        let k = ((chords_per_half_turn as f64 * span / PI).ceil() as usize).max(3) | 1;
        for i in 0..k {
            pts.push(centre + C64::from_polar(r, from + span * i as f64 / k as f64));
        }
    };
    arc(b, rb, dir - open, 2.0 * open);
    arc(a, ra, dir + open, 2.0 * PI - 2.0 * open);
    pts
}

pub fn winding_number(vertices: &[C64], p: C64) -> i64 {
    let k = vertices.len();
    let total: f64 = (0..k).map(|i| ((vertices[(i + 1) % k] - p) / (vertices[i] - p)).arg()).sum();
    (total / (2.0 * PI)).round() as i64
}

pub fn polygon_distance(vertices: &[C64], p: C64) -> f64 {
    let k = vertices.len();
    (0..k)
        .map(|i| {
            let (a, b) = (vertices[i], vertices[(i + 1) % k]);
            let d = b - a;
            let t = (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
            (p - (a + d * t)).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// A closed polygon lifted to the cover, starting on the sheet `y = +Y₁`.
#[derive(Debug, Clone)]
pub struct Loop {
    pub vertices: Vec<C64>,
    pub pieces: Vec<Piece>,
}

impl Loop {
    pub fn new(curve: &HyperellipticCurve, vertices: Vec<C64>) -> Result<Self> {
        let mut pieces = Vec::new();
        let mut sheet = 1.0;
        let k = vertices.len();
        for i in 0..k {
            let (a, b) = (vertices[i], vertices[(i + 1) % k]);
            let mut start = a;
            for s in curve.cut_crossings(a, b) {
                let x = a + (b - a) * s;
                if x != start {
                    pieces.push(Piece { a: start, b: x, sheet });
                }
                start = x;
                sheet = -sheet;
            }
            pieces.push(Piece { a: start, b, sheet });
        }
        if sheet != 1.0 {
            return Err(Error::Contradiction("lifted contour does not close on the cover".into()));
        }
        Ok(Self { vertices, pieces })
    }

    pub fn winding(&self, p: C64) -> i64 {
        winding_number(&self.vertices, p)
    }

    pub fn distance_to(&self, p: C64) -> f64 {
        polygon_distance(&self.vertices, p)
    }

    pub fn length(&self) -> f64 {
        self.pieces.iter().map(|p| (p.b - p.a).norm()).sum()
    }

    /// Algebraic intersection number on the cover. Crossings count only where
    /// both lifts lie on the same sheet; a transversal crossing `(t₁, t₂)` counts
    /// `sign Im(conj(t₁)·t₂)`.
    pub fn intersection(&self, other: &Loop) -> Result<i64> {
        let mut total = 0;
        for p in &self.pieces {
            for q in &other.pieces {
                let (dp, dq) = (p.b - p.a, q.b - q.a);
                let denom = cross(dp, dq);
                if denom == 0.0 {
                    continue;
                }
                let w = q.a - p.a;
                let s = cross(w, dq) / denom;
                let t = cross(w, dp) / denom;
                if !((0.0..1.0).contains(&s) && (0.0..1.0).contains(&t)) {
                    continue;
                }
                if s == 0.0 || t == 0.0 {
                    return Err(Error::Contradiction("contours cross on a branch cut".into()));
                }
                if p.sheet == q.sheet {
                    total += denom.signum() as i64;
                }
            }
        }
        Ok(total)
    }

    /// `∮ f(x, y) dx` with each component to absolute accuracy `tol`.
    pub fn integrate<F>(&self, curve: &HyperellipticCurve, dim: usize, f: &F, tol: f64) -> Result<(Vec<C64>, QuadStats)>
    where
        F: Fn(C64, C64) -> Vec<C64> + ?Sized,
    {
        let total = self.length();
        let mut acc = vec![C64::new(0.0, 0.0); dim];
        let mut stats = QuadStats::default();
        for piece in &self.pieces {
            let g = |x: C64| f(x, curve.y1(x) * piece.sheet);
            let local = tol * (piece.b - piece.a).norm() / total;
            let (v, st) = integrate_segment(&g, piece.a, piece.b, dim, local)?;
            for (s, x) in acc.iter_mut().zip(v) {
                *s += x;
            }
            stats.merge(&st);
        }
        Ok((acc, stats))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn stadium_encloses_both_centres() {
        let v = stadium(c(0.0, 0.0), 0.3, c(2.0, 1.0), 0.1, 24);
        let cur = HyperellipticCurve::new(&[c(0.0, 0.0), c(2.0, 1.0), c(5.0, 0.0), c(6.0, 0.0)]).unwrap();
        let l = Loop::new(&cur, v).unwrap();
        assert_eq!(l.winding(c(0.0, 0.0)), 1);
        assert_eq!(l.winding(c(2.0, 1.0)), 1);
        assert_eq!(l.winding(c(1.0, 0.5)), 1);
        assert_eq!(l.winding(c(5.0, 0.0)), 0);
        assert!((l.distance_to(c(0.0, 0.0)) - 0.3).abs() < 0.01);
        assert!((l.distance_to(c(2.0, 1.0)) - 0.1).abs() < 0.005);
        // convexity: all turns left
        let k = l.vertices.len();
        for i in 0..k {
            let (a, b, d) = (l.vertices[i], l.vertices[(i + 1) % k], l.vertices[(i + 2) % k]);
            assert!(cross(b - a, d - b) > 0.0);
        }
    }

    #[test]
    fn loop_around_cut_integrates_entire_function_to_zero() {
        let cur = HyperellipticCurve::new(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        let gap = Loop::new(&cur, stadium(c(1.0, 0.0), 0.2, c(2.0, 0.0), 0.2, 24)).unwrap();
        assert_eq!(gap.pieces.iter().filter(|p| p.sheet < 0.0).count() > 0, true);
        let (v, _) = gap.integrate(&cur, 1, &|x: C64, _y: C64| vec![x * x], 1e-13).unwrap();
        assert!(v[0].norm() < 1e-12);
    }

    #[test]
    fn alpha_gap_intersection_is_unit() {
        let cur = HyperellipticCurve::new(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]).unwrap();
        let alpha = Loop::new(&cur, stadium(c(0.0, 0.0), 0.25, c(1.0, 0.0), 0.25, 24)).unwrap();
        let gamma = Loop::new(&cur, stadium(c(1.0, 0.0), 0.125, c(2.0, 0.0), 0.125, 24)).unwrap();
        let i = alpha.intersection(&gamma).unwrap();
        assert_eq!(i.abs(), 1);
        assert_eq!(gamma.intersection(&alpha).unwrap(), -i);
        assert_eq!(alpha.intersection(&alpha).unwrap(), 0);
    }
}
