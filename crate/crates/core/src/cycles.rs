//! A symplectic basis of `H₁` of a hyperelliptic curve realized by stadium
//! contours: `α_k` around the cuts, `β` assembled from loops around the gaps.

use rayon::prelude::*;

use crate::contour::{polygon_distance, stadium, winding_number, Loop};
use crate::curve::{fmt_c, HyperellipticCurve};
use crate::error::{Error, Result};
use crate::exact::{int, RationalMatrix};
use crate::quadrature::QuadStats;
use crate::C64;

/// Geometry knobs, as fractions of each branch point's nearest-neighbour distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleOptions {
    pub alpha_radius: f64,
    pub gap_radius: f64,
    pub clearance: f64,
    pub chords_per_half_turn: usize,
}

impl Default for CycleOptions {
    fn default() -> Self {
        Self { alpha_radius: 0.25, gap_radius: 0.125, clearance: 0.05, chords_per_half_turn: 24 }
    }
}

/// Elementary loops plus integer combinations of them forming `α_i`, `β_i`.
#[derive(Debug, Clone)]
pub struct CycleSystem {
    pub genus: usize,
    pub loops: Vec<Loop>,
    pub labels: Vec<String>,
    pub alpha: Vec<Vec<i64>>,
    pub beta: Vec<Vec<i64>>,
    pub loop_form: Vec<Vec<i64>>,
}

pub fn build_cycles(curve: &HyperellipticCurve) -> Result<CycleSystem> {
    build_cycles_with(curve, &CycleOptions::default())
}

pub fn build_cycles_with(curve: &HyperellipticCurve, opts: &CycleOptions) -> Result<CycleSystem> {
    let g = curve.genus();
    let pts = curve.branch_points();
    let nn: Vec<f64> = (0..pts.len()).map(|i| curve.neighbour_distance(i)).collect();
    let mut loops = Vec::with_capacity(2 * g);
    let mut labels = Vec::with_capacity(2 * g);
    let mut make = |i: usize, j: usize, factor: f64, label: String| -> Result<()> {
        let verts = stadium(pts[i], factor * nn[i], pts[j], factor * nn[j], opts.chords_per_half_turn);
        for (k, p) in pts.iter().enumerate() {
            let expect = i64::from(k == i || k == j);
            if winding_number(&verts, *p) != expect {
                return Err(Error::Clearance(format!(
                    "contour {label} around {} and {} does not separate branch point {}",
                    fmt_c(pts[i]),
                    fmt_c(pts[j]),
                    fmt_c(*p)
                )));
            }
            let dist = polygon_distance(&verts, *p);
            if dist < opts.clearance * nn[k] {
                return Err(Error::Clearance(format!(
                    "contour {label} passes within {:e} of branch point {} (pair {} and {})",
                    dist,
                    fmt_c(*p),
                    fmt_c(pts[i]),
                    fmt_c(pts[j])
                )));
            }
        }
        loops.push(Loop::new(curve, verts)?);
        labels.push(label);
        Ok(())
    };
    for k in 0..g {
        make(2 * k, 2 * k + 1, opts.alpha_radius, format!("cut_{}", k + 1))?;
    }
    for k in 0..g {
        make(2 * k + 1, 2 * k + 2, opts.gap_radius, format!("gap_{}", k + 1))?;
    }
    let m = loops.len();
    let mut form = vec![vec![0i64; m]; m];
    for i in 0..m {
        for j in (i + 1)..m {
            let v = loops[i].intersection(&loops[j])?;
            form[i][j] = v;
            form[j][i] = -v;
        }
    }
    let (alpha, beta) = symplectic_completion(g, &form)?;
    let sys = CycleSystem { genus: g, loops, labels, alpha, beta, loop_form: form };
    sys.check_symplectic()?;
    Ok(sys)
}

/// Keeps the cut loops as `α` and solves for `β = Xγ + Nα` with `α·β = I`, `β·β = 0`.
fn symplectic_completion(g: usize, form: &[Vec<i64>]) -> Result<(Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    for i in 0..g {
        for j in 0..g {
            if form[i][j] != 0 {
                return Err(Error::Contradiction(format!("cut loops {i} and {j} intersect")));
            }
        }
    }
    let a = RationalMatrix::from_fn(g, g, |i, j| int(form[i][g + j]));
    let gg = RationalMatrix::from_fn(g, g, |i, j| int(form[g + i][g + j]));
    let x = a.inverse().map_err(|_| Error::Contradiction("cut/gap intersection matrix is singular".into()))?.transpose();
    if !x.is_integral() {
        return Err(Error::Contradiction("cut/gap intersection matrix is not unimodular".into()));
    }
    let q = x.mul(&gg)?.mul(&x.transpose())?;
    let xi = x.to_i64().expect("integral");
    let qi = q.to_i64().ok_or_else(|| Error::Contradiction("non-integral correction".into()))?;
    let mut alpha = vec![vec![0i64; 2 * g]; g];
    let mut beta = vec![vec![0i64; 2 * g]; g];
    for i in 0..g {
        alpha[i][i] = 1;
        for k in 0..g {
            beta[i][g + k] = xi[i][k];
            if k < i {
                beta[i][k] = -qi[i][k];
            }
        }
    }
    Ok((alpha, beta))
}

fn pair(form: &[Vec<i64>], a: &[i64], b: &[i64]) -> i64 {
    let mut s = 0;
    for (i, ai) in a.iter().enumerate() {
        if *ai == 0 {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            s += ai * bj * form[i][j];
        }
    }
    s
}

impl CycleSystem {
    /// Intersection matrix of `(α_1..α_g, β_1..β_g)`.
    pub fn intersection_matrix(&self) -> Vec<Vec<i64>> {
        let all: Vec<&Vec<i64>> = self.alpha.iter().chain(&self.beta).collect();
        all.iter().map(|a| all.iter().map(|b| pair(&self.loop_form, a, b)).collect()).collect()
    }

    pub fn check_symplectic(&self) -> Result<()> {
        let g = self.genus;
        let m = self.intersection_matrix();
        for i in 0..2 * g {
            for j in 0..2 * g {
                let expect = if j == i + g && i < g {
                    1
                } else if i == j + g && j < g {
                    -1
                } else {
                    0
                };
                if m[i][j] != expect {
                    return Err(Error::Contradiction(format!("cycle basis is not symplectic at ({i}, {j}): {}", m[i][j])));
                }
            }
        }
        Ok(())
    }

    /// New basis `β' = Aβ + Bα`, `α' = Cβ + Dα` for an integral symplectic `σ = (A, B; C, D)`.
    pub fn transform(&self, sigma: &RationalMatrix) -> Result<Self> {
        let g = self.genus;
        if sigma.rows() != 2 * g || sigma.cols() != 2 * g {
            return Err(Error::DimensionMismatch { expected: 2 * g, actual: sigma.rows() });
        }
        let s = sigma.to_i64().ok_or_else(|| Error::InvalidInput("cycle transformation must be integral".into()))?;
        let stacked: Vec<&Vec<i64>> = self.beta.iter().chain(&self.alpha).collect();
        let width = self.loops.len();
        let combine = |row: &[i64]| -> Vec<i64> {
            let mut out = vec![0i64; width];
            for (coef, cyc) in row.iter().zip(&stacked) {
                for (o, c) in out.iter_mut().zip(cyc.iter()) {
                    *o += coef * c;
                }
            }
            out
        };
        let beta = (0..g).map(|i| combine(&s[i])).collect();
        let alpha = (0..g).map(|i| combine(&s[g + i])).collect();
        let out = Self { alpha, beta, ..self.clone() };
        out.check_symplectic()?;
        Ok(out)
    }

    /// `∮ f` over every elementary loop, in parallel.
    pub fn loop_integrals<F>(&self, curve: &HyperellipticCurve, dim: usize, f: &F, tol: f64) -> Result<(Vec<Vec<C64>>, QuadStats)>
    where
        F: Fn(C64, C64) -> Vec<C64> + Sync + ?Sized,
    {
        let res: Result<Vec<(Vec<C64>, QuadStats)>> = self.loops.par_iter().map(|l| l.integrate(curve, dim, f, tol)).collect();
        let mut stats = QuadStats::default();
        let vals = res?
            .into_iter()
            .map(|(v, s)| {
                stats.merge(&s);
                v
            })
            .collect();
        Ok((vals, stats))
    }

    /// Combines loop integrals into `(α-periods, β-periods)`, each `g × dim`.
    pub fn cycle_periods(&self, loop_vals: &[Vec<C64>]) -> (Vec<Vec<C64>>, Vec<Vec<C64>>) {
        let dim = loop_vals.first().map_or(0, Vec::len);
        let comb = |cyc: &Vec<i64>| -> Vec<C64> {
            let mut out = vec![C64::new(0.0, 0.0); dim];
            for (coef, vals) in cyc.iter().zip(loop_vals) {
                if *coef != 0 {
                    for (o, v) in out.iter_mut().zip(vals) {
                        *o += v * *coef as f64;
                    }
                }
            }
            out
        };
        (self.alpha.iter().map(comb).collect(), self.beta.iter().map(comb).collect())
    }

    /// Periods of `f` over `α_i` and `β_i`.
    pub fn periods<F>(&self, curve: &HyperellipticCurve, dim: usize, f: &F, tol: f64) -> Result<(Vec<Vec<C64>>, Vec<Vec<C64>>)>
    where
        F: Fn(C64, C64) -> Vec<C64> + Sync + ?Sized,
    {
        let (vals, _) = self.loop_integrals(curve, dim, f, tol)?;
        Ok(self.cycle_periods(&vals))
    }
}
