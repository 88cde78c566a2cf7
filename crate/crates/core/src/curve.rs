//! Hyperelliptic curves `y² = f(x)` with an explicit sheet function, and the
//! canonical double cover of a genus-0 quadratic differential.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::C64;

/// A point of the curve with an explicit choice of `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverPoint {
    pub x: C64,
    pub y: C64,
}

impl CoverPoint {
    /// Image under `(x, y) ↦ (x, −y)`.
    pub fn involution(&self) -> Self {
        Self { x: self.x, y: -self.y }
    }
}

/// Horner evaluation of `Σ c_i x^i` and its first two derivatives.
pub fn poly_eval(coeffs: &[C64], x: C64) -> (C64, C64, C64) {
    let zero = C64::new(0.0, 0.0);
    let (mut p, mut dp, mut ddp) = (zero, zero, zero);
    for c in coeffs.iter().rev() {
        ddp = ddp * x + dp * 2.0;
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp, ddp)
}

/// Ascending coefficients of `Π (x − r)`.
pub fn poly_from_roots(roots: &[C64]) -> Vec<C64> {
    let mut c = vec![C64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![C64::new(0.0, 0.0); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= ci * r;
        }
        c = next;
    }
    c
}

pub fn poly_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Lexicographic order on `(Re, Im)`.
pub fn lex_cmp(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// One branch cut: a segment between two consecutive branch points, or a
/// horizontal ray to the right when the degree is odd.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cut {
    Segment(C64, C64),
    Ray(C64),
}

/// Monic `y² = Π (x − e_i)` with branch points taken in a fixed layout order.
#[derive(Debug, Clone)]
pub struct HyperellipticCurve {
    points: Vec<C64>,
    coeffs: Vec<C64>,
    cuts: Vec<Cut>,
}

impl HyperellipticCurve {
    /// Branch points sorted by real part, ties by imaginary part.
    pub fn new(points: &[C64]) -> Result<Self> {
        let mut sorted = points.to_vec();
        sorted.sort_by(lex_cmp);
        Self::with_layout(&sorted)
    }

    /// Branch points in the given order; consecutive points share a cut.
    pub fn with_layout(points: &[C64]) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidInput("at least three branch points are needed".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidInput("branch points must be finite".into()));
        }
        let scale = points.iter().map(|p| p.norm()).fold(1.0, f64::max);
        for i in 0..points.len() {
            for j in 0..i {
                if (points[i] - points[j]).norm() <= 1e-13 * scale {
                    return Err(Error::InvalidInput(format!(
                        "coincident branch points {} and {}",
                        fmt_c(points[j]),
                        fmt_c(points[i])
                    )));
                }
            }
        }
        let cuts: Vec<Cut> = points
            .chunks(2)
            .map(|c| if c.len() == 2 { Cut::Segment(c[0], c[1]) } else { Cut::Ray(c[0]) })
            .collect();
        let curve = Self { points: points.to_vec(), coeffs: poly_from_roots(points), cuts };
        curve.check_cuts_disjoint()?;
        Ok(curve)
    }

    fn check_cuts_disjoint(&self) -> Result<()> {
        for i in 0..self.cuts.len() {
            for j in 0..i {
                if cuts_meet(&self.cuts[i], &self.cuts[j]) {
                    return Err(Error::InvalidInput(format!("branch cuts {j} and {i} intersect for this layout")));
                }
            }
            for p in &self.points {
                if !self.cut_endpoints(i).contains(p) && point_on_cut(&self.cuts[i], *p) {
                    return Err(Error::InvalidInput(format!("branch point {} lies on cut {i}", fmt_c(*p))));
                }
            }
        }
        Ok(())
    }

    fn cut_endpoints(&self, i: usize) -> Vec<C64> {
        match self.cuts[i] {
            Cut::Segment(a, b) => vec![a, b],
            Cut::Ray(e) => vec![e],
        }
    }

    pub fn branch_points(&self) -> &[C64] {
        &self.points
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn degree(&self) -> usize {
        self.points.len()
    }

    pub fn genus(&self) -> usize {
        (self.points.len() - 1) / 2
    }

    /// Ascending coefficients of the monic `f`.
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn f(&self, x: C64) -> C64 {
        poly_eval(&self.coeffs, x).0
    }

    /// `(f, f′, f″)` at `x`.
    pub fn f_derivs(&self, x: C64) -> (C64, C64, C64) {
        poly_eval(&self.coeffs, x)
    }

    /// Distance from `x` to the nearest branch point.
    pub fn distance_to_branch(&self, x: C64) -> f64 {
        self.points.iter().map(|p| (x - p).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Distance from branch point `i` to its nearest neighbour.
    pub fn neighbour_distance(&self, i: usize) -> f64 {
        self.points
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, p)| (self.points[i] - p).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// The reference sheet: analytic off the cuts, `≈ x^{(deg+1)/2}` near infinity.
    pub fn y1(&self, x: C64) -> C64 {
        let mut y = C64::new(1.0, 0.0);
        for cut in &self.cuts {
            y *= match *cut {
                Cut::Segment(a, b) => (x - a) * ((x - b) / (x - a)).sqrt(),
                Cut::Ray(e) => C64::new(0.0, 1.0) * (e - x).sqrt(),
            };
        }
        y
    }

    /// Point over `x` with `y = sheet · Y₁(x)`.
    pub fn point(&self, x: C64, sheet: f64) -> CoverPoint {
        CoverPoint { x, y: self.y1(x) * sheet }
    }

    /// Continues `y` from `p` to `x` along the straight segment between them.
    /// Valid while the segment is shorter than the distance from `p` to any branch point.
    pub fn continue_to(&self, p: &CoverPoint, x: C64) -> CoverPoint {
        let mut y = p.y;
        for e in &self.points {
            y *= ((x - e) / (p.x - e)).sqrt();
        }
        CoverPoint { x, y }
    }

    /// Parameters `s ∈ [0, 1)` where the segment `a → b` crosses a cut.
    pub fn cut_crossings(&self, a: C64, b: C64) -> Vec<f64> {
        let mut out = Vec::new();
        for cut in &self.cuts {
            match *cut {
                Cut::Segment(c, d) => {
                    if let Some((s, _)) = segment_intersection(a, b, c, d) {
                        out.push(s);
                    }
                }
                Cut::Ray(e) => {
                    let dy = b.im - a.im;
                    if dy != 0.0 {
                        let s = (e.im - a.im) / dy;
                        if (0.0..1.0).contains(&s) && a.re + s * (b.re - a.re) > e.re {
                            out.push(s);
                        }
                    }
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }
}

fn cuts_meet(a: &Cut, b: &Cut) -> bool {
    let far = |e: C64| e + C64::new(1e300_f64.sqrt(), 0.0);
    let seg = |c: &Cut| match *c {
        Cut::Segment(p, q) => (p, q),
        Cut::Ray(e) => (e, far(e)),
    };
    let (p, q) = seg(a);
    let (r, s) = seg(b);
    segment_intersection(p, q, r, s).is_some() && segment_intersection(r, s, p, q).is_some()
}

fn point_on_cut(c: &Cut, p: C64) -> bool {
    let (a, b) = match *c {
        Cut::Segment(a, b) => (a, b),
        Cut::Ray(e) => (e, e + C64::new(1e150, 0.0)),
    };
    let d = b - a;
    let t = ((p - a) * d.conj()).re / d.norm_sqr();
    let closest = a + d * t.clamp(0.0, 1.0);
    (p - closest).norm() <= 1e-12 * d.norm().min(1e6).max(1.0)
}

/// Intersection of segments `a→b` and `c→d` as `(s, t)` with `s ∈ [0, 1)`, `t ∈ [0, 1]`.
pub fn segment_intersection(a: C64, b: C64, c: C64, d: C64) -> Option<(f64, f64)> {
    let r = b - a;
    let q = d - c;
    let denom = cross(r, q);
    if denom == 0.0 {
        return None;
    }
    let w = c - a;
    let s = cross(w, q) / denom;
    let t = cross(w, r) / denom;
    if (0.0..1.0).contains(&s) && (0.0..=1.0).contains(&t) {
        Some((s, t))
    } else {
        None
    }
}

/// `Im(conj(a)·b)`.
pub fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

pub fn fmt_c(z: C64) -> String {
    format!("({}, {})", z.re, z.im)
}

/// Label of a branch point of the cover of a genus-0 quadratic differential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MarkedPoint {
    Zero(usize),
    Pole(usize),
}

/// `q = c · Π(x − z_i) / Π(x − p_j) dx²` on the Riemann sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct QdConfig {
    pub zeros: Vec<C64>,
    pub poles: Vec<C64>,
    pub scale: C64,
    pub tolerance: f64,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

impl QdConfig {
    pub fn new(zeros: Vec<C64>, poles: Vec<C64>, scale: C64) -> Result<Self> {
        let cfg = Self { zeros, poles, scale, tolerance: DEFAULT_TOLERANCE };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.poles.len();
        if n < 5 {
            return Err(Error::InvalidInput(format!("need at least 5 poles, got {n}")));
        }
        if self.zeros.len() + 4 != n {
            return Err(Error::InvalidInput(format!("need n − 4 = {} zeros, got {}", n - 4, self.zeros.len())));
        }
        if self.scale.norm() == 0.0 || !self.scale.is_finite() {
            return Err(Error::InvalidInput("scale must be finite and nonzero".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidInput("tolerance must be positive".into()));
        }
        let pts = self.points();
        let scale = pts.iter().map(|p| p.1.norm()).fold(1.0, f64::max);
        for i in 0..pts.len() {
            if !pts[i].1.is_finite() {
                return Err(Error::InvalidInput("points must be finite".into()));
            }
            for j in 0..i {
                if (pts[i].1 - pts[j].1).norm() <= 1e-13 * scale {
                    return Err(Error::InvalidInput(format!(
                        "{:?} and {:?} coincide: configuration is not in the principal stratum",
                        pts[j].0, pts[i].0
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.poles.len()
    }

    /// Zeros then poles, with labels.
    pub fn points(&self) -> Vec<(MarkedPoint, C64)> {
        let z = self.zeros.iter().enumerate().map(|(i, p)| (MarkedPoint::Zero(i), *p));
        let p = self.poles.iter().enumerate().map(|(i, p)| (MarkedPoint::Pole(i), *p));
        z.chain(p).collect()
    }

    pub fn position(&self, m: MarkedPoint) -> C64 {
        match m {
            MarkedPoint::Zero(i) => self.zeros[i],
            MarkedPoint::Pole(i) => self.poles[i],
        }
    }

    /// Labels sorted by position: the default cut layout.
    pub fn default_layout(&self) -> Vec<MarkedPoint> {
        let mut pts = self.points();
        pts.sort_by(|a, b| lex_cmp(&a.1, &b.1));
        pts.into_iter().map(|p| p.0).collect()
    }

    /// `c · Π_{i ≠ skip}(p − z_i) / Π_{j ≠ k}(p − p_j)` for the pole `p = p_k`:
    /// the local scale of `q` near `p` once the zero `skip` has merged into it.
    pub fn effective_scale(&self, pole: usize, skip: Option<usize>) -> C64 {
        let p = self.poles[pole];
        let num: C64 = self.zeros.iter().enumerate().filter(|(i, _)| Some(*i) != skip).map(|(_, z)| p - z).product();
        let den: C64 = self.poles.iter().enumerate().filter(|(j, _)| *j != pole).map(|(_, q)| p - q).product();
        self.scale * num / den
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let pair = |x: &Value| -> Result<C64> {
            let a = x.as_array().filter(|a| a.len() == 2).ok_or_else(|| Error::Parse("complex numbers are [re, im] pairs".into()))?;
            let re = a[0].as_f64().ok_or_else(|| Error::Parse("non-numeric real part".into()))?;
            let im = a[1].as_f64().ok_or_else(|| Error::Parse("non-numeric imaginary part".into()))?;
            Ok(C64::new(re, im))
        };
        let list = |key: &str| -> Result<Vec<C64>> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("missing array {key:?}")))?
                .iter()
                .map(pair)
                .collect()
        };
        let obj = v.as_object().ok_or_else(|| Error::Parse("config must be a JSON object".into()))?;
        for key in obj.keys() {
            if !["zeros", "poles", "scale", "tolerance"].contains(&key.as_str()) {
                return Err(Error::Parse(format!("unknown config key {key:?}")));
            }
        }
        let scale = pair(v.get("scale").ok_or_else(|| Error::Parse("missing \"scale\"".into()))?)?;
        let tolerance = match v.get("tolerance") {
            None => DEFAULT_TOLERANCE,
            Some(t) => t.as_f64().ok_or_else(|| Error::Parse("tolerance must be a number".into()))?,
        };
        let cfg = Self { zeros: list("zeros")?, poles: list("poles")?, scale, tolerance };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Value {
        let c = |z: &C64| serde_json::json!([z.re, z.im]);
        serde_json::json!({
            "zeros": self.zeros.iter().map(c).collect::<Vec<_>>(),
            "poles": self.poles.iter().map(c).collect::<Vec<_>>(),
            "scale": c(&self.scale),
            "tolerance": self.tolerance,
        })
    }
}

/// The double cover `ŷ² = Π(x − z_i)Π(x − p_j)` with `v = √c · ŷ dx / Π(x − p_j)`.
#[derive(Debug, Clone)]
pub struct CoverCurve {
    pub config: QdConfig,
    pub curve: HyperellipticCurve,
    pub layout: Vec<MarkedPoint>,
    sqrt_c: C64,
    pole_poly: Vec<C64>,
    zero_poly: Vec<C64>,
}

pub fn build_cover(cfg: &QdConfig) -> Result<CoverCurve> {
    build_cover_with_layout(cfg, &cfg.default_layout())
}

/// Builds the cover with cuts joining consecutive entries of `layout`.
pub fn build_cover_with_layout(cfg: &QdConfig, layout: &[MarkedPoint]) -> Result<CoverCurve> {
    cfg.validate()?;
    let mut seen = layout.to_vec();
    seen.sort_by_key(|m| match m {
        MarkedPoint::Zero(i) => (0, *i),
        MarkedPoint::Pole(i) => (1, *i),
    });
    let expected: Vec<MarkedPoint> = cfg.points().into_iter().map(|p| p.0).collect();
    if seen != expected {
        return Err(Error::InvalidInput("layout must list every zero and pole exactly once".into()));
    }
    let pts: Vec<C64> = layout.iter().map(|m| cfg.position(*m)).collect();
    let curve = HyperellipticCurve::with_layout(&pts)?;
    let cover = CoverCurve {
        config: cfg.clone(),
        sqrt_c: cfg.scale.sqrt(),
        pole_poly: poly_from_roots(&cfg.poles),
        zero_poly: poly_from_roots(&cfg.zeros),
        curve,
        layout: layout.to_vec(),
    };
    cover.check_square_identity()?;
    Ok(cover)
}

impl CoverCurve {
    pub fn genus(&self) -> usize {
        self.curve.genus()
    }

    pub fn sqrt_c(&self) -> C64 {
        self.sqrt_c
    }

    /// `v² = q`: `c·f/P² = c·Z/P` as a polynomial identity `f = Z·P`.
    fn check_square_identity(&self) -> Result<()> {
        let prod = poly_mul(&self.zero_poly, &self.pole_poly);
        let f = self.curve.coeffs();
        let scale = f.iter().map(|c| c.norm()).fold(1.0, f64::max);
        let defect = prod.iter().zip(f).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if prod.len() != f.len() || defect > 1e-10 * scale {
            return Err(Error::Contradiction(format!("v² ≠ q: polynomial defect {defect:e}")));
        }
        Ok(())
    }

    pub fn pole_poly(&self, x: C64) -> C64 {
        poly_eval(&self.pole_poly, x).0
    }

    /// Coefficient of `v` in the `x` chart.
    pub fn v(&self, p: &CoverPoint) -> C64 {
        self.sqrt_c * p.y / self.pole_poly(p.x)
    }

    /// Coefficient of `q` in the `x` chart.
    pub fn q(&self, x: C64) -> C64 {
        self.config.scale * poly_eval(&self.zero_poly, x).0 / self.pole_poly(x)
    }

    /// `v′/v = ½Σ 1/(x − z_i) − ½Σ 1/(x − p_j)` and its derivative.
    pub fn log_derivative_v(&self, x: C64) -> (C64, C64) {
        let mut l = C64::new(0.0, 0.0);
        let mut dl = C64::new(0.0, 0.0);
        for z in &self.config.zeros {
            let r = (x - z).inv();
            l += r * 0.5;
            dl -= r * r * 0.5;
        }
        for p in &self.config.poles {
            let r = (x - p).inv();
            l -= r * 0.5;
            dl += r * r * 0.5;
        }
        (l, dl)
    }

    /// `S_v = (v′/v)′ − ½(v′/v)²` in the `x` chart; sheet independent.
    pub fn schwarzian_v(&self, x: C64) -> Result<C64> {
        if self.config.zeros.iter().any(|z| (x - z).norm() < 1e-14 * (1.0 + z.norm())) {
            return Err(Error::SingularPoint(format!("S_v evaluated at a zero of v, x = {}", fmt_c(x))));
        }
        let (l, dl) = self.log_derivative_v(x);
        Ok(dl - l * l * 0.5)
    }
}
