//! Exact rational arithmetic helpers and a small dense matrix over ℚ.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// `p/q` as an exact rational. Panics if `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parsed = match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
            let q: BigInt = q.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Rational::new(p, q)
        }
        None => Rational::from_integer(
            s.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}")))?,
        ),
    };
    Ok(parsed)
}

/// Canonical string form: `"p/q"`, or `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Dense row-major matrix over ℚ.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Self { rows, cols, data: entries.iter().map(|&e| int(e)).collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, actual: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    /// Solves `self · X = rhs` exactly by Gauss–Jordan elimination.
    ///
    /// Returns `Error::Singular` when the system is underdetermined and
    /// `Error::Contradiction` when it is inconsistent.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, actual: rhs.rows });
        }
        let n = self.cols;
        let w = n + rhs.cols;
        let mut aug = Self::from_fn(self.rows, w, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else {
                rhs[(i, j - n)].clone()
            }
        });
        let mut pivot_row = 0;
        let mut pivots = Vec::new();
        for col in 0..n {
            let Some(p) = (pivot_row..aug.rows).find(|&r| !aug[(r, col)].is_zero()) else {
                continue;
            };
            aug.swap_rows(p, pivot_row);
            let inv = aug[(pivot_row, col)].recip();
            for j in 0..w {
                let v = &aug[(pivot_row, j)] * &inv;
                aug[(pivot_row, j)] = v;
            }
            for r in 0..aug.rows {
                if r == pivot_row || aug[(r, col)].is_zero() {
                    continue;
                }
                let factor = aug[(r, col)].clone();
                for j in 0..w {
                    let v = &factor * &aug[(pivot_row, j)];
                    aug[(r, j)] -= v;
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        for r in pivot_row..aug.rows {
            let residual: Vec<String> = (n..w)
                .filter(|&j| !aug[(r, j)].is_zero())
                .map(|j| format!("rhs[{}]={}", j - n, aug[(r, j)]))
                .collect();
            if !residual.is_empty() {
                return Err(Error::Contradiction(format!("row {r}: 0 = {}", residual.join(", "))));
            }
        }
        if pivots.len() < n {
            return Err(Error::Singular(format!("rank {} < {} unknowns", pivots.len(), n)));
        }
        Ok(Self::from_fn(n, rhs.cols, |i, j| aug[(i, n + j)].clone()))
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.rows, actual: self.cols });
        }
        self.solve(&Self::identity(self.rows))
    }

    pub fn determinant(&self) -> Rational {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[(r, col)].is_zero()) else {
                return Rational::zero();
            };
            if p != col {
                a.swap_rows(p, col);
                det = -det;
            }
            let piv = a[(col, col)].clone();
            det *= &piv;
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let factor = &a[(r, col)] / &piv;
                for j in col..n {
                    let v = &factor * &a[(col, j)];
                    a[(r, j)] -= v;
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| to_f64(&self[(i, j)]))
    }

    /// Entry-wise integrality check.
    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    /// Entries as `i64` when all are integers in range.
    pub fn to_i64(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        let r = &self[(i, j)];
                        if r.is_integer() { r.to_integer().to_i64() } else { None }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn max_abs(&self) -> Rational {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_else(Rational::zero)
    }
}

/// The standard symplectic form `(0, I; −I, 0)` of size `2n`.
pub fn symplectic_form(n: usize) -> RationalMatrix {
    let mut j = RationalMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = Rational::one();
        j[(n + i, i)] = -Rational::one();
    }
    j
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        let r = parse_rational("-26/4").unwrap();
        assert_eq!(r, ratio(-13, 2));
        assert_eq!(format_rational(&r), "-13/2");
        assert_eq!(format_rational(&int(0)), "0");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn solve_and_inverse() {
        let a = RationalMatrix::from_i64(2, 2, &[2, 1, 1, 3]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), RationalMatrix::identity(2));
        assert_eq!(a.determinant(), int(5));
    }

    #[test]
    fn inconsistent_system_reports_residual() {
        let a = RationalMatrix::from_i64(2, 1, &[1, 1]);
        let b = RationalMatrix::from_i64(2, 1, &[1, 2]);
        assert!(matches!(a.solve(&b), Err(Error::Contradiction(_))));
        let s = RationalMatrix::from_i64(2, 2, &[1, 1, 1, 1]);
        let b = RationalMatrix::from_i64(2, 1, &[1, 1]);
        assert!(matches!(s.solve(&b), Err(Error::Singular(_))));
    }
}
