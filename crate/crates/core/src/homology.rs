//! Linear algebra of the double-cover homology: the involution-adapted cycle
//! basis, the matrices `M`, `T`, `S`, and block period-matrix assembly.

use nalgebra::DMatrix;
use num_traits::One;
use rand::Rng;

use crate::error::{Error, Result};
use crate::exact::{int, symplectic_form, to_f64, Rational, RationalMatrix};
use crate::C64;

fn check_stable(g: usize, n: usize) -> Result<()> {
    if 2 * g + n <= 3 {
        return Err(Error::InvalidInput(format!("unstable pair (g, n) = ({g}, {n})")));
    }
    Ok(())
}

/// `ĝ = 4g − 3 + n`.
pub fn cover_genus(g: usize, n: usize) -> usize {
    4 * g + n - 3
}

/// Labels of the cycles `a_j, a*_j, ã_k, b_j, b*_j, b̃_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalBasisLayout {
    pub g: usize,
    pub n: usize,
    pub labels: Vec<String>,
}

impl CanonicalBasisLayout {
    pub fn new(g: usize, n: usize) -> Result<Self> {
        check_stable(g, n)?;
        let tilde = 2 * g + n - 3;
        let mut labels = Vec::new();
        for side in ["a", "b"] {
            labels.extend((1..=g).map(|j| format!("{side}_{j}")));
            labels.extend((1..=g).map(|j| format!("{side}*_{j}")));
            labels.extend((1..=tilde).map(|k| format!("{side}~_{k}")));
        }
        Ok(Self { g, n, labels })
    }

    pub fn cycle_count(&self) -> usize {
        self.labels.len()
    }

    /// `(0, I; −I, 0)` of size `2ĝ`.
    pub fn intersection_matrix(&self) -> RationalMatrix {
        symplectic_form(cover_genus(self.g, self.n))
    }

    /// Action of `μ_*` on the cycles in this basis: `a ↔ a*`, `ã ↦ −ã`, same on `b`.
    pub fn involution_action(&self) -> RationalMatrix {
        let m = involution_block(self.g, self.n);
        m.direct_sum(&m)
    }
}

fn involution_block(g: usize, n: usize) -> RationalMatrix {
    let size = cover_genus(g, n);
    let mut m = RationalMatrix::zeros(size, size);
    for j in 0..g {
        m[(j, g + j)] = Rational::one();
        m[(g + j, j)] = Rational::one();
    }
    for k in 2 * g..size {
        m[(k, k)] = -Rational::one();
    }
    m
}

/// `M`, `T` and `S = diag(T, (Tᵗ)⁻¹)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvolutionMatrices {
    pub m: RationalMatrix,
    pub t: RationalMatrix,
    pub s: RationalMatrix,
}

pub fn build_matrices(g: usize, n: usize) -> Result<InvolutionMatrices> {
    check_stable(g, n)?;
    let size = cover_genus(g, n);
    let m = involution_block(g, n);
    let mut t = RationalMatrix::zeros(size, size);
    for j in 0..g {
        t[(j, j)] = Rational::one();
        t[(j, g + j)] = Rational::one();
        t[(g + j, j)] = Rational::one();
        t[(g + j, g + j)] = -Rational::one();
    }
    for k in 2 * g..size {
        t[(k, k)] = Rational::one();
    }
    let t_inv_transpose = t.transpose().inverse()?;
    let s = t.direct_sum(&t_inv_transpose);
    Ok(InvolutionMatrices { m, t, s })
}

/// `(dim H₊, dim H₋, dim Λ₊, dim Λ₋) = (2g, 6g−6+2n, g, 3g−3+n)`.
pub fn eigenspace_dims(g: usize, n: usize) -> Result<(usize, usize, usize, usize)> {
    check_stable(g, n)?;
    Ok((2 * g, 6 * g + 2 * n - 6, g, 3 * g + n - 3))
}

pub fn to_complex(m: &RationalMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| C64::new(to_f64(&m[(i, j)]), 0.0))
}

/// `Ω̂ = T⁻¹ diag(Ω₊, Ω₋) (Tᵗ)⁻¹`, indexed in the order `(u_j, u*_j, ũ_k)` used by `T`.
pub fn assemble_period_matrix(g: usize, n: usize, omega_plus: &DMatrix<C64>, omega_minus: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    check_stable(g, n)?;
    let prym = 3 * g + n - 3;
    if omega_plus.nrows() != g || omega_plus.ncols() != g {
        return Err(Error::DimensionMismatch { expected: g, actual: omega_plus.nrows() });
    }
    if omega_minus.nrows() != prym || omega_minus.ncols() != prym {
        return Err(Error::DimensionMismatch { expected: prym, actual: omega_minus.nrows() });
    }
    let size = cover_genus(g, n);
    let mut block = DMatrix::<C64>::zeros(size, size);
    block.view_mut((0, 0), (g, g)).copy_from(omega_plus);
    block.view_mut((g, g), (prym, prym)).copy_from(omega_minus);
    let mats = build_matrices(g, n)?;
    let t_inv = to_complex(&mats.t.inverse()?);
    Ok(&t_inv * block * t_inv.transpose())
}

/// Reorders a matrix indexed by `(u_j, u*_j, ũ_k)` into `(u_j, ũ_k, u*_j)`.
pub fn reorder_to_tilde_middle(g: usize, m: &DMatrix<C64>) -> DMatrix<C64> {
    let size = m.nrows();
    let perm: Vec<usize> = (0..g).chain(2 * g..size).chain(g..2 * g).collect();
    DMatrix::from_fn(size, size, |i, j| m[(perm[i], perm[j])])
}

/// Checks `σᵗ J σ = J`.
pub fn is_symplectic(sigma: &RationalMatrix) -> bool {
    if sigma.rows() != sigma.cols() || sigma.rows() % 2 != 0 {
        return false;
    }
    let j = symplectic_form(sigma.rows() / 2);
    let lhs = sigma.transpose().mul(&j).and_then(|x| x.mul(sigma));
    matches!(lhs, Ok(l) if l == j)
}

/// Blocks `(A, B, C, D)` of a `2k × 2k` matrix.
pub fn blocks(sigma: &RationalMatrix) -> (RationalMatrix, RationalMatrix, RationalMatrix, RationalMatrix) {
    let k = sigma.rows() / 2;
    let sub = |r0: usize, c0: usize| RationalMatrix::from_fn(k, k, |i, j| sigma[(r0 + i, c0 + j)].clone());
    (sub(0, 0), sub(0, k), sub(k, 0), sub(k, k))
}

/// Symplectic transformations `σ₊` of `H₊` and `σ₋` of `H₋`, acting on
/// stacked `(β; α)` cycle vectors: `β' = Aβ + Bα`, `α' = Cβ + Dα`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticPair {
    pub plus: RationalMatrix,
    pub minus: RationalMatrix,
}

impl SymplecticPair {
    pub fn new(g: usize, n: usize, plus: RationalMatrix, minus: RationalMatrix) -> Result<Self> {
        check_stable(g, n)?;
        if plus.rows() != 2 * g {
            return Err(Error::DimensionMismatch { expected: 2 * g, actual: plus.rows() });
        }
        let prym = 2 * (3 * g + n - 3);
        if minus.rows() != prym {
            return Err(Error::DimensionMismatch { expected: prym, actual: minus.rows() });
        }
        for (name, s) in [("sigma_plus", &plus), ("sigma_minus", &minus)] {
            if !is_symplectic(s) {
                return Err(Error::InvalidInput(format!("{name} is not symplectic")));
            }
        }
        Ok(Self { plus, minus })
    }

    pub fn identity(g: usize, n: usize) -> Self {
        Self {
            plus: RationalMatrix::identity(2 * g),
            minus: RationalMatrix::identity(2 * (3 * g + n - 3)),
        }
    }
}

/// `det(CΩ + D)` for a symplectic `σ = (A, B; C, D)`; an empty block gives 1.
pub fn cd_determinant(sigma: &RationalMatrix, omega: &DMatrix<C64>) -> Result<C64> {
    let k = sigma.rows() / 2;
    if omega.nrows() != k {
        return Err(Error::DimensionMismatch { expected: k, actual: omega.nrows() });
    }
    if k == 0 {
        return Ok(C64::one());
    }
    let (_, _, c, d) = blocks(sigma);
    let m = to_complex(&c) * omega + to_complex(&d);
    let det = m.determinant();
    if det.norm() < 1e-300 || !det.is_finite() {
        return Err(Error::Singular("C·Omega + D".into()));
    }
    Ok(det)
}

/// `(det(C₊Ω₊ + D₊)⁴⁸, det(C₋Ω₋ + D₋)⁴⁸)`: the multiplier of `τ±` up to a cube root of unity.
pub fn det_factor(sigma: &SymplecticPair, omega_plus: &DMatrix<C64>, omega_minus: &DMatrix<C64>) -> Result<(C64, C64)> {
    let p = cd_determinant(&sigma.plus, omega_plus)?;
    let m = cd_determinant(&sigma.minus, omega_minus)?;
    Ok((p.powi(48), m.powi(48)))
}

/// Random element of `Sp(2k, ℤ)` as a product of elementary symplectic generators.
pub fn random_integral_symplectic<R: Rng>(k: usize, steps: usize, rng: &mut R) -> RationalMatrix {
    let mut sigma = RationalMatrix::identity(2 * k);
    for _ in 0..steps {
        let mut e = RationalMatrix::identity(2 * k);
        let i = rng.gen_range(0..k);
        let j = rng.gen_range(0..k);
        let s = int(if rng.gen_bool(0.5) { 1 } else { -1 });
        match rng.gen_range(0..3) {
            // β_i += s α_j (+ symmetric partner)
            0 => {
                e[(i, k + j)] += s.clone();
                if i != j {
                    e[(j, k + i)] += s;
                }
            }
            1 => {
                e[(k + i, j)] += s.clone();
                if i != j {
                    e[(k + j, i)] += s;
                }
            }
            // A = U, D = U^{-T} with U unipotent
            _ => {
                if i == j {
                    continue;
                }
                e[(i, j)] += s.clone();
                e[(k + j, k + i)] -= s;
            }
        }
        sigma = e.mul(&sigma).expect("square");
    }
    sigma
}

/// `det` over ℚ is ±1 and entries integral.
pub fn is_unimodular_integral(m: &RationalMatrix) -> bool {
    let d = m.determinant();
    m.is_integral() && (d == Rational::one() || d == -Rational::one())
}
