//! Exact divisor-class calculus on the rational Picard group of the
//! projectivized moduli space of quadratic differentials with `n` simple poles.
//!
//! Classes live in a free ℚ-vector space spanned by `φ, λ, ψ_i, δ_irr, δ_{j,k}`.
//! The degeneration classes `δ⁰_deg`, `δ∞_deg` and the Prym class `λ_P` are not
//! generators; they are derived vectors obtained by exact elimination.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::ser::{Serialize, SerializeMap, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exact::{format_rational, int, parse_rational, ratio, Rational, RationalMatrix};

/// One free generator of the Picard group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    Phi,
    Lambda,
    /// `ψ_i`, 1-based.
    Psi(usize),
    DeltaIrr,
    /// `δ_{j,k}`: reducible nodal curves with components of genus `j`, `g−j`
    /// carrying `k`, `n−k` marked points.
    Delta { j: usize, k: usize },
}

impl Generator {
    pub fn label(&self) -> String {
        match self {
            Generator::Phi => "phi".into(),
            Generator::Lambda => "lambda".into(),
            Generator::Psi(i) => format!("psi_{i}"),
            Generator::DeltaIrr => "delta_irr".into(),
            Generator::Delta { j, k } => format!("delta_{j}_{k}"),
        }
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self, Generator::DeltaIrr | Generator::Delta { .. })
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Ordered free basis for a fixed `(g, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorBasis {
    g: usize,
    n: usize,
    generators: Vec<Generator>,
}

impl GeneratorBasis {
    /// Builds the canonical generator list; requires `2g + n > 3`.
    pub fn new(g: usize, n: usize) -> Result<Arc<Self>> {
        if 2 * g + n <= 3 {
            return Err(Error::InvalidInput(format!(
                "unstable pair (g, n) = ({g}, {n}): need 2g + n > 3"
            )));
        }
        let mut generators = vec![Generator::Phi, Generator::Lambda];
        generators.extend((1..=n).map(Generator::Psi));
        generators.push(Generator::DeltaIrr);
        // 2 < 2j + k < 2g + n − 2
        let upper = 2 * g + n - 2;
        for j in 0..=g / 2 {
            for k in 0..=n {
                let s = 2 * j + k;
                if s > 2 && s < upper {
                    generators.push(Generator::Delta { j, k });
                }
            }
        }
        Ok(Arc::new(Self { g, n, generators }))
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn marked_points(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn index_of(&self, gen: Generator) -> Option<usize> {
        self.generators.iter().position(|&x| x == gen)
    }

    pub fn labels(&self) -> Vec<String> {
        self.generators.iter().map(Generator::label).collect()
    }
}

/// Exact rational vector over a [`GeneratorBasis`].
#[derive(Clone, PartialEq, Eq)]
pub struct DivisorClass {
    basis: Arc<GeneratorBasis>,
    coeffs: Vec<Rational>,
}

impl fmt::Debug for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .basis
            .generators
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(g, c)| format!("({c}){g}"))
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

impl DivisorClass {
    pub fn zero(basis: &Arc<GeneratorBasis>) -> Self {
        Self { basis: basis.clone(), coeffs: vec![Rational::zero(); basis.len()] }
    }

    /// Unit vector of a generator. Fails if the generator is absent from the basis.
    pub fn generator(basis: &Arc<GeneratorBasis>, gen: Generator) -> Result<Self> {
        let idx = basis
            .index_of(gen)
            .ok_or_else(|| Error::BasisMismatch(format!("{gen} not in basis")))?;
        let mut c = Self::zero(basis);
        c.coeffs[idx] = Rational::one();
        Ok(c)
    }

    pub fn from_coeffs(basis: &Arc<GeneratorBasis>, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), actual: coeffs.len() });
        }
        Ok(Self { basis: basis.clone(), coeffs })
    }

    pub fn basis(&self) -> &Arc<GeneratorBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of a generator; zero when the generator is absent.
    pub fn coeff(&self, gen: Generator) -> Rational {
        self.basis.index_of(gen).map(|i| self.coeffs[i].clone()).unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn check_same_basis(&self, other: &Self) -> Result<()> {
        if *self.basis != *other.basis {
            return Err(Error::BasisMismatch(format!(
                "(g, n) = ({}, {}) vs ({}, {})",
                self.basis.g, self.basis.n, other.basis.g, other.basis.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_basis(other)?;
        Ok(Self {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_basis(other)?;
        Ok(Self {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self { basis: self.basis.clone(), coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    /// `Σ sᵢ·cᵢ` over classes sharing one basis.
    pub fn combination(basis: &Arc<GeneratorBasis>, terms: &[(Rational, &DivisorClass)]) -> Result<Self> {
        let mut acc = Self::zero(basis);
        for (s, c) in terms {
            acc = acc.add(&c.scale(s))?;
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("divisor class serializes")
    }

    /// Parses a `{label: "p/q"}` map. Missing labels read as zero; unknown labels are rejected.
    pub fn from_json(basis: &Arc<GeneratorBasis>, value: &Value) -> Result<Self> {
        let map = value
            .as_object()
            .ok_or_else(|| Error::Parse("divisor class must be a JSON object".into()))?;
        let labels = basis.labels();
        let mut coeffs = vec![Rational::zero(); basis.len()];
        for (key, v) in map {
            let idx = labels
                .iter()
                .position(|l| l == key)
                .ok_or_else(|| Error::Parse(format!("unknown generator label {key:?}")))?;
            let s = v.as_str().ok_or_else(|| Error::Parse(format!("coefficient of {key} must be a string")))?;
            coeffs[idx] = parse_rational(s)?;
        }
        Ok(Self { basis: basis.clone(), coeffs })
    }
}

impl Serialize for DivisorClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.coeffs.len()))?;
        for (g, c) in self.basis.generators.iter().zip(&self.coeffs) {
            map.serialize_entry(&g.label(), &format_rational(c))?;
        }
        map.end()
    }
}

/// `δ_DM = δ_irr + Σ δ_{j,k}` with unit weights.
pub fn class_dm(basis: &Arc<GeneratorBasis>) -> DivisorClass {
    let coeffs = basis
        .generators
        .iter()
        .map(|g| if g.is_boundary() { Rational::one() } else { Rational::zero() })
        .collect();
    DivisorClass { basis: basis.clone(), coeffs }
}

/// `Σ ψ_i`.
pub fn psi_sum(basis: &Arc<GeneratorBasis>) -> DivisorClass {
    let coeffs = basis
        .generators
        .iter()
        .map(|g| if matches!(g, Generator::Psi(_)) { Rational::one() } else { Rational::zero() })
        .collect();
    DivisorClass { basis: basis.clone(), coeffs }
}

pub fn phi(basis: &Arc<GeneratorBasis>) -> DivisorClass {
    DivisorClass::generator(basis, Generator::Phi).expect("phi always present")
}

pub fn lambda(basis: &Arc<GeneratorBasis>) -> DivisorClass {
    DivisorClass::generator(basis, Generator::Lambda).expect("lambda always present")
}

/// `δ∞_deg = −nφ + Σψ_i`.
pub fn delta_inf_from_psi(basis: &Arc<GeneratorBasis>) -> DivisorClass {
    let n = int(basis.n as i64);
    phi(basis).scale(&-n).add(&psi_sum(basis)).expect("same basis")
}

/// Coefficients of a class written over `{φ, δ⁰_deg, δ∞_deg, δ_DM}` instead of the free basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryExpansion {
    pub phi: Rational,
    pub delta0: Rational,
    pub delta_inf: Rational,
    pub delta_dm: Rational,
}

impl BoundaryExpansion {
    pub fn phi_only(c: Rational) -> Self {
        Self { phi: c, delta0: Rational::zero(), delta_inf: Rational::zero(), delta_dm: Rational::zero() }
    }

    /// Evaluates the expansion in the free basis given vectors for `δ⁰` and `δ∞`.
    pub fn evaluate(
        &self,
        basis: &Arc<GeneratorBasis>,
        delta0: &DivisorClass,
        delta_inf: &DivisorClass,
    ) -> Result<DivisorClass> {
        let dm = class_dm(basis);
        let ph = phi(basis);
        DivisorClass::combination(
            basis,
            &[
                (self.phi.clone(), &ph),
                (self.delta0.clone(), delta0),
                (self.delta_inf.clone(), delta_inf),
                (self.delta_dm.clone(), &dm),
            ],
        )
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "phi": format_rational(&self.phi),
            "delta0_deg": format_rational(&self.delta0),
            "delta_inf_deg": format_rational(&self.delta_inf),
            "delta_dm": format_rational(&self.delta_dm),
        })
    }
}

/// Closed-form expansions of `λ` and `λ_P` over `{φ, δ⁰, δ∞, δ_DM}`.
pub fn closed_form_expansions(g: usize, n: usize) -> (BoundaryExpansion, BoundaryExpansion) {
    let (g1, n) = (g as i64 - 1, n as i64);
    let lambda = BoundaryExpansion {
        phi: ratio(5 * g1 - n, 36),
        delta0: ratio(1, 72),
        delta_inf: ratio(-1, 18),
        delta_dm: ratio(1, 12),
    };
    let prym = BoundaryExpansion {
        phi: ratio(11 * g1 + 5 * n, 36),
        delta0: ratio(13, 72),
        delta_inf: ratio(5, 18),
        delta_dm: ratio(1, 12),
    };
    (lambda, prym)
}

/// `λ` and `λ_P` as vectors in the free basis, given `δ⁰` and `δ∞` as vectors.
pub fn closed_form_classes(
    basis: &Arc<GeneratorBasis>,
    delta0: &DivisorClass,
    delta_inf: &DivisorClass,
) -> Result<(DivisorClass, DivisorClass)> {
    for c in [delta0, delta_inf] {
        if **c.basis() != **basis {
            return Err(Error::BasisMismatch("input class built over a different basis".into()));
        }
    }
    let (l, p) = closed_form_expansions(basis.g, basis.n);
    Ok((l.evaluate(basis, delta0, delta_inf)?, p.evaluate(basis, delta0, delta_inf)?))
}

/// Vanishing orders of a tau function along `(D⁰_deg, D∞_deg, D_DM)`, as they
/// appear on the right-hand side of the section-divisor identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryOrders {
    pub delta0: Rational,
    pub delta_inf: Rational,
    pub delta_dm: Rational,
}

impl BoundaryOrders {
    /// `(2/3, −8/3, 4)` for `τ₊`.
    pub fn tau_plus() -> Self {
        Self { delta0: ratio(2, 3), delta_inf: ratio(-8, 3), delta_dm: int(4) }
    }

    /// `(26/3, 40/3, 4)` for `τ₋`.
    pub fn tau_minus() -> Self {
        Self { delta0: ratio(26, 3), delta_inf: ratio(40, 3), delta_dm: int(4) }
    }
}

/// Output of [`solve_tau_relations`].
#[derive(Debug, Clone)]
pub struct TauRelationSolution {
    pub lambda: DivisorClass,
    pub prym: DivisorClass,
    pub delta0: DivisorClass,
    pub delta_inf: DivisorClass,
    /// `λ` eliminated over `{φ, δ⁰, δ∞, δ_DM}`.
    pub lambda_expansion: BoundaryExpansion,
    pub prym_expansion: BoundaryExpansion,
}

/// Solves the two section-divisor identities
/// `48λ − κ₊φ = a₀δ⁰ + a∞δ∞ + a_DM δ_DM`, `48λ_P − κ₋φ = b₀δ⁰ + b∞δ∞ + b_DM δ_DM`
/// together with `δ∞ = −nφ + Σψ` by exact Gaussian elimination.
///
/// Two eliminations are performed: one over the unknowns `(λ_P, δ⁰, δ∞)` with
/// right-hand sides in the free basis, and one over `(λ, λ_P)` with right-hand
/// sides in the symbols `{φ, δ⁰, δ∞, δ_DM}`.
pub fn solve_tau_relations(
    g: usize,
    n: usize,
    kappa_plus: &Rational,
    kappa_minus: &Rational,
    orders_plus: &BoundaryOrders,
    orders_minus: &BoundaryOrders,
) -> Result<TauRelationSolution> {
    let basis = GeneratorBasis::new(g, n)?;
    let dim = basis.len();
    let ph = phi(&basis);
    let lam = lambda(&basis);
    let dm = class_dm(&basis);
    let psi = psi_sum(&basis);
    let k48 = int(48);

    // unknown columns: λ_P, δ⁰, δ∞
    let a = RationalMatrix::from_fn(3, 3, |i, j| match (i, j) {
        (0, 1) => -orders_plus.delta0.clone(),
        (0, 2) => -orders_plus.delta_inf.clone(),
        (1, 0) => k48.clone(),
        (1, 1) => -orders_minus.delta0.clone(),
        (1, 2) => -orders_minus.delta_inf.clone(),
        (2, 2) => Rational::one(),
        _ => Rational::zero(),
    });
    let r0 = DivisorClass::combination(
        &basis,
        &[(-k48.clone(), &lam), (kappa_plus.clone(), &ph), (orders_plus.delta_dm.clone(), &dm)],
    )?;
    let r1 = DivisorClass::combination(
        &basis,
        &[(kappa_minus.clone(), &ph), (orders_minus.delta_dm.clone(), &dm)],
    )?;
    let r2 = DivisorClass::combination(&basis, &[(-int(n as i64), &ph), (Rational::one(), &psi)])?;
    let rows = [&r0, &r1, &r2];
    let rhs = RationalMatrix::from_fn(3, dim, |i, j| rows[i].coeffs[j].clone());
    let sol = a.solve(&rhs)?;
    let row = |i: usize| DivisorClass {
        basis: basis.clone(),
        coeffs: (0..dim).map(|j| sol[(i, j)].clone()).collect(),
    };
    let (prym, delta0, delta_inf) = (row(0), row(1), row(2));

    // unknown columns: λ, λ_P; symbol columns: φ, δ⁰, δ∞, δ_DM
    let a2 = RationalMatrix::from_fn(2, 2, |i, j| if i == j { k48.clone() } else { Rational::zero() });
    let rhs2 = RationalMatrix::from_fn(2, 4, |i, j| {
        let (k, o) = if i == 0 { (kappa_plus, orders_plus) } else { (kappa_minus, orders_minus) };
        match j {
            0 => k.clone(),
            1 => o.delta0.clone(),
            2 => o.delta_inf.clone(),
            _ => o.delta_dm.clone(),
        }
    });
    let sol2 = a2.solve(&rhs2)?;
    let expansion = |i: usize| BoundaryExpansion {
        phi: sol2[(i, 0)].clone(),
        delta0: sol2[(i, 1)].clone(),
        delta_inf: sol2[(i, 2)].clone(),
        delta_dm: sol2[(i, 3)].clone(),
    };

    Ok(TauRelationSolution {
        lambda: lam,
        prym,
        delta0,
        delta_inf,
        lambda_expansion: expansion(0),
        prym_expansion: expansion(1),
    })
}

/// Solution of the tau relations with the exponent data of the principal stratum.
pub fn solve_principal(g: usize, n: usize) -> Result<TauRelationSolution> {
    let (kp, km) = crate::strata::principal_kappa(g, n)?;
    solve_tau_relations(g, n, &kp, &km, &BoundaryOrders::tau_plus(), &BoundaryOrders::tau_minus())
}

/// One identity of the Mumford chain together with its exact residual.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub residual: DivisorClass,
}

#[derive(Debug, Clone)]
pub struct MumfordReport {
    pub g: usize,
    pub n: usize,
    pub identities: Vec<IdentityCheck>,
}

impl MumfordReport {
    pub fn all_zero(&self) -> bool {
        self.identities.iter().all(|c| c.residual.is_zero())
    }

    pub fn to_json(&self) -> Value {
        let ids: Vec<Value> = self
            .identities
            .iter()
            .map(|c| {
                serde_json::json!({
                    "identity": c.name,
                    "zero": c.residual.is_zero(),
                    "residual": c.residual.to_json(),
                })
            })
            .collect();
        serde_json::json!({ "g": self.g, "n": self.n, "identities": ids, "all_zero": self.all_zero() })
    }
}

/// Substitutes `λ₂ = λ_P + ½(3g−3+n)φ` and the solved classes into the
/// corollary chain and Mumford's relation; every residual must vanish.
pub fn verify_mumford_chain(basis: &Arc<GeneratorBasis>) -> Result<MumfordReport> {
    let (g, n) = (basis.g, basis.n);
    let sol = solve_principal(g, n)?;
    let (lam, prym) = closed_form_classes(basis, &sol.delta0, &sol.delta_inf)?;
    let ph = phi(basis);
    let dm = class_dm(basis);
    let psi = psi_sum(basis);
    let (gi, ni) = (g as i64, n as i64);
    let lambda2 = prym.add(&ph.scale(&ratio(3 * gi - 3 + ni, 2)))?;
    let one = Rational::one;
    let c13 = int(13);

    let l2l = DivisorClass::combination(
        basis,
        &[
            (one(), &lambda2),
            (-c13.clone(), &lam),
            (-int(ni), &ph),
            (-one(), &sol.delta_inf),
            (one(), &dm),
        ],
    )?;
    let mumford = DivisorClass::combination(
        basis,
        &[(one(), &lambda2), (-c13.clone(), &lam), (-one(), &psi), (one(), &dm)],
    )?;
    let delpsi = mumford.sub(&l2l)?;
    let prym_corollary = DivisorClass::combination(
        basis,
        &[
            (one(), &prym),
            (-c13, &lam),
            (-one(), &sol.delta_inf),
            (one(), &dm),
            (ratio(3 * gi - 3 - ni, 2), &ph),
        ],
    )?;
    let delta0_formula = DivisorClass::combination(
        basis,
        &[
            (one(), &sol.delta0),
            (-int(72), &lam),
            (-int(4), &psi),
            (int(10 * (gi - 1) + 2 * ni), &ph),
            (int(6), &dm),
        ],
    )?;
    let lambda_consistency = lam.sub(&sol.lambda)?;
    let prym_consistency = prym.sub(&sol.prym)?;

    Ok(MumfordReport {
        g,
        n,
        identities: vec![
            IdentityCheck { name: "lambda2 - 13 lambda - n phi - delta_inf + delta_dm", residual: l2l },
            IdentityCheck { name: "lambda2 - 13 lambda - sum psi + delta_dm (Mumford)", residual: mumford },
            IdentityCheck { name: "Mumford minus corollary: delta_inf + n phi - sum psi", residual: delpsi },
            IdentityCheck {
                name: "lambda_P - 13 lambda - delta_inf + delta_dm + (3g-3-n)/2 phi",
                residual: prym_corollary,
            },
            IdentityCheck {
                name: "delta0 - 72 lambda - 4 sum psi + (10(g-1)+2n) phi + 6 delta_dm",
                residual: delta0_formula,
            },
            IdentityCheck { name: "closed-form lambda minus solved lambda", residual: lambda_consistency },
            IdentityCheck { name: "closed-form lambda_P minus solved lambda_P", residual: prym_consistency },
        ],
    })
}

/// Restriction to the open principal stratum: every boundary contribution is dropped.
pub fn principal_stratum_restriction(cls: &BoundaryExpansion) -> BoundaryExpansion {
    BoundaryExpansion::phi_only(cls.phi.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force enumeration of the `(j, k)` index set, independent of `GeneratorBasis::new`.
    fn brute_force_pairs(g: i64, n: i64) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for j in 0..=g {
            for k in 0..=n {
                if 2 * j <= g && 2 < 2 * j + k && 2 * j + k < 2 * g + n - 2 {
                    out.push((j, k));
                }
            }
        }
        out
    }

    fn pairs(b: &GeneratorBasis) -> Vec<(i64, i64)> {
        b.generators()
            .iter()
            .filter_map(|g| match g {
                Generator::Delta { j, k } => Some((*j as i64, *k as i64)),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn basis_matches_brute_force_enumeration() {
        for g in 0..6 {
            for n in 0..7 {
                if 2 * g + n <= 3 {
                    assert!(GeneratorBasis::new(g, n).is_err());
                    continue;
                }
                let b = GeneratorBasis::new(g, n).unwrap();
                assert_eq!(pairs(&b), brute_force_pairs(g as i64, n as i64), "(g,n)=({g},{n})");
                assert_eq!(b.len(), 3 + n + pairs(&b).len());
            }
        }
    }

    #[test]
    fn small_bases() {
        let b = GeneratorBasis::new(2, 0).unwrap();
        assert_eq!(b.labels(), vec!["phi", "lambda", "delta_irr"]);
        // for (0, 5) the strict bounds 2 < k < 3 admit no δ_{j,k}
        let b = GeneratorBasis::new(0, 5).unwrap();
        assert_eq!(
            b.labels(),
            vec!["phi", "lambda", "psi_1", "psi_2", "psi_3", "psi_4", "psi_5", "delta_irr"]
        );
        let b = GeneratorBasis::new(3, 2).unwrap();
        assert_eq!(pairs(&b), vec![(1, 1), (1, 2)]);
        assert!(GeneratorBasis::new(1, 1).is_err());
    }

    #[test]
    fn dm_class() {
        let b = GeneratorBasis::new(2, 0).unwrap();
        let dm = class_dm(&b);
        assert_eq!(dm.coeff(Generator::DeltaIrr), int(1));
        assert_eq!(dm.coeff(Generator::Phi), int(0));
        let b = GeneratorBasis::new(3, 2).unwrap();
        let dm = class_dm(&b);
        assert_eq!(dm.coeffs().iter().filter(|c| **c == int(1)).count(), 3);
    }

    #[test]
    fn closed_form_coefficients() {
        let (l, p) = closed_form_expansions(2, 1);
        assert_eq!(l.phi, ratio(1, 9));
        assert_eq!(p.delta0, ratio(13, 72));
        for g in 2..6 {
            let (l, _) = closed_form_expansions(g, 0);
            assert_eq!(l.phi, ratio(5 * (g as i64 - 1), 36));
        }
    }

    #[test]
    fn solve_g2_n0() {
        let sol = solve_tau_relations(
            2,
            0,
            &ratio(20, 3),
            &ratio(44, 3),
            &BoundaryOrders::tau_plus(),
            &BoundaryOrders::tau_minus(),
        )
        .unwrap();
        assert_eq!(sol.lambda_expansion.phi, ratio(5, 36));
        assert_eq!(sol.lambda_expansion.delta0, ratio(1, 72));
        assert_eq!(sol.lambda_expansion.delta_dm, ratio(1, 12));
        assert!(sol.delta_inf.is_zero());
    }

    #[test]
    fn inconsistent_orders_are_reported() {
        let zero = BoundaryOrders { delta0: int(0), delta_inf: int(0), delta_dm: int(4) };
        let r = solve_tau_relations(2, 1, &ratio(1, 3), &ratio(2, 3), &zero, &zero);
        assert!(matches!(r, Err(Error::Singular(_)) | Err(Error::Contradiction(_))));
    }

    #[test]
    fn delta_inf_psi() {
        let b = GeneratorBasis::new(0, 5).unwrap();
        let d = delta_inf_from_psi(&b);
        assert_eq!(d.coeff(Generator::Phi), int(-5));
        for i in 1..=5 {
            assert_eq!(d.coeff(Generator::Psi(i)), int(1));
        }
        assert!(delta_inf_from_psi(&GeneratorBasis::new(3, 0).unwrap()).is_zero());
    }

    #[test]
    fn mumford_chain_closes() {
        for (g, n) in [(1, 2), (3, 0), (0, 5), (2, 3)] {
            let b = GeneratorBasis::new(g, n).unwrap();
            let rep = verify_mumford_chain(&b).unwrap();
            assert!(rep.all_zero(), "{rep:?}");
        }
    }

    #[test]
    fn restriction() {
        let (l, p) = closed_form_expansions(0, 5);
        assert_eq!(principal_stratum_restriction(&l).phi, ratio(-5, 18));
        assert_eq!(principal_stratum_restriction(&p).phi, ratio(7, 18));
        let phi = BoundaryExpansion::phi_only(int(1));
        assert_eq!(principal_stratum_restriction(&phi), phi);
    }

    #[test]
    fn basis_mismatch_rejected() {
        let a = GeneratorBasis::new(2, 1).unwrap();
        let b = GeneratorBasis::new(2, 2).unwrap();
        assert!(closed_form_classes(&a, &DivisorClass::zero(&b), &DivisorClass::zero(&a)).is_err());
        assert!(DivisorClass::zero(&a).add(&DivisorClass::zero(&b)).is_err());
    }

    #[test]
    fn json_round_trip() {
        let b = GeneratorBasis::new(1, 3).unwrap();
        let sol = solve_principal(1, 3).unwrap();
        let v = sol.prym.to_json();
        assert_eq!(DivisorClass::from_json(&b, &v).unwrap(), sol.prym);
        let text = serde_json::to_string(&v).unwrap();
        assert!(text.starts_with("{\"phi\":"));
        assert!(DivisorClass::from_json(&b, &serde_json::json!({"bogus": "1"})).is_err());
    }
}
