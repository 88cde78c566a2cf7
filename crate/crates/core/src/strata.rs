//! Stratum signatures and their homogeneity exponents.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{int, ratio, Rational};

/// Vanishing order of `τ±` along the Deligne–Mumford boundary, consumed as data.
pub const DM_EXPONENT: i64 = 4;

/// Homogeneity weight of a homological coordinate under `q ↦ εq`.
pub fn t_weight() -> Rational {
    ratio(1, 2)
}

/// Orders `d_i ≥ −1` of the zeros, poles and marked ordinary points of a quadratic differential.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumSignature {
    genus: usize,
    orders: Vec<i64>,
}

impl StratumSignature {
    pub fn new(genus: usize, orders: Vec<i64>) -> Result<Self> {
        if let Some(d) = orders.iter().find(|&&d| d < -1) {
            return Err(Error::InvalidInput(format!("order {d} < -1")));
        }
        let total: i64 = orders.iter().sum();
        let expected = 4 * genus as i64 - 4;
        if total != expected {
            return Err(Error::InvalidInput(format!(
                "orders sum to {total}, expected 4g - 4 = {expected}"
            )));
        }
        Ok(Self { genus, orders })
    }

    /// `Q(1^{4g−4+n}, −1^n)`.
    pub fn principal(genus: usize, n: usize) -> Result<Self> {
        let zeros = 4 * genus as i64 - 4 + n as i64;
        if zeros < 0 {
            return Err(Error::InvalidInput(format!("no principal stratum for (g, n) = ({genus}, {n})")));
        }
        let mut orders = vec![1; zeros as usize];
        orders.extend(std::iter::repeat(-1).take(n));
        Self::new(genus, orders)
    }

    /// Parses a comma-separated order list such as `"1,-1,-1,-1,-1,-1"`.
    pub fn parse(genus: usize, text: &str) -> Result<Self> {
        let orders = text
            .split(',')
            .map(|s| s.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad order {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(genus, orders)
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn orders(&self) -> &[i64] {
        &self.orders
    }

    /// Number of simple poles.
    pub fn labeled_poles(&self) -> usize {
        self.orders.iter().filter(|&&d| d == -1).count()
    }
}

impl fmt::Display for StratumSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.orders.iter().map(|d| d.to_string()).collect();
        write!(f, "Q_{}({})", self.genus, parts.join(","))
    }
}

/// Contribution of one order `d` to `(κ₊, κ₋)`.
pub fn kappa_term(d: i64) -> (Rational, Rational) {
    let plus = ratio(d * (d + 4), d + 2);
    let minus = if d.rem_euclid(2) == 1 { &plus + ratio(6, d + 2) } else { plus.clone() };
    (plus, minus)
}

/// `κ₊ = Σ dᵢ(dᵢ+4)/(dᵢ+2)`, `κ₋ = κ₊ + 6 Σ_{dᵢ odd} 1/(dᵢ+2)`.
pub fn kappa(sig: &StratumSignature) -> (Rational, Rational) {
    sig.orders.iter().fold((Rational::zero(), Rational::zero()), |(p, m), &d| {
        let (tp, tm) = kappa_term(d);
        (p + tp, m + tm)
    })
}

/// `((20(g−1) − 4n)/3, (44(g−1) + 20n)/3)`.
pub fn principal_kappa(g: usize, n: usize) -> Result<(Rational, Rational)> {
    if 2 * g + n <= 3 {
        return Err(Error::InvalidInput(format!("unstable pair (g, n) = ({g}, {n})")));
    }
    let (g1, n) = (g as i64 - 1, n as i64);
    Ok((ratio(20 * g1 - 4 * n, 3), ratio(44 * g1 + 20 * n, 3)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollisionKind {
    /// A simple zero and a simple pole annihilate into a marked ordinary point.
    ZeroPole,
    /// Two simple zeros merge into a double zero.
    ZeroZero,
}

impl std::str::FromStr for CollisionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero-pole" => Ok(Self::ZeroPole),
            "zero-zero" => Ok(Self::ZeroZero),
            other => Err(Error::Parse(format!("unknown collision kind {other:?}"))),
        }
    }
}

/// Exponent bookkeeping for one collision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentData {
    pub delta_kappa_plus: Rational,
    pub delta_kappa_minus: Rational,
    pub t_weight: Rational,
    pub gamma_plus: Rational,
    pub gamma_minus: Rational,
}

fn orders_before_after(kind: CollisionKind) -> (Vec<i64>, Vec<i64>) {
    match kind {
        CollisionKind::ZeroPole => (vec![1, -1], vec![0]),
        CollisionKind::ZeroZero => (vec![1, 1], vec![2]),
    }
}

/// Change of `κ±` across the collision, and the exponent `γ± = Δκ± / (1/2)`
/// in the transversal homological coordinate.
pub fn collision_exponents(kind: CollisionKind) -> ExponentData {
    let (before, after) = orders_before_after(kind);
    let sum = |ds: &[i64]| {
        ds.iter().fold((Rational::zero(), Rational::zero()), |(p, m), &d| {
            let (tp, tm) = kappa_term(d);
            (p + tp, m + tm)
        })
    };
    let (bp, bm) = sum(&before);
    let (ap, am) = sum(&after);
    let dp = bp - ap;
    let dm = bm - am;
    let w = t_weight();
    ExponentData {
        gamma_plus: &dp / &w,
        gamma_minus: &dm / &w,
        delta_kappa_plus: dp,
        delta_kappa_minus: dm,
        t_weight: w,
    }
}

/// Signature after merging one simple zero with one simple pole (resp. two simple zeros).
pub fn collide(sig: &StratumSignature, kind: CollisionKind) -> Result<StratumSignature> {
    let (before, after) = orders_before_after(kind);
    let mut orders = sig.orders.clone();
    for d in before {
        let pos = orders
            .iter()
            .position(|&x| x == d)
            .ok_or_else(|| Error::InvalidInput(format!("{sig} has no entry of order {d} to collide")))?;
        orders.remove(pos);
    }
    orders.extend(after);
    StratumSignature::new(sig.genus, orders)
}

/// The DM exponent as an exact rational.
pub fn dm_exponent() -> Rational {
    int(DM_EXPONENT)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_examples() {
        let s = StratumSignature::principal(2, 0).unwrap();
        assert_eq!(kappa(&s), (ratio(20, 3), ratio(44, 3)));
        let s = StratumSignature::parse(0, "1,-1,-1,-1,-1,-1").unwrap();
        assert_eq!(kappa(&s), (ratio(-40, 3), ratio(56, 3)));
        let s = StratumSignature::new(1, vec![0]).unwrap();
        assert_eq!(kappa(&s), (int(0), int(0)));
    }

    #[test]
    fn principal_examples() {
        assert_eq!(principal_kappa(0, 6).unwrap(), (ratio(-44, 3), ratio(76, 3)));
        assert_eq!(principal_kappa(1, 2).unwrap(), (ratio(-8, 3), ratio(40, 3)));
        assert!(principal_kappa(1, 1).is_err());
    }

    #[test]
    fn principal_consistency_exhaustive() {
        for g in 0..=10 {
            for n in 0..=10 {
                if 2 * g + n <= 3 {
                    continue;
                }
                let sig = StratumSignature::principal(g, n).unwrap();
                assert_eq!(kappa(&sig), principal_kappa(g, n).unwrap(), "(g,n)=({g},{n})");
            }
        }
    }

    #[test]
    fn collision_values() {
        let zp = collision_exponents(CollisionKind::ZeroPole);
        assert_eq!(zp.delta_kappa_plus, ratio(-4, 3));
        assert_eq!(zp.delta_kappa_minus, ratio(20, 3));
        assert_eq!((zp.gamma_plus, zp.gamma_minus), (ratio(-8, 3), ratio(40, 3)));
        let zz = collision_exponents(CollisionKind::ZeroZero);
        assert_eq!((zz.gamma_plus, zz.gamma_minus), (ratio(2, 3), ratio(26, 3)));
    }

    #[test]
    fn invalid_signatures() {
        assert!(StratumSignature::new(0, vec![-2, -2]).is_err());
        assert!(StratumSignature::new(1, vec![1]).is_err());
        assert!(StratumSignature::parse(0, "1,x").is_err());
    }

    #[test]
    fn boundary_stratum_is_first_class() {
        let s = StratumSignature::principal(1, 3).unwrap();
        let b = collide(&s, CollisionKind::ZeroPole).unwrap();
        assert_eq!(b.labeled_poles(), 2);
        assert!(b.orders().contains(&0));
    }
}
