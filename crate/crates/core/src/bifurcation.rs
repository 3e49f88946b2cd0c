//! Closed-form branch derivatives at the bifurcation point and their classification.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use nalgebra::DMatrix;
use num_traits::Float;

use crate::coupling::expand_pointwise_square;
use crate::equilibrium::BranchKind;
use crate::symmetry::{fix_generator, GroupName};
use crate::{lambda_ell, Error, Result};

/// Below this `|λ′(0)|` a pair counts as a pitchfork.
pub const PITCHFORK_TOL: f64 = 1e-12;

/// `½⟨e, e²⟩`.
pub fn lambda_prime(ell: usize, k: GroupName) -> Result<f64> {
    let e = fix_generator(k, ell, 2 * ell)?;
    let sq = expand_pointwise_square(&e)?;
    Ok(0.5 * e.dot(&sq))
}

/// Slope `λ′(0) = (λ_ℓ/2)⟨e, e²⟩` of `λ(s)` along the branch of `Δv + λ f(v) = 0`.
///
/// [`lambda_prime`] omits the factor `λ_ℓ` carried by the quadratic term.
pub fn branch_slope(ell: usize, k: GroupName) -> Result<f64> {
    Ok(lambda_ell(ell) * lambda_prime(ell, k)?)
}

/// `λ_ℓ Σ_{ℓ′≠ℓ} λ_{ℓ′}/(λ_ℓ − λ_{ℓ′}) Σ_{m′} c²_{ℓ′m′}` with `c` the coefficients of `e²`.
pub fn lambda_double_prime(ell: usize, k: GroupName) -> Result<f64> {
    if lambda_prime(ell, k)?.abs() > PITCHFORK_TOL {
        return Err(Error::NotPitchfork);
    }
    let e = fix_generator(k, ell, 2 * ell)?;
    let c = expand_pointwise_square(&e)?;
    let le = lambda_ell(ell);
    let mut sum = 0.0;
    for lp in (0..=2 * ell).filter(|lp| *lp != ell) {
        let lq = lambda_ell(lp);
        let w: f64 = c.block(lp).iter().map(|x| x * x).sum();
        sum += lq / (le - lq) * w;
    }
    Ok(le * sum)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Direction {
    /// The branch for `s > 0` lies at `λ < λ_ℓ`.
    Sub,
    Super,
}

/// Reference value of a table entry.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TableReference {
    pub quantity: &'static str,
    pub expected: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BifurcationReport {
    pub ell: usize,
    pub group: GroupName,
    pub kind: BranchKind,
    pub direction: Direction,
    pub lambda_prime: f64,
    pub lambda_second: Option<f64>,
    pub table_reference: Option<TableReference>,
}

/// Expected first nonvanishing derivatives for the seven symmetry-breaking pairs.
pub fn table_value(ell: usize, k: GroupName) -> Option<(&'static str, f64)> {
    let sp = PI.sqrt();
    Some(match (k, ell) {
        (GroupName::O2m, 1) => ("lambda_second", -3.0 / (5.0 * PI)),
        (GroupName::O2xZ2c, 2) => ("lambda_prime", 5f64.sqrt() / (14.0 * sp)),
        (GroupName::O2m, 3) => ("lambda_second", -2954.0 / (715.0 * PI)),
        (GroupName::Om, 3) => ("lambda_second", -1050.0 / (143.0 * PI)),
        (GroupName::D6d, 3) => ("lambda_second", -665.0 / (286.0 * PI)),
        (GroupName::O2xZ2c, 4) => ("lambda_prime", 243.0 / (2002.0 * sp)),
        (GroupName::OxZ2c, 4) => ("lambda_prime", 9.0 * 21f64.sqrt() / (286.0 * sp)),
        _ => return None,
    })
}

pub fn classify_branch(ell: usize, k: GroupName) -> Result<BifurcationReport> {
    let lp = lambda_prime(ell, k)?;
    let (kind, lambda_second, lead) = if lp.abs() > PITCHFORK_TOL {
        (BranchKind::Transcritical, None, lp)
    } else {
        let l2 = lambda_double_prime(ell, k)?;
        if l2.abs() < PITCHFORK_TOL {
            return Err(Error::Degenerate);
        }
        (BranchKind::Pitchfork, Some(l2), l2)
    };
    let direction = if lead < 0.0 { Direction::Sub } else { Direction::Super };
    let table_reference = table_value(ell, k).map(|(quantity, expected)| {
        let computed = if quantity == "lambda_prime" { lp } else { lambda_second.unwrap_or(f64::NAN) };
        TableReference { quantity, expected, deviation: (computed - expected).abs() / expected.abs() }
    });
    Ok(BifurcationReport { ell, group: k, kind, direction, lambda_prime: lp, lambda_second, table_reference })
}

/// Coefficients `(α, β)` of the cubic equivariant at `ℓ = 3`, least squares over the
/// three pitchfork curvatures, with the residual norm.
///
/// Rows: `λ″ = 2(18α − β)` for O(2)⁻, `45α − 2β` for D₆ᵈ, `2(10α − β)` for O⁻, in the
/// unit-norm generator normalization used throughout.
pub fn fit_cubic_equivariant() -> Result<(f64, f64, f64)> {
    let rhs = vec![
        lambda_double_prime(3, GroupName::O2m)?,
        lambda_double_prime(3, GroupName::D6d)?,
        lambda_double_prime(3, GroupName::Om)?,
    ];
    let a = DMatrix::from_row_slice(3, 2, &[36.0, -2.0, 45.0, -2.0, 20.0, -2.0]);
    let (x, r) = crate::linalg::least_squares(a, &rhs);
    Ok((x[0], x[1], r))
}

/// One row of the derivative comparison.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DerivativeCheck {
    pub ell: usize,
    pub group: GroupName,
    pub quantity: &'static str,
    pub expected: f64,
    pub computed: f64,
    pub rel_error: f64,
}

/// The eight derivative entries: seven nonvanishing ones plus `λ′(0) = 0` at `ℓ = 1`.
pub fn derivative_checks() -> Result<Vec<DerivativeCheck>> {
    let mut out = Vec::new();
    let lp1 = lambda_prime(1, GroupName::O2m)?;
    out.push(DerivativeCheck { ell: 1, group: GroupName::O2m, quantity: "lambda_prime", expected: 0.0, computed: lp1, rel_error: lp1.abs() });
    for (k, ell) in crate::symmetry::TABLE_PAIRS {
        let (quantity, expected) = table_value(ell, k).ok_or(Error::UnknownPair { group: k.ident().to_string(), ell })?;
        let computed = if quantity == "lambda_prime" { lambda_prime(ell, k)? } else { lambda_double_prime(ell, k)? };
        out.push(DerivativeCheck { ell, group: k, quantity, expected, computed, rel_error: (computed - expected).abs() / expected.abs() });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_table_entries() {
        for c in derivative_checks().unwrap() {
            assert!(c.rel_error < 1e-10, "{c:?}");
        }
    }

    #[test]
    fn odd_degrees_have_vanishing_first_derivative() {
        for ell in [1, 3, 5, 7, 9] {
            assert!(lambda_prime(ell, GroupName::O2m).unwrap().abs() < 1e-15);
        }
        assert_eq!(lambda_double_prime(2, GroupName::O2xZ2c), Err(Error::NotPitchfork));
    }

    #[test]
    fn classification() {
        let r = classify_branch(1, GroupName::O2m).unwrap();
        assert_eq!((r.kind, r.direction), (BranchKind::Pitchfork, Direction::Sub));
        assert_eq!(classify_branch(2, GroupName::O2xZ2c).unwrap().kind, BranchKind::Transcritical);
        assert_eq!(classify_branch(4, GroupName::OxZ2c).unwrap().kind, BranchKind::Transcritical);
    }

    #[test]
    fn cubic_fit() {
        let (a, b, r) = fit_cubic_equivariant().unwrap();
        assert!((a - 287.0 / (1430.0 * PI)).abs() < 1e-12);
        assert!((b - 812.0 / (143.0 * PI)).abs() < 1e-12);
        assert!(r < 1e-12 && a != 0.0);
    }
}
