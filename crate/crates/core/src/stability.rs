//! Spectra of the linearized flows at equilibria and Morse indices.
//!
//! The quasilinear linearization at an equilibrium is `M J`, with `J` the symmetric
//! Jacobian of the residual and `M` the Gram matrix of `(1+v)²`. Writing `M = C Cᵀ`,
//! its spectrum is that of the symmetric `Cᵀ J C`; by Sylvester's law of inertia the
//! sign counts agree with those of `J`.

use alloc::vec::Vec;
use nalgebra::DMatrix;
use num_traits::Float;

use crate::dynamics::Side;
use crate::equilibrium::{branch_point_at, Equilibrium};
use crate::galerkin::Galerkin;
use crate::linalg::sym_eigenvalues;
use crate::spectral::SpectralField;
use crate::symmetry::{GroupName, IsotropyDescriptor};
use crate::{lambda_ell, Error, Result};

pub const DEFAULT_ZERO_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Operator {
    /// `Δ + λ f′(v)`.
    Semilinear,
    /// `(1+v)²(Δ + λ f′(v))`.
    Quasilinear,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectrumReport {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    pub zero_tol: f64,
    pub n_positive: usize,
    pub n_zero: usize,
    pub n_negative: usize,
    pub operator: Operator,
}

impl SpectrumReport {
    fn new(mut eigenvalues: Vec<f64>, zero_tol: f64, operator: Operator) -> Self {
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        let n_positive = eigenvalues.iter().filter(|x| **x > zero_tol).count();
        let n_zero = eigenvalues.iter().filter(|x| x.abs() <= zero_tol).count();
        let n_negative = eigenvalues.len() - n_positive - n_zero;
        Self { eigenvalues, zero_tol, n_positive, n_zero, n_negative, operator }
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        (self.n_positive, self.n_zero, self.n_negative)
    }

    /// Largest eigenvalue below `−zero_tol`, if any.
    pub fn leading_negative(&self) -> Option<f64> {
        self.eigenvalues.iter().copied().find(|x| *x < -self.zero_tol)
    }
}

/// Spectrum on a given Galerkin model with a `(1+τv)²` quasilinear weight.
pub fn spectrum_on(model: &Galerkin, lambda: f64, y: &[f64], which: Operator, tau: f64, zero_tol: f64) -> Result<SpectrumReport> {
    let v = model.checked_values(y)?;
    let j = model.jacobian_from_values(lambda, &v);
    let ev = match which {
        Operator::Semilinear => sym_eigenvalues(j),
        Operator::Quasilinear => {
            let c = mass_factor(model, &v, tau)?;
            sym_eigenvalues(c.tr_mul(&j) * &c)
        }
    };
    Ok(SpectrumReport::new(ev, zero_tol, which))
}

/// Lower Cholesky factor of the Gram matrix of `(1+τv)²`.
fn mass_factor(model: &Galerkin, v: &[f64], tau: f64) -> Result<DMatrix<f64>> {
    let w: Vec<f64> = v.iter().map(|x| (1.0 + tau * x).powi(2)).collect();
    let m = model.weighted_gram(&w);
    Ok(m.cholesky().ok_or(Error::SingularJacobian)?.l())
}

/// Spectrum of the semilinear or quasilinear linearization at `(λ, v)` in the full space.
pub fn linearized_spectrum(lambda: f64, v: &SpectralField, which: Operator) -> Result<SpectrumReport> {
    let model = Galerkin::full(v.l_max());
    spectrum_on(&model, lambda, v.coeffs(), which, 1.0, DEFAULT_ZERO_TOL)
}

/// Largest imaginary part among eigenvalues of the nonsymmetric product `M J`.
pub fn quasilinear_max_imaginary(lambda: f64, v: &SpectralField) -> Result<f64> {
    let model = Galerkin::full(v.l_max());
    let vals = model.checked_values(v.coeffs())?;
    let j = model.jacobian_from_values(lambda, &vals);
    let w: Vec<f64> = vals.iter().map(|x| (1.0 + x).powi(2)).collect();
    let mj = model.weighted_gram(&w) * j;
    Ok(mj.complex_eigenvalues().iter().map(|z| z.im.abs()).fold(0.0, f64::max))
}

/// Morse index `i` and zero count of the quasilinear linearization.
pub fn morse_index(eq: &Equilibrium, zero_tol: f64) -> Result<(usize, usize)> {
    let r = linearized_spectrum(eq.lambda, &eq.v, Operator::Quasilinear)?;
    morse_from_report(&SpectrumReport::new(r.eigenvalues, zero_tol, Operator::Quasilinear))
}

pub fn morse_from_report(r: &SpectrumReport) -> Result<(usize, usize)> {
    let tol = r.zero_tol;
    if let Some(x) = r.eigenvalues.iter().find(|x| x.abs() > tol && x.abs() < 10.0 * tol) {
        return Err(Error::AmbiguousSpectrum { value: *x, tol, band: 10.0 * tol });
    }
    Ok((r.n_positive, r.n_zero))
}

/// Whether semilinear and quasilinear sign counts agree.
pub fn morse_equivalence_check(lambda: f64, v: &SpectralField) -> Result<bool> {
    let a = linearized_spectrum(lambda, v, Operator::Semilinear)?;
    let b = linearized_spectrum(lambda, v, Operator::Quasilinear)?;
    Ok(a.counts() == b.counts())
}

/// Zero counts of `(1+τv)² L` for `τ` in `taus`.
pub fn homotopy_zero_counts(lambda: f64, v: &SpectralField, taus: &[f64]) -> Result<Vec<usize>> {
    let model = Galerkin::full(v.l_max());
    taus.iter()
        .map(|t| spectrum_on(&model, lambda, v.coeffs(), Operator::Quasilinear, *t, DEFAULT_ZERO_TOL).map(|r| r.n_zero))
        .collect()
}

/// Number of positive eigenvalues of `Δ + λ/2`.
pub fn area_stability_index(lambda: f64) -> Result<usize> {
    let half = 0.5 * lambda;
    let mut count = 0;
    for l in 0.. {
        let e = lambda_ell(l);
        if (half - e).abs() < 1e-12 * (1.0 + e) {
            return Err(Error::OnResonance(half));
        }
        if e > half {
            break;
        }
        count += 2 * l + 1;
    }
    Ok(count)
}

/// Reference Morse indices at bifurcating equilibria; `None` side for pitchforks,
/// whose two halves coincide up to symmetry.
pub const MORSE_TABLE: [(usize, GroupName, Option<Side>, usize); 10] = [
    (1, GroupName::O2m, None, 2),
    (2, GroupName::O2xZ2c, Some(Side::Below), 6),
    (2, GroupName::O2xZ2c, Some(Side::Above), 5),
    (3, GroupName::O2m, None, 12),
    (3, GroupName::Om, None, 10),
    (3, GroupName::D6d, None, 13),
    (4, GroupName::O2xZ2c, Some(Side::Below), 20),
    (4, GroupName::O2xZ2c, Some(Side::Above), 20),
    (4, GroupName::OxZ2c, Some(Side::Below), 21),
    (4, GroupName::OxZ2c, Some(Side::Above), 18),
];

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MorseRow {
    pub ell: usize,
    pub group: GroupName,
    pub side: Option<Side>,
    pub s: f64,
    pub lambda: f64,
    pub expected: usize,
    pub index: usize,
    pub n_zero: usize,
    pub orbit_dim: usize,
    /// Semilinear and quasilinear sign counts agree.
    pub equivalent: bool,
}

impl MorseRow {
    pub fn passes(&self) -> bool {
        self.index == self.expected && self.n_zero == self.orbit_dim
    }
}

/// Equilibrium at `|s|` on the requested side of `λ_ℓ` (either side for pitchforks).
pub fn table_equilibrium(ell: usize, group: GroupName, side: Option<Side>, s: f64, l_max: usize) -> Result<(f64, Equilibrium)> {
    let k = IsotropyDescriptor::new(group, ell, l_max)?;
    let lam0 = lambda_ell(ell);
    let mut p = branch_point_at(&k, s.abs(), 0.01)?;
    let side_of = |l: f64| if l < lam0 { Side::Below } else { Side::Above };
    if let Some(want) = side {
        if side_of(p.lambda) != want {
            p = branch_point_at(&k, -s.abs(), 0.01)?;
        }
        if side_of(p.lambda) != want {
            return Err(Error::InsufficientData(alloc::format!("no {want:?} equilibrium for {group} at degree {ell}")));
        }
    }
    let residual_norm = crate::equilibrium::equilibrium_residual(p.lambda, &p.v)?.norm();
    Ok((p.s, Equilibrium { lambda: p.lambda, v: p.v, group, residual_norm }))
}

/// Morse index of one reference row at `|s|`.
pub fn morse_row(row: (usize, GroupName, Option<Side>, usize), s: f64, l_max: usize, zero_tol: f64) -> Result<MorseRow> {
    let (ell, group, side, expected) = row;
    let (s, eq) = table_equilibrium(ell, group, side, s, l_max)?;
    let (index, n_zero) = morse_index(&eq, zero_tol)?;
    let equivalent = morse_equivalence_check(eq.lambda, &eq.v)?;
    Ok(MorseRow { ell, group, side, s, lambda: eq.lambda, expected, index, n_zero, orbit_dim: group.orbit_dim(), equivalent })
}

pub fn morse_table(s: f64, l_max: usize, zero_tol: f64) -> Result<Vec<MorseRow>> {
    MORSE_TABLE.iter().map(|row| morse_row(*row, s, l_max, zero_tol)).collect()
}
