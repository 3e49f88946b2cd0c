//! Collocation–Galerkin model on an orthonormal subspace spanned by
//! single-degree vectors: the full coefficient space or a fix space `Fix(K)`.
//!
//! With `G` the synthesis matrix of the basis and `W` the quadrature weights,
//! the projected residual is `Λy + λ Gᵀ W f(Gy)` and its Jacobian
//! `Λ + λ Gᵀ diag(W f′) G` is symmetric.

use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::nonlinearity::{f, f_antiderivative, f_prime};
use crate::spectral::{check_floor, n_coeffs, QuadratureGrid, SpectralField};
use crate::symmetry::Projector;
use crate::Result;

#[derive(Clone, Debug)]
pub struct Galerkin {
    l_max: usize,
    grid: QuadratureGrid,
    basis: Vec<SpectralField>,
    degrees: Vec<usize>,
    synth: DMatrix<f64>,
    weighted: DMatrix<f64>,
}

impl Galerkin {
    /// Basis vectors must be orthonormal and each confined to a single degree.
    pub fn from_basis(l_max: usize, basis: Vec<(usize, SpectralField)>) -> Self {
        let grid = QuadratureGrid::new(l_max);
        let np = grid.n_points();
        let k = basis.len();
        let mut synth = DMatrix::<f64>::zeros(np, k);
        for (j, (_, b)) in basis.iter().enumerate() {
            let vals = grid.synthesize(b).expect("basis within cutoff");
            synth.column_mut(j).copy_from_slice(vals.values());
        }
        let mut weighted = synth.clone();
        for (i, w) in grid.weights().iter().enumerate() {
            weighted.row_mut(i).scale_mut(*w);
        }
        let (degrees, basis) = basis.into_iter().unzip();
        Self { l_max, grid, basis, degrees, synth, weighted }
    }

    /// All coefficients up to `l_max`.
    pub fn full(l_max: usize) -> Self {
        let basis = (0..n_coeffs(l_max))
            .map(|i| {
                let (l, m) = crate::spectral::degree_order(i);
                (l, SpectralField::basis(l_max, l, m))
            })
            .collect();
        Self::from_basis(l_max, basis)
    }

    /// Fix space of a projector.
    pub fn fix(projector: &Projector, l_max: usize) -> Self {
        Self::from_basis(l_max, projector.fix_basis(l_max))
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }
    pub fn basis(&self) -> &[SpectralField] {
        &self.basis
    }
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }
    pub fn synthesis(&self) -> &DMatrix<f64> {
        &self.synth
    }

    /// Diagonal of the Laplacian in this basis.
    pub fn laplacian(&self) -> Vec<f64> {
        self.degrees.iter().map(|l| -((l * (l + 1)) as f64)).collect()
    }

    pub fn to_field(&self, y: &[f64]) -> SpectralField {
        let mut u = SpectralField::zeros(self.l_max);
        for (c, b) in y.iter().zip(&self.basis) {
            if *c != 0.0 {
                u.axpy(*c, b);
            }
        }
        u
    }

    /// Orthogonal projection of `u` onto the subspace, as reduced coordinates.
    pub fn from_field(&self, u: &SpectralField) -> Vec<f64> {
        let u = if u.l_max() == self.l_max { u.clone() } else { u.resized(self.l_max) };
        self.basis.iter().map(|b| b.dot(&u)).collect()
    }

    pub fn grid_values(&self, y: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.synth.nrows()];
        for (j, c) in y.iter().enumerate() {
            if *c != 0.0 {
                for (o, s) in out.iter_mut().zip(self.synth.column(j).iter()) {
                    *o += c * s;
                }
            }
        }
        out
    }

    /// Quadrature projection `Gᵀ W h` of grid values.
    pub fn project(&self, h: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|j| self.weighted.column(j).iter().zip(h).map(|(a, b)| a * b).sum()).collect()
    }

    /// Grid values of `v`, failing if `1 + v` drops below the floor.
    pub fn checked_values(&self, y: &[f64]) -> Result<Vec<f64>> {
        let v = self.grid_values(y);
        check_floor(&self.grid.wrap(v.clone())?)?;
        Ok(v)
    }

    /// `Λy + λ Gᵀ W f(Gy)`.
    pub fn residual(&self, lambda: f64, y: &[f64]) -> Result<Vec<f64>> {
        let v = self.checked_values(y)?;
        Ok(self.residual_from_values(lambda, y, &v))
    }

    pub(crate) fn residual_from_values(&self, lambda: f64, y: &[f64], v: &[f64]) -> Vec<f64> {
        let fv: Vec<f64> = v.iter().map(|x| f(*x)).collect();
        let p = self.project(&fv);
        self.degrees.iter().zip(y).zip(p).map(|((l, yi), pi)| -((l * (l + 1)) as f64) * yi + lambda * pi).collect()
    }

    /// `Gᵀ diag(W·w) G` for pointwise weights `w`.
    pub fn weighted_gram(&self, w: &[f64]) -> DMatrix<f64> {
        let mut scaled = self.weighted.clone();
        for (i, wi) in w.iter().enumerate() {
            scaled.row_mut(i).scale_mut(*wi);
        }
        let mut g = self.synth.tr_mul(&scaled);
        crate::linalg::symmetrize(&mut g);
        g
    }

    /// Symmetric Jacobian of [`Galerkin::residual`] in `y`.
    pub fn jacobian(&self, lambda: f64, y: &[f64]) -> Result<DMatrix<f64>> {
        let v = self.checked_values(y)?;
        Ok(self.jacobian_from_values(lambda, &v))
    }

    pub(crate) fn jacobian_from_values(&self, lambda: f64, v: &[f64]) -> DMatrix<f64> {
        let w: Vec<f64> = v.iter().map(|x| lambda * f_prime(*x)).collect();
        let mut j = self.weighted_gram(&w);
        for (i, l) in self.degrees.iter().enumerate() {
            j[(i, i)] -= (l * (l + 1)) as f64;
        }
        j
    }

    /// `½ Σ ℓ(ℓ+1) y² − λ Σ W F(v)`.
    pub fn energy(&self, lambda: f64, y: &[f64]) -> Result<f64> {
        let v = self.checked_values(y)?;
        Ok(self.energy_from_values(lambda, y, &v))
    }

    pub(crate) fn energy_from_values(&self, lambda: f64, y: &[f64], v: &[f64]) -> f64 {
        let grad: f64 = self.degrees.iter().zip(y).map(|(l, c)| 0.5 * (l * (l + 1)) as f64 * c * c).sum();
        let pot: f64 = v.iter().zip(self.grid.weights()).map(|(x, w)| w * f_antiderivative(*x)).sum();
        grad - lambda * pot
    }
}
