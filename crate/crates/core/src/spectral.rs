//! Real orthonormal spherical harmonics on a Gauss–Legendre × uniform grid.
//!
//! Basis convention (no Condon–Shortley phase):
//! `m > 0` is `√2 N P_ℓ^m(cos θ) cos mφ`, `m < 0` is `√2 N P_ℓ^|m| sin |m|φ`,
//! `m = 0` is `N P_ℓ`. Coefficient `(ℓ, m)` lives at index `ℓ² + ℓ + m`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

use crate::{Error, Result};

/// Floor for `1 + v` in every rational pointwise map.
pub const DELTA_MIN: f64 = 0.05;

pub fn n_coeffs(l_max: usize) -> usize {
    (l_max + 1) * (l_max + 1)
}

pub fn index(l: usize, m: i64) -> usize {
    debug_assert!(m.unsigned_abs() as usize <= l);
    ((l * l + l) as i64 + m) as usize
}

/// Inverse of [`index`].
pub fn degree_order(idx: usize) -> (usize, i64) {
    let l = (idx as f64).sqrt() as usize;
    let l = if (l + 1) * (l + 1) <= idx { l + 1 } else { l };
    (l, idx as i64 - (l * l + l) as i64)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectralField {
    l_max: usize,
    coeffs: Vec<f64>,
}

impl SpectralField {
    pub fn zeros(l_max: usize) -> Self {
        Self { l_max, coeffs: vec![0.0; n_coeffs(l_max)] }
    }

    pub fn from_coeffs(l_max: usize, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != n_coeffs(l_max) {
            return Err(Error::ShapeMismatch { got: coeffs.len(), expected: n_coeffs(l_max) });
        }
        Ok(Self { l_max, coeffs })
    }

    /// The single basis function `Y_{ℓm}`.
    pub fn basis(l_max: usize, l: usize, m: i64) -> Self {
        let mut u = Self::zeros(l_max);
        u.set(l, m, 1.0);
        u
    }

    /// Constant function with value `c`.
    pub fn constant(l_max: usize, c: f64) -> Self {
        let mut u = Self::zeros(l_max);
        u.coeffs[0] = c * 2.0 * PI.sqrt();
        u
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn get(&self, l: usize, m: i64) -> f64 {
        if l > self.l_max {
            0.0
        } else {
            self.coeffs[index(l, m)]
        }
    }

    pub fn set(&mut self, l: usize, m: i64, value: f64) {
        self.coeffs[index(l, m)] = value;
    }

    /// Coefficients of degree `l` ordered `m = −l..=l`.
    pub fn block(&self, l: usize) -> &[f64] {
        &self.coeffs[l * l..(l + 1) * (l + 1)]
    }

    pub fn block_mut(&mut self, l: usize) -> &mut [f64] {
        &mut self.coeffs[l * l..(l + 1) * (l + 1)]
    }

    /// Zero-pad or truncate to a new cutoff.
    pub fn resized(&self, l_max: usize) -> Self {
        let mut out = Self::zeros(l_max);
        let n = n_coeffs(l_max.min(self.l_max));
        out.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        out
    }

    /// Highest degree carrying a nonzero coefficient.
    pub fn effective_degree(&self) -> usize {
        self.coeffs.iter().rposition(|c| *c != 0.0).map_or(0, |i| degree_order(i).0)
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { l_max: self.l_max, coeffs: self.coeffs.iter().map(|c| a * c).collect() }
    }

    /// `self += a·x`; cutoffs must agree.
    pub fn axpy(&mut self, a: f64, x: &Self) {
        assert_eq!(self.l_max, x.l_max, "cutoff mismatch");
        for (s, xi) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *s += a * xi;
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    /// L² norm of each degree block.
    pub fn degree_norms(&self) -> Vec<f64> {
        (0..=self.l_max).map(|l| self.block(l).iter().map(|c| c * c).sum::<f64>().sqrt()).collect()
    }
}

/// Multiply coefficient `(ℓ, m)` by `−ℓ(ℓ+1)`.
pub fn laplacian_apply(u: &SpectralField) -> SpectralField {
    let mut out = u.clone();
    for l in 0..=u.l_max {
        let k = -((l * (l + 1)) as f64);
        out.block_mut(l).iter_mut().for_each(|c| *c *= k);
    }
    out
}

/// `(P_n(z), P_n'(z))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

/// Gauss–Legendre nodes and weights on [−1, 1], nodes descending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, z);
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Orthonormal associated Legendre values `N_ℓm P_ℓ^m(x)` (no phase) for `0 ≤ m ≤ ℓ ≤ l_max`,
/// indexed by `ℓ(ℓ+1)/2 + m`.
pub fn normalized_legendre(l_max: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; tri(l_max, l_max) + 1];
    let s = (1.0 - x * x).max(0.0).sqrt();
    p[0] = 0.5 / PI.sqrt();
    for m in 1..=l_max {
        let mf = m as f64;
        p[tri(m, m)] = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s * p[tri(m - 1, m - 1)];
    }
    for m in 0..l_max {
        p[tri(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * x * p[tri(m, m)];
    }
    for m in 0..=l_max {
        let mf = m as f64;
        for l in (m + 2)..=l_max {
            let lf = l as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            p[tri(l, m)] = a * (x * p[tri(l - 1, m)] - b * p[tri(l - 2, m)]);
        }
    }
    p
}

/// Value of the real basis function `Y_{ℓm}` at `(θ, φ)`.
pub fn real_ylm(l: usize, m: i64, theta: f64, phi: f64) -> f64 {
    let p = normalized_legendre(l, theta.cos());
    let ma = m.unsigned_abs() as usize;
    let v = p[tri(l, ma)];
    match m {
        0 => v,
        m if m > 0 => core::f64::consts::SQRT_2 * v * (m as f64 * phi).cos(),
        m => core::f64::consts::SQRT_2 * v * ((-m) as f64 * phi).sin(),
    }
}

/// Collocation grid with precomputed Legendre and trigonometric tables.
#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    l_max: usize,
    n_theta: usize,
    n_phi: usize,
    cos_theta: Vec<f64>,
    theta: Vec<f64>,
    phi: Vec<f64>,
    theta_weights: Vec<f64>,
    weights: Vec<f64>,
    legendre: Vec<f64>,
    cos_mphi: Vec<f64>,
    sin_mphi: Vec<f64>,
}

/// Grid with `n_theta = 2(l_max+1)`, `n_phi = 4(l_max+1)`.
pub fn build_grid(l_max: usize) -> QuadratureGrid {
    QuadratureGrid::new(l_max)
}

impl QuadratureGrid {
    pub fn new(l_max: usize) -> Self {
        let n_theta = 2 * (l_max + 1);
        let n_phi = 4 * (l_max + 1);
        let (x, w) = gauss_legendre(n_theta);
        let theta: Vec<f64> = x.iter().map(|c| c.acos()).collect();
        let phi: Vec<f64> = (0..n_phi).map(|j| 2.0 * PI * j as f64 / n_phi as f64).collect();
        let dphi = 2.0 * PI / n_phi as f64;
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for wi in &w {
            weights.extend(core::iter::repeat(wi * dphi).take(n_phi));
        }
        let nh = tri(l_max, l_max) + 1;
        let mut legendre = Vec::with_capacity(n_theta * nh);
        for xi in &x {
            legendre.extend(normalized_legendre(l_max, *xi));
        }
        let mut cos_mphi = Vec::with_capacity(n_phi * (l_max + 1));
        let mut sin_mphi = Vec::with_capacity(n_phi * (l_max + 1));
        for p in &phi {
            for m in 0..=l_max {
                cos_mphi.push((m as f64 * p).cos());
                sin_mphi.push((m as f64 * p).sin());
            }
        }
        Self { l_max, n_theta, n_phi, cos_theta: x, theta, phi, theta_weights: w, weights, legendre, cos_mphi, sin_mphi }
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }
    pub fn n_theta(&self) -> usize {
        self.n_theta
    }
    pub fn n_phi(&self) -> usize {
        self.n_phi
    }
    pub fn n_points(&self) -> usize {
        self.n_theta * self.n_phi
    }
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }
    pub fn cos_theta(&self) -> &[f64] {
        &self.cos_theta
    }
    pub fn phi(&self) -> &[f64] {
        &self.phi
    }
    pub fn theta_weights(&self) -> &[f64] {
        &self.theta_weights
    }
    /// Area weights, row-major over `(θ_i, φ_j)`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(θ, φ)` of flat point index `p`.
    pub fn point(&self, p: usize) -> (f64, f64) {
        (self.theta[p / self.n_phi], self.phi[p % self.n_phi])
    }

    pub fn integrate(&self, f: &GridField) -> f64 {
        f.values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    pub fn zeros(&self) -> GridField {
        GridField { n_theta: self.n_theta, n_phi: self.n_phi, values: vec![0.0; self.n_points()] }
    }

    pub fn field_from_fn(&self, mut f: impl FnMut(f64, f64) -> f64) -> GridField {
        let values = (0..self.n_points()).map(|p| {
            let (t, ph) = self.point(p);
            f(t, ph)
        });
        GridField { n_theta: self.n_theta, n_phi: self.n_phi, values: values.collect() }
    }

    pub fn wrap(&self, values: Vec<f64>) -> Result<GridField> {
        if values.len() != self.n_points() {
            return Err(Error::ShapeMismatch { got: values.len(), expected: self.n_points() });
        }
        Ok(GridField { n_theta: self.n_theta, n_phi: self.n_phi, values })
    }

    fn check(&self, f: &GridField) -> Result<()> {
        if f.n_theta != self.n_theta || f.n_phi != self.n_phi {
            return Err(Error::ShapeMismatch { got: f.values.len(), expected: self.n_points() });
        }
        Ok(())
    }

    /// Pointwise values of `u` on the grid.
    pub fn synthesize(&self, u: &SpectralField) -> Result<GridField> {
        if u.l_max() > self.l_max {
            return Err(Error::ResolutionMismatch { grid: self.l_max, needed: u.l_max() });
        }
        let lm = u.l_max();
        let nh = tri(self.l_max, self.l_max) + 1;
        let np = self.l_max + 1;
        let sq2 = core::f64::consts::SQRT_2;
        let mut values = vec![0.0; self.n_points()];
        let mut a = vec![0.0; lm + 1];
        let mut b = vec![0.0; lm + 1];
        for i in 0..self.n_theta {
            let leg = &self.legendre[i * nh..(i + 1) * nh];
            for m in 0..=lm {
                let (mut sa, mut sb) = (0.0, 0.0);
                for l in m..=lm {
                    let p = leg[tri(l, m)];
                    sa += p * u.coeffs[index(l, m as i64)];
                    if m > 0 {
                        sb += p * u.coeffs[index(l, -(m as i64))];
                    }
                }
                a[m] = if m == 0 { sa } else { sq2 * sa };
                b[m] = sq2 * sb;
            }
            let row = &mut values[i * self.n_phi..(i + 1) * self.n_phi];
            for (j, out) in row.iter_mut().enumerate() {
                let c = &self.cos_mphi[j * np..j * np + lm + 1];
                let s = &self.sin_mphi[j * np..j * np + lm + 1];
                let mut acc = a[0];
                for m in 1..=lm {
                    acc += a[m] * c[m] + b[m] * s[m];
                }
                *out = acc;
            }
        }
        Ok(GridField { n_theta: self.n_theta, n_phi: self.n_phi, values })
    }

    /// Quadrature projection onto the basis up to degree `l_max`.
    pub fn analyze(&self, f: &GridField, l_max: usize) -> Result<SpectralField> {
        self.check(f)?;
        if l_max > self.l_max {
            return Err(Error::ResolutionMismatch { grid: self.l_max, needed: l_max });
        }
        let nh = tri(self.l_max, self.l_max) + 1;
        let np = self.l_max + 1;
        let sq2 = core::f64::consts::SQRT_2;
        let dphi = 2.0 * PI / self.n_phi as f64;
        let mut out = SpectralField::zeros(l_max);
        let mut a = vec![0.0; l_max + 1];
        let mut b = vec![0.0; l_max + 1];
        for i in 0..self.n_theta {
            a.iter_mut().for_each(|x| *x = 0.0);
            b.iter_mut().for_each(|x| *x = 0.0);
            let row = &f.values[i * self.n_phi..(i + 1) * self.n_phi];
            for (j, fv) in row.iter().enumerate() {
                let c = &self.cos_mphi[j * np..j * np + l_max + 1];
                let s = &self.sin_mphi[j * np..j * np + l_max + 1];
                for m in 0..=l_max {
                    a[m] += fv * c[m];
                    b[m] += fv * s[m];
                }
            }
            let w = self.theta_weights[i] * dphi;
            let leg = &self.legendre[i * nh..(i + 1) * nh];
            for m in 0..=l_max {
                let (fa, fb) = if m == 0 { (w * a[0], 0.0) } else { (w * sq2 * a[m], w * sq2 * b[m]) };
                for l in m..=l_max {
                    let p = leg[tri(l, m)];
                    out.coeffs[index(l, m as i64)] += p * fa;
                    if m > 0 {
                        out.coeffs[index(l, -(m as i64))] += p * fb;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Free-function form of [`QuadratureGrid::synthesize`].
pub fn synthesize(u: &SpectralField, grid: &QuadratureGrid) -> Result<GridField> {
    grid.synthesize(u)
}

/// Free-function form of [`QuadratureGrid::analyze`].
pub fn analyze(f: &GridField, grid: &QuadratureGrid, l_max: usize) -> Result<SpectralField> {
    grid.analyze(f, l_max)
}

/// Pointwise values on a [`QuadratureGrid`], row-major over `(θ_i, φ_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    n_theta: usize,
    n_phi: usize,
    values: Vec<f64>,
}

impl GridField {
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn shape(&self) -> (usize, usize) {
        (self.n_theta, self.n_phi)
    }
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridField {
        GridField { n_theta: self.n_theta, n_phi: self.n_phi, values: self.values.iter().map(|v| f(*v)).collect() }
    }

    pub fn zip_map(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> GridField {
        assert_eq!(self.values.len(), other.values.len());
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect();
        GridField { n_theta: self.n_theta, n_phi: self.n_phi, values }
    }
}

/// Scalar map with an optional domain restriction on its argument.
pub trait PointwiseMap {
    fn apply(&self, x: f64) -> f64;
    /// Whether `x` is admissible; defaults to finiteness.
    fn admits(&self, x: f64) -> bool {
        x.is_finite()
    }
}

impl<F: Fn(f64) -> f64> PointwiseMap for F {
    fn apply(&self, x: f64) -> f64 {
        self(x)
    }
}

/// Restricts a map to arguments with `1 + x ≥ floor`.
pub struct Floored<F> {
    pub map: F,
    pub floor: f64,
}

impl<F: Fn(f64) -> f64> PointwiseMap for Floored<F> {
    fn apply(&self, x: f64) -> f64 {
        (self.map)(x)
    }
    fn admits(&self, x: f64) -> bool {
        x.is_finite() && 1.0 + x >= self.floor
    }
}

/// Apply `phi` at every grid value; `DomainViolation` reports the offending `1 + x`.
pub fn pointwise_map(f: &GridField, phi: &impl PointwiseMap) -> Result<GridField> {
    let mut values = Vec::with_capacity(f.values.len());
    for &x in &f.values {
        let y = phi.apply(x);
        if !phi.admits(x) || !y.is_finite() {
            return Err(Error::DomainViolation { min: 1.0 + f.min(), floor: DELTA_MIN });
        }
        values.push(y);
    }
    Ok(GridField { n_theta: f.n_theta, n_phi: f.n_phi, values })
}

/// Fail with `DomainViolation` unless `1 + v ≥ DELTA_MIN` everywhere.
pub fn check_floor(v: &GridField) -> Result<()> {
    let m = 1.0 + v.min();
    if !(m >= DELTA_MIN) {
        return Err(Error::DomainViolation { min: m, floor: DELTA_MIN });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip() {
        for idx in 0..n_coeffs(20) {
            let (l, m) = degree_order(idx);
            assert_eq!(index(l, m), idx);
        }
    }

    #[test]
    fn smallest_grid() {
        let g = build_grid(0);
        assert_eq!((g.n_theta(), g.n_phi()), (2, 4));
        let total: f64 = g.weights().iter().sum();
        assert!((total - 4.0 * PI).abs() < 1e-12 * 4.0 * PI);
        let g = build_grid(16);
        assert_eq!((g.n_theta(), g.n_phi()), (34, 68));
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        for k in 0..14 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((q - exact).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn constant_and_dipole() {
        let g = build_grid(4);
        let f = g.synthesize(&SpectralField::basis(4, 0, 0)).unwrap();
        for v in f.values() {
            assert!((v - 0.5 / PI.sqrt()).abs() < 1e-15);
        }
        let f = g.synthesize(&SpectralField::basis(4, 1, 0)).unwrap();
        let c = (3.0 / (4.0 * PI)).sqrt();
        for (p, v) in f.values().iter().enumerate() {
            let (t, _) = g.point(p);
            assert!((v - c * t.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn ones_analyze_to_constant_mode() {
        let g = build_grid(6);
        let one = g.field_from_fn(|_, _| 1.0);
        let c = g.analyze(&one, 6).unwrap();
        assert!((c.coeffs()[0] - 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!(c.coeffs()[1..].iter().all(|x| x.abs() < 1e-13));
    }

    #[test]
    fn real_basis_matches_closed_forms() {
        let (t, p) = (0.7_f64, 1.3_f64);
        let y32 = (105.0 / (16.0 * PI)).sqrt() * t.sin().powi(2) * t.cos() * (2.0 * p).cos();
        assert!((real_ylm(3, 2, t, p) - y32).abs() < 1e-14);
        let y1m1 = (3.0 / (4.0 * PI)).sqrt() * t.sin() * p.sin();
        assert!((real_ylm(1, -1, t, p) - y1m1).abs() < 1e-14);
    }

    #[test]
    fn resolution_mismatch() {
        let g = build_grid(3);
        assert!(matches!(g.synthesize(&SpectralField::zeros(4)), Err(Error::ResolutionMismatch { .. })));
        assert!(g.analyze(&g.zeros(), 4).is_err());
    }

    #[test]
    fn laplacian_eigenvalues() {
        let u = SpectralField::basis(5, 3, 2);
        assert_eq!(laplacian_apply(&u).get(3, 2), -12.0);
        assert_eq!(laplacian_apply(&SpectralField::basis(5, 0, 0)).norm(), 0.0);
    }

    #[test]
    fn pointwise_domains() {
        let g = build_grid(2);
        let three = g.field_from_fn(|_, _| 3.0);
        let sq = pointwise_map(&three, &|x: f64| x * x).unwrap();
        assert!(sq.values().iter().all(|v| *v == 9.0));
        let same = pointwise_map(&three, &|x: f64| x).unwrap();
        assert_eq!(same, three);
        let m1 = g.field_from_fn(|_, _| -1.0);
        let f = Floored { map: |x: f64| x - x * x / (2.0 * (1.0 + x)), floor: DELTA_MIN };
        assert!(matches!(pointwise_map(&m1, &f), Err(Error::DomainViolation { .. })));
    }
}
