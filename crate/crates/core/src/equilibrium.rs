//! Equilibria of the rescaled flow, `Δv + λ f(v) = 0`, solved by Newton's
//! method inside a fix space, and continuation of symmetry-breaking branches
//! in the parameter `s = ⟨e_K, v⟩`.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::DMatrix;
use num_traits::Float;

use crate::galerkin::Galerkin;
use crate::linalg::{least_squares, norm, solve};
use crate::nonlinearity::f;
use crate::spectral::{check_floor, laplacian_apply, QuadratureGrid, SpectralField};
use crate::symmetry::{GroupName, IsotropyDescriptor};
use crate::{lambda_ell, Error, Result};

pub const DEFAULT_NEWTON_TOL: f64 = 1e-12;
pub const MAX_NEWTON_ITERATIONS: usize = 50;

/// Coefficients of `Δv + λ f(v)`, with `f(v)` evaluated on the grid.
pub fn equilibrium_residual(lambda: f64, v: &SpectralField) -> Result<SpectralField> {
    let grid = QuadratureGrid::new(v.l_max());
    residual_on(&grid, lambda, v)
}

pub(crate) fn residual_on(grid: &QuadratureGrid, lambda: f64, v: &SpectralField) -> Result<SpectralField> {
    let g = grid.synthesize(v)?;
    check_floor(&g)?;
    let fv = grid.analyze(&g.map(f), v.l_max())?;
    let mut r = laplacian_apply(v);
    r.axpy(lambda, &fv);
    Ok(r)
}

/// `v + (Δ−1)⁻¹(v + λ f(v))`, the compact-perturbation form with the same zeros.
pub fn compact_form(lambda: f64, v: &SpectralField) -> Result<SpectralField> {
    let grid = QuadratureGrid::new(v.l_max());
    let g = grid.synthesize(v)?;
    check_floor(&g)?;
    let mut rhs = grid.analyze(&g.map(f), v.l_max())?.scaled(lambda);
    rhs.axpy(1.0, v);
    let mut out = v.clone();
    for l in 0..=v.l_max() {
        let k = -1.0 / (1.0 + lambda_ell(l));
        for (o, r) in out.block_mut(l).iter_mut().zip(rhs.block(l)) {
            *o += k * r;
        }
    }
    Ok(out)
}

/// Scalar `1/(1+ℓ(ℓ+1))` with `∂_λ L(λ) e = that · e` for `e ∈ V_ℓ`.
pub fn transversality_value(ell: usize) -> f64 {
    1.0 / (1.0 + lambda_ell(ell))
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Equilibrium {
    pub lambda: f64,
    pub v: SpectralField,
    pub group: GroupName,
    pub residual_norm: f64,
}

/// Newton iteration confined to `Fix(K)`.
pub fn newton_solve(lambda: f64, v0: &SpectralField, k: &IsotropyDescriptor, tol: f64) -> Result<Equilibrium> {
    let model = Galerkin::fix(k.projector(), v0.l_max());
    let y = newton_reduced(&model, lambda, model.from_field(v0), tol)?;
    let v = model.to_field(&y);
    let residual_norm = equilibrium_residual(lambda, &v)?.norm();
    Ok(Equilibrium { lambda, v, group: k.name(), residual_norm })
}

/// Newton on a Galerkin model at fixed `λ`; returns the reduced solution.
pub fn newton_reduced(model: &Galerkin, lambda: f64, mut y: Vec<f64>, tol: f64) -> Result<Vec<f64>> {
    let mut r = model.residual(lambda, &y)?;
    for _ in 0..MAX_NEWTON_ITERATIONS {
        if norm(&r) <= tol {
            return Ok(y);
        }
        let j = model.jacobian(lambda, &y)?;
        let dy = solve(j, &r)?;
        y.iter_mut().zip(&dy).for_each(|(a, b)| *a -= b);
        r = model.residual(lambda, &y)?;
    }
    if norm(&r) <= tol {
        return Ok(y);
    }
    Err(Error::NoConvergence { iterations: MAX_NEWTON_ITERATIONS, residual: norm(&r) })
}

/// Newton on the bordered system `{F(y, λ) = 0, ⟨ê, y⟩ = s}`.
fn newton_bordered(model: &Galerkin, e: &[f64], s: f64, mut y: Vec<f64>, mut lambda: f64, tol: f64) -> Result<(Vec<f64>, f64)> {
    let k = model.dim();
    for it in 0..=MAX_NEWTON_ITERATIONS {
        let v = model.checked_values(&y)?;
        let r = model.residual_from_values(lambda, &y, &v);
        let c = e.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() - s;
        let rn = (norm(&r).powi(2) + c * c).sqrt();
        if rn <= tol {
            return Ok((y, lambda));
        }
        if it == MAX_NEWTON_ITERATIONS {
            return Err(Error::NoConvergence { iterations: it, residual: rn });
        }
        let j = model.jacobian_from_values(lambda, &v);
        let fl = model.project(&v.iter().map(|x| f(*x)).collect::<Vec<_>>());
        let mut a = DMatrix::<f64>::zeros(k + 1, k + 1);
        a.view_mut((0, 0), (k, k)).copy_from(&j);
        for i in 0..k {
            a[(i, k)] = fl[i];
            a[(k, i)] = e[i];
        }
        let mut rhs = r.clone();
        rhs.push(c);
        let d = solve(a, &rhs)?;
        y.iter_mut().zip(&d).for_each(|(a, b)| *a -= b);
        lambda -= d[k];
    }
    unreachable!()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BranchKind {
    Transcritical,
    Pitchfork,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BranchPoint {
    pub s: f64,
    pub lambda: f64,
    pub v: SpectralField,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Branch {
    pub group: GroupName,
    pub ell: usize,
    /// Ordered by `s`.
    pub points: Vec<BranchPoint>,
    pub kind: Option<BranchKind>,
    /// Least-squares `λ′(0)` and `λ″(0)` over `|s| ≤ FIT_WINDOW`.
    pub lambda_prime_fit: f64,
    pub lambda_second_fit: f64,
    /// Parameter values at which continuation stopped early.
    pub stopped_at: Vec<f64>,
}

/// Half-width of the window in `s` used for the quadratic fit.
pub const FIT_WINDOW: f64 = 0.1;

#[derive(Clone, Copy, Debug)]
pub struct ContinuationOptions {
    pub s_max: f64,
    pub ds: f64,
    pub tol: f64,
    /// Continue towards negative `s` as well.
    pub two_sided: bool,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self { s_max: 0.2, ds: 0.01, tol: DEFAULT_NEWTON_TOL, two_sided: true }
    }
}

/// Continuation in `Fix(K)` from the bifurcation point `(λ_ℓ, 0)`.
pub fn continue_branch(k: &IsotropyDescriptor, opts: &ContinuationOptions) -> Branch {
    let model = Galerkin::fix(k.projector(), k.l_max());
    continue_in(&model, k, opts)
}

pub(crate) fn continue_in(model: &Galerkin, k: &IsotropyDescriptor, opts: &ContinuationOptions) -> Branch {
    let e = model.from_field(&k.generator);
    let lam0 = lambda_ell(k.ell);
    let origin = BranchPoint { s: 0.0, lambda: lam0, v: SpectralField::zeros(model.l_max()) };
    let mut points = vec![origin];
    let mut stopped_at = Vec::new();
    let n_steps = (opts.s_max / opts.ds + 1e-9).floor() as usize;
    let directions: &[f64] = if opts.two_sided { &[1.0, -1.0] } else { &[1.0] };
    for &dir in directions {
        let mut prev: (f64, Vec<f64>, f64) = (0.0, vec![0.0; model.dim()], lam0);
        let mut last: Option<(f64, Vec<f64>, f64)> = None;
        let mut side = Vec::new();
        for step in 1..=n_steps {
            let s = dir * step as f64 * opts.ds;
            let (y0, l0) = match &last {
                None => (e.iter().map(|x| x * s).collect::<Vec<_>>(), lam0),
                Some((s1, y1, l1)) => {
                    let t = (s - s1) / (s1 - prev.0);
                    let y = y1.iter().zip(&prev.1).map(|(a, b)| a + t * (a - b)).collect();
                    (y, l1 + t * (l1 - prev.2))
                }
            };
            match newton_bordered(model, &e, s, y0, l0, opts.tol) {
                Ok((y, lambda)) => {
                    side.push(BranchPoint { s, lambda, v: model.to_field(&y) });
                    if let Some(l) = last.take() {
                        prev = l;
                    }
                    last = Some((s, y, lambda));
                }
                Err(_) => {
                    stopped_at.push(s);
                    break;
                }
            }
        }
        points.extend(side);
    }
    points.sort_by(|a, b| a.s.total_cmp(&b.s));
    let (a, b) = fit_quadratic(&points, lam0, FIT_WINDOW);
    let kind = if k.ell % 2 == 1 || a.abs() < 1e-8 { BranchKind::Pitchfork } else { BranchKind::Transcritical };
    Branch { group: k.name(), ell: k.ell, points, kind: Some(kind), lambda_prime_fit: a, lambda_second_fit: 2.0 * b, stopped_at }
}

/// Least squares `λ − λ₀ ≈ a s + b s²` over `|s| ≤ window`.
pub fn fit_quadratic(points: &[BranchPoint], lam0: f64, window: f64) -> (f64, f64) {
    let sel: Vec<&BranchPoint> = points.iter().filter(|p| p.s.abs() <= window + 1e-12).collect();
    if sel.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    let a = DMatrix::from_fn(sel.len(), 2, |i, j| sel[i].s.powi(j as i32 + 1));
    let rhs: Vec<f64> = sel.iter().map(|p| p.lambda - lam0).collect();
    let (x, _) = least_squares(a, &rhs);
    (x[0], x[1])
}

/// Point on the branch with parameter `s`, by bordered Newton from the nearest stored point.
pub fn branch_point_at(k: &IsotropyDescriptor, s: f64, ds: f64) -> Result<BranchPoint> {
    let model = Galerkin::fix(k.projector(), k.l_max());
    let opts = ContinuationOptions { s_max: s.abs(), ds: ds.min(s.abs()), tol: DEFAULT_NEWTON_TOL, two_sided: false };
    let sign = s.signum();
    let e = model.from_field(&k.generator);
    let branch = continue_in(&model, &oriented(k, sign), &opts);
    let last = branch.points.last().ok_or(Error::NoConvergence { iterations: 0, residual: f64::NAN })?;
    if !branch.stopped_at.is_empty() {
        return Err(Error::NoConvergence { iterations: MAX_NEWTON_ITERATIONS, residual: f64::NAN });
    }
    let y0 = model.from_field(&last.v);
    let (y, lambda) = newton_bordered(&model, &e, s, y0, last.lambda, DEFAULT_NEWTON_TOL)?;
    Ok(BranchPoint { s, lambda, v: model.to_field(&y) })
}

/// Descriptor whose generator is multiplied by `sign`.
fn oriented(k: &IsotropyDescriptor, sign: f64) -> IsotropyDescriptor {
    let mut k2 = k.clone();
    if sign < 0.0 {
        k2.generator = k.generator.scaled(-1.0);
    }
    k2
}

/// Equilibrium on the branch at parameter value `lambda`, on the side `sign(s)`.
///
/// Steps along the branch until `λ(s)` brackets `lambda`, then solves at fixed `λ`
/// from the interpolated guess.
pub fn branch_equilibrium_at_lambda(k: &IsotropyDescriptor, lambda: f64, sign: f64, ds: f64, s_limit: f64) -> Result<Equilibrium> {
    let model = Galerkin::fix(k.projector(), k.l_max());
    let e = model.from_field(&k.generator);
    let lam0 = lambda_ell(k.ell);
    let mut path: Vec<(f64, Vec<f64>, f64)> = vec![(0.0, vec![0.0; model.dim()], lam0)];
    let n = (s_limit / ds).ceil() as usize;
    for step in 1..=n {
        let s = sign * step as f64 * ds;
        let (y0, l0) = match path.len() {
            1 => (e.iter().map(|x| x * s).collect::<Vec<_>>(), lam0),
            len => {
                let (s1, y1, l1) = &path[len - 1];
                let (s0, y0, l0) = &path[len - 2];
                let t = (s - s1) / (s1 - s0);
                (y1.iter().zip(y0).map(|(a, b)| a + t * (a - b)).collect(), l1 + t * (l1 - l0))
            }
        };
        let (y, l) = newton_bordered(&model, &e, s, y0, l0, DEFAULT_NEWTON_TOL)?;
        let (_, yb, lb) = path.last().unwrap();
        if (l - lambda) * (lb - lambda) <= 0.0 && l != *lb {
            let t = (lambda - lb) / (l - lb);
            let guess: Vec<f64> = yb.iter().zip(&y).map(|(a, b)| a + t * (b - a)).collect();
            let ys = newton_reduced(&model, lambda, guess, DEFAULT_NEWTON_TOL)?;
            let v = model.to_field(&ys);
            let residual_norm = equilibrium_residual(lambda, &v)?.norm();
            return Ok(Equilibrium { lambda, v, group: k.name(), residual_norm });
        }
        path.push((s, y, l));
    }
    Err(Error::NoConvergence { iterations: n, residual: f64::NAN })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::{isotropy_residual, wigner_d_rotate};
    use core::f64::consts::PI;

    #[test]
    fn residual_examples() {
        let z = SpectralField::zeros(6);
        assert_eq!(equilibrium_residual(3.0, &z).unwrap().norm(), 0.0);
        let c = 0.3;
        let r = equilibrium_residual(2.5, &SpectralField::constant(6, c)).unwrap();
        assert!((r.get(0, 0) - 2.5 * f(c) * 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!(r.coeffs()[1..].iter().all(|x| x.abs() < 1e-13));
        let r = |eps: f64| equilibrium_residual(6.0, &SpectralField::basis(8, 2, 0).scaled(eps)).unwrap().norm();
        let ratio = r(1e-2) / r(1e-3);
        assert!((ratio - 100.0).abs() < 2.0, "ratio {ratio}");
    }

    #[test]
    fn transversality() {
        assert_eq!(transversality_value(0), 1.0);
        assert_eq!(transversality_value(1), 1.0 / 3.0);
        assert_eq!(transversality_value(4), 1.0 / 21.0);
    }

    #[test]
    fn newton_finds_dipole_equilibrium() {
        let k = IsotropyDescriptor::new(GroupName::O2m, 1, 12).unwrap();
        let eq = newton_solve(1.9, &SpectralField::basis(12, 1, 0).scaled(1.0), &k, 1e-12).unwrap();
        assert!(eq.residual_norm < 1e-11);
        assert!(eq.v.get(1, 0).abs() > 0.5);
        assert!(isotropy_residual(&eq.v, &k) < 1e-12);
        let zero = newton_solve(1.9, &SpectralField::zeros(12), &k, 1e-12).unwrap();
        assert_eq!(zero.v.norm(), 0.0);
    }

    #[test]
    fn degenerate_point_behaviour() {
        let k = IsotropyDescriptor::new(GroupName::O2xZ2c, 2, 10).unwrap();
        match newton_solve(6.0, &k.generator.scaled(0.1), &k, 1e-12) {
            Err(Error::SingularJacobian) => {}
            Ok(eq) => assert!(eq.v.norm() < 1e-6),
            Err(e) => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn residual_is_equivariant() {
        let mut v = SpectralField::zeros(8);
        for (i, c) in v.coeffs_mut().iter_mut().enumerate().take(16) {
            *c = 0.05 * (((i * 5) % 7) as f64 - 3.0) / 3.0;
        }
        let (a, b, g) = (0.3, 1.2, -0.7);
        let lhs = equilibrium_residual(4.0, &wigner_d_rotate(&v, a, b, g, true)).unwrap();
        let rhs = wigner_d_rotate(&equilibrium_residual(4.0, &v).unwrap(), a, b, g, true);
        assert!(lhs.sub(&rhs).norm() < 1e-10);
    }

    #[test]
    fn dipole_branch_is_even_and_inversion_symmetric() {
        let k = IsotropyDescriptor::new(GroupName::O2m, 1, 12).unwrap();
        let br = continue_branch(&k, &ContinuationOptions { s_max: 0.1, ds: 0.02, ..Default::default() });
        assert!(br.stopped_at.is_empty());
        let n = br.points.len();
        assert_eq!(n, 11);
        assert_eq!(br.points[n / 2].lambda, 2.0);
        for i in 0..n / 2 {
            let (p, q) = (&br.points[i], &br.points[n - 1 - i]);
            assert!((p.s + q.s).abs() < 1e-15);
            assert!((p.lambda - q.lambda).abs() < 1e-10);
            let inv = wigner_d_rotate(&q.v, 0.0, 0.0, 0.0, true);
            assert!(p.v.sub(&inv).norm() < 1e-10);
            assert!((p.v.dot(&k.generator) - p.s).abs() < 1e-12);
        }
    }
}
