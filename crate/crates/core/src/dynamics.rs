//! Time integration of the rescaled flow `v_t = (1+v)²(Δv + λ f(v))` and its
//! semilinear variant, the normalized flow on the sphere at infinity,
//! heteroclinic experiments and strong-stable decay rates.
//!
//! Steps are semi-implicit: `c·Δ` is taken implicitly with the rotation-invariant
//! bound `c = (1 + Σ_ℓ √((2ℓ+1)/4π)‖v_ℓ‖)² ≥ max (1+v)²`, the remainder explicitly.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use nalgebra::DMatrix;
use num_traits::Float;

use crate::equilibrium::{branch_equilibrium_at_lambda, Equilibrium};
use crate::galerkin::Galerkin;
use crate::linalg::{norm, solve, sym_eigen};
use crate::nonlinearity::f_antiderivative;
use crate::spectral::{laplacian_apply, QuadratureGrid, SpectralField, DELTA_MIN};
use crate::stability::{linearized_spectrum, Operator};
use crate::symmetry::{Group, GroupName, IsotropyDescriptor, Projector, TABLE_PAIRS};
use crate::{lambda_ell, Error, Result};

pub const CONVERGENCE_TOL: f64 = 1e-9;
pub const CLASSIFY_TOL: f64 = 1e-6;
pub const DT_MIN: f64 = 1e-12;
/// Allowed energy increase per step, relative to `1 + |E|` (roundoff).
const ENERGY_SLACK: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FlowVariant {
    Quasilinear,
    Semilinear,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum EventKind {
    Converged { id: Option<String> },
    PositivityViolation,
    MaxTimeReached,
    /// The amplitude bound was exceeded.
    Diverged,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
}

/// Strided samples of a trajectory. `energies` is empty for the flow at infinity.
#[derive(Clone, Debug, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub snapshots: Vec<SpectralField>,
    pub energies: Vec<f64>,
    pub events: Vec<Event>,
    /// Largest energy change over all accepted steps, sampled or not.
    pub max_energy_increase: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl TrajectoryRecord {
    pub fn final_state(&self) -> Option<&SpectralField> {
        self.snapshots.last()
    }

    pub fn terminal_event(&self) -> Option<&EventKind> {
        self.events.last().map(|e| &e.kind)
    }

    pub fn converged(&self) -> bool {
        matches!(self.terminal_event(), Some(EventKind::Converged { .. }))
    }

    fn sample(&mut self, t: f64, v: SpectralField, e: Option<f64>) {
        self.times.push(t);
        self.snapshots.push(v);
        if let Some(e) = e {
            self.energies.push(e);
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowOptions {
    pub variant: FlowVariant,
    pub t_end: f64,
    pub dt0: f64,
    pub dt_max: f64,
    pub conv_tol: f64,
    /// Keep every `stride`-th accepted step.
    pub stride: usize,
    /// Stop with [`EventKind::Diverged`] once `max |v|` exceeds this.
    pub max_amplitude: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { variant: FlowVariant::Quasilinear, t_end: 50.0, dt0: 1e-2, dt_max: 0.5, conv_tol: CONVERGENCE_TOL, stride: 10, max_amplitude: 1e3 }
    }
}

/// `Σ_ℓ √((2ℓ+1)/4π) ‖y_ℓ‖`, an upper bound for `max |v|`.
fn sup_bound(model: &Galerkin, y: &[f64]) -> f64 {
    let mut sq = vec![0.0; model.l_max() + 1];
    for (l, c) in model.degrees().iter().zip(y) {
        sq[*l] += c * c;
    }
    sq.iter().enumerate().map(|(l, s)| ((2 * l + 1) as f64 / (4.0 * PI)).sqrt() * s.sqrt()).sum()
}

/// Minimum, or NaN if any entry is NaN (so positivity checks reject it).
fn min_value(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.min(b) })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Velocity `ẏ` and residual at `y`, with `v` the grid values of `y`.
fn velocity(model: &Galerkin, lambda: f64, y: &[f64], v: &[f64], variant: FlowVariant) -> (Vec<f64>, Vec<f64>) {
    let r = model.residual_from_values(lambda, y, v);
    let n = match variant {
        FlowVariant::Semilinear => r.clone(),
        FlowVariant::Quasilinear => {
            let gr = model.grid_values(&r);
            let h: Vec<f64> = gr.iter().zip(v).map(|(a, b)| (1.0 + b) * (1.0 + b) * a).collect();
            model.project(&h)
        }
    };
    (n, r)
}

/// Reduced-coordinate velocity of either flow.
pub fn flow_velocity(model: &Galerkin, lambda: f64, y: &[f64], variant: FlowVariant) -> Result<Vec<f64>> {
    let v = model.checked_values(y)?;
    Ok(velocity(model, lambda, y, &v, variant).0)
}

fn implicit_update(model: &Galerkin, y: &[f64], n: &[f64], dt: f64, c: f64) -> Vec<f64> {
    model
        .degrees()
        .iter()
        .zip(y)
        .zip(n)
        .map(|((l, yi), ni)| {
            let k = c * (l * (l + 1)) as f64;
            (yi + dt * (ni + k * yi)) / (1.0 + dt * k)
        })
        .collect()
}

fn stiffness(model: &Galerkin, y: &[f64], variant: FlowVariant) -> f64 {
    match variant {
        FlowVariant::Semilinear => 1.0,
        FlowVariant::Quasilinear => (1.0 + sup_bound(model, y)).powi(2),
    }
}

/// One semi-implicit step of length `dt`.
pub fn flow_step(model: &Galerkin, lambda: f64, y: &[f64], dt: f64, variant: FlowVariant) -> Result<Vec<f64>> {
    let v = model.checked_values(y)?;
    let (n, _) = velocity(model, lambda, y, &v, variant);
    Ok(implicit_update(model, y, &n, dt, stiffness(model, y, variant)))
}

/// Integrates either flow in the subspace of `model`; returns the record and the final coordinates.
pub fn integrate_on(model: &Galerkin, lambda: f64, y0: Vec<f64>, opts: &FlowOptions) -> Result<(TrajectoryRecord, Vec<f64>)> {
    let mut y = y0;
    let mut v = model.checked_values(&y)?;
    let mut e = model.energy_from_values(lambda, &y, &v);
    let mut rec = TrajectoryRecord { max_energy_increase: f64::NEG_INFINITY, ..Default::default() };
    rec.sample(0.0, model.to_field(&y), Some(e));
    let mut t = 0.0;
    let mut dt = opts.dt0;
    let mut last_sampled = 0;
    loop {
        let (n, r) = velocity(model, lambda, &y, &v, opts.variant);
        let kind = if norm(&r) < opts.conv_tol && norm(&n) < opts.conv_tol {
            Some(EventKind::Converged { id: None })
        } else if t >= opts.t_end {
            Some(EventKind::MaxTimeReached)
        } else if max_abs(&v) > opts.max_amplitude {
            Some(EventKind::Diverged)
        } else {
            None
        };
        if let Some(kind) = kind {
            rec.events.push(Event { t, kind });
            break;
        }
        let c = stiffness(model, &y, opts.variant);
        let mut h = dt.min(opts.t_end - t);
        let accepted = loop {
            let y1 = implicit_update(model, &y, &n, h, c);
            let v1 = model.grid_values(&y1);
            if 1.0 + min_value(&v1) < DELTA_MIN {
                rec.rejected_steps += 1;
                h *= 0.5;
                if !(h >= DT_MIN) {
                    break None;
                }
                continue;
            }
            let e1 = model.energy_from_values(lambda, &y1, &v1);
            if e1 > e + ENERGY_SLACK * (1.0 + e.abs()) {
                rec.rejected_steps += 1;
                h *= 0.5;
                if !(h >= DT_MIN) {
                    return Err(Error::StepFailure { t, dt: h });
                }
                continue;
            }
            break Some((y1, v1, e1));
        };
        let Some((y1, v1, e1)) = accepted else {
            rec.events.push(Event { t, kind: EventKind::PositivityViolation });
            break;
        };
        rec.max_energy_increase = rec.max_energy_increase.max(e1 - e);
        t += h;
        y = y1;
        v = v1;
        e = e1;
        rec.accepted_steps += 1;
        if rec.accepted_steps % opts.stride.max(1) == 0 {
            rec.sample(t, model.to_field(&y), Some(e));
            last_sampled = rec.accepted_steps;
        }
        dt = (h * 1.2).min(opts.dt_max).max(dt.min(opts.dt_max));
    }
    if last_sampled != rec.accepted_steps {
        rec.sample(t, model.to_field(&y), Some(e));
    }
    Ok((rec, y))
}

/// Full-space integration from `v0`.
pub fn integrate_rescaled(v0: &SpectralField, lambda: f64, t_end: f64, dt0: f64, variant: FlowVariant) -> Result<TrajectoryRecord> {
    let model = Galerkin::full(v0.l_max());
    let opts = FlowOptions { variant, t_end, dt0, ..FlowOptions::default() };
    Ok(integrate_on(&model, lambda, v0.coeffs().to_vec(), &opts)?.0)
}

/// `½ Σ ℓ(ℓ+1) c² − λ ∫ F(v)`.
pub fn energy(v: &SpectralField, lambda: f64) -> Result<f64> {
    let grid = QuadratureGrid::new(v.l_max());
    let g = grid.synthesize(v)?;
    crate::spectral::check_floor(&g)?;
    let grad: f64 = (0..=v.l_max()).map(|l| 0.5 * lambda_ell(l) * v.block(l).iter().map(|c| c * c).sum::<f64>()).sum();
    Ok(grad - lambda * grid.integrate(&g.map(f_antiderivative)))
}

/// `dE/dt` two ways: the exact discrete rate `−Rᵀ M R` and the quadrature of
/// `−(1+v)⁻² v_t²` (quasilinear) or `−v_t²` (semilinear).
pub fn energy_rate(model: &Galerkin, lambda: f64, y: &[f64], variant: FlowVariant) -> Result<(f64, f64)> {
    let v = model.checked_values(y)?;
    let (n, r) = velocity(model, lambda, y, &v, variant);
    let exact = -r.iter().zip(&n).map(|(a, b)| a * b).sum::<f64>();
    let vt = model.grid_values(&n);
    let weights = model.grid().weights();
    let integral = -vt
        .iter()
        .zip(&v)
        .zip(weights)
        .map(|((a, b), w)| {
            let m = match variant {
                FlowVariant::Quasilinear => (1.0 + b).powi(-2),
                FlowVariant::Semilinear => 1.0,
            };
            w * m * a * a
        })
        .sum::<f64>();
    Ok((exact, integral))
}

// ---------------------------------------------------------------------------
// Sphere at infinity: χ_τ = χ²Δχ + (λ/2)χ³ − ⟨χ²Δχ + (λ/2)χ³, χ⟩χ, ‖χ‖ = 1.

fn chi_velocity_values(model: &Galerkin, lambda: f64, y: &[f64], chi: &[f64]) -> Vec<f64> {
    let lap: Vec<f64> = model.laplacian().iter().zip(y).map(|(a, b)| a * b).collect();
    let lap = model.grid_values(&lap);
    let h: Vec<f64> = chi.iter().zip(&lap).map(|(c, d)| c * c * (d + 0.5 * lambda * c)).collect();
    let mut n = model.project(&h);
    let mu: f64 = n.iter().zip(y).map(|(a, b)| a * b).sum();
    for (ni, yi) in n.iter_mut().zip(y) {
        *ni -= mu * yi;
    }
    n
}

/// Tangential velocity of the flow at infinity in reduced coordinates.
pub fn chi_velocity(model: &Galerkin, lambda: f64, y: &[f64]) -> Result<Vec<f64>> {
    let chi = model.grid_values(y);
    if min_value(&chi) <= 0.0 {
        return Err(Error::PositivityViolation { t: 0.0 });
    }
    Ok(chi_velocity_values(model, lambda, y, &chi))
}

fn normalize(y: &mut [f64]) {
    let n = norm(y);
    y.iter_mut().for_each(|x| *x /= n);
}

/// One explicit step of the flow at infinity followed by renormalization.
pub fn sphere_at_infinity_step(chi: &SpectralField, lambda: f64, dtau: f64) -> Result<SpectralField> {
    if (chi.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::OutOfRange(format!("unit norm required, got {}", chi.norm())));
    }
    let grid = QuadratureGrid::new(chi.l_max());
    let c = grid.synthesize(chi)?;
    if c.min() <= 0.0 {
        return Err(Error::PositivityViolation { t: 0.0 });
    }
    let lap = grid.synthesize(&laplacian_apply(chi))?;
    let h = c.zip_map(&lap, |a, d| a * a * (d + 0.5 * lambda * a));
    let n = grid.analyze(&h, chi.l_max())?;
    let mu = n.dot(chi);
    let mut out = chi.clone();
    out.axpy(dtau, &n);
    out.axpy(-dtau * mu, chi);
    let nn = out.norm();
    Ok(out.scaled(1.0 / nn))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChiOptions {
    pub tau_end: f64,
    pub dtau_max: f64,
    pub conv_tol: f64,
    pub stride: usize,
    /// Stop with [`EventKind::PositivityViolation`] once `min χ` falls below this
    /// fraction of its sup bound; near a zero of `χ` the admissible step collapses.
    pub min_ratio: f64,
}

impl Default for ChiOptions {
    fn default() -> Self {
        Self { tau_end: 2e5, dtau_max: 10.0, conv_tol: 1e-11, stride: 50, min_ratio: 1e-3 }
    }
}

/// Semi-implicit integration of the flow at infinity from unit-norm `y0`.
pub fn integrate_chi(model: &Galerkin, lambda: f64, y0: Vec<f64>, opts: &ChiOptions) -> Result<(TrajectoryRecord, Vec<f64>)> {
    let mut y = y0;
    normalize(&mut y);
    let mut chi = model.grid_values(&y);
    if min_value(&chi) <= 0.0 {
        return Err(Error::PositivityViolation { t: 0.0 });
    }
    let mut rec = TrajectoryRecord { max_energy_increase: f64::NAN, ..Default::default() };
    rec.sample(0.0, model.to_field(&y), None);
    let mut t = 0.0;
    let mut last_sampled = 0;
    loop {
        let n = chi_velocity_values(model, lambda, &y, &chi);
        let sup = sup_bound(model, &y);
        let kind = if norm(&n) < opts.conv_tol {
            Some(EventKind::Converged { id: None })
        } else if t >= opts.tau_end {
            Some(EventKind::MaxTimeReached)
        } else if !(min_value(&chi) >= opts.min_ratio * sup) {
            Some(EventKind::PositivityViolation)
        } else {
            None
        };
        if let Some(kind) = kind {
            rec.events.push(Event { t, kind });
            break;
        }
        let c = sup * sup;
        let mut h = opts.dtau_max.min(1.0 / (lambda.abs().max(1.0) * c)).min(opts.tau_end - t);
        let next = loop {
            let mut y1 = implicit_update(model, &y, &n, h, c);
            normalize(&mut y1);
            let chi1 = model.grid_values(&y1);
            if min_value(&chi1) > 0.0 {
                break Some((y1, chi1));
            }
            rec.rejected_steps += 1;
            h *= 0.5;
            if !(h >= DT_MIN) {
                break None;
            }
        };
        let Some((y1, chi1)) = next else {
            rec.events.push(Event { t, kind: EventKind::PositivityViolation });
            break;
        };
        t += h;
        y = y1;
        chi = chi1;
        rec.accepted_steps += 1;
        if rec.accepted_steps % opts.stride.max(1) == 0 {
            rec.sample(t, model.to_field(&y), None);
            last_sampled = rec.accepted_steps;
        }
    }
    if last_sampled != rec.accepted_steps {
        rec.sample(t, model.to_field(&y), None);
    }
    Ok((rec, y))
}

/// Newton refinement of an equilibrium of the flow at infinity,
/// `P[χ²(Δχ + (λ/2)χ)] = μχ`, `‖χ‖ = 1`.
pub fn refine_chi_equilibrium(model: &Galerkin, lambda: f64, y0: &[f64], tol: f64) -> Result<Vec<f64>> {
    let k = model.dim();
    let mut y = y0.to_vec();
    normalize(&mut y);
    let lam_diag = model.laplacian();
    let mut last = f64::INFINITY;
    for _ in 0..crate::equilibrium::MAX_NEWTON_ITERATIONS {
        let chi = model.grid_values(&y);
        if min_value(&chi) <= 0.0 {
            return Err(Error::PositivityViolation { t: 0.0 });
        }
        let lapy: Vec<f64> = lam_diag.iter().zip(&y).map(|(a, b)| a * b).collect();
        let lap = model.grid_values(&lapy);
        let h: Vec<f64> = chi.iter().zip(&lap).map(|(c, d)| c * c * (d + 0.5 * lambda * c)).collect();
        let nvec = model.project(&h);
        let mu: f64 = nvec.iter().zip(&y).map(|(a, b)| a * b).sum();
        let mut rhs: Vec<f64> = nvec.iter().zip(&y).map(|(a, b)| a - mu * b).collect();
        let res = norm(&rhs);
        if res < tol {
            return Ok(y);
        }
        last = res;
        rhs.push(0.5 * (y.iter().map(|x| x * x).sum::<f64>() - 1.0));
        let chi2: Vec<f64> = chi.iter().map(|c| c * c).collect();
        let pot: Vec<f64> = chi.iter().zip(&lap).map(|(c, d)| 2.0 * c * d + 1.5 * lambda * c * c).collect();
        let a = model.weighted_gram(&chi2);
        let b = model.weighted_gram(&pot);
        let mut jac = DMatrix::<f64>::zeros(k + 1, k + 1);
        for i in 0..k {
            for j in 0..k {
                jac[(i, j)] = a[(i, j)] * lam_diag[j] + b[(i, j)];
            }
            jac[(i, i)] -= mu;
            jac[(i, k)] = -y[i];
            jac[(k, i)] = y[i];
        }
        let dx = solve(jac, &rhs)?;
        for (yi, d) in y.iter_mut().zip(&dx) {
            *yi -= d;
        }
    }
    Err(Error::NoConvergence { iterations: crate::equilibrium::MAX_NEWTON_ITERATIONS, residual: last })
}

/// Reduced coordinates of the direction of `1 + v` in `model`.
pub fn chi_of(model: &Galerkin, v: &SpectralField) -> Vec<f64> {
    let nu = v.add(&SpectralField::constant(v.l_max(), 1.0));
    let mut y = model.from_field(&nu);
    normalize(&mut y);
    y
}

// ---------------------------------------------------------------------------
// Heteroclinic experiments.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Side {
    Below,
    Above,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Below => -1.0,
            Side::Above => 1.0,
        }
    }
}

/// A connection `source → target` (`None` is the trivial equilibrium), attempted
/// inside `Fix(subspace)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Connection {
    pub ell: usize,
    pub side: Side,
    pub source: Option<GroupName>,
    pub target: Option<GroupName>,
    pub subspace: GroupName,
    /// Whether the connection avoids strongly unstable directions inside the subspace.
    pub required: bool,
}

const fn conn(ell: usize, side: Side, source: Option<GroupName>, target: Option<GroupName>, subspace: GroupName, required: bool) -> Connection {
    Connection { ell, side, source, target, subspace, required }
}

pub const CONNECTIONS: [Connection; 10] = {
    use GroupName::*;
    use Side::*;
    [
        conn(1, Below, Some(O2m), None, O2m, true),
        conn(2, Below, Some(O2xZ2c), None, O2xZ2c, true),
        conn(2, Above, None, Some(O2xZ2c), O2xZ2c, true),
        conn(3, Below, Some(D6d), Some(O2m), D3z, false),
        conn(3, Below, Some(O2m), Some(Om), D2z, false),
        conn(3, Below, Some(Om), None, Om, true),
        conn(4, Below, Some(OxZ2c), Some(O2xZ2c), D4xZ2c, false),
        conn(4, Below, Some(OxZ2c), None, OxZ2c, true),
        conn(4, Above, None, Some(OxZ2c), OxZ2c, true),
        conn(4, Above, Some(O2xZ2c), Some(OxZ2c), D4xZ2c, false),
    ]
};

/// Default `|λ − λ_ℓ|` for `ℓ = 1..=4`, giving branch amplitudes `|s| ≈ 0.25`.
pub const DEFAULT_LAMBDA_OFFSETS: [f64; 4] = [0.009, 0.027, 0.1, 0.024];

pub fn default_lambda_offset(ell: usize) -> f64 {
    DEFAULT_LAMBDA_OFFSETS.get(ell.wrapping_sub(1)).copied().unwrap_or(0.3)
}

/// Equilibrium of the flow at infinity, stored in the coordinates of the experiment's model.
#[derive(Clone, Debug, PartialEq)]
pub struct KnownEquilibrium {
    pub id: String,
    pub group: Option<GroupName>,
    pub y: Vec<f64>,
    /// Whether the equilibrium lies in the model's subspace (else `y` is only its projection).
    pub inside: bool,
    /// O(3)-invariant degree norms.
    pub invariants: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MatchKind {
    /// L² distance to the stored representative.
    Exact,
    /// Distance of degree-norm profiles: a conjugate of the representative.
    Orbit,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Attempt {
    pub sign: f64,
    pub eigenvalue: f64,
    pub target_id: Option<String>,
    pub distance: f64,
    pub matched_by: Option<MatchKind>,
    pub nearest: String,
    pub terminal: Option<EventKind>,
    pub tau: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeteroclinicOutcome {
    pub connection: Connection,
    pub lambda: f64,
    pub source_id: String,
    pub expected_target: String,
    pub attempts: Vec<Attempt>,
    /// Index into `attempts` of the realized connection.
    pub realized: Option<usize>,
    /// Trajectory of the realized attempt, else of the last attempt.
    pub record: TrajectoryRecord,
}

impl HeteroclinicOutcome {
    pub fn target_id(&self) -> Option<&str> {
        self.realized.and_then(|i| self.attempts[i].target_id.as_deref())
    }
}

fn group_id(g: Option<GroupName>) -> String {
    g.map(|g| String::from(g.ident())).unwrap_or_else(|| String::from("0"))
}

fn degree_profile(model: &Galerkin, y: &[f64]) -> Vec<f64> {
    let mut sq = vec![0.0; model.l_max() + 1];
    for (l, c) in model.degrees().iter().zip(y) {
        sq[*l] += c * c;
    }
    sq.into_iter().map(f64::sqrt).collect()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Trivial equilibrium plus branch equilibria of degree `ell` at `lambda` that lie in the model's subspace.
pub fn known_equilibria(model: &Galerkin, sub: &Projector, ell: usize, lambda: f64) -> Vec<KnownEquilibrium> {
    let l_max = model.l_max();
    let mut out = Vec::new();
    let y0 = chi_of(model, &SpectralField::zeros(l_max));
    out.push(KnownEquilibrium { id: String::from("0"), group: None, invariants: degree_profile(model, &y0), y: y0, inside: true });
    for (g, l) in TABLE_PAIRS {
        if l != ell {
            continue;
        }
        let Ok(k) = IsotropyDescriptor::new(g, ell, l_max) else { continue };
        for sign in [1.0, -1.0] {
            let Ok(eq) = branch_equilibrium_at_lambda(&k, lambda, sign, 0.01, 1.0) else { continue };
            let inside = eq.v.sub(&sub.apply(&eq.v)).norm() < 1e-9;
            let y = chi_of(model, &eq.v);
            let y = if inside { refine_chi_equilibrium(model, lambda, &y, 1e-13).unwrap_or(y) } else { y };
            let id = format!("{}{}", g.ident(), if sign > 0.0 { "+" } else { "-" });
            let invariants = if inside {
                degree_profile(model, &y)
            } else {
                let full = Galerkin::full(l_max);
                let yf = chi_of(&full, &eq.v);
                let yf = refine_chi_equilibrium(&full, lambda, &yf, 1e-13).unwrap_or(yf);
                degree_profile(&full, &yf)
            };
            out.push(KnownEquilibrium { id, group: Some(g), y, inside, invariants });
        }
    }
    out
}

/// Nearest known equilibrium, and the match kind if within `tol`.
pub fn classify(model: &Galerkin, y: &[f64], known: &[KnownEquilibrium], tol: f64) -> (String, f64, Option<MatchKind>) {
    let mut best = (String::from("-"), f64::INFINITY, None);
    for k in known {
        let d = distance(y, &k.y);
        if d < best.1 {
            best = (k.id.clone(), d, if d < tol { Some(MatchKind::Exact) } else { None });
        }
    }
    if best.2.is_none() {
        let p = degree_profile(model, y);
        for k in known {
            let d = distance(&p, &k.invariants);
            if d < tol {
                return (k.id.clone(), d, Some(MatchKind::Orbit));
            }
        }
    }
    best
}

/// Unstable eigenpairs of the quasilinear linearization at `v` within the model,
/// projected tangentially to `1 + v`; the radial eigenvector is dropped.
/// Sorted by decreasing eigenvalue; the flag marks directions dominated by degree `ell`.
pub fn unstable_tangent_directions(model: &Galerkin, lambda: f64, v: &SpectralField, ell: usize) -> Result<Vec<(f64, Vec<f64>, bool)>> {
    let y = model.from_field(v);
    let vals = model.checked_values(&y)?;
    let j = model.jacobian_from_values(lambda, &vals);
    let w: Vec<f64> = vals.iter().map(|x| (1.0 + x).powi(2)).collect();
    let c = model.weighted_gram(&w).cholesky().ok_or(Error::SingularJacobian)?.l();
    let (mu, z) = sym_eigen(c.tr_mul(&j) * &c);
    let chi = chi_of(model, v);
    let mut out = Vec::new();
    for (i, m) in mu.iter().enumerate() {
        if *m <= 1e-8 {
            continue;
        }
        let wv = &c * z.column(i);
        let mut wt: Vec<f64> = wv.iter().copied().collect();
        let p: f64 = wt.iter().zip(&chi).map(|(a, b)| a * b).sum();
        for (a, b) in wt.iter_mut().zip(&chi) {
            *a -= p * b;
        }
        let nt = norm(&wt);
        if nt < 0.3 * wv.norm() {
            continue;
        }
        wt.iter_mut().for_each(|a| *a /= nt);
        let on_ell: f64 = model.degrees().iter().zip(&wt).filter(|(l, _)| **l == ell).map(|(_, a)| a * a).sum();
        out.push((*m, wt, on_ell >= 0.5));
    }
    out.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeteroclinicParams {
    pub l_max: usize,
    pub amplitude: f64,
    pub lambda_offset: f64,
    pub classify_tol: f64,
    pub chi: ChiOptions,
}

impl HeteroclinicParams {
    pub fn new(ell: usize) -> Self {
        Self { l_max: 16, amplitude: 1e-3, lambda_offset: default_lambda_offset(ell), classify_tol: CLASSIFY_TOL, chi: ChiOptions::default() }
    }
}

/// Runs one connection on the sphere at infinity.
pub fn heteroclinic_experiment(connection: &Connection, params: &HeteroclinicParams) -> Result<HeteroclinicOutcome> {
    let ell = connection.ell;
    let lambda = lambda_ell(ell) + connection.side.sign() * params.lambda_offset;
    let sub = Group::new(connection.subspace).projector(params.l_max);
    let model = Galerkin::fix(&sub, params.l_max);
    let known = known_equilibria(&model, &sub, ell, lambda);
    let source_id = match connection.source {
        None => String::from("0"),
        Some(g) => {
            // Source on the side where it exists, preferring s > 0.
            let plus = format!("{}+", g.ident());
            let minus = format!("{}-", g.ident());
            let has = |id: &str| known.iter().any(|k| k.id == id && k.inside);
            if has(&plus) {
                plus
            } else if has(&minus) {
                minus
            } else {
                return Err(Error::InsufficientData(format!("no {} equilibrium at λ = {lambda}", g.ident())));
            }
        }
    };
    let source = known.iter().find(|k| k.id == source_id).ok_or_else(|| Error::InsufficientData(format!("unknown source {source_id}")))?;
    let v_src = v_from_chi(&model, &source.y, lambda)?;
    let dirs = unstable_tangent_directions(&model, lambda, &v_src, ell)?;
    let (eigenvalue, dir) = dirs
        .iter()
        .find(|d| d.2)
        .or_else(|| dirs.first())
        .map(|d| (d.0, d.1.clone()))
        .ok_or_else(|| Error::InsufficientData(String::from("no unstable direction at the source")))?;
    let expected_target = group_id(connection.target);
    let mut attempts = Vec::new();
    let mut records = Vec::new();
    let mut realized = None;
    for sign in [1.0, -1.0] {
        let y0: Vec<f64> = source.y.iter().zip(&dir).map(|(a, b)| a + sign * params.amplitude * b).collect();
        let (mut rec, y) = match integrate_chi(&model, lambda, y0, &params.chi) {
            Ok(r) => r,
            Err(Error::PositivityViolation { .. }) => {
                attempts.push(Attempt { sign, eigenvalue, target_id: None, distance: f64::INFINITY, matched_by: None, nearest: String::from("-"), terminal: Some(EventKind::PositivityViolation), tau: 0.0 });
                records.push(TrajectoryRecord::default());
                continue;
            }
            Err(e) => return Err(e),
        };
        let tau = rec.events.last().map(|e| e.t).unwrap_or(0.0);
        let (nearest, dist, matched) = classify(&model, &y, &known, params.classify_tol);
        let converged = rec.converged();
        let target_id = (converged && matched.is_some()).then(|| nearest.clone());
        if let Some(id) = &target_id {
            if let Some(Event { kind: EventKind::Converged { id: slot }, .. }) = rec.events.last_mut() {
                *slot = Some(id.clone());
            }
        }
        let hit = target_id.as_deref().map(|id| id.trim_end_matches(['+', '-']) == expected_target).unwrap_or(false);
        attempts.push(Attempt { sign, eigenvalue, target_id, distance: dist, matched_by: matched, nearest, terminal: rec.terminal_event().cloned(), tau });
        records.push(rec);
        if hit && realized.is_none() {
            realized = Some(attempts.len() - 1);
        }
    }
    let record = records.swap_remove(realized.unwrap_or(records.len() - 1));
    Ok(HeteroclinicOutcome { connection: *connection, lambda, source_id, expected_target, attempts, realized, record })
}

/// Rescaled-flow equilibrium `v` whose `1 + v` points along `χ`.
///
/// From `χΔχ + (λ/2)χ² = μ`, `1 + v = χ·√(λ/(2μ))`.
pub fn v_from_chi(model: &Galerkin, y: &[f64], lambda: f64) -> Result<SpectralField> {
    let chi = model.grid_values(y);
    let lapy: Vec<f64> = model.laplacian().iter().zip(y).map(|(a, b)| a * b).collect();
    let lap = model.grid_values(&lapy);
    let h: Vec<f64> = chi.iter().zip(&lap).map(|(c, d)| c * c * (d + 0.5 * lambda * c)).collect();
    let mu: f64 = model.project(&h).iter().zip(y).map(|(a, b)| a * b).sum();
    if mu <= 0.0 {
        return Err(Error::DomainViolation { min: mu, floor: 0.0 });
    }
    let scale = (0.5 * lambda / mu).sqrt();
    let mut v = model.to_field(y).scaled(scale);
    let one = SpectralField::constant(model.l_max(), 1.0);
    v.axpy(-1.0, &one);
    Ok(v)
}

// ---------------------------------------------------------------------------
// Strong-stable decay.

/// Exponential rate of `‖v(t) − v_*‖` over the approach phase: samples after the
/// distance first drops below a tenth of its initial value and before it comes
/// within a factor 10 of its minimum.
pub fn decay_rate(traj: &TrajectoryRecord, target: &Equilibrium) -> Result<f64> {
    let d: Vec<f64> = traj.snapshots.iter().map(|s| s.resized(target.v.l_max()).sub(&target.v).norm()).collect();
    let (k_min, d_min) = d.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, x)| if *x < acc.1 { (i, *x) } else { acc });
    let d0 = d.first().copied().unwrap_or(0.0);
    let sel: Vec<usize> = (0..k_min).filter(|i| d[*i] <= 0.1 * d0 && d[*i] >= 10.0 * d_min && d[*i] > 0.0).collect();
    if sel.len() < 5 {
        return Err(Error::InsufficientData(format!("{} samples in the approach phase", sel.len())));
    }
    let n = sel.len() as f64;
    let (mut st, mut sl, mut stt, mut stl) = (0.0, 0.0, 0.0, 0.0);
    for i in &sel {
        let t = traj.times[*i];
        let l = d[*i].ln();
        st += t;
        sl += l;
        stt += t * t;
        stl += t * l;
    }
    let slope = (n * stl - st * sl) / (n * stt - st * st);
    Ok(-slope)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayMeasurement {
    pub lambda: f64,
    pub group: GroupName,
    pub sigma: f64,
    pub rate: f64,
    pub gap: f64,
    pub record: TrajectoryRecord,
}

/// Shoots onto the strong-stable manifold of `v = 0` inside `Fix(group)`:
/// `v0 = amplitude·Y_{ℓ0} + σ·Y00`, with `σ` bisected so the unstable constant mode
/// stays unexcited, then fits the decay rate.
pub fn strong_stable_decay(lambda: f64, group: GroupName, ell: usize, amplitude: f64, l_max: usize) -> Result<DecayMeasurement> {
    let proj = Group::new(group).projector(l_max);
    let model = Galerkin::fix(&proj, l_max);
    let mode = model.from_field(&SpectralField::basis(l_max, ell, 0));
    let c0 = model.from_field(&SpectralField::basis(l_max, 0, 0));
    let opts = FlowOptions { variant: FlowVariant::Quasilinear, t_end: 60.0 / lambda.max(0.1), dt0: 1e-2, dt_max: 1e-2, stride: 1, max_amplitude: 2.0 * amplitude, ..FlowOptions::default() };
    let shot = |sigma: f64| -> Result<(TrajectoryRecord, f64)> {
        let y0: Vec<f64> = mode.iter().zip(&c0).map(|(a, b)| amplitude * a + sigma * b).collect();
        let (rec, y) = integrate_on(&model, lambda, y0, &opts)?;
        let mean: f64 = y.iter().zip(&c0).map(|(a, b)| a * b).sum();
        Ok((rec, mean))
    };
    let (mut lo, mut hi) = (-amplitude, amplitude);
    let side = |s: f64| -> Result<f64> { Ok(shot(s)?.1.signum()) };
    let s_lo = side(lo)?;
    if s_lo == side(hi)? {
        return Err(Error::InsufficientData(String::from("shooting interval does not bracket")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if side(mid)? == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let sigma = 0.5 * (lo + hi);
    let (record, _) = shot(sigma)?;
    let target = Equilibrium { lambda, v: SpectralField::zeros(l_max), group: GroupName::O3, residual_norm: 0.0 };
    let rate = decay_rate(&record, &target)?;
    let spec = linearized_spectrum(lambda, &target.v, Operator::Quasilinear)?;
    let gap = spec.leading_negative().map(f64::abs).ok_or(Error::InsufficientData(String::from("no stable eigenvalue")))?;
    Ok(DecayMeasurement { lambda, group, sigma, rate, gap, record })
}
