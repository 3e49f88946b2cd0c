//! Blow-up solutions of the radial equation `2r∂_r u = u²Δu + u + (λ/2)u³`
//! (round sphere metric, `r²R = λ + 2`) reconstructed from rescaled profiles,
//! the resulting metrics, and a direct radial simulator.

use alloc::string::String;
use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Sub};
use num_traits::Float;

use crate::dynamics::{Event, EventKind, TrajectoryRecord};
use crate::quadrature::tanh_sinh_split;
use crate::spectral::{check_floor, laplacian_apply, GridField, QuadratureGrid, SpectralField};
use crate::symmetry::GroupName;
use crate::{Error, Result};

/// Forward-mode dual number `v + d·ε`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: f64,
}

impl Dual {
    pub fn var(v: f64) -> Self {
        Self { v, d: 1.0 }
    }
    pub fn cst(v: f64) -> Self {
        Self { v, d: 0.0 }
    }
    pub fn powf(self, p: f64) -> Self {
        Self { v: self.v.powf(p), d: p * self.v.powf(p - 1.0) * self.d }
    }
}

impl Add for Dual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { v: self.v + o.v, d: self.d + o.d }
    }
}
impl Sub for Dual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { v: self.v - o.v, d: self.d - o.d }
    }
}
impl Mul for Dual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self { v: self.v * o.v, d: self.d * o.v + self.v * o.d }
    }
}
impl Div for Dual {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        Self { v: self.v / o.v, d: (self.d * o.v - self.v * o.d) / (o.v * o.v) }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange(alloc::format!("radius {r} outside (0, 1)")))
    }
}

/// Radial rate `((λ/2)(1/r − 1))^{−1/2}`.
fn rate<T: Copy + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Div<Output = T>>(r: T, one: T, half_lambda: T, pow: impl Fn(T) -> T) -> T {
    pow(half_lambda * (one / r - one))
}

/// `u(r, ·) = ((λ/2)(1/r − 1))^{−1/2}(1 + v)` on the grid of `v`.
pub fn reconstruct_u(v: &SpectralField, lambda: f64, r: f64) -> Result<GridField> {
    check_radius(r)?;
    let grid = QuadratureGrid::new(v.l_max());
    let g = grid.synthesize(v)?;
    check_floor(&g)?;
    let a = rate(r, 1.0, 0.5 * lambda, |x: f64| x.powf(-0.5));
    Ok(g.map(|x| a * (1.0 + x)))
}

/// Largest relative pointwise residual of the radial equation for
/// `u = ((λ/2)(1/r − 1))^{−1/2}(1 + v)` over `radii`; `∂_r` by dual numbers.
pub fn radial_residual(v: &SpectralField, lambda: f64, radii: &[f64]) -> Result<f64> {
    let grid = QuadratureGrid::new(v.l_max());
    let nu = grid.synthesize(v)?.map(|x| 1.0 + x);
    let lap = grid.synthesize(&laplacian_apply(v))?;
    let mut worst: f64 = 0.0;
    for &r in radii {
        check_radius(r)?;
        let a = rate(Dual::var(r), Dual::cst(1.0), Dual::cst(0.5 * lambda), |x: Dual| x.powf(-0.5));
        for (n, d) in nu.values().iter().zip(lap.values()) {
            let u = a.v * n;
            let lhs = 2.0 * r * a.d * n;
            let rhs = u * u * a.v * d + u + 0.5 * lambda * u * u * u;
            let scale = lhs.abs().max(u).max(1e-300);
            worst = worst.max((lhs - rhs).abs() / scale);
        }
    }
    Ok(worst)
}

/// Relative residual of `2r∂_r u = u³ + u` for `u = (1/r − 1)^{−1/2}`, `∂_r` by dual numbers.
pub fn trivial_solution_residual(radii: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &r in radii {
        check_radius(r)?;
        let u = rate(Dual::var(r), Dual::cst(1.0), Dual::cst(1.0), |x: Dual| x.powf(-0.5));
        let lhs = 2.0 * r * u.d;
        let rhs = u.v * u.v * u.v + u.v;
        worst = worst.max((lhs - rhs).abs() / rhs);
    }
    Ok(worst)
}

/// `S(r0, r) = ∫_{r0}^{r} (ρ/(1 − ρ))^{1/2} dρ`, the radial coordinate in which the
/// metric of a self-similar solution reads `(2/λ)(1 + v)² ds² + r² ω`.
pub fn radial_coordinate(r0: f64, r: f64) -> Result<f64> {
    if !(0.0 <= r0 && r0 <= r && r <= 1.0) {
        return Err(Error::OutOfRange(alloc::format!("need 0 ≤ r0 ≤ r ≤ 1, got {r0}, {r}")));
    }
    let gap = 1.0 - r;
    tanh_sinh_split(|x, _, db| (x / (gap + db)).sqrt(), r0, r, 1e-12)
}

/// Geodesic radial distance of the isotropic profile, `√(2/λ)·S(r0, r)`.
pub fn geodesic_coordinate(r0: f64, r: f64, lambda: f64) -> Result<f64> {
    Ok((2.0 / lambda).sqrt() * radial_coordinate(r0, r)?)
}

/// Closed form of `S(0, r)`: `arcsin √r − √(r(1 − r))`.
pub fn radial_coordinate_closed_form(r: f64) -> f64 {
    r.sqrt().asin() - (r * (1.0 - r)).sqrt()
}

/// Inverts `S(0, r) = s` by bisection on the closed form.
pub fn radius_at(s: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if radial_coordinate_closed_form(mid) < s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Mean curvature of the leaves, `H = 2/(r u)`.
pub fn mean_curvature_profile(v: &SpectralField, lambda: f64, r: f64) -> Result<GridField> {
    let u = reconstruct_u(v, lambda, r)?;
    Ok(u.map(|x| 2.0 / (r * x)))
}

/// Least-squares slope of `ln H_max` against `ln(1 − r)` over `radii` (expected `1/2`).
pub fn mean_curvature_exponent(v: &SpectralField, lambda: f64, radii: &[f64]) -> Result<f64> {
    let mut pts = Vec::with_capacity(radii.len());
    for &r in radii {
        let h = mean_curvature_profile(v, lambda, r)?;
        pts.push(((1.0 - r).ln(), h.max().ln()));
    }
    Ok(slope(&pts).0)
}

fn slope(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + (p.0 - mx) * (p.1 - my), a.1 + (p.0 - mx) * (p.0 - mx)));
    let b = sxy / sxx;
    (b, my - b * mx)
}

/// Metric `g = (2/λ)(1 + v)² ds² + r(s)² ω` sampled on radii and grid points.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MetricProfile {
    pub lambda: f64,
    pub r: Vec<f64>,
    /// `S(0, r)`.
    pub s: Vec<f64>,
    /// `(θ, φ)` of the angular grid points.
    pub points: Vec<(f64, f64)>,
    /// `u[i][p]` at radius `r[i]`.
    pub u: Vec<Vec<f64>>,
    /// Coefficient of `ds²`, independent of `r` for a self-similar profile.
    pub g_ss: Vec<f64>,
    pub h: Vec<Vec<f64>>,
}

impl MetricProfile {
    pub fn build(v: &SpectralField, lambda: f64, radii: &[f64]) -> Result<Self> {
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::OutOfRange(String::from("radii must increase")));
        }
        let grid = QuadratureGrid::new(v.l_max());
        let nu = grid.synthesize(v)?;
        check_floor(&nu)?;
        let g_ss = nu.values().iter().map(|x| 2.0 / lambda * (1.0 + x) * (1.0 + x)).collect();
        let mut s = Vec::new();
        let mut u = Vec::new();
        let mut h = Vec::new();
        for &r in radii {
            s.push(radial_coordinate(0.0, r)?);
            let ur = reconstruct_u(v, lambda, r)?;
            h.push(ur.values().iter().map(|x| 2.0 / (r * x)).collect());
            u.push(ur.values().to_vec());
        }
        let points = (0..grid.n_points()).map(|p| grid.point(p)).collect();
        Ok(Self { lambda, r: radii.to_vec(), s, points, u, g_ss, h })
    }

    /// Smallest `ds²` coefficient; positive means the metric extends nondegenerately to `r = 1`.
    pub fn min_g_ss(&self) -> f64 {
        self.g_ss.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Fit near the center `r → 0` of the isotropic profile.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CuspFit {
    /// `p` in `r(s)² ~ s^p`.
    pub exponent: f64,
    /// `c` in `S ≈ c·r^{3/2}`.
    pub coefficient: f64,
}

/// Exponent of the sphere-radius factor near the center. The `λ` scaling of the
/// geodesic coordinate rescales `s` only and leaves the exponent unchanged.
pub fn center_cusp_check(lambda: f64) -> Result<CuspFit> {
    let radii: Vec<f64> = (0..9).map(|k| 1e-8 * 10f64.powf(k as f64 * 0.25)).collect();
    let mut pts = Vec::new();
    let mut coef = Vec::new();
    for &r in &radii {
        let s = geodesic_coordinate(0.0, r, lambda)?;
        pts.push((s.ln(), (r * r).ln()));
        coef.push(radial_coordinate(0.0, r)? / r.powf(1.5));
    }
    Ok(CuspFit { exponent: slope(&pts).0, coefficient: coef[0] })
}

/// Whether `T = Δ + λ/2` is non-positive (the global-existence criterion).
pub fn monotonicity_operator_nonpositive(lambda: f64) -> bool {
    lambda <= 0.0
}

/// Positive eigenvalue count of `Δ + λ/2` on the boundary sphere `r = 1`.
pub fn minimal_surface_index(lambda: f64) -> Result<usize> {
    crate::stability::area_stability_index(lambda)
}

/// Whether the isotropy group contains `−id`, which makes the profile compatible
/// with antipodal identification across the center.
pub fn antipodal_admissible(group: GroupName) -> bool {
    use GroupName::*;
    matches!(group, O3 | O2xZ2c | OxZ2c | Z2c | D3xZ2c | D4xZ2c | D2xZ2c | Z2xZ2c)
}

/// Result of [`simulate_original`].
#[derive(Clone, Debug, PartialEq)]
pub struct OriginalRun {
    /// `times` holds radii; snapshots hold `w`.
    pub record: TrajectoryRecord,
    pub blowup_radius: Option<f64>,
    /// `(r, max w)` at every accepted step.
    pub w_max: Vec<(f64, f64)>,
}

/// Bound on the relative reaction growth per step.
pub const STEP_FRACTION: f64 = 0.005;

/// Reciprocal threshold `1/ε` at which blow-up is declared.
pub const BLOWUP_THRESHOLD: f64 = 1e6;

/// Integrates `∂_r w = w²Δw + (λ/2)w³`, where `u = √(2r)·w`, from `w0` at `r_start`.
///
/// Splitting per step: the reaction `w ↦ w/√(1 − λw²dr)` exactly, then
/// `w²Δw` semi-implicitly with `c = max w²`. The step keeps `λ·max w²·dr ≤ STEP_FRACTION`.
/// The blow-up radius is the zero of a linear fit of `w_max^{−2}` against `r`.
pub fn simulate_original(w0: &SpectralField, lambda: f64, r_start: f64, r_end: f64, dr0: f64) -> Result<OriginalRun> {
    if !(0.0 < r_start && r_start < r_end) {
        return Err(Error::OutOfRange(alloc::format!("need 0 < r_start < r_end, got {r_start}, {r_end}")));
    }
    let l_max = w0.l_max();
    let grid = QuadratureGrid::new(l_max);
    let mut w = w0.clone();
    let mut wg = grid.synthesize(&w)?;
    if wg.min() <= 0.0 {
        return Err(Error::DomainViolation { min: wg.min(), floor: 0.0 });
    }
    let mut rec = TrajectoryRecord { max_energy_increase: f64::NAN, ..Default::default() };
    rec.times.push(r_start);
    rec.snapshots.push(w.clone());
    let mut w_max = Vec::new();
    w_max.push((r_start, wg.max()));
    let mut r = r_start;
    let mut steps = 0usize;
    loop {
        let m = wg.max();
        if m > BLOWUP_THRESHOLD {
            rec.events.push(Event { t: r, kind: EventKind::Diverged });
            break;
        }
        if r >= r_end {
            rec.events.push(Event { t: r, kind: EventKind::MaxTimeReached });
            break;
        }
        let dr = dr0.min(STEP_FRACTION / (lambda.abs().max(1e-12) * m * m)).min(r_end - r);
        if dr < 1e-300 {
            return Err(Error::StepFailure { t: r, dt: dr });
        }
        let react = wg.map(|x| x / (1.0 - lambda * x * x * dr).sqrt());
        let half = analyze_field(&grid, &react, l_max)?;
        let lap = grid.synthesize(&laplacian_apply(&half))?;
        let c = react.values().iter().fold(0.0f64, |a, x| a.max(x * x));
        let diff = react.zip_map(&lap, |a, d| a * a * d - c * d);
        let expl = analyze_field(&grid, &diff, l_max)?;
        let mut next = half.clone();
        for l in 0..=l_max {
            let k = c * (l * (l + 1)) as f64;
            for (o, e) in next.block_mut(l).iter_mut().zip(expl.block(l)) {
                *o = (*o + dr * e) / (1.0 + dr * k);
            }
        }
        w = next;
        wg = grid.synthesize(&w)?;
        if !wg.values().iter().all(|x| x.is_finite()) || wg.min() <= 0.0 {
            return Err(Error::StepFailure { t: r, dt: dr });
        }
        r += dr;
        steps += 1;
        w_max.push((r, wg.max()));
        if steps % 10 == 0 {
            rec.times.push(r);
            rec.snapshots.push(w.clone());
        }
    }
    if rec.times.last() != Some(&r) {
        rec.times.push(r);
        rec.snapshots.push(w.clone());
    }
    rec.accepted_steps = steps;
    let blowup_radius = fit_blowup_radius(&w_max);
    Ok(OriginalRun { record: rec, blowup_radius, w_max })
}

fn analyze_field(grid: &QuadratureGrid, g: &GridField, l_max: usize) -> Result<SpectralField> {
    grid.analyze(g, l_max)
}

/// Zero of the linear fit of `w_max^{−2}` over the final approach (`w_max ≥ 10³`).
fn fit_blowup_radius(w_max: &[(f64, f64)]) -> Option<f64> {
    let last = w_max.last()?;
    if last.1 <= BLOWUP_THRESHOLD {
        return None;
    }
    let pts: Vec<(f64, f64)> = w_max.iter().filter(|p| p.1 >= 1e3).map(|p| (p.0, p.1.powi(-2))).collect();
    if pts.len() < 3 {
        return None;
    }
    let (b, a) = slope(&pts);
    Some(-a / b)
}

/// Isotropic datum `(λ(1 − r))^{−1/2}(1 + v)` at `r`: the self-similar solution with
/// blow-up radius 1 in the `w` variable.
pub fn self_similar_datum(v: &SpectralField, lambda: f64, r: f64) -> SpectralField {
    let mut w = v.clone();
    w.axpy(1.0, &SpectralField::constant(v.l_max(), 1.0));
    w.scaled((lambda * (1.0 - r)).powf(-0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_2;

    #[test]
    fn trivial_u_and_curvature() {
        let u = reconstruct_u(&SpectralField::zeros(4), 2.0, 0.5).unwrap();
        assert!(u.values().iter().all(|x| (x - 1.0).abs() < 1e-14));
        let h = mean_curvature_profile(&SpectralField::zeros(4), 2.0, 0.5).unwrap();
        assert!(h.values().iter().all(|x| (x - 4.0).abs() < 1e-13));
        assert!(reconstruct_u(&SpectralField::zeros(4), 2.0, 1.0).is_err());
    }

    #[test]
    fn trivial_residual() {
        let radii: Vec<f64> = (1..100).map(|k| k as f64 / 100.0).collect();
        assert!(trivial_solution_residual(&radii).unwrap() < 1e-12);
        assert!(radial_residual(&SpectralField::zeros(4), 2.0, &radii).unwrap() < 1e-12);
    }

    #[test]
    fn geodesic_coordinate_oracle() {
        assert_eq!(geodesic_coordinate(0.3, 0.3, 2.0).unwrap(), 0.0);
        for r in [0.1, 0.5, 0.9, 0.999, 1.0] {
            let s = radial_coordinate(0.0, r).unwrap();
            assert!((s - radial_coordinate_closed_form(r)).abs() < 1e-10, "{r}");
        }
        assert!((radial_coordinate(0.0, 1.0).unwrap() - FRAC_PI_2).abs() < 1e-10);
        assert!((radius_at(radial_coordinate_closed_form(0.7)) - 0.7).abs() < 1e-14);
    }

    #[test]
    fn cusp() {
        let c = center_cusp_check(2.0).unwrap();
        assert!((c.exponent - 4.0 / 3.0).abs() < 1e-3);
        assert!((c.coefficient - 2.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn isotropic_blowup_radius() {
        let w0 = self_similar_datum(&SpectralField::zeros(6), 2.0, 0.5);
        let run = simulate_original(&w0, 2.0, 0.5, 1.0, 0.01).unwrap();
        let rb = run.blowup_radius.unwrap();
        assert!((rb - 1.0).abs() < 1e-3, "{rb}");
    }

    #[test]
    fn flags() {
        assert!(monotonicity_operator_nonpositive(-1.0));
        assert!(!monotonicity_operator_nonpositive(2.0));
        assert!(antipodal_admissible(GroupName::O2xZ2c));
        assert!(!antipodal_admissible(GroupName::O2m));
    }
}
