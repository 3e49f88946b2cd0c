use psc_core::equilibrium::branch_point_at;
use psc_core::geometry::{
    mean_curvature_exponent, radial_residual, self_similar_datum, simulate_original, MetricProfile,
};
use psc_core::spectral::SpectralField;
use psc_core::symmetry::{GroupName, IsotropyDescriptor};

fn branch(ell: usize, g: GroupName, s: f64, l_max: usize) -> (f64, SpectralField) {
    let k = IsotropyDescriptor::new(g, ell, l_max).unwrap();
    let p = branch_point_at(&k, s, 0.01).unwrap();
    (p.lambda, p.v)
}

fn direction(w: &SpectralField) -> SpectralField {
    w.scaled(1.0 / w.norm())
}

#[test]
fn branch_profiles_solve_radial_equation() {
    let radii: Vec<f64> = (1..20).map(|k| k as f64 / 20.0).collect();
    for (ell, g) in [(1, GroupName::O2m), (2, GroupName::O2xZ2c), (3, GroupName::Om)] {
        let (lam, v) = branch(ell, g, 0.2, 24);
        let res = radial_residual(&v, lam, &radii).unwrap();
        assert!(res < 1e-8, "{ell} {g:?}: {res}");
        let m = MetricProfile::build(&v, lam, &radii).unwrap();
        assert!(m.min_g_ss() > 0.0);
        let radii_h: Vec<f64> = (1..8).map(|k| 1.0 - 10f64.powi(-k)).collect();
        let p = mean_curvature_exponent(&v, lam, &radii_h).unwrap();
        assert!((p - 0.5).abs() < 0.025, "{p}");
    }
}

#[test]
fn self_similar_data_keep_their_shape() {
    let (lam, v) = branch(2, GroupName::O2xZ2c, 0.2, 10);
    let w0 = self_similar_datum(&v, lam, 0.5);
    let run = simulate_original(&w0, lam, 0.5, 1.5, 0.01).unwrap();
    let rb = run.blowup_radius.unwrap();
    assert!((rb - 1.0).abs() < 1e-3, "{rb}");
    let end = direction(run.record.snapshots.last().unwrap());
    let gap = end.sub(&direction(&w0)).norm();
    assert!(gap < 1e-3, "{gap}");
}

#[test]
fn anisotropy_grows_above_threshold() {
    let l_max = 8;
    let lam = 6.3;
    let mut w0 = self_similar_datum(&SpectralField::zeros(l_max), lam, 0.5);
    let iso = w0.get(0, 0);
    w0.set(2, 0, 0.01 * iso);
    let run = simulate_original(&w0, lam, 0.5, 1.5, 0.01).unwrap();
    let ratio = |w: &SpectralField| w.get(2, 0) / w.get(0, 0);
    let end = run.record.snapshots.last().unwrap();
    assert!(ratio(end) > 2.0 * ratio(&w0), "{} -> {}", ratio(&w0), ratio(end));
}
