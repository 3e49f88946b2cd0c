use psc_core::dynamics::{heteroclinic_experiment, strong_stable_decay, HeteroclinicParams, CONNECTIONS, Side};
use psc_core::symmetry::GroupName;

#[test]
fn decay_rates_match_spectral_gap() {
    for (lambda, g, ell) in [(1.0, GroupName::O2m, 1), (3.0, GroupName::O2xZ2c, 2)] {
        let m = strong_stable_decay(lambda, g, ell, 0.1, 8).unwrap();
        assert!((m.gap - lambda).abs() < 1e-10);
        assert!((m.rate - m.gap).abs() < 0.2 * m.gap, "{} vs {}", m.rate, m.gap);
    }
}

#[test]
fn low_degree_connections_with_trivial_equilibrium() {
    for c in CONNECTIONS.iter().filter(|c| c.ell <= 2) {
        let mut p = HeteroclinicParams::new(c.ell);
        p.l_max = 12;
        let out = heteroclinic_experiment(c, &p).unwrap();
        let i = out.realized.unwrap_or_else(|| panic!("{c:?}: {:?}", out.attempts));
        assert!(out.attempts[i].distance < 1e-6);
        let want = if c.side == Side::Above { "O2xZ2c" } else { "0" };
        assert_eq!(out.target_id().unwrap().trim_end_matches(['+', '-']), want);
    }
}

#[test]
fn departures_toward_a_zero_of_chi_stop() {
    let mut p = HeteroclinicParams::new(1);
    p.l_max = 8;
    let out = heteroclinic_experiment(&CONNECTIONS[0], &p).unwrap();
    assert!(out.realized.is_some());
    assert!(out.attempts.iter().any(|a| a.terminal == Some(psc_core::dynamics::EventKind::PositivityViolation)));
}
