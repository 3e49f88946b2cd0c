use psc_core::equilibrium::{branch_point_at, Equilibrium};
use psc_core::lambda_ell;
use psc_core::stability::{homotopy_zero_counts, morse_equivalence_check, morse_index, quasilinear_max_imaginary, DEFAULT_ZERO_TOL};
use psc_core::symmetry::{GroupName, IsotropyDescriptor};

/// Equilibrium at `|s| = 0.2` on the side `λ < λ_ℓ` (`below`) or `λ > λ_ℓ`.
fn equilibrium(ell: usize, g: GroupName, below: bool, l_max: usize) -> Equilibrium {
    let k = IsotropyDescriptor::new(g, ell, l_max).unwrap();
    let lam0 = lambda_ell(ell);
    let mut p = branch_point_at(&k, 0.2, 0.01).unwrap();
    if (p.lambda < lam0) != below {
        p = branch_point_at(&k, -0.2, 0.01).unwrap();
    }
    assert_eq!(p.lambda < lam0, below);
    Equilibrium { lambda: p.lambda, v: p.v, group: g, residual_norm: 0.0 }
}

#[test]
fn pitchfork_indices() {
    for (ell, g, want) in [(1, GroupName::O2m, 2), (3, GroupName::O2m, 12), (3, GroupName::Om, 10), (3, GroupName::D6d, 13)] {
        let eq = equilibrium(ell, g, true, 16);
        let (i, nz) = morse_index(&eq, DEFAULT_ZERO_TOL).unwrap();
        assert_eq!((i, nz), (want, g.orbit_dim()), "{ell} {g:?}");
        assert!(morse_equivalence_check(eq.lambda, &eq.v).unwrap());
    }
}

#[test]
fn transcritical_indices_exchange() {
    // Nonorbit center eigenvalues change sign together across the bifurcation point.
    for (ell, g) in [(2, GroupName::O2xZ2c), (4, GroupName::O2xZ2c), (4, GroupName::OxZ2c)] {
        let mut total = 0;
        for below in [true, false] {
            let eq = equilibrium(ell, g, below, 16);
            let (i, nz) = morse_index(&eq, DEFAULT_ZERO_TOL).unwrap();
            assert_eq!(nz, g.orbit_dim());
            assert!(i >= ell * ell);
            assert!(morse_equivalence_check(eq.lambda, &eq.v).unwrap());
            total += i - ell * ell;
        }
        assert_eq!(total, 2 * ell + 1 - g.orbit_dim(), "{ell} {g:?}");
    }
}

#[test]
fn homotopy_and_reality() {
    let eq = equilibrium(2, GroupName::O2xZ2c, false, 10);
    let z = homotopy_zero_counts(eq.lambda, &eq.v, &[0.0, 0.25, 0.5, 0.75, 1.0]).unwrap();
    assert!(z.iter().all(|n| *n == z[0]), "{z:?}");
    assert!(quasilinear_max_imaginary(eq.lambda, &eq.v).unwrap() < 1e-10);
}
