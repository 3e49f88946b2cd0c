use proptest::prelude::*;
use psc_core::coupling::real_triple_product;
use psc_core::dynamics::{flow_step, FlowVariant};
use psc_core::equilibrium::equilibrium_residual;
use psc_core::galerkin::Galerkin;
use psc_core::spectral::{laplacian_apply, n_coeffs, real_ylm, QuadratureGrid, SpectralField};
use psc_core::stability::{linearized_spectrum, Operator};
use psc_core::symmetry::{wigner_d_rotate, Group, GroupName};

fn field(l_max: usize, amp: f64) -> impl Strategy<Value = SpectralField> {
    prop::collection::vec(-1.0..1.0f64, n_coeffs(l_max)).prop_map(move |c| {
        let mut c: Vec<f64> = c.into_iter().enumerate().map(|(i, x)| x / (1.0 + i as f64).sqrt()).collect();
        let n = c.iter().map(|x| x.abs()).sum::<f64>().max(1e-300);
        c.iter_mut().for_each(|x| *x *= amp / n);
        SpectralField::from_coeffs(l_max, c).unwrap()
    })
}

/// Low-degree field embedded at `l_max`, so the nonpolynomial quadratures are resolved.
fn smooth_field(degree: usize, l_max: usize, amp: f64) -> impl Strategy<Value = SpectralField> {
    field(degree, amp).prop_map(move |u| u.resized(l_max))
}

fn angles() -> impl Strategy<Value = (f64, f64, f64, bool)> {
    (0.0..6.3f64, 0.0..3.15f64, 0.0..6.3f64, any::<bool>())
}

fn max_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    a.coeffs().iter().zip(b.coeffs()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_round_trip_and_parseval(l_max in 0usize..=32, seed in prop::collection::vec(-1.0..1.0f64, 1..=1089)) {
        let c: Vec<f64> = (0..n_coeffs(l_max)).map(|i| seed[i % seed.len()] * (1.0 + (i / seed.len()) as f64).recip()).collect();
        let u = SpectralField::from_coeffs(l_max, c).unwrap();
        let grid = QuadratureGrid::new(l_max);
        let g = grid.synthesize(&u).unwrap();
        let back = grid.analyze(&g, l_max).unwrap();
        prop_assert!(max_diff(&u, &back) < 1e-12);
        let l2 = grid.integrate(&g.zip_map(&g, |a, b| a * b));
        let n2 = u.dot(&u);
        prop_assert!((l2 - n2).abs() <= 1e-12 * n2.max(1e-300));
    }

    #[test]
    fn laplacian_is_symmetric(u in field(10, 1.0), w in field(10, 1.0)) {
        let a = laplacian_apply(&u).dot(&w);
        let b = u.dot(&laplacian_apply(&w));
        prop_assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
        prop_assert!(laplacian_apply(&u).dot(&u) <= 0.0);
    }

    #[test]
    fn triple_products_match_quadrature(l1 in 0usize..=8, l2 in 0usize..=8, l3 in 0usize..=8, a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64) {
        let m = |l: usize, t: f64| (t * (2 * l + 1) as f64).floor() as i64 - l as i64;
        let (m1, m2, m3) = (m(l1, a), m(l2, b), m(l3, c));
        let exact = real_triple_product(l1, m1, l2, m2, l3, m3).unwrap();
        let grid = QuadratureGrid::new(8);
        let f = grid.field_from_fn(|th, ph| real_ylm(l1, m1, th, ph) * real_ylm(l2, m2, th, ph) * real_ylm(l3, m3, th, ph));
        prop_assert!((exact - grid.integrate(&f)).abs() < 1e-11);
        let triangle = l1 + l2 >= l3 && l2 + l3 >= l1 && l3 + l1 >= l2;
        if !triangle || (l1 + l2 + l3) % 2 == 1 {
            prop_assert_eq!(exact, 0.0);
        }
    }

    #[test]
    fn rotations_are_isometries_commuting_with_laplacian(u in field(8, 1.0), (al, be, ga, inv) in angles()) {
        let r = wigner_d_rotate(&u, al, be, ga, inv);
        prop_assert!((r.norm() - u.norm()).abs() < 1e-12);
        let a = laplacian_apply(&r);
        let b = wigner_d_rotate(&laplacian_apply(&u), al, be, ga, inv);
        prop_assert!(max_diff(&a, &b) < 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn projectors_are_orthogonal(u in field(6, 1.0), w in field(6, 1.0), k in 0usize..6) {
        let g = [GroupName::O2m, GroupName::O2xZ2c, GroupName::Om, GroupName::D6d, GroupName::OxZ2c, GroupName::D4xZ2c][k];
        let p = Group::new(g).projector(6);
        let pu = p.apply(&u);
        prop_assert!(max_diff(&p.apply(&pu), &pu) < 1e-12);
        prop_assert!((pu.dot(&w) - u.dot(&p.apply(&w))).abs() < 1e-12);
    }

    #[test]
    fn residual_and_flow_are_equivariant(u in smooth_field(3, 12, 0.3), (al, be, ga, inv) in angles(), lam in 0.5..8.0f64) {
        let rot = |x: &SpectralField| wigner_d_rotate(x, al, be, ga, inv);
        let a = equilibrium_residual(lam, &rot(&u)).unwrap();
        let b = rot(&equilibrium_residual(lam, &u).unwrap());
        prop_assert!(max_diff(&a, &b) < 1e-10);
        let model = Galerkin::full(12);
        for variant in [FlowVariant::Quasilinear, FlowVariant::Semilinear] {
            let s1 = model.to_field(&flow_step(&model, lam, &model.from_field(&rot(&u)), 1e-2, variant).unwrap());
            let s2 = rot(&model.to_field(&flow_step(&model, lam, u.coeffs(), 1e-2, variant).unwrap()));
            prop_assert!(max_diff(&s1, &s2) < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn spectrum_is_conjugation_invariant(u in smooth_field(2, 8, 0.3), (al, be, ga, inv) in angles(), lam in 0.5..8.0f64) {
        let r = wigner_d_rotate(&u, al, be, ga, inv);
        for which in [Operator::Semilinear, Operator::Quasilinear] {
            let a = linearized_spectrum(lam, &u, which).unwrap();
            let b = linearized_spectrum(lam, &r, which).unwrap();
            for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
                prop_assert!((x - y).abs() < 1e-10 * (1.0 + x.abs()));
            }
        }
    }
}
