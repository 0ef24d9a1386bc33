use pearcey::cusp_kernel::kcusp;
use pearcey::finite_ensemble::{sample_eigenvalues, EnsembleParams};
use pearcey::pearcey_fn::{pairing, theta, QSolution};
use pearcey::rh_model::model_m;
use pearcey::{make_curve, C64};
use proptest::prelude::*;

fn off_axis() -> impl Strategy<Value = C64> {
    (-5.0..5.0f64, 0.05..5.0f64, any::<bool>()).prop_map(|(x, y, up)| C64::new(x, if up { y } else { -y }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn branch_vieta(a in 0.3..2.5f64, z in off_axis()) {
        let cv = make_curve(a).unwrap();
        let w = cv.w_branches(z).unwrap().w;
        let s = 1.0 + z.norm() * (1.0 + cv.c * cv.c);
        prop_assert!((w[0] + w[1] + w[2] - z).norm() < 1e-10 * s);
        prop_assert!((w[0] * w[1] * w[2] + z * cv.c * cv.c).norm() < 1e-10 * s);
    }

    #[test]
    fn model_m_unimodular_and_orthogonal(a in 0.3..2.5f64, z in off_axis()) {
        let m = model_m(&make_curve(a).unwrap(), z).unwrap().entries;
        prop_assert!((m.det() - 1.0).norm() < 1e-9);
        prop_assert!((m.inverse().unwrap() - m.transpose()).norm() < 1e-8 * m.norm().powi(2).max(1.0));
    }

    #[test]
    fn theta_sum_vanishes(z in off_axis(), b in -3.0..3.0f64) {
        let s: C64 = (1..=3).map(|k| theta(z, C64::new(b, 0.0), k)).sum();
        prop_assert!(s.norm() < 1e-11 * (1.0 + z.norm().powf(4.0 / 3.0)));
    }

    #[test]
    fn kernel_point_symmetry(x in -4.0..4.0f64, y in -4.0..4.0f64, b in -1.5..1.5f64) {
        let k = kcusp(x, y, b).unwrap();
        let km = kcusp(-x, -y, b).unwrap();
        prop_assert!((k - km).abs() < 1e-9 * (1.0 + k.abs()));
    }

    #[test]
    fn pearcey_bracket_is_one(x in -4.0..4.0f64, b in -1.5..1.5f64) {
        let v = pairing(0, QSolution::Pearcey, C64::new(b, 0.0), C64::new(x, 0.0)).unwrap();
        let v0 = pairing(0, QSolution::Pearcey, C64::new(b, 0.0), C64::new(0.0, 0.0)).unwrap();
        prop_assert!((v - v0).norm() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sampling_is_seed_deterministic(seed in any::<u64>(), half in 1usize..8, a in 0.2..2.5f64) {
        let p = EnsembleParams::new(2 * half, a).unwrap();
        let s1 = sample_eigenvalues(p, seed).unwrap();
        let s2 = sample_eigenvalues(p, seed).unwrap();
        prop_assert_eq!(s1.eigenvalues.len(), 2 * half);
        prop_assert!(s1.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(s1.eigenvalues.iter().zip(&s2.eigenvalues).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
