use mmp_core::io::presets::random_field;
use mmp_core::lp;
use mmp_core::monitors::window_integral;
use mmp_core::spectral::{forward_transform, inverse_transform, Grid, PhysicalVectorField, SpectralVectorField};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn field(n: usize, seed: u64, band: i64, solenoidal: bool) -> SpectralVectorField {
    let g = Grid::periodic(n).unwrap();
    random_field(&g, &mut ChaCha8Rng::seed_from_u64(seed), band, solenoidal)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parseval(seed in any::<u64>(), n in prop::sample::select(vec![8usize, 10, 12]), amp in 1e-3f64..1e3) {
        let f = field(n, seed, (n / 2) as i64, false).scaled(amp);
        let phys = inverse_transform(&f).unwrap();
        let lhs = phys.mean_square();
        let rhs = f.l2_norm().powi(2);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn round_trip_from_physical_space(values in prop::collection::vec(-1e3f64..1e3, 3 * 512)) {
        let g = Grid::periodic(8).unwrap();
        let comps = [values[..512].to_vec(), values[512..1024].to_vec(), values[1024..].to_vec()];
        let p = PhysicalVectorField::from_components(&g, comps).unwrap();
        let back = inverse_transform(&forward_transform(&p)).unwrap();
        for c in 0..3 {
            for (a, b) in back.component(c).iter().zip(p.component(c)) {
                prop_assert!((a - b).abs() <= 1e-12 * 1e3);
            }
        }
    }

    #[test]
    fn leray_is_an_orthogonal_projection(seed in any::<u64>()) {
        let f = field(8, seed, 4, false);
        let p = f.leray_project();
        prop_assert!(p.leray_project().max_abs_diff(&p).unwrap() <= 1e-14);
        prop_assert!(f.sub(&p).unwrap().inner(&p).unwrap().abs() <= 1e-13);
        prop_assert!(p.divergence_defect() <= 1e-13);
        prop_assert!(p.l2_norm() <= f.l2_norm() * (1.0 + 1e-14));
    }

    #[test]
    fn lambda_exponents_compose(seed in any::<u64>(), s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let f = field(8, seed, 3, false);
        let two_step = f.lambda_s(s).lambda_s(t);
        let one_step = f.lambda_s(s + t);
        prop_assert!(two_step.max_abs_diff(&one_step).unwrap() <= 1e-12 * one_step.max_abs().max(1.0));
    }

    #[test]
    fn curl_is_solenoidal(seed in any::<u64>()) {
        let f = field(10, seed, 5, false);
        prop_assert!(f.curl().divergence().max_abs() <= 1e-12);
    }

    #[test]
    fn partition_of_unity(r in 1e-6f64..1e4) {
        let total = lp::chi(r) + (0..64).map(|j| lp::phi(r / 2f64.powi(j))).sum::<f64>();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        let nonzero = (-64..64).filter(|&j| lp::phi(r / 2f64.powi(j)) > 0.0).count();
        prop_assert!(nonzero <= 2);
    }

    #[test]
    fn window_integrals_add(split in 0.0f64..1.0, values in prop::collection::vec(0.0f64..10.0, 11)) {
        let t: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let whole = window_integral(&t, &values, 0.0, 1.0).unwrap();
        let parts = window_integral(&t, &values, 0.0, split).unwrap() + window_integral(&t, &values, split, 1.0).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-12 * whole.max(1.0));
    }

    #[test]
    fn reconstruction(seed in any::<u64>()) {
        let f = field(16, seed, 8, false);
        let p = lp::DyadicProfile::new(f.grid());
        let rec = lp::BlockDecomposition::new(&f, &p).reconstruct();
        prop_assert!(rec.sub(&f).unwrap().l2_norm() <= 1e-11 * f.l2_norm());
    }
}
