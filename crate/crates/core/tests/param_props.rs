use proptest::prelude::*;
use sympfact_core::factorization::{extend_to_symplectic_with_column, unit_triangular_9};
use sympfact_core::kernel::{min_singular_value, symmetric_eigen};
use sympfact_core::param::{
    factor_to_params, pa_pack, pa_unpack, packed_len, path_interpolate, sp_from_params,
    spp_from_params, sps_from_params, SpsParams, SPP_BLOCKS, SP_BLOCKS,
};
use sympfact_core::sample::{
    normal_params, normal_symmetric, normal_vec, random_symplectic, rng_from_seed,
};
use sympfact_core::symplectic::symplecticity_check;
use sympfact_core::Mat;

fn sps_sample(seed: u64, d: usize) -> (SpsParams, Vec<f64>) {
    let mut rng = rng_from_seed(seed);
    let u = normal_vec(&mut rng, 2 * d, 1.0);
    let q = extend_to_symplectic_with_column(&u).unwrap();
    let full_blocks = (0..5).map(|_| normal_symmetric(&mut rng, d, 1.0)).collect();
    let reduced_blocks = (0..5)
        .map(|_| normal_symmetric(&mut rng, d - 1, 1.0))
        .collect();
    (
        SpsParams {
            q,
            full_blocks,
            reduced_blocks,
        },
        u,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pa_round_trip(v in (1usize..=8).prop_flat_map(|d| prop::collection::vec(-1e6f64..1e6, packed_len(d)).prop_map(move |v| (d, v)))) {
        let (d, v) = v;
        let s = pa_unpack(&v, d).unwrap();
        prop_assert_eq!(&s, &s.transpose());
        prop_assert_eq!(pa_pack(&s).unwrap(), v);
    }

    #[test]
    fn params_reach_sampled_points((seed, d) in (any::<u64>(), 1usize..=6)) {
        let h = random_symplectic(&mut rng_from_seed(seed), d, 1.0).unwrap();
        let p = factor_to_params(&unit_triangular_9(&h).unwrap().chain).unwrap();
        prop_assert_eq!(p.blocks.len(), SP_BLOCKS);
        let rebuilt = sp_from_params(&p).unwrap().product();
        let err = (&rebuilt - &h).frobenius_norm() / (1.0 + h.frobenius_norm());
        prop_assert!(err <= 1e-6, "relative error {}", err);
    }

    #[test]
    fn spp_params_give_spd_symplectic((seed, d) in (any::<u64>(), 1usize..=8)) {
        let h = spp_from_params(&normal_params(&mut rng_from_seed(seed), d, SPP_BLOCKS, 1.0)).unwrap();
        prop_assert!(h.relative_asymmetry().unwrap() <= 1e-12);
        prop_assert!(symmetric_eigen(&h.symmetrized()).unwrap().values[0] > 0.0);
        prop_assert!(symplecticity_check(&h, 1e-10).unwrap().passed);
    }

    #[test]
    fn sps_params_give_singular_points((seed, d) in (any::<u64>(), 1usize..=5)) {
        let (p, u) = sps_sample(seed, d);
        let h = sps_from_params(&p).unwrap();
        let n = 2 * d;
        let smin = min_singular_value(&(&h - &Mat::identity(n))).unwrap();
        prop_assert!(smin <= 1e-9 * (1.0 + h.frobenius_norm()), "smin {}", smin);
        let hu = h.mat_vec(&u);
        let moved: f64 = hu.iter().zip(&u).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let unorm: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!(moved <= 1e-10 * unorm, "moved {}", moved / unorm);
    }

    #[test]
    fn paths_stay_symplectic((seed, d) in (any::<u64>(), 1usize..=10)) {
        let mut rng = rng_from_seed(seed);
        let p0 = normal_params(&mut rng, d, SP_BLOCKS, 1.0);
        let p1 = normal_params(&mut rng, d, SP_BLOCKS, 1.0);
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let h = path_interpolate(&p0, &p1, t).unwrap().product();
            let r = symplecticity_check(&h, 1e-10).unwrap();
            prop_assert!(r.passed, "t = {}: residual {}", t, r.relative_residual);
        }
    }
}
