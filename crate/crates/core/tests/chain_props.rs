use proptest::prelude::*;
use rand::Rng;
use sympfact_core::kernel::{det, inverse};
use sympfact_core::sample::{normal_mat, normal_symmetric, random_symplectic, rng_from_seed};
use sympfact_core::symplectic::{
    chain_inverse, chain_product, chain_transpose, symplecticity_check, DiagonalFactor, Factor,
    FactorChain, UnitTriangularFactor,
};
use sympfact_core::Mat;

/// Random chain of `len` factors with `N(0, 1)` symmetric blocks and at most
/// one diagonal factor `I + N(0, 0.3²)`.
fn random_chain(seed: u64, d: usize, len: usize) -> FactorChain {
    let mut rng = rng_from_seed(seed);
    let diag_at = if rng.random_bool(0.5) {
        Some(rng.random_range(0..len))
    } else {
        None
    };
    let mut chain = FactorChain::new(d);
    for k in 0..len {
        let f: Factor = if Some(k) == diag_at {
            let p = &Mat::identity(d) + &normal_mat(&mut rng, d, d, 0.3);
            match DiagonalFactor::new(p) {
                Ok(f) => f.into(),
                Err(_) => Factor::upper(Mat::zeros(d, d)).unwrap(),
            }
        } else {
            let s = normal_symmetric(&mut rng, d, 1.0);
            if rng.random_bool(0.5) {
                UnitTriangularFactor::upper(s).unwrap().into()
            } else {
                UnitTriangularFactor::lower(s).unwrap().into()
            }
        };
        chain.push(f).unwrap();
    }
    chain
}

fn chain_case() -> impl Strategy<Value = FactorChain> {
    (any::<u64>(), 1usize..=25, 1usize..=12).prop_map(|(seed, d, len)| random_chain(seed, d, len))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_factor_is_symplectic(c in chain_case()) {
        for f in c.factors() {
            let m = f.to_mat();
            let report = symplecticity_check(&m, 1e-13).unwrap();
            prop_assert!(report.passed, "residual {}", report.relative_residual);
        }
    }

    #[test]
    fn inverse_chain_inverts(c in chain_case()) {
        let h = chain_product(&c);
        let hinv = chain_product(&chain_inverse(&c));
        let n = h.rows();
        let err = (&(&hinv * &h) - &Mat::identity(n)).frobenius_norm();
        let scale = 1.0 + h.frobenius_norm().powi(2);
        prop_assert!(err / scale <= 1e-9, "relative error {}", err / scale);
    }

    #[test]
    fn transpose_chain_transposes(c in chain_case()) {
        let h = chain_product(&c);
        let ht = chain_product(&chain_transpose(&c));
        let err = (&ht - &h.transpose()).frobenius_norm() / (1.0 + h.frobenius_norm());
        prop_assert!(err <= 1e-10, "relative error {}", err);
    }

    #[test]
    fn chains_have_unit_determinant((seed, d, len) in (any::<u64>(), 1usize..=10, 1usize..=12)) {
        let h = chain_product(&random_chain(seed, d, len));
        let det_h = det(&h).unwrap();
        prop_assert!((det_h - 1.0).abs() <= 1e-6, "det {}", det_h);
    }
}

#[test]
fn closure_under_products_transposes_and_inverses() {
    let mut rng = rng_from_seed(20);
    for k in 0..100 {
        let d = 1 + k % 5;
        let a = random_symplectic(&mut rng, d, 0.5).unwrap();
        let b = random_symplectic(&mut rng, d, 0.5).unwrap();
        for m in [&a * &b, a.transpose(), inverse(&a).unwrap()] {
            let r = symplecticity_check(&m, 1e-10).unwrap();
            assert!(r.passed, "sample {k}: residual {}", r.relative_residual);
        }
    }
}
