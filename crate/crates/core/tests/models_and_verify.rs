use proptest::prelude::*;
use spectral_rg::fock::{build_dilation_b, build_hf, MomentumGrid, TruncatedFockBasis};
use spectral_rg::linalg::{self, C64};
use spectral_rg::models::{build_nelson, initial_audit, initial_decimation, kato_constants, NelsonConfig};
use spectral_rg::rg::BisectOptions;
use spectral_rg::verify::{bump, decay_scan, exact_diag, mourre_check, window_schedule, WeightedResolvent};

fn toy_basis() -> TruncatedFockBasis {
    let g = MomentumGrid::new(0.5, 6).unwrap();
    TruncatedFockBasis::build(&g, 2, 2.0, 2).unwrap()
}

#[test]
fn decoupled_model_is_a_tensor_sum() {
    let b = toy_basis();
    let m = build_nelson(&NelsonConfig::toy(0.0, 0.5), &b).unwrap();
    let s = exact_diag(&m.h).unwrap();
    let mut expected: Vec<f64> = (0..b.dim()).map(|i| b.energy(i) + [0.0, 1.0][b.particle(i)]).collect();
    expected.sort_by(f64::total_cmp);
    for (a, e) in s.values.iter().zip(&expected) {
        assert!((a - e).abs() < 1e-14);
    }
}

#[test]
fn kato_constants_are_linear_in_g() {
    let b = toy_basis();
    let k1 = kato_constants(&build_nelson(&NelsonConfig::toy(0.01, 0.5), &b).unwrap());
    let k2 = kato_constants(&build_nelson(&NelsonConfig::toy(0.02, 0.5), &b).unwrap());
    assert!((k2.a / k1.a - 2.0).abs() < 1e-12);
}

#[test]
fn initial_decimation_refuses_outside_window() {
    let b = toy_basis();
    let m = build_nelson(&NelsonConfig::toy(0.02, 0.5), &b).unwrap();
    let p = BisectOptions::toy(0.5).params;
    assert!(initial_decimation(&m, 0.6, 1.0, p).is_err());
    let audit = initial_audit(&m, 1.0, p, 3, &[-0.2, -0.01, 0.3]).unwrap();
    assert!(audit.counts_agree);
    assert!(audit.max_reduced_residual() < 1e-10);
}

#[test]
fn free_field_mourre_margin() {
    let b = toy_basis();
    let hf = build_hf(&b);
    let rep = mourre_check(&hf, &hf, 1.0 / 18.0).unwrap();
    assert!(rep.margin_ratio >= -0.05);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn weighted_resolvent_obeys_unitarity(g in 0.0f64..0.05, lambda in -0.2f64..0.5, eps in 1e-3f64..1.0) {
        let b = toy_basis();
        let m = build_nelson(&NelsonConfig::toy(g, 0.5), &b).unwrap();
        let wr = WeightedResolvent::new(&m.h, &build_dilation_b(&b).unwrap(), 0.75).unwrap();
        prop_assert!(wr.value(lambda, eps).unwrap() <= (1.0 / eps) * (1.0 + 1e-12));
    }

    #[test]
    fn decay_starts_at_static_value(g in 0.0f64..0.05, lo in 0.0f64..0.2, width in 0.2f64..0.6) {
        let b = toy_basis();
        let m = build_nelson(&NelsonConfig::toy(g, 0.5), &b).unwrap();
        let wr = WeightedResolvent::new(&m.h, &build_dilation_b(&b).unwrap(), 1.0).unwrap();
        let rep = match decay_scan(&wr, (lo, lo + width), 5) {
            Ok(r) => r,
            Err(_) => return Ok(()),
        };
        let f = bump(lo, lo + width);
        let direct = linalg::op_norm(&wr.sandwich(|e| C64::new(f(e), 0.0)));
        prop_assert!((rep.value_t0 - direct).abs() <= 1e-12);
        prop_assert!((rep.static_value - direct).abs() <= 1e-12);
    }

    #[test]
    fn windows_cover_their_interval(e in -1.0f64..1.0, p in 1u32..4, rho0 in 0.1f64..1.0, n in 1usize..8) {
        let rho = 0.5f64.powi(p as i32);
        let s = window_schedule(e, rho, rho0, n).unwrap();
        prop_assert_eq!(s.covered.1, e + rho0 * (1.0 / 18.0));
        for w in s.windows.windows(2) {
            prop_assert!(w[1].hi >= w[0].lo);
        }
    }

    #[test]
    fn oracle_residuals_are_small(g in 0.0f64..0.1) {
        let b = toy_basis();
        let m = build_nelson(&NelsonConfig::toy(g, 0.5), &b).unwrap();
        let s = exact_diag(&m.h).unwrap();
        prop_assert!(s.max_residual <= 1e-10 * m.h.norm().max(1.0));
    }
}
