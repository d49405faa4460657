use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spectral_rg::fock::{MomentumGrid, TruncatedFockBasis};
use spectral_rg::kernel::{
    assemble_hamiltonian, extract_kernels, family_from_json, family_to_json, kernel_norm, norm_mu_s, KernelFamily,
    NormParams, NormVariant,
};
use spectral_rg::linalg::{max_abs, C64};
use spectral_rg::rg::scale_kernels;

fn setup() -> (MomentumGrid, TruncatedFockBasis) {
    let g = MomentumGrid::new(0.5, 5).unwrap();
    let b = TruncatedFockBasis::build(&g, 2, 2.0, 1).unwrap();
    (g, b)
}

fn family(seed: u64, scale: f64, xi: f64) -> KernelFamily {
    let (g, _) = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    KernelFamily::random(&g, NormParams::new(0.5, 2, xi).unwrap(), scale, false, &mut rng).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn smoothness_norms_are_monotone(seed in any::<u64>()) {
        let f = family(seed, 1.0, 1.0);
        for w in f.kernels() {
            let n0 = norm_mu_s(w, f.grid(), f.rgrid(), 0.5, 0).unwrap();
            let n1 = norm_mu_s(w, f.grid(), f.rgrid(), 0.5, 1).unwrap();
            let n2 = norm_mu_s(w, f.grid(), f.rgrid(), 0.5, 2).unwrap();
            prop_assert!(n0 <= n1 && n1 <= n2);
        }
    }

    #[test]
    fn smaller_xi_dominates(seed in any::<u64>(), xi in 0.05f64..1.0, shrink in 0.1f64..1.0) {
        let f = family(seed, 1.0, xi);
        let big = kernel_norm(&f, NormVariant::FamilyXi).unwrap();
        let g = f.clone().with_params(NormParams::new(0.5, 2, xi * shrink).unwrap());
        prop_assert!(kernel_norm(&g, NormVariant::FamilyXi).unwrap() >= big);
    }

    #[test]
    fn assembly_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let (_, basis) = setup();
        let (f1, f2) = (family(s1, 1.0, 1.0), family(s2, 1.0, 1.0));
        let (ca, cb) = (C64::new(a, 0.3), C64::new(b, -0.1));
        let lhs = assemble_hamiltonian(&f1.combine(ca, &f2, cb).unwrap(), &basis).unwrap();
        let rhs = assemble_hamiltonian(&f1, &basis).unwrap().matrix() * ca
            + assemble_hamiltonian(&f2, &basis).unwrap().matrix() * cb;
        prop_assert!(max_abs(&(lhs.matrix() - rhs)) < 1e-12);
    }

    #[test]
    fn extraction_inverts_assembly(seed in any::<u64>(), scale in 0.01f64..3.0) {
        let (_, basis) = setup();
        let f = family(seed, scale, 1.0);
        let h = assemble_hamiltonian(&f, &basis).unwrap();
        let ex = extract_kernels(&h, f.params()).unwrap();
        prop_assert!(ex.sampled_difference(&f) < 1e-10 * scale.max(1.0));
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let f = family(seed, 1.0, 0.5);
        let back = family_from_json(&family_to_json(&f)).unwrap();
        prop_assert_eq!(back.max_abs_difference(&f), 0.0);
    }

    #[test]
    fn scaling_is_linear_and_contracts(seed in any::<u64>()) {
        let f = family(seed, 1.0, 1.0);
        let s = scale_kernels(&f, 0.5).unwrap();
        let twice = scale_kernels(&f.combine(C64::new(2.0, 0.0), &f, C64::new(0.0, 0.0)).unwrap(), 0.5).unwrap();
        let doubled = s.combine(C64::new(2.0, 0.0), &s, C64::new(0.0, 0.0)).unwrap();
        prop_assert!(twice.max_abs_difference(&doubled) < 1e-14);
        for (a, b) in s.kernels().iter().zip(f.kernels()) {
            let (m, n) = a.order();
            let lhs = spectral_rg::kernel::norm_mu(a, s.grid(), s.rgrid(), 0.5).unwrap();
            let rhs = spectral_rg::kernel::norm_mu(b, f.grid(), f.rgrid(), 0.5).unwrap();
            prop_assert!(lhs <= 0.5f64.powf((m + n) as f64 - 0.5) * rhs * (1.0 + 1e-12));
        }
    }
}
