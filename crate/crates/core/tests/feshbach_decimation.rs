use proptest::prelude::*;
use spectral_rg::feshbach::{feshbach_map, isospectrality_suite, random_instance, InstanceKind, Partition, Split};
use spectral_rg::fock::{build_hf, MomentumGrid, TruncatedFockBasis};
use spectral_rg::linalg::{self, max_abs};

fn kind(i: usize) -> InstanceKind {
    InstanceKind::ALL[i % InstanceKind::ALL.len()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn partition_of_unity(nk in 3usize..8, nmax in 1usize..4, p in 0i32..4) {
        let g = MomentumGrid::new(0.5, nk).unwrap();
        let b = TruncatedFockBasis::build(&g, nmax, 2.0, 1).unwrap();
        let part = Partition::smooth(&b, 0.5f64.powi(p)).unwrap();
        prop_assert!(part.unity_defect() <= 1e-12);
        let hf = build_hf(&b);
        let chi = part.chi_op();
        let comm = hf.commutator(&chi).unwrap();
        prop_assert_eq!(max_abs(comm.matrix()), 0.0);
    }

    #[test]
    fn random_instances_are_isospectral(seed in any::<u64>(), k in 0usize..5) {
        let inst = random_instance(seed, kind(k), 60).unwrap();
        let rep = isospectrality_suite(&inst.h, &Split::Diagonal, &inst.partition).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep.failures);
    }

    #[test]
    fn hard_cutoff_gives_schur_complement(seed in any::<u64>()) {
        let inst = random_instance(seed, InstanceKind::PositiveDefinite, 60).unwrap();
        let part = Partition::hard(inst.h.basis(), inst.partition.scale()).unwrap();
        prop_assume!(!part.range().is_empty() && !part.bar_range().is_empty());
        let fr = match feshbach_map(&inst.h, &Split::Diagonal, &part) {
            Ok(fr) => fr,
            Err(_) => return Ok(()),
        };
        let (p, s) = (part.range(), part.bar_range());
        let h = inst.h.matrix();
        let schur = linalg::submatrix(h, &p, &p)
            - linalg::submatrix(h, &p, &s)
                * linalg::inverse(&linalg::submatrix(h, &s, &s)).unwrap()
                * linalg::submatrix(h, &s, &p);
        prop_assert!(max_abs(&(fr.f_on_range() - schur)) < 1e-10);
    }
}
