use proptest::prelude::*;

use tbn_core::hilbert::{brute_force_hilbert, hilbert_basis, HilbertBudget, MatrixRepresentation};
use tbn_core::ipmodel::{build, BuildOptions};
use tbn_core::solver::{brute_force_stable, stable_configs, EnumerateOptions, StableOptions};
use tbn_core::{Count, Monomer, SiteType, Tbn};

const NAMES: [&str; 5] = ["a", "b", "c", "d", "e"];

type RawMonomer = (Vec<(usize, bool)>, u64);

fn raw_tbn() -> impl Strategy<Value = Vec<RawMonomer>> {
    let monomer = (
        prop::collection::vec((0..NAMES.len(), any::<bool>()), 1..=3),
        1u64..=3,
    );
    prop::collection::vec(monomer, 1..=4).prop_filter("at most 10 instances", |ms| {
        ms.iter().map(|(_, c)| c).sum::<u64>() <= 10
    })
}

fn to_tbn(raw: &[RawMonomer]) -> Option<Tbn> {
    let entries = raw.iter().map(|(sites, count)| {
        let sites = sites
            .iter()
            .map(|&(k, starred)| SiteType::new(NAMES[k], starred).unwrap());
        (Monomer::new(sites).unwrap(), Count::Finite(*count))
    });
    Tbn::new(entries).ok().map(|(t, _)| t)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stable_configs_match_the_oracle(raw in raw_tbn()) {
        let Some(t) = to_tbn(&raw) else { return Ok(()) };
        let expected = brute_force_stable(&t, 3).unwrap();
        let got = stable_configs(&t, &StableOptions::default()).unwrap();
        prop_assert!(got.complete);
        prop_assert_eq!(got.optimum, expected.optimum);
        prop_assert_eq!(&got.solutions, &expected.solutions);
        for pc in &got.solutions {
            prop_assert!(pc.polymers().windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(pc.is_saturated(&t));
            prop_assert_eq!(pc.merge_count(), got.optimum);
        }
        let mut sorted = got.solutions.clone();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), got.solutions.len());
    }

    #[test]
    fn thread_count_does_not_change_results(raw in raw_tbn()) {
        let Some(t) = to_tbn(&raw) else { return Ok(()) };
        let one = stable_configs(&t, &StableOptions::default()).unwrap();
        let many = stable_configs(&t, &StableOptions {
            enumerate: EnumerateOptions { use_lp: false, threads: 4 },
            ..Default::default()
        }).unwrap();
        prop_assert_eq!(one.optimum, many.optimum);
        prop_assert_eq!(one.solutions, many.solutions);
    }

    #[test]
    fn solutions_round_trip_through_the_model(raw in raw_tbn()) {
        let Some(t) = to_tbn(&raw) else { return Ok(()) };
        let r = stable_configs(&t, &StableOptions::default()).unwrap();
        if r.bound == 0 {
            return Ok(());
        }
        let model = build(&t, r.bound, &BuildOptions::enumeration(r.optimum)).unwrap();
        for pc in &r.solutions {
            let x = model.encode(pc).unwrap();
            let verdict = model.program().check(&x);
            prop_assert!(verdict.is_ok(), "{} {:?} {:?}", tbn_core::render_tbn(&t), pc, verdict);
            prop_assert_eq!(model.merge_objective(&x), r.optimum as i64);
            prop_assert_eq!(&model.decode(&x).unwrap(), pc);
        }
    }

    #[test]
    fn hilbert_basis_matches_the_oracle(
        rows in 1usize..=4,
        cols in 1usize..=4,
        seed in prop::collection::vec(-3i64..=3, 16),
    ) {
        let entries: Vec<Vec<i64>> = (0..rows).map(|i| seed[i * 4..i * 4 + cols].to_vec()).collect();
        let a = MatrixRepresentation::new(entries, cols);
        let basis = hilbert_basis(&a, &HilbertBudget::default()).unwrap();
        let brute = brute_force_hilbert(&a, 8).unwrap();
        let low: Vec<_> = basis.elements.iter().filter(|e| e.size() <= 8).cloned().collect();
        prop_assert_eq!(low, brute.elements);
        for e in &basis.elements {
            prop_assert!(a.contains(e.counts()));
        }
    }
}
