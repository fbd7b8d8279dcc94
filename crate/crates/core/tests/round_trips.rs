use proptest::prelude::*;

use tbn_core::ipmodel::{build, BuildOptions};
use tbn_core::lp_format::{read_lp, read_solution, write_lp, write_solution};
use tbn_core::solver::{stable_configs, StableOptions};
use tbn_core::{
    parse_configuration, parse_tbn, render_configuration, render_tbn, Count, Monomer, SiteType, Tbn,
};

const NAMES: [&str; 4] = ["a", "b", "c", "d"];

fn tbn() -> impl Strategy<Value = Tbn> {
    let monomer = (
        prop::collection::vec((0..NAMES.len(), any::<bool>()), 1..=3),
        prop_oneof![4 => (1u64..=3).prop_map(Count::Finite), 1 => Just(Count::Infinite)],
    );
    prop::collection::vec(monomer, 1..=4).prop_filter_map("valid TBN", |ms| {
        let entries = ms.into_iter().map(|(sites, count)| {
            let sites = sites
                .into_iter()
                .map(|(k, s)| SiteType::new(NAMES[k], s).unwrap());
            (Monomer::new(sites).unwrap(), count)
        });
        Tbn::new(entries).ok().map(|(t, _)| t)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tbn_text_round_trips(t in tbn()) {
        let text = render_tbn(&t);
        prop_assert_eq!(parse_tbn(&text).unwrap(), t);
    }

    #[test]
    fn models_round_trip_through_lp_text(t in tbn(), symmetry in any::<bool>()) {
        let options = BuildOptions { symmetry_breaking: symmetry, ..Default::default() };
        let model = build(&t, 2, &options).unwrap();
        let text = write_lp(model.program());
        let back = read_lp(&text).unwrap();
        prop_assert_eq!(&back, model.program());
    }

    #[test]
    fn stable_configurations_survive_text_and_solution_files(t in tbn()) {
        let r = stable_configs(&t, &StableOptions::default()).unwrap();
        for pc in &r.solutions {
            let text = render_configuration(pc, &t);
            prop_assert_eq!(&parse_configuration(&text, &t).unwrap(), pc);
        }
        if r.bound == 0 {
            return Ok(());
        }
        let model = build(&t, r.bound, &BuildOptions::enumeration(r.optimum)).unwrap();
        for pc in &r.solutions {
            let x = model.encode(pc).unwrap();
            let file = write_solution(model.program(), &x);
            prop_assert_eq!(read_solution(&file, model.program()).unwrap(), x);
        }
    }
}
