use kh_core::cobordism::{movie_map, Movie, Step};
use kh_core::module::TangleModule;
use kh_core::random::random_disk_tangle;
use kh_core::tangle::DiskularTangle;
use kh_core::verify::{check_euler, check_gluing, gluing_pairs};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tangle(seed: u64, n: usize, crossings: usize) -> DiskularTangle {
    random_disk_tangle(&mut ChaCha8Rng::seed_from_u64(seed), n, crossings).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn closures_are_graded_complexes(seed in any::<u64>(), n in prop::sample::select(vec![0usize, 2, 4]), crossings in 0usize..4) {
        let t = tangle(seed, n, crossings);
        for e in TangleModule::new(&t).unwrap().entries.values() {
            prop_assert!(e.kc.complex.validate().is_ok());
        }
    }

    #[test]
    fn kinks_give_module_maps_and_keep_homology(
        seed in any::<u64>(),
        n in prop::sample::select(vec![0usize, 2, 4]),
        crossings in 0usize..3,
        pick in any::<prop::sample::Index>(),
        positive in any::<bool>(),
        side in any::<bool>(),
    ) {
        let t = tangle(seed, n, crossings);
        let edges: Vec<_> = t.all_edges().into_iter().filter(|e| !t.loops.contains(e)).collect();
        prop_assume!(!edges.is_empty());
        let edge = *pick.get(&edges);
        let m = Movie::new(t, vec![Step::R1Create { edge, positive, side }]);
        let ev = movie_map(&m).unwrap();
        prop_assert!(ev.map.check_chain_map(&ev.source, &ev.target).is_ok());
        prop_assert!(ev.map.check_actions(&ev.source, &ev.target).is_ok());
        for (key, e) in &ev.source.entries {
            prop_assert_eq!(e.kc.homology(), ev.target.entries[key].kc.homology());
        }
    }

    #[test]
    fn euler_characteristic_matches_the_bracket(seed in any::<u64>(), crossings in 0usize..5) {
        let (ok, witness) = check_euler(&tangle(seed, 0, crossings)).unwrap();
        prop_assert!(ok, "{}", witness);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn gluing_is_an_isomorphism(seed in any::<u64>()) {
        for (outer, inner) in gluing_pairs(seed, 2).unwrap() {
            let (ok, witness) = check_gluing(&outer, &inner).unwrap();
            prop_assert!(ok, "{}", witness);
        }
    }
}
