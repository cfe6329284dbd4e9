mod common;

use boyforge::geom::{decimal, parse_rat, Rat, Rotation};
use boyforge::{assembly, immersion, net, surgery};
use common::*;
use num_bigint::BigInt;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn folding_is_an_isometry(text in fold_tree()) {
        check_fold_isometry(&text)?;
    }

    #[test]
    fn terminating_decimals_round_trip(n in -10_000i64..10_000, k in 0u32..6) {
        let r = Rat::new(BigInt::from(n), BigInt::from(10i64.pow(k)));
        prop_assert_eq!(parse_rat(&decimal(&r)), Some(r));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn subdivision_keeps_invariants(ops in subdivisions()) {
        for (_, c) in corpus_complexes() {
            check_subdivision(&c, &ops)?;
        }
    }

    #[test]
    fn resolving_removes_every_crossing(k in crossings()) {
        check_resolution(&k)?;
    }

    #[test]
    fn locus_is_rotation_equivariant(k in crossings(), r in 0usize..24) {
        let c = crossing_complex(&k);
        let rot = Rotation::all()[r];
        let a = immersion::self_intersections(&c).unwrap();
        let b = immersion::self_intersections(&c.rotated(&rot)).unwrap();
        let mut pa: Vec<_> = a.segments.iter().map(|s| { let mut e = [rot.apply(&s.a), rot.apply(&s.b)]; e.sort(); e }).collect();
        let mut pb: Vec<_> = b.segments.iter().map(|s| { let mut e = [s.a.clone(), s.b.clone()]; e.sort(); e }).collect();
        pa.sort();
        pb.sort();
        prop_assert_eq!(pa, pb);
    }

    #[test]
    fn removal_composes(split in 0usize..7) {
        let c = boyforge::build_boy().unwrap();
        let names = ["I1", "I2", "I3", "II", "IV", "I1", "I2"];
        let (s, t): (Vec<&str>, Vec<&str>) = (names[..split.min(5)].to_vec(), vec![]);
        let t: Vec<&str> = if t.is_empty() { names[split.min(5)..5].iter().take(1).copied().collect() } else { t };
        let both: Vec<&str> = s.iter().chain(t.iter()).copied().collect();
        let once = surgery::remove_pieces(&c, &both).unwrap();
        let twice = surgery::remove_pieces(&surgery::remove_pieces(&c, &s).unwrap(), &t).unwrap();
        prop_assert_eq!(once.faces.len(), twice.faces.len());
        prop_assert_eq!(once.provenance_multiset(), twice.provenance_multiset());
        let key = |x: &boyforge::ImmersedComplex| { let mut k: Vec<_> = (0..x.faces.len()).map(|f| x.face_key(f)).collect(); k.sort(); k };
        prop_assert_eq!(key(&once), key(&twice));
    }
}

#[test]
fn every_flap_order_gives_the_same_surface() {
    let nets = boyforge::builtin_boy_nets();
    let sigs: Vec<String> = ORDERS
        .iter()
        .map(|o| {
            let plan = net::parse_assembly(&reordered_plan(*o), &boyforge::AnchorTable::boy()).unwrap();
            assembly_signature(&assembly::assemble(&plan, &nets).unwrap())
        })
        .collect();
    assert!(sigs.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(sigs[0], assembly_signature(&boyforge::build_boy().unwrap()));
}

#[test]
fn plans_print_and_parse_back() {
    let plan = boyforge::builtin_boy_plan();
    let again = net::parse_assembly(&plan.to_text(), &boyforge::AnchorTable::boy()).unwrap();
    assert_eq!(plan, again);
}
