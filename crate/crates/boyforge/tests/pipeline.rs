mod common;

use boyforge::export::{self, Welding};
use boyforge::geom::rat;
use boyforge::{immersion, report, surgery, topology, ImmersedComplex, Vec3};
use common::*;

#[test]
fn piece_iv_meets_itself_along_the_three_half_axes() {
    let c = ImmersedComplex::from_piece(&boyforge::piece_iv());
    let l = immersion::self_intersections(&c).unwrap();
    let mut got: Vec<[Vec3; 2]> = l
        .segments
        .iter()
        .map(|s| {
            let mut e = [s.a.clone(), s.b.clone()];
            e.sort();
            e
        })
        .collect();
    got.sort();
    // each pair of sheets crosses along the full axis they share
    let axis = |k: usize, t: i64| {
        let mut p = [0i64; 3];
        p[k] = t;
        Vec3::ints(p[0], p[1], p[2])
    };
    let mut want: Vec<[Vec3; 2]> = (0..3).map(|k| [axis(k, -1), axis(k, 1)]).collect();
    want.sort();
    assert_eq!(got, want);
    assert!(got.iter().all(|[a, b]| (b - a).norm2() == rat(4)));
    assert_eq!(l.triple_points.len(), 1);
    assert_eq!(l.triple_points[0].at, Vec3::zero());
    assert_eq!(l.triple_points[0].sheets, 3);
}

#[test]
fn boy_surface_invariants_match_hand_counts() {
    let c = boyforge::build_boy().unwrap();
    assert!(topology::is_closed_surface(&c).closed);
    assert_eq!(topology::euler_characteristic(&c), euler_by_hand(&c));
    assert_eq!(euler_by_hand(&c), 1);
    assert_eq!(topology::orientable(&c), orientable_by_hand(&c));
    assert!(!orientable_by_hand(&c));
    let h = topology::homology(&c);
    // RP2 over GF(2): every Betti number is one
    assert_eq!(h.betti_mod2, [1, 1, 1]);
    assert_eq!(h.integral_text(), "(Z, Z/2, 0)");
    let k = topology::classify(&c).unwrap();
    assert_eq!((k.orientable, k.genus, k.boundary_circles), (false, 1, 0));
    assert!(immersion::local_injectivity(&c).is_empty());
    assert!(boyforge::symmetry_check(&c));
}

#[test]
fn boy_double_curve_closes_through_one_triple_point() {
    let c = boyforge::build_boy().unwrap();
    let l = immersion::self_intersections(&c).unwrap();
    let p = immersion::double_curve_profile(&l);
    assert!(p.closes_up());
    assert_eq!(p.triple_points, 1);
    // three sheets through the triple point give three passes in total
    let passes: usize = p.per_arc.iter().map(|a| a.triple_passes.iter().sum::<usize>()).sum();
    assert_eq!(passes, 3);
    assert!(immersion::locus_invariant_under(&l, &boyforge::Rotation::sigma()));
}

#[test]
fn surgery_leaves_the_three_flaps() {
    let c = boyforge::build_boy().unwrap();
    let r = surgery::remove_pieces(&c, &["II", "IV"]).unwrap();
    assert!((0..r.faces.len()).all(|f| r.provenance(f).starts_with("I") && r.provenance(f).len() == 2));
    assert_eq!(r.pieces, vec!["I1", "I2", "I3"]);
    let all = surgery::enumerate_resolutions(&r).unwrap();
    // the flaps do not cross one another, so the only resolution is empty
    assert_eq!(all.len(), 1);
    let m = all[0].report.as_ref().unwrap();
    assert_eq!((m.connected, m.orientable, m.euler, m.boundary_components), (true, false, 0, 1));
    assert_eq!(m.class_name, "Möbius band");
    assert!(!m.matches_claim);
    // without piece IV alone the flaps and the cap make three circles
    let q = surgery::remove_pieces(&c, &["IV"]).unwrap();
    let m = surgery::verify_mobius_claim(&q).unwrap();
    assert_eq!((m.orientable, m.euler, m.boundary_components), (false, -2, 3));
}

#[test]
fn unknown_piece_is_refused() {
    let c = boyforge::build_boy().unwrap();
    assert!(matches!(surgery::remove_pieces(&c, &["V"]), Err(boyforge::Error::UnknownPiece(_))));
}

#[test]
fn shipped_report_fails_only_the_three_circle_claim() {
    let r = report::verify_boy();
    assert_eq!(r.failing(), vec![report::THREE_CIRCLES]);
    assert_eq!(r.verdict, "fail");
    let rec = r.check(report::THREE_CIRCLES).unwrap();
    assert_eq!(rec.computed[0]["class"]["genus"], 1);
    assert_eq!(r.to_json(), report::verify_boy().to_json());
}

#[test]
fn deleting_the_cap_opens_the_surface() {
    let text: String = boyforge::BOY_PLAN.lines().filter(|l| !l.contains(" II")).map(|l| format!("{l}\n")).collect();
    let plan = boyforge::parse_assembly(&text, &boyforge::AnchorTable::boy()).unwrap();
    let r = report::verify(&plan, &boyforge::builtin_boy_nets());
    let failing = r.failing();
    assert!(failing.contains(&report::CLOSED));
    assert!(r.check(report::NON_ORIENTABLE).unwrap().pass);
    assert!(r.check(report::TRIPLE).unwrap().pass);
    assert_eq!(r.check(report::EULER).unwrap().computed, 0);
}

#[test]
fn cube_assembly_is_a_sphere() {
    let (plan, nets) = boyforge::load_assembly(&data("cube.bsy")).unwrap();
    let c = boyforge::assemble(&plan, &nets).unwrap();
    assert_eq!(euler_by_hand(&c), 2);
    assert!(orientable_by_hand(&c));
    let r = report::verify(&plan, &nets);
    assert!(r.failing().contains(&report::EULER));
    assert!(r.failing().contains(&report::NON_ORIENTABLE));
    assert!(r.check(report::CLOSED).unwrap().pass);
    assert!(r.check(report::INJECTIVE).unwrap().pass);
}

#[test]
fn misplaced_anchor_is_named() {
    let text = boyforge::BOY_PLAN.replace("A->A',B->B',C->C'", "A->A',B->B',C->C''");
    let plan = boyforge::parse_assembly(&text, &boyforge::AnchorTable::boy()).unwrap();
    let r = report::verify(&plan, &boyforge::builtin_boy_nets());
    assert!(!r.passed());
    let msg = r.checks[0].computed["error"].as_str().unwrap().to_string();
    assert!(msg.contains("anchor C"), "{msg}");
    assert!(msg.contains("I2"), "{msg}");
}

#[test]
fn mesh_round_trips_keep_the_topology() {
    for (name, c) in corpus_complexes() {
        let back = export::parse_obj(&export::obj_string(&c), &Welding::Exact).unwrap();
        assert_eq!(invariants(&back), invariants(&c), "{name}");
    }
    // the Boy surface has distinct vertices at one point, so keep records
    let boy = boyforge::build_boy().unwrap();
    let back = export::parse_obj(&export::obj_string(&boy), &Welding::Keep).unwrap();
    assert_eq!(invariants(&back), invariants(&boy));
    assert!(immersion::local_injectivity(&back).is_empty());
    assert_eq!(immersion::self_intersections(&back).unwrap().triple_points.len(), 1);
}

#[test]
fn piece_iv_mesh_has_one_record_per_vertex() {
    let c = ImmersedComplex::from_piece(&boyforge::piece_iv());
    let s = export::obj_string(&c);
    assert_eq!(s.lines().filter(|l| l.starts_with("v ")).count(), 27);
    assert_eq!(s.lines().filter(|l| l.starts_with("# polygon")).count(), 12);
    assert_eq!(s.lines().filter(|l| l.starts_with("f ")).count(), 24);
}

#[test]
fn printed_nets() {
    let nets = boyforge::builtin_boy_nets();
    let items = export::print_list(&boyforge::builtin_boy_plan(), &nets);
    let count = |n: &str| items.iter().filter(|i| i.net.name == n).count();
    assert_eq!((count("piece_I"), count("piece_II"), count("piece_III")), (3, 1, 3));
    let svg = export::svg_nets(&items);
    assert_eq!(svg.matches("<g ").count(), 7);
    let one = export::svg_nets(&items[items.iter().position(|i| i.net.name == "piece_I").unwrap()..][..1]);
    assert_eq!(one.matches("class=\"fold\"").count(), 1);
    assert!(one.matches("class=\"cut\"").count() > 4);
    for a in ["A", "B", "C"] {
        assert!(one.contains(&format!(">{a}</text>")), "{a}");
    }
}

#[test]
fn syntax_errors_carry_a_line() {
    let e = boyforge::parse_nets("net x\nvertex 1 0\n").unwrap_err();
    assert!(e.is_syntax());
    assert!(e.to_string().contains(":"));
}
