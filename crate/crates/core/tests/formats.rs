use proptest::prelude::*;

use ylab_core::analysis::find_crossings;
use ylab_core::formats::{
    emit_native, emit_tsplib, emit_tsplib_tour, parse_instance, parse_native, parse_tsplib, parse_tsplib_tour, parse_tour,
    TraceDocument,
};
use ylab_core::generators::{fixture, gen_maxmin_counterexample, gen_random_uniform, FIXTURE_NAMES};
use ylab_core::heuristic::run_adding;
use ylab_core::instance::{tour_length, validate_tour, DistanceConvention};
use ylab_core::svg::render_svg;
use ylab_core::{Instance, Tour, Variant, DEFAULT_EPS};

const PCB442: &str = include_str!("data/pcb442.tsp");
const PCB442_TOUR: &str = include_str!("data/pcb442.opt.tour");

fn same_instance(a: &Instance, b: &Instance) -> bool {
    a.name() == b.name() && a.coords() == b.coords() && a.matrix() == b.matrix() && a.convention() == b.convention()
}

#[test]
fn fixtures_round_trip() {
    for name in FIXTURE_NAMES {
        let (inst, _) = fixture(name).unwrap();
        let once = parse_native(&emit_native(&inst)).unwrap();
        assert!(same_instance(&once, &inst), "{name}");
        assert!(same_instance(&parse_native(&emit_native(&once)).unwrap(), &once), "{name}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn random_instances_round_trip(n in 3usize..60, seed in any::<u64>()) {
        let inst = gen_random_uniform(n, seed).unwrap();
        let once = parse_native(&emit_native(&inst)).unwrap();
        prop_assert!(same_instance(&once, &inst));
        prop_assert_eq!(emit_native(&once), emit_native(&inst));
    }

    #[test]
    fn svg_has_one_marker_and_segment_per_point(n in 3usize..40, seed in any::<u64>()) {
        let inst = gen_random_uniform(n, seed).unwrap();
        let tour = run_adding(&inst, Variant::MaxMin, DEFAULT_EPS).unwrap().final_tour;
        let crossings = find_crossings(&inst, &tour).unwrap();
        let svg = render_svg(&inst, &tour, &crossings).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let count = |tag: &str| doc.descendants().filter(|e| e.has_tag_name(tag)).count();
        prop_assert_eq!(count("circle"), n);
        prop_assert_eq!(count("line"), n);
        let hot = doc.descendants().filter(|e| e.attribute("class") == Some("edge crossing")).count();
        let expected: std::collections::BTreeSet<usize> = crossings.iter().flat_map(|c| [c.first, c.second]).collect();
        prop_assert_eq!(hot, expected.len());
    }
}

#[test]
fn tsplib_pcb442_matches_published_optimum() {
    let inst = parse_tsplib(PCB442).unwrap();
    assert_eq!(inst.len(), 442);
    assert_eq!(inst.name(), "pcb442");
    assert_eq!(inst.convention(), DistanceConvention::TsplibRounded);
    let (name, tour) = parse_tsplib_tour(PCB442_TOUR).unwrap();
    assert_eq!(name, "pcb442");
    assert!(validate_tour(&inst, &tour, true).is_ok());
    assert_eq!(tour_length(&inst, &tour).unwrap(), 50778.0);
    assert_eq!(parse_instance(PCB442).unwrap().len(), 442);
}

#[test]
fn tsplib_emit_round_trips() {
    let inst = gen_maxmin_counterexample();
    let text = emit_tsplib(&inst).unwrap();
    let back = parse_tsplib(&text).unwrap();
    assert_eq!(back.coords(), inst.coords());
    assert_eq!(back.convention(), DistanceConvention::TsplibRounded);
    let tour = Tour::new(vec![0, 2, 1, 3]);
    let (_, parsed) = parse_tour(&emit_tsplib_tour(inst.name(), &tour)).unwrap();
    assert_eq!(parsed, tour);
}

#[test]
fn trace_documents_round_trip() {
    let inst = gen_maxmin_counterexample();
    let doc = TraceDocument::new(&inst, run_adding(&inst, Variant::MaxMin, DEFAULT_EPS).unwrap());
    let json = doc.to_json();
    let back = TraceDocument::from_json(&json).unwrap();
    assert_eq!(back, doc);
    assert_eq!(back.to_json(), json);
}
