use proptest::prelude::*;

use ylab_core::branching::{enumerate_runs, growth_estimate, EnumerateOptions};
use ylab_core::generators::gen_grid;
use ylab_core::heuristic::{run_adding, run_adding_with, Scripted};
use ylab_core::instance::{tour_length, validate_tour};
use ylab_core::{Instance, Point, Variant, DEFAULT_EPS};

fn variant() -> impl Strategy<Value = Variant> {
    prop_oneof![Just(Variant::MaxMin), Just(Variant::MinMin)]
}

/// Integer coordinates on a small board, so ties are common.
fn tied_instance(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Instance> {
    prop::collection::vec((0i32..4, 0i32..4), n).prop_map(|v| {
        Instance::from_points(v.into_iter().map(|(x, y)| Point::new(x as f64, y as f64)).collect()).unwrap()
    })
}

fn with_leaves() -> EnumerateOptions {
    EnumerateOptions { record_leaves: true, ..Default::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn leaves_are_valid_and_replayable(inst in tied_instance(3..=7), v in variant()) {
        let e = enumerate_runs(&inst, v, DEFAULT_EPS, with_leaves()).unwrap();
        prop_assume!(!e.report.truncated);
        prop_assert_eq!(e.leaves.len(), e.report.leaves);
        for leaf in &e.leaves {
            prop_assert!(validate_tour(&inst, &leaf.tour, true).is_ok());
            let replay = run_adding_with(&inst, v, DEFAULT_EPS, &mut Scripted(&leaf.choices)).unwrap();
            prop_assert_eq!(&replay.final_tour, &leaf.tour);
            prop_assert_eq!(&replay.choices, &leaf.choices);
            prop_assert!((tour_length(&inst, &leaf.tour).unwrap() - leaf.length).abs() <= 1e-12);
        }
        let det = run_adding(&inst, v, DEFAULT_EPS).unwrap();
        let zero_paths: Vec<_> = e.leaves.iter().filter(|l| l.choices.iter().all(|&c| c == 0)).collect();
        prop_assert_eq!(zero_paths.len(), 1);
        prop_assert_eq!(&zero_paths[0].tour, &det.final_tour);
    }

    #[test]
    fn dedup_keeps_the_final_tour_set(inst in tied_instance(3..=8), v in variant()) {
        let plain = enumerate_runs(&inst, v, DEFAULT_EPS, EnumerateOptions::default()).unwrap();
        let merged = enumerate_runs(&inst, v, DEFAULT_EPS, EnumerateOptions { dedup: true, ..Default::default() }).unwrap();
        prop_assume!(!plain.report.truncated);
        prop_assert!(!merged.report.truncated);
        let a: Vec<_> = plain.final_tours.keys().collect();
        let b: Vec<_> = merged.final_tours.keys().collect();
        prop_assert_eq!(a, b);
        prop_assert!(merged.report.total_nodes <= plain.report.total_nodes);
    }
}

#[test]
fn grid_growth_table() {
    let reports: Vec<_> = (2..=3)
        .map(|k| (k, enumerate_runs(&gen_grid(k).unwrap(), Variant::MaxMin, DEFAULT_EPS, EnumerateOptions::default()).unwrap().report))
        .collect();
    let rows = growth_estimate(&reports).unwrap();
    assert_eq!(rows[0].n, 4);
    assert_eq!(rows[1].n, 9);
    assert!(rows[1].leaves > rows[0].leaves);
    assert!(rows[1].total_nodes > rows[0].total_nodes);
    assert!(rows.iter().all(|r| !r.truncated));
}

#[test]
fn enumeration_is_deterministic() {
    let g = gen_grid(3).unwrap();
    let a = enumerate_runs(&g, Variant::MinMin, DEFAULT_EPS, EnumerateOptions::default()).unwrap();
    let b = enumerate_runs(&g, Variant::MinMin, DEFAULT_EPS, EnumerateOptions::default()).unwrap();
    assert_eq!(serde_json::to_string(&a.report).unwrap(), serde_json::to_string(&b.report).unwrap());
}
