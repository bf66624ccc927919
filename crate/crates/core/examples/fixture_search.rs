//! Derives the counterexample fixtures frozen in `generators.rs`.
//!
//! ```text
//! cargo run --release -p ylab-core --example fixture_search -- maxmin
//! cargo run --release -p ylab-core --example fixture_search -- minmin
//! ```
//!
//! Both searches are seeded, draw one-decimal coordinates, and stop at the
//! first configuration whose fixture properties all hold.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ylab_core::generators::{check_property, FixtureProperty};
use ylab_core::heuristic::{run_adding, Variant, DEFAULT_EPS};
use ylab_core::{Instance, Point};

fn one_decimal(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo..hi) * 10.0).round() / 10.0
}

fn all_hold(inst: &Instance, props: &[FixtureProperty]) -> bool {
    props.iter().all(|&p| check_property(inst, p).passed)
}

/// Relabels points so the initial pair is 0, 1 and the third point is 2.
fn by_role(pts: &[Point], variant: Variant) -> Vec<Point> {
    let inst = Instance::from_points(pts.to_vec()).unwrap();
    let run = run_adding(&inst, variant, DEFAULT_EPS).unwrap();
    let mut order: Vec<usize> = run.triangle().to_vec();
    order.extend(run.insertion_order());
    order.into_iter().map(|i| pts[i]).collect()
}

fn report(label: &str, seed: u64, tries: usize, inst: &Instance, variant: Variant) {
    let run = run_adding(inst, variant, DEFAULT_EPS).unwrap();
    println!("{label}: seed {seed}, {tries} configurations tried");
    let pts: Vec<String> = inst
        .coords()
        .unwrap()
        .iter()
        .map(|p| format!("({:?}, {:?})", p.x, p.y))
        .collect();
    println!("points: [{}]", pts.join(", "));
    println!("{variant} tour: {:?}, length {}", run.final_tour.order(), run.final_length);
    let opt = ylab_core::oracle::optimal_permutation(inst).unwrap();
    println!("optimal tour: {:?}, length {}", opt.tour.order(), opt.length);
}

fn search_maxmin(seed: u64) {
    use FixtureProperty::*;
    let props = [NoTies(Variant::MaxMin), Suboptimal(Variant::MaxMin), NotInverseOfCutting(Variant::MaxMin)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for tries in 1.. {
        let pts: Vec<Point> = (0..4)
            .map(|_| Point::new(one_decimal(&mut rng, 0.0, 10.0), one_decimal(&mut rng, 0.0, 10.0)))
            .collect();
        let Ok(inst) = Instance::from_points(pts.clone()) else { continue };
        if all_hold(&inst, &props) {
            let inst = Instance::from_points(by_role(&pts, Variant::MaxMin)).unwrap();
            assert!(all_hold(&inst, &props), "relabelling must not change the properties");
            report("maxmin", seed, tries, &inst, Variant::MaxMin);
            return;
        }
    }
}

fn search_minmin(seed: u64) {
    use FixtureProperty::*;
    let v = Variant::MinMin;
    let props = [NoTies(v), Suboptimal(v), OutsideIn(v), ApexPrefersSide(v), CrossingFree(v), NotInverseOfCutting(v)];
    let outer = [Point::new(0.0, 0.0), Point::new(10.0, 0.0), Point::new(5.0, 8.0)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for inner in 1..=7 {
        for tries in 1..=200_000 {
            let mut pts = outer.to_vec();
            while pts.len() < 3 + inner {
                let p = Point::new(one_decimal(&mut rng, 0.5, 9.5), one_decimal(&mut rng, 0.3, 7.5));
                // strictly inside the outer triangle
                let left = 8.0 * p.x - 5.0 * p.y;
                let right = 8.0 * (10.0 - p.x) - 5.0 * p.y;
                if p.y > 0.2 && left > 2.0 && right > 2.0 && !pts.contains(&p) {
                    pts.push(p);
                }
            }
            let inst = Instance::from_points(pts.clone()).unwrap();
            if all_hold(&inst, &props) {
                let inst = Instance::from_points(by_role(&pts, v)).unwrap();
                assert!(all_hold(&inst, &props), "relabelling must not change the properties");
                report(&format!("minmin ({inner} interior points)"), seed, tries, &inst, v);
                return;
            }
        }
        println!("no {inner}-point interior found");
    }
}

fn main() {
    let which = std::env::args().nth(1).unwrap_or_else(|| "maxmin".into());
    let seed = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    match which.as_str() {
        "maxmin" => search_maxmin(seed),
        "minmin" => search_minmin(seed),
        other => eprintln!("unknown search `{other}`"),
    }
}
