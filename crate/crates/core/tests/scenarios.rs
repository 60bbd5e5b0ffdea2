use std::f64::consts::{PI, TAU};

use limitsets::dynamics::{
    adpt_defect, density_defect, evaluate_flow, find_chain, is_chain_recurrent_at, sample_orbit,
    CircleRotation, DefectReading, Flow, MetricSpace, Point, SampledCurve, SearchBudget, Torus,
};
use limitsets::embedding::{keller_embed, KellerMap};
use limitsets::systems::{torus_flow, GOLDEN_ALPHA};

fn origin() -> Point {
    Point::new(vec![0.0, 0.0])
}

/// Best return error of the origin over the same jump grid the search uses.
fn best_return(flow: &dyn Flow, s: f64) -> f64 {
    SearchBudget::for_lower_bound(s)
        .jump_times(s, flow.period())
        .iter()
        .map(|&t| {
            flow.space()
                .distance(&flow.advance(t, &origin()), &origin())
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn torus_origin_is_chain_recurrent() {
    let f = torus_flow(GOLDEN_ALPHA).unwrap();
    for eps in [0.1, 0.05] {
        let budget = SearchBudget::for_lower_bound(10.0);
        let r = is_chain_recurrent_at(&f, &origin(), eps, 10.0, &budget).unwrap();
        assert!(r.recurrent, "eps {eps}");
        let chain = r.witness.unwrap();
        chain.validate(&f).unwrap();
        if chain.jumps() == 1 {
            assert!(best_return(&f, 10.0) < eps);
        }
    }
}

#[test]
fn circle_chain_returns_at_two_periods() {
    let f = CircleRotation::unit();
    let m = Point::new(vec![1.0]);
    let chain = find_chain(&f, &m, &m, 0.1, 10.0, &SearchBudget::for_lower_bound(10.0))
        .unwrap()
        .unwrap();
    assert_eq!(chain.jump_times, vec![2.0 * TAU]);
    assert_eq!(chain.link_errors(&f).unwrap(), vec![0.0]);
}

#[test]
fn constant_curve_defect_is_largest_grid_displacement() {
    let f = torus_flow(GOLDEN_ALPHA).unwrap();
    let times: Vec<f64> = (0..=100).map(|k| k as f64 * 0.05).collect();
    let curve = SampledCurve::new(times.clone(), vec![origin(); times.len()]).unwrap();
    let d = adpt_defect(&curve, &f, 2.0, (0.0, 1.0), 0.1, DefectReading::Increment).unwrap();
    let expect = (0..=10)
        .map(|k| {
            f.space()
                .distance(&f.advance(k as f64 * 0.1, &origin()), &origin())
        })
        .fold(0.0, f64::max);
    assert!((d - expect).abs() < 1e-12, "{d} vs {expect}");
    assert!(d > 0.0);
}

#[test]
fn adpt_defect_is_stable_under_step_halving() {
    let f = torus_flow(GOLDEN_ALPHA).unwrap();
    let x = Point::new(vec![0.4, 2.2]);
    let curve = SampledCurve::trajectory(&f, &x, 0.0, 12.0, 0.001).unwrap();
    let coarse = adpt_defect(
        &curve,
        &f,
        3.0,
        (0.0, 4.0),
        0.0731,
        DefectReading::Increment,
    )
    .unwrap();
    let fine = adpt_defect(
        &curve,
        &f,
        3.0,
        (0.0, 4.0),
        0.0731 / 2.0,
        DefectReading::Increment,
    )
    .unwrap();
    // unit speed in the normalized metric; nearest-sample rounding is at most one step
    let modulus = 0.001;
    assert!(
        coarse <= modulus + 1e-12 && fine <= modulus + 1e-12,
        "{coarse} {fine}"
    );
}

#[test]
fn torus_trajectory_density_improves_with_length() {
    let f = torus_flow(GOLDEN_ALPHA).unwrap();
    let t = Torus::plane();
    // 5 x 5 cover, spacing 0.2 in the normalized metric
    let cover = t.sample(25);
    assert_eq!(cover.len(), 25);
    let defects: Vec<f64> = [10.0, 100.0, 1000.0]
        .iter()
        .map(|&len| {
            let curve = SampledCurve::trajectory(&f, &origin(), 0.0, len, 0.01).unwrap();
            density_defect(&curve, &cover, 0.0, &t).unwrap()
        })
        .collect();
    assert!(defects.windows(2).all(|w| w[1] <= w[0]), "{defects:?}");
    assert!(defects[2] < defects[0]);
}

#[test]
fn circle_orbit_closes() {
    let f = CircleRotation::unit();
    let x = Point::new(vec![0.7]);
    let orbit = sample_orbit(&f, &x, 0.0, TAU, TAU / 1000.0).unwrap();
    assert_eq!(orbit.len(), 1001);
    assert!(f.space().distance(&orbit[0], &orbit[1000]) <= 1e-12);
}

#[test]
fn torus_orbit_endpoints_follow_the_flow() {
    let f = torus_flow(GOLDEN_ALPHA).unwrap();
    let x = Point::new(vec![1.0, 5.0]);
    let p = 3.0;
    let orbit = sample_orbit(&f, &x, 0.0, 2.0 * p, 0.01).unwrap();
    assert_eq!(orbit.len(), 601);
    let end = evaluate_flow(&f, 2.0 * p, &x).unwrap();
    assert!(f.space().distance(orbit.last().unwrap(), &end) <= 1e-12);
}

#[test]
fn torus_unit_time_from_origin() {
    let f = torus_flow(GOLDEN_ALPHA).unwrap();
    let p = evaluate_flow(&f, 1.0, &origin()).unwrap();
    assert_eq!(p.coords()[0], 0.0);
    assert!((p.coords()[1] - (TAU * GOLDEN_ALPHA).rem_euclid(TAU)).abs() < 1e-12);
}

#[test]
fn mesh_anchors_separate_distant_points() {
    let t = Torus::plane();
    let map = KellerMap::from_sampler(&t, 100).unwrap();
    let n = map.len();
    assert_eq!(n, 100);
    let probes = t.sample(900);
    let covering = probes
        .iter()
        .map(|p| {
            map.anchors()
                .iter()
                .map(|a| t.distance(p, a))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    assert!(covering <= 0.05 + 1e-12, "{covering}");

    let bound = 0.5f64.powi(n as i32 + 1) * (0.05 / map.normalizer());
    let embedded: Vec<Vec<f64>> = probes
        .iter()
        .map(|p| keller_embed(&map, &t, p).unwrap().weights)
        .collect();
    let mut pairs = 0;
    for (i, a) in probes.iter().enumerate() {
        for (j, b) in probes.iter().enumerate().skip(i + 1) {
            if t.distance(a, b) < 0.1 {
                continue;
            }
            pairs += 1;
            let gap = embedded[i]
                .iter()
                .zip(&embedded[j])
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            assert!(gap >= bound, "{a:?} {b:?} gap {gap}");
        }
    }
    assert!(pairs > 0);
}

#[test]
fn antipodal_points_differ_in_the_first_weight() {
    let t = Torus::plane();
    let map = KellerMap::from_sampler(&t, 100).unwrap();
    let a = map.anchors()[0].clone();
    let b = Point::new(a.coords().iter().map(|c| c + PI).collect());
    let wa = keller_embed(&map, &t, &a).unwrap().weights;
    let wb = keller_embed(&map, &t, &b).unwrap().weights;
    assert_eq!(wa[0], 0.25);
    assert_eq!(wb[0], 0.5);
}
