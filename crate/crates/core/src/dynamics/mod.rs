//! Flows on compact metric spaces.
//!
//! A flow is a one-parameter group `T^t` acting on the points of a compact
//! metric space. Everything here is closed-form: a [`Flow`] evaluates `T^t m`
//! directly rather than integrating a vector field.

mod chain;
mod pseudo;

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::{Error, Result};

pub use chain::{find_chain, is_chain_recurrent_at, Chain, ChainRecurrence, SearchBudget};
pub use pseudo::{adpt_defect, density_defect, DefectReading, SampledCurve};

/// A point of a flow's phase space. Coordinates are interpreted by the space.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Point(coords)
    }
}

/// A compact metric space with a deterministic covering sampler.
pub trait MetricSpace: Send + Sync {
    fn dimension(&self) -> usize;

    fn distance(&self, a: &Point, b: &Point) -> f64;

    /// Upper bound on the distance between any two points.
    fn diameter(&self) -> f64;

    /// Returns at least `count` points that cover the space evenly.
    fn sample(&self, count: usize) -> Vec<Point>;

    /// Maps raw coordinates to their canonical representative.
    fn normalize(&self, p: Point) -> Point {
        p
    }

    fn contains(&self, p: &Point) -> bool {
        p.dimension() == self.dimension() && p.coords().iter().all(|c| c.is_finite())
    }
}

/// A continuous-time flow `T^t` on a compact metric space.
pub trait Flow: Send + Sync {
    fn space(&self) -> &dyn MetricSpace;

    /// Evaluates `T^t m` without validating `m`.
    fn advance(&self, t: f64, m: &Point) -> Point;

    /// The common period of every orbit, when the flow has one.
    fn period(&self) -> Option<f64> {
        None
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn reduce_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid rounds tiny negatives up to exactly TAU
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Circular distance between two angles, in `[0, π]`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(TAU);
    d.min(TAU - d).max(0.0)
}

/// The flat torus `(S¹)^dim` with angle coordinates in `[0, 2π)`.
///
/// The metric is the largest per-angle circular distance divided by `2π`, so
/// the diameter is `1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Torus {
    dim: usize,
}

impl Torus {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("torus dimension must be positive"));
        }
        Ok(Torus { dim })
    }

    pub fn circle() -> Self {
        Torus { dim: 1 }
    }

    pub fn plane() -> Self {
        Torus { dim: 2 }
    }
}

impl MetricSpace for Torus {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn distance(&self, a: &Point, b: &Point) -> f64 {
        a.coords()
            .iter()
            .zip(b.coords())
            .map(|(&x, &y)| circular_distance(x, y) / TAU)
            .fold(0.0, f64::max)
    }

    fn diameter(&self) -> f64 {
        0.5
    }

    fn sample(&self, count: usize) -> Vec<Point> {
        let count = count.max(1);
        let mut per_axis = 1usize;
        while per_axis.pow(self.dim as u32) < count {
            per_axis += 1;
        }
        let total = per_axis.pow(self.dim as u32);
        (0..total)
            .map(|mut idx| {
                let coords = (0..self.dim)
                    .map(|_| {
                        let k = idx % per_axis;
                        idx /= per_axis;
                        TAU * k as f64 / per_axis as f64
                    })
                    .collect();
                Point(coords)
            })
            .collect()
    }

    fn normalize(&self, p: Point) -> Point {
        Point(p.0.into_iter().map(reduce_angle).collect())
    }
}

/// `T^t = id` on any space.
#[derive(Debug, Clone)]
pub struct IdentityFlow<S> {
    space: S,
}

impl<S: MetricSpace> IdentityFlow<S> {
    pub fn new(space: S) -> Self {
        IdentityFlow { space }
    }
}

impl<S: MetricSpace> Flow for IdentityFlow<S> {
    fn space(&self) -> &dyn MetricSpace {
        &self.space
    }

    fn advance(&self, _t: f64, m: &Point) -> Point {
        m.clone()
    }
}

/// Rigid rotation of the circle, `φ ↦ φ + speed·t`.
#[derive(Debug, Clone, Copy)]
pub struct CircleRotation {
    speed: f64,
    space: Torus,
}

impl CircleRotation {
    pub fn new(speed: f64) -> Result<Self> {
        if !speed.is_finite() {
            return Err(Error::invalid("rotation speed must be finite"));
        }
        Ok(CircleRotation {
            speed,
            space: Torus::circle(),
        })
    }

    /// Unit speed; every orbit has period `2π`.
    pub fn unit() -> Self {
        CircleRotation {
            speed: 1.0,
            space: Torus::circle(),
        }
    }
}

impl Flow for CircleRotation {
    fn space(&self) -> &dyn MetricSpace {
        &self.space
    }

    fn advance(&self, t: f64, m: &Point) -> Point {
        Point(vec![reduce_angle(m.coords()[0] + self.speed * t)])
    }

    fn period(&self) -> Option<f64> {
        (self.speed != 0.0).then(|| TAU / self.speed.abs())
    }
}

/// Evaluates `T^t m`, validating that `m` lives in the flow's space.
pub fn evaluate_flow<F: Flow + ?Sized>(flow: &F, t: f64, m: &Point) -> Result<Point> {
    let space = flow.space();
    if m.dimension() != space.dimension() {
        return Err(Error::invalid(format!(
            "point has dimension {}, space has dimension {}",
            m.dimension(),
            space.dimension()
        )));
    }
    if !space.contains(m) || !t.is_finite() {
        return Err(Error::invalid("point or time is not finite"));
    }
    Ok(space.normalize(flow.advance(t, m)))
}

/// Number of points on the closed grid `t_min + k·dt ≤ t_max`.
///
/// A relative slack of `1e-9` absorbs rounding in `(t_max - t_min) / dt`, so a
/// step that divides the window evenly always reaches `t_max`.
pub(crate) fn grid_len(t_min: f64, t_max: f64, dt: f64) -> usize {
    ((t_max - t_min) / dt + 1e-9).floor() as usize + 1
}

/// Samples `T^t x` on the grid `t_min, t_min + dt, …` up to `t_max`.
pub fn sample_orbit<F: Flow + ?Sized>(
    flow: &F,
    x: &Point,
    t_min: f64,
    t_max: f64,
    dt: f64,
) -> Result<Vec<Point>> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid("dt must be positive"));
    }
    if !(t_min < t_max) || !t_max.is_finite() || !t_min.is_finite() {
        return Err(Error::invalid("orbit window requires t_min < t_max"));
    }
    let n = grid_len(t_min, t_max, dt);
    (0..n)
        .map(|k| evaluate_flow(flow, t_min + k as f64 * dt, x))
        .collect()
}

/// Two-sided neighbourhood distance between finite sets.
///
/// This is the closed form of `inf{ε : E1 ⊂ (E2)_ε and E2 ⊂ (E1)_ε}` on finite
/// sets: the larger of the two directed max-min distances. Whether the
/// neighbourhoods use `<` or `≤` does not change the value on finite sets.
pub fn set_distance<T, F>(e1: &[T], e2: &[T], metric: F) -> Result<f64>
where
    T: Sync,
    F: Fn(&T, &T) -> f64 + Sync,
{
    if e1.is_empty() || e2.is_empty() {
        return Err(Error::invalid("set_distance needs nonempty sets"));
    }
    let forward = directed_distance(e1, e2, &metric);
    let backward = directed_distance(e2, e1, &|a: &T, b: &T| metric(b, a));
    Ok(forward.max(backward))
}

/// `max_{a ∈ from} min_{b ∈ to} d(a, b)`.
///
/// Sets that trace curves are scanned with a warm start at the previous best
/// match, and the inner scan stops as soon as it cannot raise the running
/// maximum. Max and min are exact, so chunking across threads does not change
/// the result.
fn directed_distance<T, F>(from: &[T], to: &[T], metric: &F) -> f64
where
    T: Sync,
    F: Fn(&T, &T) -> f64 + Sync,
{
    const CHUNK: usize = 256;
    from.par_chunks(CHUNK)
        .map(|chunk| {
            let mut running = 0.0f64;
            let mut hint = 0usize;
            for a in chunk {
                let mut best = f64::INFINITY;
                let mut best_idx = hint;
                for idx in outward(hint, to.len()) {
                    let d = metric(a, &to[idx]);
                    if d < best {
                        best = d;
                        best_idx = idx;
                        if best <= running {
                            break;
                        }
                    }
                }
                hint = best_idx;
                running = running.max(best);
            }
            running
        })
        .reduce(|| 0.0, f64::max)
}

/// Indices `start, start+1, start-1, start+2, …` covering `0..len`.
fn outward(start: usize, len: usize) -> impl Iterator<Item = usize> {
    let start = start.min(len.saturating_sub(1));
    (0..2 * len).filter_map(move |k| {
        let step = k.div_ceil(2);
        if k % 2 == 1 {
            let idx = start + step;
            (idx < len).then_some(idx)
        } else {
            start.checked_sub(step)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abs(a: &f64, b: &f64) -> f64 {
        (a - b).abs()
    }

    #[test]
    fn outward_visits_every_index_once() {
        for len in 1..7 {
            for start in 0..len {
                let mut seen: Vec<_> = outward(start, len).collect();
                seen.sort();
                assert_eq!(seen, (0..len).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn set_distance_examples() {
        assert_eq!(set_distance(&[0.5], &[0.5], abs).unwrap(), 0.0);
        assert_eq!(set_distance(&[0.0], &[1.0], abs).unwrap(), 1.0);
        assert_eq!(set_distance(&[0.0, 1.0], &[0.0], abs).unwrap(), 1.0);
        assert_eq!(set_distance(&[0.0], &[0.0, 1.0], abs).unwrap(), 1.0);
    }

    #[test]
    fn set_distance_rejects_empty() {
        let empty: [f64; 0] = [];
        assert!(matches!(
            set_distance(&empty, &[1.0], abs),
            Err(Error::InvalidInput(_))
        ));
        assert!(set_distance(&[1.0], &empty, abs).is_err());
    }

    #[test]
    fn directed_distance_matches_brute_force() {
        let a: Vec<f64> = (0..700).map(|k| (k as f64 * 0.37).sin() * 3.0).collect();
        let b: Vec<f64> = (0..500).map(|k| (k as f64 * 0.11).cos() * 2.5).collect();
        let brute = a
            .iter()
            .map(|x| {
                b.iter()
                    .map(|y| (x - y).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max);
        assert_eq!(directed_distance(&a, &b, &abs), brute);
    }

    #[test]
    fn reduce_angle_handles_tiny_negatives() {
        assert_eq!(reduce_angle(-1e-18), 0.0);
        assert_eq!(reduce_angle(TAU), 0.0);
        assert!((reduce_angle(-0.5) - (TAU - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn torus_metric_basics() {
        let t = Torus::plane();
        let p = Point::new(vec![0.0, 0.0]);
        let q = Point::new(vec![std::f64::consts::PI, 0.1]);
        assert_eq!(t.distance(&p, &q), 0.5);
        assert_eq!(t.distance(&p, &p), 0.0);
        let near_wrap = Point::new(vec![TAU - 0.1, 0.0]);
        assert!((t.distance(&p, &near_wrap) - 0.1 / TAU).abs() < 1e-15);
    }

    #[test]
    fn torus_sampler_covers() {
        let pts = Torus::plane().sample(10);
        assert_eq!(pts.len(), 16);
        assert!(pts
            .iter()
            .all(|p| p.coords().iter().all(|&c| (0.0..TAU).contains(&c))));
    }

    #[test]
    fn evaluate_flow_checks_dimension() {
        let flow = CircleRotation::unit();
        let bad = Point::new(vec![0.0, 1.0]);
        assert!(matches!(
            evaluate_flow(&flow, 1.0, &bad),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn identity_orbit_is_constant() {
        let flow = IdentityFlow::new(Torus::plane());
        let x = Point::new(vec![1.0, 2.0]);
        let orbit = sample_orbit(&flow, &x, -1.0, 1.0, 0.25).unwrap();
        assert_eq!(orbit.len(), 9);
        assert!(orbit.iter().all(|p| *p == x));
    }

    #[test]
    fn circle_orbit_closes_after_one_period() {
        let flow = CircleRotation::unit();
        let x = Point::new(vec![0.7]);
        let orbit = sample_orbit(&flow, &x, 0.0, TAU, TAU / 100.0).unwrap();
        assert_eq!(orbit.len(), 101);
        let first = &orbit[0];
        let last = orbit.last().unwrap();
        assert!(flow.space().distance(first, last) < 1e-12);
    }

    #[test]
    fn sample_orbit_rejects_bad_step() {
        let flow = CircleRotation::unit();
        let x = Point::new(vec![0.0]);
        assert!(sample_orbit(&flow, &x, 0.0, 1.0, 0.0).is_err());
        assert!(sample_orbit(&flow, &x, 0.0, 1.0, -0.1).is_err());
        assert!(sample_orbit(&flow, &x, 1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn grid_len_reaches_endpoint() {
        assert_eq!(grid_len(0.0, 1.0, 0.1), 11);
        assert_eq!(grid_len(0.0, 4.0, 0.01), 401);
        assert_eq!(grid_len(0.0, 1.05, 0.1), 11);
    }
}
