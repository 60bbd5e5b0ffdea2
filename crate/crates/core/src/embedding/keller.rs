use std::f64::consts::TAU;

use crate::dynamics::{MetricSpace, Point};
use crate::{Error, Result};

/// Largest anchor count. Up to 52 anchors the bound `Σ w_i ≤ 1 - 2^{-N}` is
/// exact in double precision; beyond that it rounds to `Σ w_i ≤ 1`.
pub const MAX_ANCHORS: usize = 1000;

/// Positive atomic measure `Σ w_i δ_{φ_i}` on the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMeasure {
    pub angles: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CircleMeasure {
    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Distance-profile map of a compact space into positive circle measures of
/// mass below one.
///
/// Anchor `m_i` (1-based) carries the atom at `φ_i = 2π(i-1)/N` with weight
/// `w_i(m) = 2^{-i-1}(1 + d(m, m_i)/diam)`. Two points with the same
/// distances to a dense anchor set coincide, which makes the map injective
/// in the limit of dense anchors.
#[derive(Debug, Clone, PartialEq)]
pub struct KellerMap {
    anchors: Vec<Point>,
    angles: Vec<f64>,
    normalizer: f64,
}

impl KellerMap {
    pub fn new(space: &dyn MetricSpace, anchors: Vec<Point>) -> Result<Self> {
        let n = anchors.len();
        if !(2..=MAX_ANCHORS).contains(&n) {
            return Err(Error::invalid(format!(
                "anchor count must be in 2..={MAX_ANCHORS}, got {n}"
            )));
        }
        if let Some(bad) = anchors.iter().find(|a| !space.contains(a)) {
            return Err(Error::invalid(format!(
                "anchor {:?} is not in the space",
                bad.coords()
            )));
        }
        let anchors: Vec<Point> = anchors.into_iter().map(|a| space.normalize(a)).collect();
        for (i, a) in anchors.iter().enumerate() {
            if anchors[..i].iter().any(|b| !(space.distance(a, b) > 0.0)) {
                return Err(Error::invalid("anchors must be pairwise distinct"));
            }
        }
        let normalizer = space.diameter();
        if !(normalizer > 0.0) || !normalizer.is_finite() {
            return Err(Error::invalid("space diameter must be positive"));
        }
        let angles = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        Ok(KellerMap {
            anchors,
            angles,
            normalizer,
        })
    }

    /// Anchors from the space's own covering sampler, at least `count` of them.
    pub fn from_sampler(space: &dyn MetricSpace, count: usize) -> Result<Self> {
        KellerMap::new(space, space.sample(count))
    }

    pub fn anchors(&self) -> &[Point] {
        &self.anchors
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    /// Weights without validating `m`; the caller normalizes it.
    pub(crate) fn weights_into(&self, space: &dyn MetricSpace, m: &Point, out: &mut [f64]) {
        let mut scale = 0.25;
        for (w, a) in out.iter_mut().zip(&self.anchors) {
            let ratio = (space.distance(m, a) / self.normalizer).min(1.0);
            *w = scale * (1.0 + ratio);
            scale *= 0.5;
        }
    }
}

/// The circle measure of `m`. Each weight lies in `[2^{-i-1}, 2^{-i}]`.
pub fn keller_embed(map: &KellerMap, space: &dyn MetricSpace, m: &Point) -> Result<CircleMeasure> {
    if m.dimension() != space.dimension() || !space.contains(m) {
        return Err(Error::invalid("point is not in the space"));
    }
    let m = space.normalize(m.clone());
    let mut weights = vec![0.0; map.len()];
    map.weights_into(space, &m, &mut weights);
    Ok(CircleMeasure {
        angles: map.angles.clone(),
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Torus;

    #[test]
    fn first_anchor_weight() {
        let t = Torus::plane();
        let map = KellerMap::from_sampler(&t, 16).unwrap();
        assert_eq!(map.len(), 16);
        let mu = keller_embed(&map, &t, &map.anchors()[0].clone()).unwrap();
        assert_eq!(mu.weights[0], 0.25);
        assert_eq!(mu.angles[4], TAU * 4.0 / 16.0);
    }

    #[test]
    fn weights_stay_in_band() {
        let t = Torus::plane();
        let map = KellerMap::from_sampler(&t, 16).unwrap();
        let bound = 1.0 - 0.5f64.powi(16);
        for p in t.sample(400) {
            let mu = keller_embed(&map, &t, &p).unwrap();
            for (i, w) in mu.weights.iter().enumerate() {
                let lo = 0.5f64.powi(i as i32 + 2);
                assert!(lo <= *w && *w <= 2.0 * lo);
            }
            assert!(mu.total_mass() <= bound);
        }
    }

    #[test]
    fn rejects_bad_anchor_sets() {
        let t = Torus::plane();
        let p = Point::new(vec![0.0, 0.0]);
        assert!(KellerMap::new(&t, vec![p.clone()]).is_err());
        assert!(KellerMap::new(&t, vec![p.clone(), p.clone()]).is_err());
        assert!(KellerMap::new(&t, vec![p.clone(), Point::new(vec![TAU, 0.0])]).is_err());
        assert!(KellerMap::new(&t, vec![p, Point::new(vec![1.0])]).is_err());
        assert!(KellerMap::from_sampler(&t, 1200).is_err());
    }

    #[test]
    fn lipschitz_in_each_weight() {
        let t = Torus::plane();
        let map = KellerMap::from_sampler(&t, 9).unwrap();
        let pts = t.sample(64);
        for a in &pts {
            let wa = keller_embed(&map, &t, a).unwrap().weights;
            for b in &pts {
                let wb = keller_embed(&map, &t, b).unwrap().weights;
                let lip = 0.25 / map.normalizer() * t.distance(a, b);
                for (x, y) in wa.iter().zip(&wb) {
                    assert!((x - y).abs() <= lip + 1e-15);
                }
            }
        }
    }
}
