//! Sampled pseudo-trajectories: asymptotic dynamical defect and density.

use super::{evaluate_flow, grid_len, Flow, MetricSpace, Point};
use crate::{Error, Result};

/// A curve `m(t)` known at strictly increasing sample times.
///
/// Off-sample values use the nearest sample in time (ties go to the earlier
/// sample). No continuity is assumed, so piecewise-continuous curves are fine.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    times: Vec<f64>,
    points: Vec<Point>,
}

impl SampledCurve {
    pub fn new(times: Vec<f64>, points: Vec<Point>) -> Result<Self> {
        if times.is_empty() || times.len() != points.len() {
            return Err(Error::invalid(
                "curve needs as many points as times, at least one",
            ));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("curve times must be finite"));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("curve times must be strictly increasing"));
        }
        Ok(SampledCurve { times, points })
    }

    /// The true trajectory `t ↦ T^t x` sampled on `[t_min, t_max]` with step `dt`.
    pub fn trajectory<F: Flow + ?Sized>(
        flow: &F,
        x: &Point,
        t_min: f64,
        t_max: f64,
        dt: f64,
    ) -> Result<Self> {
        let points = super::sample_orbit(flow, x, t_min, t_max, dt)?;
        let times = (0..points.len()).map(|k| t_min + k as f64 * dt).collect();
        SampledCurve::new(times, points)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// Nearest sample to `t`.
    pub fn at(&self, t: f64) -> &Point {
        let idx = self.times.partition_point(|&s| s < t);
        if idx == 0 {
            return &self.points[0];
        }
        if idx == self.times.len() {
            return &self.points[idx - 1];
        }
        let (before, after) = (self.times[idx - 1], self.times[idx]);
        if t - before <= after - t {
            &self.points[idx - 1]
        } else {
            &self.points[idx]
        }
    }
}

/// Which comparison [`adpt_defect`] measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DefectReading {
    /// `d(T^τ m(t), m(t+τ))`, which vanishes on true trajectories.
    #[default]
    Increment,
    /// `d(T^{t+τ} m(t), m(t+τ))`, the formula taken verbatim.
    Literal,
}

/// Largest deviation of the curve from the flow over a window of increments.
///
/// Returns the supremum over `τ ∈ {a, a + tau_step, …} ∪ {b}` of the distance
/// between the flowed sample and the curve sample at `t + τ`.
pub fn adpt_defect<F: Flow + ?Sized>(
    curve: &SampledCurve,
    flow: &F,
    t: f64,
    window: (f64, f64),
    tau_step: f64,
    reading: DefectReading,
) -> Result<f64> {
    let (a, b) = window;
    if !(tau_step > 0.0) || !tau_step.is_finite() {
        return Err(Error::invalid("tau_step must be positive"));
    }
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::invalid("window must satisfy a <= b"));
    }
    let lo = t + a.min(0.0);
    let hi = t + b.max(0.0);
    if lo < curve.start() || hi > curve.end() {
        return Err(Error::invalid(format!(
            "window [{lo}, {hi}] leaves the curve range [{}, {}]",
            curve.start(),
            curve.end()
        )));
    }
    let n = grid_len(a, b, tau_step);
    let mut taus: Vec<f64> = (0..n).map(|k| a + k as f64 * tau_step).collect();
    if taus.last().is_some_and(|&last| b - last > 1e-12) {
        taus.push(b);
    }

    let space = flow.space();
    let base = curve.at(t);
    let mut worst = 0.0f64;
    for tau in taus {
        let flow_time = match reading {
            DefectReading::Increment => tau,
            DefectReading::Literal => t + tau,
        };
        let moved = evaluate_flow(flow, flow_time, base)?;
        worst = worst.max(space.distance(&moved, curve.at(t + tau)));
    }
    Ok(worst)
}

/// How far the tail `{m(t) : t ≥ a}` is from covering `cover`.
///
/// Returns `max_{p ∈ cover} min_{t_k ≥ a} d(p, m(t_k))`.
pub fn density_defect(
    curve: &SampledCurve,
    cover: &[Point],
    a: f64,
    space: &dyn MetricSpace,
) -> Result<f64> {
    if cover.is_empty() {
        return Err(Error::invalid("cover must be nonempty"));
    }
    let start = curve.times.partition_point(|&s| s < a);
    if start == curve.times.len() {
        return Err(Error::invalid(format!("no curve samples at or after {a}")));
    }
    let tail = &curve.points[start..];
    Ok(cover
        .iter()
        .map(|p| {
            tail.iter()
                .map(|q| space.distance(p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max))
}
