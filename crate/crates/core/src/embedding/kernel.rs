use std::f64::consts::PI;

use crate::{Error, Result};

const MAX_NODES: usize = 10_000_000;

/// Tolerance for treating a ratio of grid quantities as an integer.
fn integer_ratio(num: f64, den: f64, what: &str) -> Result<i64> {
    let k = (num / den).round();
    if !k.is_finite() || k.abs() > MAX_NODES as f64 {
        return Err(Error::invalid(format!("{what} is out of range")));
    }
    if (k * den - num).abs() > 1e-9 * num.abs().max(1.0) {
        return Err(Error::invalid(format!(
            "{what} = {num} is not a multiple of the step {den}"
        )));
    }
    Ok(k as i64)
}

pub(crate) fn grid_steps(tau: f64, step: f64) -> Result<i64> {
    if !tau.is_finite() {
        return Err(Error::invalid("shift must be finite"));
    }
    integer_ratio(tau, step, "shift")
}

/// Standard normal density `X(t) = e^{-t²/2}/√(2π)`.
pub fn gaussian(t: f64) -> f64 {
    (-0.5 * t * t).exp() / (2.0 * PI).sqrt()
}

/// Trapezoid quadrature of the standard normal on `[-T_cut, T_cut]`.
///
/// Nodes are `t_q = q·δt` for `|q| ≤ T_cut/δt`. Each weight already contains
/// `X(t_q)`, so a convolution is `Σ_q c_q f(y - t_q)`. When rounding pushes
/// the total above one the weights are scaled down, keeping `Σ c_q ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianKernel {
    t_cut: f64,
    dt: f64,
    half: i64,
    weights: Vec<f64>,
}

pub const DEFAULT_T_CUT: f64 = 8.0;
pub const DEFAULT_KERNEL_DT: f64 = 0.01;

impl GaussianKernel {
    pub fn new(t_cut: f64, dt: f64) -> Result<Self> {
        if !(t_cut > 0.0) || !t_cut.is_finite() || !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::invalid("kernel needs positive T_cut and dt"));
        }
        let half = integer_ratio(t_cut, dt, "T_cut")?;
        if half < 1 || 2 * half as usize + 1 > MAX_NODES {
            return Err(Error::invalid("kernel node count out of range"));
        }
        let mut weights: Vec<f64> = (-half..=half)
            .map(|q| {
                let end = if q.abs() == half { 0.5 } else { 1.0 };
                end * gaussian(q as f64 * dt) * dt
            })
            .collect();
        let mut total: f64 = weights.iter().sum();
        while total > 1.0 {
            let scale = (1.0 / total).min(1.0 - f64::EPSILON);
            weights.iter_mut().for_each(|w| *w *= scale);
            total = weights.iter().sum();
        }
        Ok(GaussianKernel {
            t_cut,
            dt,
            half,
            weights,
        })
    }

    pub fn standard() -> Self {
        GaussianKernel::new(DEFAULT_T_CUT, DEFAULT_KERNEL_DT).expect("defaults are valid")
    }

    pub fn t_cut(&self) -> f64 {
        self.t_cut
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `(t_q, c_q)` in ascending `t`.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (-self.half..=self.half)
            .zip(&self.weights)
            .map(move |(q, &w)| (q as f64 * self.dt, w))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ c_q`, at most one.
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Mass of the normal distribution outside `[-T_cut, T_cut]`, bounded by
    /// `2X(T)/T`.
    pub fn tail_bound(&self) -> f64 {
        2.0 * gaussian(self.t_cut) / self.t_cut
    }
}

/// Uniform grid `y_j = (start + j)·δy`, `j = 0, …, len-1`.
///
/// Grid points are integer multiples of the step, so shifting by a multiple
/// of `δy` only moves the start index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YGrid {
    start: i64,
    len: usize,
    dy: f64,
}

impl YGrid {
    pub fn new(y_min: f64, y_max: f64, dy: f64) -> Result<Self> {
        if !(dy > 0.0) || !dy.is_finite() || !y_min.is_finite() || !y_max.is_finite() {
            return Err(Error::invalid(
                "y grid needs finite bounds and positive step",
            ));
        }
        if !(y_min <= y_max) {
            return Err(Error::invalid("y grid requires y_min <= y_max"));
        }
        let start = integer_ratio(y_min, dy, "y_min")?;
        let end = integer_ratio(y_max, dy, "y_max")?;
        YGrid::from_indices(start, (end - start) as usize + 1, dy)
    }

    pub fn from_indices(start: i64, len: usize, dy: f64) -> Result<Self> {
        if len == 0 || len > MAX_NODES {
            return Err(Error::invalid("y grid length out of range"));
        }
        if !(dy > 0.0) || !dy.is_finite() {
            return Err(Error::invalid("y grid step must be positive"));
        }
        if start.unsigned_abs() as usize > MAX_NODES {
            return Err(Error::invalid("y grid start out of range"));
        }
        Ok(YGrid { start, len, dy })
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn y(&self, j: usize) -> f64 {
        (self.start + j as i64) as f64 * self.dy
    }

    pub fn y_min(&self) -> f64 {
        self.y(0)
    }

    pub fn y_max(&self) -> f64 {
        self.y(self.len - 1)
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|j| self.y(j))
    }

    /// The same grid moved by `steps·δy`.
    pub fn shifted(&self, steps: i64) -> Self {
        YGrid {
            start: self.start + steps,
            ..*self
        }
    }
}
