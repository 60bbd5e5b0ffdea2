use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Angular factor `Φ(φ)` of a separable test function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Angular {
    Constant,
    Cos(u32),
    Sin(u32),
}

impl Angular {
    pub fn eval(&self, phi: f64) -> f64 {
        match *self {
            Angular::Constant => 1.0,
            Angular::Cos(n) => (n as f64 * phi).cos(),
            Angular::Sin(n) => (n as f64 * phi).sin(),
        }
    }

    /// Angular factors in enumeration order: `1, cos φ, sin φ, cos 2φ, …`.
    pub fn nth(index: usize) -> Angular {
        match index {
            0 => Angular::Constant,
            i if i % 2 == 1 => Angular::Cos(i.div_ceil(2) as u32),
            i => Angular::Sin((i / 2) as u32),
        }
    }

    /// Every probe up to and including `harmonic`.
    pub fn up_to(harmonic: u32) -> Vec<Angular> {
        (0..=2 * harmonic as usize).map(Angular::nth).collect()
    }
}

/// Smooth bump `R(y) = exp(1 - 1/(1 - u²))`, `u = (y - c)/h`, supported on
/// `(c - h, c + h)` with `R(c) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
}

impl Bump {
    pub fn new(center: f64, half_width: f64) -> Result<Self> {
        if !center.is_finite() || !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::invalid(
                "bump needs finite center and positive half-width",
            ));
        }
        Ok(Bump { center, half_width })
    }

    /// Whether `y` lies in the open support.
    pub fn contains(&self, y: f64) -> bool {
        (y - self.center).abs() < self.half_width
    }

    pub fn eval(&self, y: f64) -> f64 {
        let u = (y - self.center) / self.half_width;
        let q = 1.0 - u * u;
        if q <= 0.0 {
            0.0
        } else {
            (1.0 - 1.0 / q).exp()
        }
    }

    /// Closed support `[c - h, c + h]`.
    pub fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }
}

/// `ψ(φ, y) = Φ(φ)·R(y)`, a smooth function with compact support in `ℂ∖0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub angular: Angular,
    pub radial: Bump,
}

impl TestFunction {
    pub fn new(angular: Angular, radial: Bump) -> Self {
        TestFunction { angular, radial }
    }

    pub fn eval(&self, phi: f64, y: f64) -> f64 {
        self.angular.eval(phi) * self.radial.eval(y)
    }
}
