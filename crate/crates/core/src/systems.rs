//! Built-in systems: the irrational torus rotation and the two-mass measure.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use crate::dynamics::{reduce_angle, CircleRotation, Flow, MetricSpace, Point, Torus};
use crate::measure::{in_growth_class, AtomicMeasure, GrowthClass, LogPolarAtom};
use crate::{Error, Result};

/// `(√5 - 1)/2`, the golden ratio conjugate.
pub const GOLDEN_ALPHA: f64 = 0.618_033_988_749_894_8;

/// `T^t(φ, θ) = (φ + 2πt, θ + 2παt)` on the 2-torus.
#[derive(Debug, Clone, Copy)]
pub struct TorusRotation {
    alpha: f64,
    space: Torus,
}

impl TorusRotation {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Flow for TorusRotation {
    fn space(&self) -> &dyn MetricSpace {
        &self.space
    }

    fn advance(&self, t: f64, m: &Point) -> Point {
        let c = m.coords();
        Point::new(vec![
            reduce_angle(c[0] + TAU * t),
            reduce_angle(c[1] + self.alpha * TAU * t),
        ])
    }
}

pub fn torus_flow(alpha: f64) -> Result<TorusRotation> {
    if !alpha.is_finite() {
        return Err(Error::invalid("alpha must be finite"));
    }
    Ok(TorusRotation {
        alpha,
        space: Torus::plane(),
    })
}

/// Two atoms on the positive real axis: mass `σ/2` at radius 1 and
/// `σ/2 - ε` at radius `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoMassConfig {
    pub sigma: f64,
    pub epsilon: f64,
    pub alpha: f64,
}

impl Default for TwoMassConfig {
    fn default() -> Self {
        TwoMassConfig {
            sigma: 1.0,
            epsilon: 0.1,
            alpha: GOLDEN_ALPHA,
        }
    }
}

impl TwoMassConfig {
    pub fn masses(&self) -> (f64, f64) {
        (0.5 * self.sigma, 0.5 * self.sigma - self.epsilon)
    }

    pub fn radii(&self) -> (f64, f64) {
        (1.0, self.alpha)
    }
}

/// The measure attached to the two-mass configuration, checked against `gc`.
///
/// `ε = σ/2` drops the second atom. Anything that leaves the class is
/// rejected with the worst ratio `μ(r < R)/(σR^ρ)` in the message.
pub fn hom_measure(config: &TwoMassConfig, gc: &GrowthClass) -> Result<AtomicMeasure> {
    let TwoMassConfig {
        sigma,
        epsilon,
        alpha,
    } = *config;
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::invalid("sigma must be positive"));
    }
    if !(epsilon >= 0.0) || epsilon > 0.5 * sigma {
        return Err(Error::invalid(format!(
            "epsilon must lie in [0, sigma/2], got {epsilon}"
        )));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::invalid("alpha must be positive"));
    }
    let (m1, m2) = config.masses();
    let mut atoms = vec![LogPolarAtom::new(0.0, 0.0, m1)?];
    if m2 > 0.0 {
        atoms.push(LogPolarAtom::new(alpha.ln(), 0.0, m2)?);
    }
    let mu = AtomicMeasure::new(atoms)?;
    let check = in_growth_class(&mu, gc);
    if !check.inside {
        return Err(Error::invalid(format!(
            "measure leaves the growth class: worst ratio {}",
            check.worst_ratio
        )));
    }
    Ok(mu)
}

/// Systems addressable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    TorusGolden,
    TwoMassDefault,
    CircleRotation,
}

impl Preset {
    pub const ALL: [Preset; 3] = [
        Preset::TorusGolden,
        Preset::TwoMassDefault,
        Preset::CircleRotation,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::TorusGolden => "torus-golden",
            Preset::TwoMassDefault => "two-mass-default",
            Preset::CircleRotation => "circle-rotation",
        }
    }

    /// The flow behind the preset. The two-mass preset is a measure, not a
    /// flow on a compact space, and has none.
    pub fn flow(&self) -> Option<Box<dyn Flow>> {
        match self {
            Preset::TorusGolden => Some(Box::new(
                torus_flow(GOLDEN_ALPHA).expect("golden alpha is finite"),
            )),
            Preset::CircleRotation => Some(Box::new(CircleRotation::unit())),
            Preset::TwoMassDefault => None,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown preset {s:?}")))
    }
}
