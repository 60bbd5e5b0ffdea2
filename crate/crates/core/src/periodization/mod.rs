//! Periodic extension of a measure under the scaling flow.
//!
//! Truncating `μ` to the fundamental strip `-P ≤ y < P` and summing all
//! translates `T_{2kP}` of the truncation gives a measure whose orbit is
//! periodic with period `2P`. The replicas are never materialised: a test
//! function with bounded radial support meets only finitely many of them, so
//! pairings are exact finite sums.

mod experiments;

use crate::measure::{
    pair_atoms, AtomicMeasure, GrowthClass, LogPolarAtom, Pairable, TestFunction,
};
use crate::{Error, Result};

pub use experiments::{
    convergence_experiment, orbit_distance_experiment, ConvergenceRow, OrbitDistanceRow,
};

fn check_half_period(p: f64) -> Result<()> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::invalid("half-period P must be positive"));
    }
    Ok(())
}

/// Keeps the atoms with `y ∈ [-P, P)`.
///
/// The strip is half-open so that the translates by multiples of `2P` tile
/// the line without overlap.
pub fn truncate(mu: &AtomicMeasure, p: f64) -> Result<AtomicMeasure> {
    check_half_period(p)?;
    Ok(AtomicMeasure::canonical(
        mu.atoms()
            .iter()
            .filter(|a| -p <= a.y && a.y < p)
            .copied()
            .collect(),
    ))
}

/// `x mod period` in `[0, period)`; exact when `x` is an integer multiple.
fn wrap(x: f64, period: f64) -> f64 {
    let r = x - (x / period).floor() * period;
    if r >= period {
        r - period
    } else if r < 0.0 {
        r + period
    } else {
        r
    }
}

/// The periodic measure `T_phase Σ_k T_{2kP} μ*` for a truncation `μ*`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodizedMeasure {
    seed: AtomicMeasure,
    half_period: f64,
    gc: GrowthClass,
    phase: f64,
}

/// Wraps `truncate(mu, P)` with period `2P`.
pub fn periodize(mu: &AtomicMeasure, p: f64, gc: &GrowthClass) -> Result<PeriodizedMeasure> {
    Ok(PeriodizedMeasure {
        seed: truncate(mu, p)?,
        half_period: p,
        gc: *gc,
        phase: 0.0,
    })
}

impl PeriodizedMeasure {
    pub fn half_period(&self) -> f64 {
        self.half_period
    }

    pub fn period(&self) -> f64 {
        2.0 * self.half_period
    }

    pub fn growth_class(&self) -> &GrowthClass {
        &self.gc
    }

    /// Flow time accumulated since periodization, reduced to `[0, 2P)`.
    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// The truncation `μ*` the measure was built from.
    pub fn seed(&self) -> &AtomicMeasure {
        &self.seed
    }

    /// The atoms of the current state that lie in `[-P, P)`.
    ///
    /// At phase 0 this is exactly the truncation. After flowing, atoms that
    /// left the strip through `-P` re-enter at the top with one period's mass
    /// factor `e^{2Pρ}`.
    pub fn base(&self) -> AtomicMeasure {
        let p = self.half_period;
        let rho = self.gc.rho;
        let scale = (-rho * self.phase).exp();
        let lift = (2.0 * p * rho).exp();
        AtomicMeasure::canonical(
            self.seed
                .atoms()
                .iter()
                .map(|a| {
                    let y = a.y - self.phase;
                    let mass = a.mass * scale;
                    if y < -p {
                        LogPolarAtom {
                            y: y + 2.0 * p,
                            phi: a.phi,
                            mass: mass * lift,
                        }
                    } else {
                        LogPolarAtom {
                            y,
                            phi: a.phi,
                            mass,
                        }
                    }
                })
                .collect(),
        )
    }

    /// Every replica atom with `y` in the open interval `(lo, hi)`.
    pub fn replicas_in(&self, lo: f64, hi: f64) -> AtomicMeasure {
        let two_p = self.period();
        let rho = self.gc.rho;
        let mut out = Vec::new();
        for a in self.base().atoms() {
            // replica k sits at y - 2kP with mass w·e^{-2kPρ}
            let k_lo = ((a.y - hi) / two_p).floor() as i64;
            let k_hi = ((a.y - lo) / two_p).ceil() as i64;
            for k in k_lo..=k_hi {
                let (y, mass) = if k == 0 {
                    (a.y, a.mass)
                } else {
                    let shift = k as f64 * two_p;
                    (a.y - shift, a.mass * (-rho * shift).exp())
                };
                if lo < y && y < hi && mass > 0.0 && mass.is_finite() {
                    out.push(LogPolarAtom {
                        y,
                        phi: a.phi,
                        mass,
                    });
                }
            }
        }
        AtomicMeasure::canonical(out)
    }
}

/// Exact pairing with the periodic measure: only replicas that meet the
/// radial support of `g` are summed, in canonical atom order.
pub fn pair_periodized(pm: &PeriodizedMeasure, g: &TestFunction) -> f64 {
    let (lo, hi) = g.radial.support();
    pair_atoms(pm.replicas_in(lo, hi).atoms(), g)
}

impl Pairable for PeriodizedMeasure {
    fn pair(&self, g: &TestFunction) -> f64 {
        pair_periodized(self, g)
    }
}

/// Applies `T_t`. The phase is tracked modulo `2P`, so flowing by a whole
/// period returns an identical value.
pub fn flow_periodized(pm: &PeriodizedMeasure, t: f64) -> PeriodizedMeasure {
    let period = pm.period();
    PeriodizedMeasure {
        phase: wrap(pm.phase + wrap(t, period), period),
        ..pm.clone()
    }
}

/// A growth constant `σ'` with `μ_P ∈ M[ρ, σ']` whenever `μ ∈ M[ρ, σ]`:
/// `σ' = σ·(1 + 1/(1 - e^{-2ρP}))`.
///
/// The replica nearest a given radius contributes at most `σ r^ρ`, and the
/// replicas further in add a geometric series with ratio `e^{-2ρP}`.
pub fn periodized_growth_bound(gc: &GrowthClass, p: f64) -> f64 {
    let q = (-2.0 * gc.rho * p).exp();
    gc.sigma * (1.0 + 1.0 / (1.0 - q))
}
