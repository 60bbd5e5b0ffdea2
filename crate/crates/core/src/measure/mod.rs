//! Atomic measures on the punctured plane and the scaling flow.
//!
//! Points of `ℂ∖0` are written in log-polar form `z = e^{y + iφ}`. In these
//! coordinates the scaling flow `T_t μ(E) = μ(e^t E)·e^{-ρt}` moves every atom
//! from `y` to `y - t` and multiplies its mass by `e^{-ρt}`.

mod frechet;
mod io;
mod test_function;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::dynamics::reduce_angle;
use crate::{Error, Result};

pub use frechet::{frechet_distance, FrechetFamily, Pairable, DEFAULT_FAMILY_SIZE};
pub use io::{read_measure_csv, read_measure_json, write_measure_csv, write_measure_json};
pub use test_function::{Angular, Bump, TestFunction};

/// A point mass at `e^{y + iφ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogPolarAtom {
    pub y: f64,
    pub phi: f64,
    pub mass: f64,
}

impl LogPolarAtom {
    /// Validates the atom and reduces `phi` to `[0, 2π)`.
    pub fn new(y: f64, phi: f64, mass: f64) -> Result<Self> {
        if !y.is_finite() || !phi.is_finite() || !mass.is_finite() {
            return Err(Error::invalid("atom coordinates and mass must be finite"));
        }
        if !(mass > 0.0) {
            return Err(Error::invalid(format!(
                "atom mass must be positive, got {mass}"
            )));
        }
        Ok(LogPolarAtom {
            y,
            phi: reduce_angle(phi),
            mass,
        })
    }

    pub fn radius(&self) -> f64 {
        self.y.exp()
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.y
            .total_cmp(&other.y)
            .then(self.phi.total_cmp(&other.phi))
            .then(self.mass.total_cmp(&other.mass))
    }
}

/// A finite positive combination of point masses.
///
/// Atoms are kept sorted by `(y, φ, mass)` with coincident positions merged,
/// which fixes every summation order in the crate.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AtomicMeasure {
    atoms: Vec<LogPolarAtom>,
}

impl AtomicMeasure {
    pub fn new(atoms: Vec<LogPolarAtom>) -> Result<Self> {
        let atoms = atoms
            .into_iter()
            .map(|a| LogPolarAtom::new(a.y, a.phi, a.mass))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::canonical(atoms))
    }

    pub fn empty() -> Self {
        AtomicMeasure::default()
    }

    /// Sorts and merges atoms that are already individually valid.
    pub(crate) fn canonical(mut atoms: Vec<LogPolarAtom>) -> Self {
        atoms.retain(|a| a.mass > 0.0);
        atoms.sort_by(LogPolarAtom::canonical_cmp);
        let mut merged: Vec<LogPolarAtom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged.last_mut() {
                Some(last) if last.y == a.y && last.phi == a.phi => last.mass += a.mass,
                _ => merged.push(a),
            }
        }
        AtomicMeasure { atoms: merged }
    }

    pub fn atoms(&self) -> &[LogPolarAtom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }
}

/// Parameters of the class `M[ρ, σ] = {μ : μ(|ζ| < r) ≤ σ r^ρ for all r > 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthClass {
    pub rho: f64,
    pub sigma: f64,
}

impl GrowthClass {
    pub fn new(rho: f64, sigma: f64) -> Result<Self> {
        if !(rho > 0.0 && sigma > 0.0) || !rho.is_finite() || !sigma.is_finite() {
            return Err(Error::invalid("growth class needs rho > 0 and sigma > 0"));
        }
        Ok(GrowthClass { rho, sigma })
    }
}

/// Result of [`in_growth_class`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthCheck {
    pub inside: bool,
    /// `max_i μ(|ζ| ≤ r_i) / (σ r_i^ρ)` over the atom radii; 0 for the empty measure.
    pub worst_ratio: f64,
}

/// `μ(|ζ| < r)`: mass strictly inside radius `r`.
pub fn counting_function(mu: &AtomicMeasure, r: f64) -> Result<f64> {
    if !(r > 0.0) || r.is_nan() {
        return Err(Error::invalid("radius must be positive"));
    }
    Ok(mu
        .atoms
        .iter()
        .take_while(|a| a.radius() < r)
        .map(|a| a.mass)
        .sum())
}

/// Exact membership test for atomic measures.
///
/// `μ(r)/r^ρ` is constant-numerator and decreasing on each interval where the
/// counting function is constant, so its supremum is approached at the left
/// end of each interval, i.e. just above an atom radius. Checking the
/// cumulative mass *including* each radius against `σ r_i^ρ` is therefore
/// equivalent to the condition for all `r > 0`.
pub fn in_growth_class(mu: &AtomicMeasure, gc: &GrowthClass) -> GrowthCheck {
    let mut cumulative = 0.0;
    let mut worst = 0.0f64;
    let atoms = &mu.atoms;
    let mut i = 0;
    while i < atoms.len() {
        let y = atoms[i].y;
        while i < atoms.len() && atoms[i].y == y {
            cumulative += atoms[i].mass;
            i += 1;
        }
        worst = worst.max(cumulative * (-gc.rho * y).exp() / gc.sigma);
    }
    GrowthCheck {
        inside: worst <= 1.0,
        worst_ratio: worst,
    }
}

/// The scaling flow: `(y, φ, w) ↦ (y - t, φ, w·e^{-ρt})`.
pub fn apply_flow(mu: &AtomicMeasure, t: f64, gc: &GrowthClass) -> AtomicMeasure {
    let scale = (-gc.rho * t).exp();
    AtomicMeasure::canonical(
        mu.atoms
            .iter()
            .map(|a| LogPolarAtom {
                y: a.y - t,
                phi: a.phi,
                mass: a.mass * scale,
            })
            .collect(),
    )
}

/// `⟨μ, g⟩ = Σ w·Φ(φ)·R(y)`, summed in canonical order over atoms inside the
/// radial support of `g`.
pub fn pair(mu: &AtomicMeasure, g: &TestFunction) -> f64 {
    pair_atoms(&mu.atoms, g)
}

pub(crate) fn pair_atoms(atoms: &[LogPolarAtom], g: &TestFunction) -> f64 {
    let mut sum = 0.0;
    for a in atoms {
        if g.radial.contains(a.y) {
            sum += a.mass * g.angular.eval(a.phi) * g.radial.eval(a.y);
        }
    }
    sum
}

impl Pairable for AtomicMeasure {
    fn pair(&self, g: &TestFunction) -> f64 {
        pair(self, g)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::LN_2;

    use super::*;

    fn atom(y: f64, phi: f64, mass: f64) -> LogPolarAtom {
        LogPolarAtom::new(y, phi, mass).unwrap()
    }

    fn two_mass() -> AtomicMeasure {
        let alpha: f64 = (5f64.sqrt() - 1.0) / 2.0;
        AtomicMeasure::new(vec![atom(0.0, 0.0, 0.5), atom(alpha.ln(), 0.0, 0.4)]).unwrap()
    }

    #[test]
    fn canonical_order_and_merge() {
        let mu = AtomicMeasure::new(vec![
            atom(1.0, 0.5, 0.1),
            atom(-1.0, 0.0, 0.2),
            atom(1.0, 0.5, 0.3),
            atom(1.0, 0.2, 0.4),
        ])
        .unwrap();
        let ys: Vec<_> = mu.atoms().iter().map(|a| (a.y, a.phi, a.mass)).collect();
        assert_eq!(
            ys,
            vec![(-1.0, 0.0, 0.2), (1.0, 0.2, 0.4), (1.0, 0.5, 0.1 + 0.3)]
        );
    }

    #[test]
    fn atom_validation() {
        assert!(LogPolarAtom::new(0.0, 0.0, 0.0).is_err());
        assert!(LogPolarAtom::new(0.0, 0.0, -1.0).is_err());
        assert!(LogPolarAtom::new(f64::NAN, 0.0, 1.0).is_err());
        assert!(LogPolarAtom::new(0.0, f64::INFINITY, 1.0).is_err());
        let a = atom(0.0, -0.5, 1.0);
        assert!((a.phi - (std::f64::consts::TAU - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn counting_function_examples() {
        let mu = two_mass();
        assert_eq!(counting_function(&mu, 0.5).unwrap(), 0.0);
        assert_eq!(counting_function(&mu, 1.0).unwrap(), 0.4);
        assert!((counting_function(&mu, 2.0).unwrap() - 0.9).abs() < 1e-15);
        assert!(counting_function(&mu, 0.0).is_err());
        assert!(counting_function(&mu, -1.0).is_err());
    }

    #[test]
    fn growth_class_examples() {
        let gc = GrowthClass::new(1.0, 1.0).unwrap();
        let single = AtomicMeasure::new(vec![atom(0.0, 0.0, 1.0)]).unwrap();
        assert_eq!(
            in_growth_class(&single, &gc),
            GrowthCheck {
                inside: true,
                worst_ratio: 1.0
            }
        );
        let heavy = AtomicMeasure::new(vec![atom(0.0, 0.0, 1.1)]).unwrap();
        assert!(!in_growth_class(&heavy, &gc).inside);
        let empty = in_growth_class(&AtomicMeasure::empty(), &gc);
        assert!(empty.inside);
        assert_eq!(empty.worst_ratio, 0.0);
        assert!(in_growth_class(&two_mass(), &gc).inside);
    }

    /// Dense-grid oracle for the class test: scan `μ(|ζ| < r) / (σ r^ρ)` over
    /// radii just above every atom and on a log grid.
    fn brute_force_ratio(mu: &AtomicMeasure, gc: &GrowthClass) -> f64 {
        let mut radii: Vec<f64> = (-4000..=4000).map(|k| (k as f64 * 1e-3).exp()).collect();
        for a in mu.atoms() {
            radii.push(a.radius() * (1.0 + 1e-12));
        }
        radii
            .into_iter()
            .map(|r| counting_function(mu, r).unwrap() / (gc.sigma * r.powf(gc.rho)))
            .fold(0.0, f64::max)
    }

    #[test]
    fn finite_class_test_agrees_with_dense_scan() {
        let gc = GrowthClass::new(1.0, 1.0).unwrap();
        for mu in [
            AtomicMeasure::new(vec![atom(0.0, 0.0, 1.0)]).unwrap(),
            AtomicMeasure::new(vec![atom(0.0, 0.0, 1.1)]).unwrap(),
            two_mass(),
            AtomicMeasure::new(vec![atom(-1.0, 0.0, 0.3), atom(0.5, 1.0, 0.9)]).unwrap(),
        ] {
            let exact = in_growth_class(&mu, &gc).worst_ratio;
            let scan = brute_force_ratio(&mu, &gc);
            assert!(
                (exact - scan).abs() < 1e-9 * exact.max(1.0),
                "{exact} vs {scan}"
            );
        }
    }

    #[test]
    fn apply_flow_examples() {
        let gc = GrowthClass::new(1.0, 1.0).unwrap();
        let mu = AtomicMeasure::new(vec![atom(0.0, 0.0, 1.0)]).unwrap();
        assert_eq!(apply_flow(&mu, 0.0, &gc), mu);
        let moved = apply_flow(&mu, LN_2, &gc);
        assert_eq!(moved.atoms()[0].y, -LN_2);
        assert!((moved.atoms()[0].mass - 0.5).abs() < 1e-15);

        let twice = apply_flow(&apply_flow(&two_mass(), 1.0, &gc), 2.0, &gc);
        let once = apply_flow(&two_mass(), 3.0, &gc);
        for (a, b) in twice.atoms().iter().zip(once.atoms()) {
            assert!((a.y - b.y).abs() < 1e-12);
            assert!((a.mass - b.mass).abs() < 1e-12 * b.mass.max(1.0));
            assert_eq!(a.phi, b.phi);
        }
    }

    #[test]
    fn pairing_examples() {
        let mu = AtomicMeasure::new(vec![atom(0.0, 0.0, 0.5)]).unwrap();
        let centered = TestFunction::new(Angular::Constant, Bump::new(0.0, 1.0).unwrap());
        assert_eq!(pair(&mu, &centered), 0.5);
        let far = TestFunction::new(Angular::Constant, Bump::new(5.0, 1.0).unwrap());
        assert_eq!(pair(&mu, &far), 0.0);

        let symmetric =
            AtomicMeasure::new(vec![atom(0.2, 0.7, 0.3), atom(0.2, -0.7, 0.3)]).unwrap();
        let odd = TestFunction::new(Angular::Sin(1), Bump::new(0.0, 1.0).unwrap());
        assert!(pair(&symmetric, &odd).abs() < 1e-15);
    }
}
