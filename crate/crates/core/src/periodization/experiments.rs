//! Convergence of periodic approximations, pointwise and along orbits.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{periodize, truncate};
use crate::dynamics::set_distance;
use crate::measure::{apply_flow, frechet_distance, AtomicMeasure, FrechetFamily, GrowthClass};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub period: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitDistanceRow {
    pub period: f64,
    pub distance: f64,
    /// Largest metric step between consecutive orbit samples, over both
    /// orbits. The sampled distance is within this of the distance between
    /// the continuous orbit pieces.
    pub sampling_modulus: f64,
}

fn check_periods(periods: &[f64]) -> Result<()> {
    if periods.is_empty() {
        return Err(Error::invalid("at least one period is required"));
    }
    if periods.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
        return Err(Error::invalid("periods must be positive"));
    }
    if periods.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("periods must be strictly increasing"));
    }
    Ok(())
}

/// `d_n = frechet_distance(μ_{P_n}, μ)` for each half-period `P_n`.
pub fn convergence_experiment(
    mu: &AtomicMeasure,
    periods: &[f64],
    fam: &FrechetFamily,
    gc: &GrowthClass,
) -> Result<Vec<ConvergenceRow>> {
    check_periods(periods)?;
    periods
        .iter()
        .map(|&p| {
            let pm = periodize(mu, p, gc)?;
            Ok(ConvergenceRow {
                period: p,
                distance: frechet_distance(&pm, mu, fam),
            })
        })
        .collect()
}

/// Distance between the sampled orbit of `μ_{P_n}` over one period `[0, 2P_n]`
/// and the sampled orbit of `μ` over `[-T, T]`, for each `P_n`.
///
/// Orbit points are compared through their pairing vectors against the
/// family. Sample times are integer multiples `j·dt`, and `2P_n` must be a
/// multiple of `dt`. The periodic orbit at `i·dt` is evaluated replica by
/// replica as `Σ_k T_{(i + kN)·dt} μ*` with `N = 2P_n/dt`; a replica time then
/// coincides bit for bit with the matching sample of the orbit of `μ`.
pub fn orbit_distance_experiment(
    mu: &AtomicMeasure,
    periods: &[f64],
    fam: &FrechetFamily,
    gc: &GrowthClass,
    t_window: f64,
    dt: f64,
) -> Result<Vec<OrbitDistanceRow>> {
    check_periods(periods)?;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid("dt must be positive"));
    }
    if !(t_window > 0.0) || !t_window.is_finite() {
        return Err(Error::invalid("orbit window must be positive"));
    }
    let half = (t_window / dt + 1e-9).floor() as i64;
    if half > 10_000_000 {
        return Err(Error::invalid("orbit window holds too many samples"));
    }
    let reference: Vec<Vec<f64>> = (-half..=half)
        .map(|j| fam.pairings(&apply_flow(mu, j as f64 * dt, gc)))
        .collect();
    let reference_modulus = modulus(&reference, fam);
    let reference = dedup(reference);

    periods
        .iter()
        .map(|&p| {
            let steps = (2.0 * p / dt).round();
            if (steps * dt - 2.0 * p).abs() > 1e-9 * (2.0 * p).max(1.0) || steps < 1.0 {
                return Err(Error::invalid(format!(
                    "dt = {dt} does not divide the period 2P = {}",
                    2.0 * p
                )));
            }
            let periodic = periodic_orbit(mu, p, steps as i64, fam, gc, dt)?;
            let sampling_modulus = reference_modulus.max(modulus(&periodic, fam));
            let periodic = dedup(periodic);
            let distance = set_distance(&periodic, &reference, |a, b| fam.distance_between(a, b))?;
            Ok(OrbitDistanceRow {
                period: p,
                distance,
                sampling_modulus,
            })
        })
        .collect()
}

fn periodic_orbit(
    mu: &AtomicMeasure,
    p: f64,
    steps: i64,
    fam: &FrechetFamily,
    gc: &GrowthClass,
    dt: f64,
) -> Result<Vec<Vec<f64>>> {
    let seed = truncate(mu, p)?;
    let (lo, hi) = fam.radial_extent();
    let n = steps as f64;
    Ok((0..=steps)
        .map(|i| {
            // replicas whose atoms reach the family's radial extent
            let mut ks = BTreeSet::new();
            for a in seed.atoms() {
                let k_lo = (((a.y - hi) / dt - i as f64) / n).floor() as i64;
                let k_hi = (((a.y - lo) / dt - i as f64) / n).ceil() as i64;
                ks.extend(k_lo..=k_hi);
            }
            let mut total = vec![0.0; fam.len()];
            for k in ks {
                let t = (i + k * steps) as f64 * dt;
                for (acc, v) in total
                    .iter_mut()
                    .zip(fam.pairings(&apply_flow(&seed, t, gc)))
                {
                    *acc += v;
                }
            }
            total
        })
        .collect())
}

fn modulus(orbit: &[Vec<f64>], fam: &FrechetFamily) -> f64 {
    orbit
        .windows(2)
        .map(|w| fam.distance_between(&w[0], &w[1]))
        .fold(0.0, f64::max)
}

/// Drops consecutive repeats, which leaves the set distance unchanged.
fn dedup(mut orbit: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    orbit.dedup_by(|a, b| a == b);
    orbit
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::LogPolarAtom;
    use crate::periodization::{flow_periodized, pair_periodized};

    fn gc() -> GrowthClass {
        GrowthClass::new(1.0, 1.0).unwrap()
    }

    fn two_mass() -> AtomicMeasure {
        let alpha: f64 = (5f64.sqrt() - 1.0) / 2.0;
        AtomicMeasure::new(vec![
            LogPolarAtom::new(0.0, 0.0, 0.5).unwrap(),
            LogPolarAtom::new(alpha.ln(), 0.0, 0.4).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn empty_measure_rows_are_zero() {
        let fam = FrechetFamily::standard();
        let rows =
            convergence_experiment(&AtomicMeasure::empty(), &[1.0, 2.0], &fam, &gc()).unwrap();
        assert!(rows.iter().all(|r| r.distance == 0.0));
        let rows =
            orbit_distance_experiment(&AtomicMeasure::empty(), &[1.0, 2.0], &fam, &gc(), 4.0, 0.05)
                .unwrap();
        assert!(rows.iter().all(|r| r.distance == 0.0));
    }

    #[test]
    fn rejects_bad_periods() {
        let fam = FrechetFamily::new(4).unwrap();
        let mu = two_mass();
        assert!(convergence_experiment(&mu, &[], &fam, &gc()).is_err());
        assert!(convergence_experiment(&mu, &[2.0, 1.0], &fam, &gc()).is_err());
        assert!(convergence_experiment(&mu, &[0.0, 1.0], &fam, &gc()).is_err());
        assert!(orbit_distance_experiment(&mu, &[1.0], &fam, &gc(), 4.0, 0.3).is_err());
        assert!(orbit_distance_experiment(&mu, &[1.0], &fam, &gc(), 4.0, 0.0).is_err());
    }

    #[test]
    fn convergence_reaches_tail_bound() {
        let fam = FrechetFamily::standard();
        let periods: Vec<f64> = (1..=20).map(f64::from).collect();
        let rows = convergence_experiment(&two_mass(), &periods, &fam, &gc()).unwrap();
        for r in &rows {
            let kc = fam.prefix_inside(r.period);
            assert!(
                r.distance <= FrechetFamily::weight(kc) + 1e-12,
                "{r:?} kc={kc}"
            );
        }
        // atoms sit in [-0.49, 0], so from P = 1 on the rows cannot grow
        assert!(rows.windows(2).all(|w| w[1].distance <= w[0].distance));
        assert_eq!(rows.last().unwrap().distance, 0.0);
    }

    #[test]
    fn single_atom_bounded_by_exiting_members() {
        // with P = 2.5 only members whose support leaves (-2.5, 2.5) can differ
        let fam = FrechetFamily::standard();
        let mu = AtomicMeasure::new(vec![LogPolarAtom::new(0.0, 0.0, 1.0).unwrap()]).unwrap();
        let pm = periodize(&mu, 2.5, &gc()).unwrap();
        let bound: f64 = fam
            .members()
            .iter()
            .enumerate()
            .filter(|(_, g)| {
                let (a, b) = g.radial.support();
                !(-2.5 < a && b < 2.5)
            })
            .map(|(k, _)| FrechetFamily::weight(k + 1))
            .sum();
        let d = frechet_distance(&pm, &mu, &fam);
        assert!(d <= bound + 1e-15, "{d} > {bound}");
        assert!(d > 0.0);
    }

    #[test]
    fn replica_sum_matches_flowed_periodic_measure() {
        let fam = FrechetFamily::new(20).unwrap();
        let mu = two_mass();
        let (p, dt) = (1.0, 0.05);
        let orbit = periodic_orbit(&mu, p, 40, &fam, &gc(), dt).unwrap();
        let pm = periodize(&mu, p, &gc()).unwrap();
        for i in [0usize, 7, 19, 33, 40] {
            let moved = flow_periodized(&pm, i as f64 * dt);
            for (k, g) in fam.members().iter().enumerate() {
                let direct = pair_periodized(&moved, g);
                let tol = 1e-10 * direct.abs().max(1.0);
                assert!((orbit[i][k] - direct).abs() < tol, "i={i} k={k}");
            }
        }
    }

    #[test]
    fn large_periods_reproduce_the_orbit() {
        let fam = FrechetFamily::standard();
        let rows =
            orbit_distance_experiment(&two_mass(), &[8.0, 16.0], &fam, &gc(), 16.0, 0.05).unwrap();
        assert!(rows.iter().all(|r| r.distance == 0.0), "{rows:?}");
    }
}
