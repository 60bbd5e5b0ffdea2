use std::f64::consts::TAU;

use super::kernel::{grid_steps, YGrid};
use crate::measure::{Pairable, TestFunction};
use crate::{Error, Result};

/// A measure on the cylinder `S¹ × ℝ` that is atomic in angle: ray `i` at
/// angle `φ_i` carries the density `h_i(y)`, sampled on a shared y grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderMeasure {
    angles: Vec<f64>,
    grid: YGrid,
    densities: Vec<Vec<f64>>,
    rho: f64,
}

pub(crate) fn check_angles(angles: &[f64]) -> Result<()> {
    if angles.is_empty() {
        return Err(Error::invalid("at least one ray is required"));
    }
    if angles.iter().any(|a| !(0.0..TAU).contains(a)) {
        return Err(Error::invalid("ray angles must lie in [0, 2π)"));
    }
    let mut sorted = angles.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("ray angles must be distinct"));
    }
    Ok(())
}

impl CylinderMeasure {
    pub fn new(angles: Vec<f64>, grid: YGrid, densities: Vec<Vec<f64>>, rho: f64) -> Result<Self> {
        check_angles(&angles)?;
        if densities.len() != angles.len() {
            return Err(Error::invalid(format!(
                "{} rays but {} density rows",
                angles.len(),
                densities.len()
            )));
        }
        if densities.iter().any(|row| row.len() != grid.len()) {
            return Err(Error::invalid("every density row must match the y grid"));
        }
        if densities
            .iter()
            .flatten()
            .any(|h| !(*h >= 0.0) || !h.is_finite())
        {
            return Err(Error::invalid("densities must be finite and nonnegative"));
        }
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::invalid("rho must be positive"));
        }
        Ok(CylinderMeasure {
            angles,
            grid,
            densities,
            rho,
        })
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn grid(&self) -> &YGrid {
        &self.grid
    }

    pub fn densities(&self) -> &[Vec<f64>] {
        &self.densities
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// `S_τ`: the output density is `h_i(y + τ)`, on the grid moved by `-τ`.
///
/// `τ` must be a multiple of `δy`; nothing is interpolated.
pub fn shift_nu(nu: &CylinderMeasure, tau: f64) -> Result<CylinderMeasure> {
    let k = grid_steps(tau, nu.grid.dy())?;
    Ok(CylinderMeasure {
        grid: nu.grid.shifted(-k),
        ..nu.clone()
    })
}

/// Trapezoid weights `δy·(1/2, 1, …, 1, 1/2)` over `count` nodes.
fn trapezoid(count: usize, dy: f64) -> impl Iterator<Item = f64> {
    (0..count).map(move |j| {
        if count > 1 && (j == 0 || j + 1 == count) {
            0.5 * dy
        } else if count == 1 {
            0.0
        } else {
            dy
        }
    })
}

/// Upper bound for `∫_{y ≤ 0} e^{ρy} Σ_i h_i(y) dy`.
///
/// Grid points with `y ≤ 0` are integrated by the trapezoid rule; the parts
/// of `(-∞, 0]` the grid does not cover use `sum_bound ≥ sup Σ_i h_i`.
pub fn growth_integral(nu: &CylinderMeasure, sum_bound: f64) -> f64 {
    let rho = nu.rho;
    let g = &nu.grid;
    let tail = |y: f64| sum_bound * (rho * y).exp() / rho;
    if g.y_min() > 0.0 {
        return tail(0.0);
    }
    let count = (0..g.len()).take_while(|&j| g.y(j) <= 0.0).count();
    let mut total = tail(g.y_min());
    for (j, c) in trapezoid(count, g.dy()).enumerate() {
        let column: f64 = nu.densities.iter().map(|row| row[j]).sum();
        total += c * (rho * g.y(j)).exp() * column;
    }
    let last = g.y(count - 1);
    if last < 0.0 {
        total += tail(0.0) - tail(last);
    }
    total
}

/// `sup Σ_i h_i ≤ ρ(1 - 2^{-N})` for densities built from `N` Keller anchors.
pub fn keller_density_bound(anchors: usize, rho: f64) -> f64 {
    rho * (1.0 - 0.5f64.powi(anchors as i32))
}

/// The cylinder measure carried back to `ℂ∖0`: on ray `φ_i` the radial
/// density is `r ↦ h_i(log r)·r^ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneRayMeasure {
    nu: CylinderMeasure,
}

pub fn to_plane_measure(nu: &CylinderMeasure) -> PlaneRayMeasure {
    PlaneRayMeasure { nu: nu.clone() }
}

impl PlaneRayMeasure {
    pub fn angles(&self) -> &[f64] {
        &self.nu.angles
    }

    /// `(r_j, h_i(log r_j)·r_j^ρ)` at the radii `r_j = e^{y_j}`.
    pub fn ray_density(&self, i: usize) -> Vec<(f64, f64)> {
        let g = &self.nu.grid;
        self.nu.densities[i]
            .iter()
            .enumerate()
            .map(|(j, h)| {
                let r = g.y(j).exp();
                (r, h * r.powf(self.nu.rho))
            })
            .collect()
    }

    pub fn radial_range(&self) -> (f64, f64) {
        (self.nu.grid.y_min().exp(), self.nu.grid.y_max().exp())
    }
}

impl Pairable for PlaneRayMeasure {
    /// `Σ_i Φ(φ_i) ∫ R(y) h_i(y) dy`; the `r^ρ` of the plane density cancels
    /// against the `e^{-ρy}` of the change of variables.
    fn pair(&self, g: &TestFunction) -> f64 {
        let grid = &self.nu.grid;
        let radial: Vec<f64> = trapezoid(grid.len(), grid.dy())
            .enumerate()
            .map(|(j, c)| c * g.radial.eval(grid.y(j)))
            .collect();
        self.nu
            .angles
            .iter()
            .zip(&self.nu.densities)
            .map(|(&phi, row)| {
                let integral: f64 = row.iter().zip(&radial).map(|(h, r)| h * r).sum();
                g.angular.eval(phi) * integral
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Angular, Bump};

    fn constant(c: f64, grid: YGrid) -> CylinderMeasure {
        CylinderMeasure::new(vec![0.0, 3.0], grid, vec![vec![c; grid.len()]; 2], 1.0).unwrap()
    }

    #[test]
    fn validation() {
        let g = YGrid::new(0.0, 1.0, 0.5).unwrap();
        assert!(CylinderMeasure::new(vec![0.0, 0.0], g, vec![vec![0.0; 3]; 2], 1.0).is_err());
        assert!(CylinderMeasure::new(vec![0.0], g, vec![vec![0.0; 2]], 1.0).is_err());
        assert!(CylinderMeasure::new(vec![0.0], g, vec![vec![-1.0, 0.0, 0.0]], 1.0).is_err());
        assert!(CylinderMeasure::new(vec![7.0], g, vec![vec![0.0; 3]], 1.0).is_err());
        assert!(CylinderMeasure::new(vec![0.0], g, vec![vec![0.0; 3]], 0.0).is_err());
    }

    #[test]
    fn shifts() {
        let g = YGrid::new(-1.0, 1.0, 0.05).unwrap();
        let mut rows = vec![(0..41).map(f64::from).collect::<Vec<_>>()];
        rows.push(vec![1.0; 41]);
        let nu = CylinderMeasure::new(vec![0.0, 1.0], g, rows, 1.0).unwrap();
        assert_eq!(shift_nu(&nu, 0.0).unwrap(), nu);
        let s = shift_nu(&nu, 0.25).unwrap();
        // h(y) = input h(y + τ): the value at y = 0 was at y = 0.25
        assert_eq!(s.grid().y(20), -0.25);
        assert_eq!(s.grid().y(25), 0.0);
        assert_eq!(s.densities()[0][25], 25.0);
        let back = shift_nu(&shift_nu(&nu, 0.05).unwrap(), -0.05).unwrap();
        assert_eq!(back, nu);
        assert!(shift_nu(&nu, 0.07).is_err());
        let flat = constant(0.3, g);
        assert_eq!(shift_nu(&flat, 0.5).unwrap().densities(), flat.densities());
    }

    #[test]
    fn plane_density_of_constant() {
        let nu = constant(0.5, YGrid::new(-1.0, 1.0, 0.5).unwrap());
        let plane = to_plane_measure(&nu);
        for (r, f) in plane.ray_density(1) {
            assert!((f - 0.5 * r).abs() < 1e-15);
        }
    }

    #[test]
    fn plane_pairing() {
        let nu = constant(2.0, YGrid::new(-3.0, 3.0, 0.001).unwrap());
        let plane = to_plane_measure(&nu);
        let g = TestFunction::new(Angular::Cos(1), Bump::new(0.0, 1.0).unwrap());
        // midpoint rule for ∫ R, independent of the grid above
        let cells = 200_000;
        let integral: f64 = (0..cells)
            .map(|k| g.radial.eval(-1.0 + (k as f64 + 0.5) * 2.0 / cells as f64))
            .sum::<f64>()
            * 2.0
            / cells as f64;
        let expect = 2.0 * (1.0 + 3f64.cos()) * integral;
        assert!((plane.pair(&g) - expect).abs() < 1e-6, "{}", plane.pair(&g));
        let zero = constant(0.0, YGrid::new(-3.0, 3.0, 0.5).unwrap());
        assert_eq!(to_plane_measure(&zero).pair(&g), 0.0);
    }

    #[test]
    fn growth_of_constant_density() {
        let dy = 0.01;
        let nu = constant(0.25, YGrid::new(-20.0, 5.0, dy).unwrap());
        // Σ h = 0.5 and ∫_{y≤0} e^y dy = 1
        let got = growth_integral(&nu, 0.5);
        assert!((got - 0.5).abs() < 1e-5, "{got}");
        let off = constant(0.25, YGrid::new(1.0, 2.0, dy).unwrap());
        assert_eq!(growth_integral(&off, 0.5), 0.5);
        let left = constant(0.25, YGrid::new(-30.0, -1.0, dy).unwrap());
        assert!((growth_integral(&left, 0.5) - 0.5).abs() < 1e-5);
    }
}
