//! Embedding a compact flow into the translation flow on cylinder measures.
//!
//! A point `m` is first sent to a circle measure `Y(·, m)` by a
//! [`KellerMap`]. Smoothing `t ↦ Y(·, T^t m)` with a Gaussian kernel gives
//! the cylinder measure
//!
//! ```text
//! ν(dφ ⊗ dy, m) = ρ ∫ Y(dφ, T^{y-t} m) X(t) dt dy,
//! ```
//!
//! which satisfies `S_τ ν(·, m) = ν(·, T^τ m)` for the translation
//! `S_τ h(y) = h(y + τ)`. Since `Y` is atomic in angle, `ν` is stored as one
//! sampled radial density per ray.

mod cylinder;
mod io;
mod keller;
mod kernel;

use rayon::prelude::*;

use crate::dynamics::{evaluate_flow, Flow, MetricSpace, Point};
use crate::measure::Angular;
use crate::{Error, Result};

pub use cylinder::{
    growth_integral, keller_density_bound, shift_nu, to_plane_measure, CylinderMeasure,
    PlaneRayMeasure,
};
pub use io::{read_cylinder_csv, read_cylinder_json, write_cylinder_csv, write_cylinder_json};
pub use keller::{keller_embed, CircleMeasure, KellerMap, MAX_ANCHORS};
pub use kernel::{gaussian, GaussianKernel, YGrid, DEFAULT_KERNEL_DT, DEFAULT_T_CUT};

fn checked_point(space: &dyn MetricSpace, m: &Point) -> Result<Point> {
    if m.dimension() != space.dimension() || !space.contains(m) {
        return Err(Error::invalid("point is not in the space"));
    }
    Ok(space.normalize(m.clone()))
}

/// `h_i(y) = ρ Σ_q c_q w_i(T^{y - t_q} m)` on every grid point.
pub fn build_nu<F: Flow + ?Sized>(
    map: &KellerMap,
    flow: &F,
    kernel: &GaussianKernel,
    m: &Point,
    grid: &YGrid,
    rho: f64,
) -> Result<CylinderMeasure> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::invalid("rho must be positive"));
    }
    let space = flow.space();
    let m = checked_point(space, m)?;
    let n = map.len();
    let columns: Vec<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            let y = grid.y(j);
            let mut acc = vec![0.0; n];
            let mut w = vec![0.0; n];
            for (t, c) in kernel.nodes() {
                let p = space.normalize(flow.advance(y - t, &m));
                map.weights_into(space, &p, &mut w);
                for (a, wi) in acc.iter_mut().zip(&w) {
                    *a += c * wi;
                }
            }
            acc.iter().map(|a| rho * a).collect()
        })
        .collect();
    let densities = (0..n)
        .map(|i| columns.iter().map(|col| col[i]).collect())
        .collect();
    CylinderMeasure::new(map.angles().to_vec(), *grid, densities, rho)
}

/// `max_{i, y} |S_τ ν(·, m) - ν(·, T^τ m)|` over `grid`.
///
/// The left side is built on the grid moved by `τ` and then shifted back, so
/// both sides cover the whole of `grid`.
pub fn equivariance_defect<F: Flow + ?Sized>(
    map: &KellerMap,
    flow: &F,
    kernel: &GaussianKernel,
    m: &Point,
    tau: f64,
    grid: &YGrid,
    rho: f64,
) -> Result<f64> {
    let steps = kernel::grid_steps(tau, grid.dy())?;
    let moved = evaluate_flow(flow, tau, m)?;
    let ahead = build_nu(map, flow, kernel, m, &grid.shifted(steps), rho)?;
    let lhs = shift_nu(&ahead, tau)?;
    let rhs = build_nu(map, flow, kernel, &moved, grid, rho)?;
    debug_assert_eq!(lhs.grid(), rhs.grid());
    Ok(lhs
        .densities()
        .iter()
        .flatten()
        .zip(rhs.densities().iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// `sup_y |(F_1 * X)(y) - (F_2 * X)(y)|` with `F_j(s) = ⟨Y(·, T^s m_j), Φ⟩`.
///
/// A positive value shows that the angular moment `Φ` of `ν(·, m_1)` and
/// `ν(·, m_2)` differ somewhere on the grid, hence the measures differ.
#[allow(clippy::too_many_arguments)]
pub fn injectivity_gap<F: Flow + ?Sized>(
    map: &KellerMap,
    flow: &F,
    kernel: &GaussianKernel,
    m1: &Point,
    m2: &Point,
    probe: Angular,
    grid: &YGrid,
) -> Result<f64> {
    let space = flow.space();
    let m1 = checked_point(space, m1)?;
    let m2 = checked_point(space, m2)?;
    let phi: Vec<f64> = map.angles().iter().map(|&a| probe.eval(a)).collect();
    let moment = |m: &Point, s: f64, w: &mut [f64]| {
        let p = space.normalize(flow.advance(s, m));
        map.weights_into(space, &p, w);
        phi.iter().zip(w.iter()).map(|(f, wi)| f * wi).sum::<f64>()
    };
    let gaps: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            let y = grid.y(j);
            let mut w = vec![0.0; map.len()];
            let (mut c1, mut c2) = (0.0, 0.0);
            for (t, c) in kernel.nodes() {
                c1 += c * moment(&m1, y - t, &mut w);
                c2 += c * moment(&m2, y - t, &mut w);
            }
            (c1 - c2).abs()
        })
        .collect();
    Ok(gaps.into_iter().fold(0.0, f64::max))
}
