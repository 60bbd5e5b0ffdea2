//! A computable metric for the distribution topology on measures.

use super::{Angular, Bump, TestFunction};
use crate::{Error, Result};

/// Anything that can be integrated against a [`TestFunction`].
pub trait Pairable {
    fn pair(&self, g: &TestFunction) -> f64;
}

impl<T: Pairable + ?Sized> Pairable for &T {
    fn pair(&self, g: &TestFunction) -> f64 {
        (**self).pair(g)
    }
}

/// The first `K` members `g_1, …, g_K` of a fixed countable family of test
/// functions, weighted by `2^{-k}`.
///
/// Members are enumerated along diagonals of (angular index) × (center index):
/// diagonal `d` lists the pairs `(i, d - i)` for `i = 0, …, d`. Angular index
/// `i` runs through `1, cos φ, sin φ, cos 2φ, sin 2φ, …` and center index `j`
/// through `c = 0, 1, -1, 2, -2, …`. Every bump has half-width 1.
#[derive(Debug, Clone, PartialEq)]
pub struct FrechetFamily {
    members: Vec<TestFunction>,
}

pub const DEFAULT_FAMILY_SIZE: usize = 64;

fn center_of(index: usize) -> f64 {
    if index == 0 {
        0.0
    } else if index % 2 == 1 {
        index.div_ceil(2) as f64
    } else {
        -((index / 2) as f64)
    }
}

impl FrechetFamily {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || size > 1000 {
            return Err(Error::invalid("family size must be in 1..=1000"));
        }
        let mut members = Vec::with_capacity(size);
        'outer: for diagonal in 0.. {
            for angular in 0..=diagonal {
                if members.len() == size {
                    break 'outer;
                }
                let radial = Bump {
                    center: center_of(diagonal - angular),
                    half_width: 1.0,
                };
                members.push(TestFunction::new(Angular::nth(angular), radial));
            }
        }
        Ok(FrechetFamily { members })
    }

    pub fn standard() -> Self {
        FrechetFamily::new(DEFAULT_FAMILY_SIZE).expect("default size is valid")
    }

    pub fn members(&self) -> &[TestFunction] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `2^{-k}` for the 1-based member index `k`.
    pub fn weight(k: usize) -> f64 {
        0.5f64.powi(k as i32)
    }

    /// Smallest and largest `y` touched by any member's support.
    pub fn radial_extent(&self) -> (f64, f64) {
        self.members
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), g| {
                let (a, b) = g.radial.support();
                (lo.min(a), hi.max(b))
            })
    }

    /// Length of the longest prefix `g_1, …, g_k` whose supports all lie in
    /// the open interval `(-p, p)`.
    ///
    /// Measures that agree on `(-p, p)` differ by at most `2^{-k}` in
    /// [`frechet_distance`].
    pub fn prefix_inside(&self, p: f64) -> usize {
        self.members
            .iter()
            .take_while(|g| {
                let (a, b) = g.radial.support();
                -p < a && b < p
            })
            .count()
    }

    /// Pairings of `mu` with every member, in order.
    pub fn pairings<M: Pairable + ?Sized>(&self, mu: &M) -> Vec<f64> {
        self.members.iter().map(|g| mu.pair(g)).collect()
    }

    /// `Σ_k 2^{-k} min(1, |a_k - b_k|)` over precomputed pairing vectors.
    pub fn distance_between(&self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), self.members.len());
        debug_assert_eq!(b.len(), self.members.len());
        let mut sum = 0.0;
        for (k, (x, y)) in a.iter().zip(b).enumerate() {
            sum += Self::weight(k + 1) * (x - y).abs().min(1.0);
        }
        sum
    }
}

/// `d(μ₁, μ₂) = Σ_{k=1..K} 2^{-k} min(1, |⟨μ₁, g_k⟩ - ⟨μ₂, g_k⟩|)`.
///
/// Symmetric, bounded by `1 - 2^{-K}`, and a pseudometric on anything
/// pairable. The truncation drops at most `2^{-K}` of the full series.
pub fn frechet_distance<A, B>(mu1: &A, mu2: &B, fam: &FrechetFamily) -> f64
where
    A: Pairable + ?Sized,
    B: Pairable + ?Sized,
{
    fam.distance_between(&fam.pairings(mu1), &fam.pairings(mu2))
}
