//! `(ε, s)`-chains and a bounded search for them.

use std::collections::VecDeque;

use super::{evaluate_flow, Flow, MetricSpace, Point};
use crate::{Error, Result};

/// Limits for [`find_chain`].
///
/// Jump times are drawn from the finite grid `s + k·step`, `k = 1, 2, …` up to
/// `s + horizon`. Flows that report a period additionally get every multiple
/// of that period inside `(s, s + horizon]`, so exact returns are reachable.
/// Intermediate chain points come from a greedy `ε/2`-net over
/// `net_samples` points of the space.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchBudget {
    pub horizon: f64,
    pub step: f64,
    pub net_samples: usize,
    pub max_nodes: usize,
}

impl SearchBudget {
    /// Horizon `4·s`, step `s/100`.
    pub fn for_lower_bound(s: f64) -> Self {
        SearchBudget {
            horizon: 4.0 * s,
            step: s / 100.0,
            net_samples: 4096,
            max_nodes: 2000,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.step > 0.0) || !self.horizon.is_finite() {
            return Err(Error::invalid("search horizon and step must be positive"));
        }
        if self.max_nodes == 0 {
            return Err(Error::invalid("search needs at least one node"));
        }
        Ok(())
    }

    /// The jump-time grid, ascending and free of duplicates.
    pub fn jump_times(&self, s: f64, period: Option<f64>) -> Vec<f64> {
        let n = (self.horizon / self.step + 1e-9).floor() as usize;
        let mut times: Vec<f64> = (1..=n).map(|k| s + k as f64 * self.step).collect();
        if let Some(p) = period.filter(|p| *p > 0.0 && p.is_finite()) {
            let first = (s / p).floor() as i64 + 1;
            let mut k = first;
            loop {
                let t = k as f64 * p;
                if t > s + self.horizon {
                    break;
                }
                if t > s {
                    times.push(t);
                }
                k += 1;
            }
        }
        times.sort_by(f64::total_cmp);
        times.dedup();
        times
    }
}

/// A finite `(ε, s)`-chain `m_0, …, m_n` with jump times `t_0, …, t_{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub points: Vec<Point>,
    pub jump_times: Vec<f64>,
    pub epsilon: f64,
    pub s: f64,
}

impl Chain {
    /// `d(T^{t_j} m_j, m_{j+1})` for every link.
    pub fn link_errors<F: Flow + ?Sized>(&self, flow: &F) -> Result<Vec<f64>> {
        let space = flow.space();
        self.points
            .windows(2)
            .zip(&self.jump_times)
            .map(|(pair, &t)| Ok(space.distance(&evaluate_flow(flow, t, &pair[0])?, &pair[1])))
            .collect()
    }

    /// Recomputes every link against the flow.
    pub fn validate<F: Flow + ?Sized>(&self, flow: &F) -> Result<()> {
        if self.points.len() != self.jump_times.len() + 1 || self.jump_times.is_empty() {
            return Err(Error::invalid("chain needs n+1 points for n ≥ 1 jumps"));
        }
        if let Some(t) = self.jump_times.iter().find(|&&t| !(t > self.s)) {
            return Err(Error::invalid(format!(
                "jump time {t} is not above s = {}",
                self.s
            )));
        }
        for (j, err) in self.link_errors(flow)?.into_iter().enumerate() {
            if !(err < self.epsilon) {
                return Err(Error::invalid(format!(
                    "link {j} misses by {err}, epsilon is {}",
                    self.epsilon
                )));
            }
        }
        Ok(())
    }

    pub fn jumps(&self) -> usize {
        self.jump_times.len()
    }
}

/// Outcome of [`is_chain_recurrent_at`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRecurrence {
    pub recurrent: bool,
    pub witness: Option<Chain>,
}

fn check_chain_args(epsilon: f64, s: f64) -> Result<()> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::invalid("epsilon must be positive"));
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::invalid("s must be positive"));
    }
    Ok(())
}

fn greedy_net(space: &dyn MetricSpace, samples: Vec<Point>, radius: f64) -> Vec<Point> {
    let mut net: Vec<Point> = Vec::new();
    for p in samples {
        if net.iter().all(|q| space.distance(&p, q) >= radius) {
            net.push(p);
        }
    }
    net
}

/// Smallest link error from a sampled trajectory to `target`; ties keep the
/// earliest time.
fn best_link(space: &dyn MetricSpace, traj: &[Point], times: &[f64], target: &Point) -> (f64, f64) {
    let mut best = (times[0], f64::INFINITY);
    for (p, &t) in traj.iter().zip(times) {
        let d = space.distance(p, target);
        if d < best.1 {
            best = (t, d);
        }
    }
    best
}

/// Breadth-first search for an `(ε, s)`-chain from `m` to `target`.
///
/// `Ok(None)` means no chain was found within the budget. It says nothing
/// about whether a chain exists.
pub fn find_chain<F: Flow + ?Sized>(
    flow: &F,
    m: &Point,
    target: &Point,
    epsilon: f64,
    s: f64,
    budget: &SearchBudget,
) -> Result<Option<Chain>> {
    check_chain_args(epsilon, s)?;
    budget.validate()?;
    let space = flow.space();
    let m = evaluate_flow(flow, 0.0, m)?;
    let target = evaluate_flow(flow, 0.0, target)?;

    let times = budget.jump_times(s, flow.period());
    let mut nodes = vec![m];
    nodes.extend(greedy_net(
        space,
        space.sample(budget.net_samples),
        epsilon / 2.0,
    ));
    let mut parent: Vec<Option<(usize, f64)>> = vec![None; nodes.len()];
    let mut visited = vec![false; nodes.len()];
    visited[0] = true;

    let mut queue = VecDeque::from([0usize]);
    let mut expanded = 0usize;
    while let Some(a) = queue.pop_front() {
        if expanded >= budget.max_nodes {
            break;
        }
        expanded += 1;
        let traj = times
            .iter()
            .map(|&t| evaluate_flow(flow, t, &nodes[a]))
            .collect::<Result<Vec<_>>>()?;

        let (t, err) = best_link(space, &traj, &times, &target);
        if err < epsilon {
            let mut points = vec![target.clone()];
            let mut jump_times = vec![t];
            let mut cur = a;
            points.push(nodes[cur].clone());
            while let Some((prev, tp)) = parent[cur] {
                jump_times.push(tp);
                points.push(nodes[prev].clone());
                cur = prev;
            }
            points.reverse();
            jump_times.reverse();
            return Ok(Some(Chain {
                points,
                jump_times,
                epsilon,
                s,
            }));
        }

        for b in 1..nodes.len() {
            if visited[b] {
                continue;
            }
            let (t, err) = best_link(space, &traj, &times, &nodes[b]);
            if err < epsilon {
                visited[b] = true;
                parent[b] = Some((a, t));
                queue.push_back(b);
            }
        }
    }
    Ok(None)
}

/// Looks for an `(ε, s)`-chain from `m` back to itself.
pub fn is_chain_recurrent_at<F: Flow + ?Sized>(
    flow: &F,
    m: &Point,
    epsilon: f64,
    s: f64,
    budget: &SearchBudget,
) -> Result<ChainRecurrence> {
    let witness = find_chain(flow, m, m, epsilon, s, budget)?;
    Ok(ChainRecurrence {
        recurrent: witness.is_some(),
        witness,
    })
}
