//! Independent reference implementations used by the integration and
//! acceptance tests. Nothing here calls into the filter or planner code it
//! is compared against.

#![allow(dead_code)]

use intentnav_core::estimator::{Observation, ObservationSet};
use intentnav_core::world::{Cell, CellIndex, OccupancyGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const W_PHI: f64 = 0.6;
pub const W_LEN: f64 = 0.4;
pub const DELTA: f64 = 0.2;
pub const LAMBDA: f64 = 0.95;
pub const T_B: f64 = 0.35;
pub const HORIZON_SECS: f64 = 10.0;
pub const TICK_RATE: f64 = 10.0;

fn minmax(v: &[f64]) -> Vec<f64> {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        vec![0.5; v.len()]
    } else {
        v.iter().map(|x| (x - lo) / (hi - lo)).collect()
    }
}

/// Per-goal likelihood written out from the definition.
pub fn likelihood(obs: &[(f64, f64)]) -> Vec<f64> {
    let phi: Vec<f64> = obs.iter().map(|o| o.0).collect();
    let len: Vec<f64> = obs.iter().map(|o| o.1).collect();
    let finite: Vec<f64> = len.iter().cloned().filter(|l| l.is_finite()).collect();
    let len_hat = if finite.is_empty() {
        vec![1.0; len.len()]
    } else {
        let biggest = finite.iter().cloned().fold(0.0, f64::max);
        let fill = if biggest > 0.0 { 1.5 * biggest } else { 1.0 };
        minmax(
            &len.iter()
                .map(|l| if l.is_finite() { *l } else { fill })
                .collect::<Vec<_>>(),
        )
    };
    minmax(&phi)
        .iter()
        .zip(&len_hat)
        .map(|(p, l)| (-p / W_PHI - l / W_LEN).exp())
        .collect()
}

/// Click factor `ticks_since` ticks after activation, shared residual.
pub fn click_factor(n: usize, selected: usize, ticks_since: u64) -> Vec<f64> {
    let horizon = (HORIZON_SECS * TICK_RATE).round() as u64;
    if ticks_since >= horizon {
        return vec![1.0; n];
    }
    let rate = (LAMBDA - T_B) / HORIZON_SECS;
    let f = (LAMBDA - rate * ticks_since as f64 / TICK_RATE).max(T_B);
    (0..n)
        .map(|i| if i == selected { f } else { (1.0 - f) / (n - 1) as f64 })
        .collect()
}

fn trans(n: usize, from: usize, to: usize) -> f64 {
    if from == to {
        1.0 - DELTA
    } else {
        DELTA / (n - 1) as f64
    }
}

/// Posterior over the last hidden goal by summing the joint probability of
/// every goal sequence `g_0 .. g_T`, where `g_0` is drawn from `start` and
/// each later step emits `emission[k][g]`.
pub fn enumerate_posterior(start: &[f64], emission: &[Vec<f64>]) -> Vec<f64> {
    let n = start.len();
    let mut out = vec![0.0; n];
    fn walk(
        n: usize,
        emission: &[Vec<f64>],
        depth: usize,
        prev: usize,
        weight: f64,
        out: &mut [f64],
    ) {
        if depth == emission.len() {
            out[prev] += weight;
            return;
        }
        for g in 0..n {
            walk(
                n,
                emission,
                depth + 1,
                g,
                weight * trans(n, prev, g) * emission[depth][g],
                out,
            );
        }
    }
    for (g0, p) in start.iter().enumerate() {
        walk(n, emission, 0, g0, *p, &mut out);
    }
    let total: f64 = out.iter().sum();
    out.iter().map(|v| v / total).collect()
}

pub fn random_observations(rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| {
            let phi = rng.random_range(0.0..std::f64::consts::PI);
            let len = if rng.random_bool(0.1) {
                f64::INFINITY
            } else {
                rng.random_range(0.0..30.0)
            };
            (phi, len)
        })
        .collect()
}

pub fn to_set(obs: &[(f64, f64)]) -> ObservationSet {
    ObservationSet::new(
        obs.iter()
            .map(|&(phi, path_len)| Observation { phi, path_len })
            .collect(),
    )
}

pub fn random_grid(seed: u64, size: usize, density: f64) -> OccupancyGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = (0..size * size)
        .map(|_| {
            if rng.random_bool(density) {
                Cell::Occupied
            } else {
                Cell::Free
            }
        })
        .collect();
    OccupancyGrid::new(size, size, 0.5, cells).unwrap()
}

/// Shortest `(straight, diagonal)` step counts to `source` by repeated
/// relaxation of every edge until nothing changes.
pub fn bellman_ford(grid: &OccupancyGrid, source: CellIndex) -> Vec<Option<(u32, u32)>> {
    let (w, h) = (grid.width(), grid.height());
    let free = |c: i64, r: i64| {
        c >= 0
            && r >= 0
            && (c as usize) < w
            && (r as usize) < h
            && grid.is_free(CellIndex::new(c as usize, r as usize))
    };
    let value = |s: (u32, u32)| s.0 as f64 + s.1 as f64 * std::f64::consts::SQRT_2;
    let mut dist: Vec<Option<(u32, u32)>> = vec![None; w * h];
    if !free(source.col as i64, source.row as i64) {
        return dist;
    }
    dist[source.row * w + source.col] = Some((0, 0));
    loop {
        let mut changed = false;
        for r in 0..h as i64 {
            for c in 0..w as i64 {
                let Some(d) = dist[r as usize * w + c as usize] else {
                    continue;
                };
                for dc in -1i64..=1 {
                    for dr in -1i64..=1 {
                        if (dc, dr) == (0, 0) || !free(c + dc, r + dr) {
                            continue;
                        }
                        let diag = dc != 0 && dr != 0;
                        if diag && (!free(c + dc, r) || !free(c, r + dr)) {
                            continue;
                        }
                        let cand = if diag { (d.0, d.1 + 1) } else { (d.0 + 1, d.1) };
                        let slot = &mut dist[(r + dr) as usize * w + (c + dc) as usize];
                        if slot.is_none_or(|s| value(cand) < value(s) - 1e-9) {
                            *slot = Some(cand);
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            return dist;
        }
    }
}
