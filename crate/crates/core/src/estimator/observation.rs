use serde::{Deserialize, Serialize};

use super::EstimatorParams;

/// Geometric evidence for one goal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    /// Bearing angle in `[0, pi]`.
    pub phi: f64,
    /// Planner path length in meters, `+inf` when unreachable.
    pub path_len: f64,
}

/// One observation per goal, indexed by goal id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationSet {
    pub per_goal: Vec<Observation>,
}

impl ObservationSet {
    pub fn new(per_goal: Vec<Observation>) -> Self {
        Self { per_goal }
    }

    pub fn len(&self) -> usize {
        self.per_goal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_goal.is_empty()
    }
}

/// Min-max normalized evidence, every entry in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedObservations {
    pub phi: Vec<f64>,
    pub path_len: Vec<f64>,
}

/// Affine map of `values` onto `[0, 1]`. Constant input maps to 0.5.
pub fn normalize_minmax(values: &[f64]) -> Vec<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    if !(span > 0.0) {
        return vec![0.5; values.len()];
    }
    values.iter().map(|v| ((v - min) / span).clamp(0.0, 1.0)).collect()
}

/// Replaces `+inf` path lengths by 1.5x the largest finite one so that
/// unreachable goals rank last. Returns `None` when nothing is finite.
fn substitute_unreachable(lengths: &[f64]) -> Option<Vec<f64>> {
    let max_finite = lengths
        .iter()
        .copied()
        .filter(|l| l.is_finite())
        .fold(None, |acc: Option<f64>, l| Some(acc.map_or(l, |a| a.max(l))))?;
    let fill = if max_finite > 0.0 { max_finite * 1.5 } else { 1.0 };
    Some(
        lengths
            .iter()
            .map(|l| if l.is_finite() { *l } else { fill })
            .collect(),
    )
}

/// Per-tick normalization across goals, separately for each evidence type.
pub fn normalize_observations(obs: &ObservationSet) -> NormalizedObservations {
    let phi: Vec<f64> = obs.per_goal.iter().map(|o| o.phi).collect();
    let lengths: Vec<f64> = obs.per_goal.iter().map(|o| o.path_len).collect();
    let path_len = match substitute_unreachable(&lengths) {
        Some(finite) => normalize_minmax(&finite),
        None => vec![1.0; lengths.len()],
    };
    NormalizedObservations {
        phi: normalize_minmax(&phi),
        path_len,
    }
}

/// `exp(-phi/w_phi) * exp(-len/w_len)` per goal.
pub fn observation_likelihood(z: &NormalizedObservations, params: &EstimatorParams) -> Vec<f64> {
    z.phi
        .iter()
        .zip(&z.path_len)
        .map(|(phi, len)| (-phi / params.w_phi).exp() * (-len / params.w_len).exp())
        .collect()
}
