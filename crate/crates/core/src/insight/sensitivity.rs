use serde::{Deserialize, Serialize};

use crate::assessment::ConsultationState;
use crate::error::Result;
use crate::evaluation::{argmax_first, margin_of, mean_values, ParamValue};
use crate::uncertainty::{Distribution, Parameter};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRecord {
    pub parameter: String,
    /// Largest change of the leader's EU margin over the sweep.
    pub swing: f64,
    /// Some sweep point changes the recommended alternative.
    pub flips: bool,
    /// `swing` divided by the largest swing in the model.
    pub size_score: f64,
}

/// Quantile levels `i / (grid + 1)`, `i = 1..=grid`.
pub fn quantile_grid(grid: usize) -> Vec<f64> {
    (1..=grid).map(|i| i as f64 / (grid + 1) as f64).collect()
}

/// Values a parameter takes during its one-way sweep.
///
/// Scalars step through the quantile grid of their distribution. Rows pin
/// one component at a time to its marginal quantiles and renormalize the
/// others.
pub fn sweep_points(param: &Parameter, grid: usize) -> Vec<ParamValue> {
    let levels = quantile_grid(grid);
    let at = |d: &Distribution, u: f64| d.quantile_unchecked(u);
    match param {
        Parameter::Scalar(q) => levels.iter().map(|&u| ParamValue::Scalar(at(&q.dist, u))).collect(),
        Parameter::Row(r) => r
            .component_marginals()
            .iter()
            .enumerate()
            .flat_map(|(i, d)| {
                levels
                    .iter()
                    .map(move |&u| ParamValue::Row(r.pinned(i, at(d, u))))
                    .collect::<Vec<_>>()
            })
            .collect(),
    }
}

/// One-way quantile sweep of every parameter, others held at their means.
pub fn sensitivity_scan(state: &ConsultationState) -> Result<Vec<SensitivityRecord>> {
    let registry = state.registry();
    let evaluator = state.evaluator();
    let grid = state.model().thresholds.grid;
    let base = mean_values(registry);
    let base_eus = evaluator.eu(&base)?;
    let (leader, _) = argmax_first(&base_eus);
    let base_gap = margin_of(&base_eus, leader);

    let mut records = Vec::with_capacity(registry.len());
    for (slot, (name, param)) in registry.iter().enumerate() {
        let mut swing: f64 = 0.0;
        let mut flips = false;
        if !param.is_degenerate() {
            let mut values = base.clone();
            for point in sweep_points(param, grid) {
                values[slot] = point;
                let eus = evaluator.eu(&values)?;
                swing = swing.max((margin_of(&eus, leader) - base_gap).abs());
                flips |= argmax_first(&eus).0 != leader;
            }
        }
        records.push(SensitivityRecord {
            parameter: name.clone(),
            swing,
            flips,
            size_score: 0.0,
        });
    }
    let max = records.iter().map(|r| r.swing).fold(0.0, f64::max);
    if max > 0.0 {
        for r in &mut records {
            r.size_score = r.swing / max;
        }
    }
    Ok(records)
}
