use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::sensitivity::{sensitivity_scan, SensitivityRecord};
use crate::assessment::ConsultationState;
use crate::error::Result;
use crate::network::{topological_order, NodeKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplayNode {
    pub id: String,
    pub display_name: String,
    pub kind: NodeKind,
    pub parameters: Vec<String>,
    pub size_score: f64,
    pub pruned: bool,
    pub unusual: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisplayArc {
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplayGraph {
    pub nodes: Vec<DisplayNode>,
    pub arcs: Vec<DisplayArc>,
}

/// z-score of each current parameter against its generic distribution;
/// `None` where the generic distribution has no spread.
pub fn divergences(state: &ConsultationState) -> BTreeMap<String, Option<f64>> {
    state
        .registry()
        .iter()
        .map(|(name, current)| {
            let generic = state.generic_registry().get(name).expect("same keys");
            (name.clone(), current.divergence_z(generic).ok())
        })
        .collect()
}

/// Network view with nodes sized by sensitivity, inert nodes pruned and
/// unusual subject values flagged.
pub fn display_graph(state: &ConsultationState) -> Result<DisplayGraph> {
    let records = sensitivity_scan(state)?;
    Ok(display_graph_with(state, &records, state.model().thresholds.prune))
}

/// [`display_graph`] from precomputed sensitivities and an explicit prune threshold.
pub fn display_graph_with(state: &ConsultationState, records: &[SensitivityRecord], prune: f64) -> DisplayGraph {
    let model = state.model();
    let kinds = model.node_kinds();
    let owners = model.parameter_owners();
    let by_param: BTreeMap<&str, &SensitivityRecord> = records.iter().map(|r| (r.parameter.as_str(), r)).collect();
    let z = divergences(state);
    let threshold = model.thresholds.unusual_z;

    let mut params_of: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (param, nodes) in &owners {
        for n in nodes {
            params_of.entry(n.to_string()).or_default().push(param.clone());
        }
    }

    let order = topological_order(model).expect("validated model is acyclic");
    let nodes = order
        .iter()
        .map(|id| {
            let kind = kinds[id];
            let parameters = params_of.remove(id.as_str()).unwrap_or_default();
            let recs: Vec<&SensitivityRecord> = parameters
                .iter()
                .filter_map(|p| by_param.get(p.as_str()).copied())
                .collect();
            let size_score = recs.iter().map(|r| r.size_score).fold(0.0, f64::max);
            let flips = recs.iter().any(|r| r.flips);
            let prunable = matches!(kind, NodeKind::Chance | NodeKind::Covariate);
            let unusual = parameters
                .iter()
                .any(|p| z.get(p).copied().flatten().is_some_and(|v| v >= threshold));
            DisplayNode {
                id: id.to_string(),
                display_name: model.display_name(id.as_str()).unwrap_or(id.as_str()).to_owned(),
                kind,
                parameters,
                size_score,
                pruned: prunable && !flips && size_score < prune,
                unusual,
            }
        })
        .collect();
    let arcs = model
        .arcs()
        .into_iter()
        .map(|(from, to)| DisplayArc {
            from: from.to_string(),
            to: to.to_string(),
        })
        .collect();
    DisplayGraph { nodes, arcs }
}
