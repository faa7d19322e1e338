//! Payloads shared by the session service and the CLI.

use serde::{Deserialize, Serialize};

use crate::assessment::{rank_questions, AppliedAnswer, ConsultationState, NextQuestion, QuestionRanking};
use crate::error::{Error, Result};
use crate::evaluation::{error_bars, ErrorBar, EuSummary, Recommendation};
use crate::insight::{
    display_graph_with, divergences, parameter_dependents, sensitivity_scan, DisplayGraph, SensitivityRecord,
};
use crate::network::{NetworkModel, NodeKind};
use crate::uncertainty::Parameter;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBars {
    pub k1: Vec<ErrorBar>,
    pub k2: Vec<ErrorBar>,
}

/// Everything the model overview window shows for one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Overview {
    pub model_id: String,
    pub applied: Vec<AppliedAnswer>,
    pub recommendation: Recommendation,
    pub eu_summary: EuSummary,
    pub error_bars: ErrorBars,
    pub display_graph: DisplayGraph,
    pub ranking: QuestionRanking,
    pub stop: bool,
    pub next: NextQuestion,
}

pub fn overview(state: &ConsultationState) -> Result<Overview> {
    let summary = state.eu_summary()?.clone();
    let records = sensitivity_scan(state)?;
    let ranking = rank_questions(state)?;
    let next = match (ranking.stop, ranking.questions.first()) {
        (false, Some(q)) => NextQuestion::Ask { question: q.id.clone() },
        _ => NextQuestion::Stop,
    };
    Ok(Overview {
        model_id: state.model().id.clone(),
        applied: state.applied().to_vec(),
        recommendation: state.recommendation()?,
        error_bars: ErrorBars {
            k1: error_bars(&summary, 1)?,
            k2: error_bars(&summary, 2)?,
        },
        eu_summary: summary,
        display_graph: display_graph_with(state, &records, state.model().thresholds.prune),
        stop: ranking.stop,
        ranking,
        next,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterDetail {
    pub name: String,
    pub label: String,
    pub generic: Parameter,
    pub current: Parameter,
    /// `(mean, sd)` per free component.
    pub generic_moments: Vec<(f64, f64)>,
    pub current_moments: Vec<(f64, f64)>,
    pub z: Option<f64>,
    pub sensitivity: SensitivityRecord,
    pub dependents: Vec<String>,
}

/// Attributes of one node, for the node inspector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDetail {
    pub id: String,
    pub display_name: String,
    pub kind: NodeKind,
    pub states: Vec<String>,
    pub parents: Vec<String>,
    pub children: Vec<String>,
    pub size_score: f64,
    pub pruned: bool,
    pub unusual: bool,
    pub parameters: Vec<ParameterDetail>,
}

fn states_of(model: &NetworkModel, id: &str) -> Vec<String> {
    if let Some(d) = model.decisions.iter().find(|d| d.id.as_str() == id) {
        return d.alternatives.clone();
    }
    model
        .chance
        .iter()
        .find(|c| c.id.as_str() == id)
        .map(|c| c.outcomes.clone())
        .unwrap_or_default()
}

pub fn node_detail(state: &ConsultationState, node: &str) -> Result<NodeDetail> {
    let model = state.model();
    let records = sensitivity_scan(state)?;
    let graph = display_graph_with(state, &records, model.thresholds.prune);
    let shown = graph
        .nodes
        .iter()
        .find(|n| n.id == node)
        .ok_or_else(|| Error::Lookup(format!("unknown node `{node}`")))?;
    let z = divergences(state);
    let arcs = model.arcs();
    let moments = |p: &Parameter| p.marginal_moments().into_iter().map(|(m, v)| (m, v.sqrt())).collect();
    let parameters = shown
        .parameters
        .iter()
        .map(|name| {
            let generic = state.generic_registry().lookup(name)?.clone();
            let current = state.registry().lookup(name)?.clone();
            Ok(ParameterDetail {
                label: model.parameter_label(name),
                generic_moments: moments(&generic),
                current_moments: moments(&current),
                generic,
                current,
                z: z.get(name).copied().flatten(),
                sensitivity: records
                    .iter()
                    .find(|r| &r.parameter == name)
                    .cloned()
                    .expect("scan covers every parameter"),
                dependents: parameter_dependents(model, name),
                name: name.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NodeDetail {
        id: shown.id.clone(),
        display_name: shown.display_name.clone(),
        kind: shown.kind,
        states: states_of(model, node),
        parents: arcs
            .iter()
            .filter(|(_, to)| to.as_str() == node)
            .map(|(f, _)| f.to_string())
            .collect(),
        children: arcs
            .iter()
            .filter(|(f, _)| f.as_str() == node)
            .map(|(_, t)| t.to_string())
            .collect(),
        size_score: shown.size_score,
        pruned: shown.pruned,
        unusual: shown.unusual,
        parameters,
    })
}
