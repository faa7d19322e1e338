//! Decision networks whose probabilities and utilities are themselves
//! uncertain, customized to one subject by answering assessment questions.
//!
//! A [`NetworkModel`] holds chance, decision and utility nodes with table
//! entries that name parameters in a [`Registry`]; each parameter is a
//! distribution. The decision is taken by exact rollback at the parameter
//! means ([`recommend`]); Monte Carlo over the parameters
//! ([`monte_carlo_eu`]) shows how robust it is. A [`ConsultationState`]
//! applies answers that swap generic distributions for subgroup ones,
//! ranks the remaining questions by value of information net of cost, and
//! feeds sensitivity-sized displays and template explanations.

pub mod assessment;
pub mod error;
pub mod evaluation;
pub mod fixtures;
pub mod insight;
pub mod model_file;
pub mod network;
pub mod overview;
pub mod uncertainty;

pub use assessment::{
    apply_answer, evoi, fold_answers, next_question, rank_questions, undo, Answer, AppliedAnswer, AssessmentQuestion,
    ConsultationState, Evoi, NextQuestion, QuestionRanking, RankedQuestion,
};
pub use error::{Error, Result};
pub use evaluation::{
    error_bars, eu_at, monte_carlo_eu, recommend, recommend_with, simulate, ErrorBar, EuSummary, Evaluator,
    Instantiation, McSettings, ParamValue, Recommendation,
};
pub use insight::{
    display_graph, flag_explanation_items, render_explanation, sensitivity_scan, DisplayGraph, ExplanationItem,
    SensitivityRecord, Templates,
};
pub use model_file::{emit, load_model, load_model_bytes};
pub use network::{topological_order, validate_network, NetworkModel, NodeId, ValidationReport};
pub use overview::{node_detail, overview, NodeDetail, Overview};
pub use uncertainty::{Distribution, Parameter, Refinement, Registry, Role, RowDistribution, UncertainQuantity};
