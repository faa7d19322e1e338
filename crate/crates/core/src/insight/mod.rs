//! Sensitivity-driven display and explanation of a consultation state.

mod display;
mod explain;
mod sensitivity;

pub use display::{display_graph, display_graph_with, divergences, DisplayArc, DisplayGraph, DisplayNode};
pub use explain::{
    answer_effects, explain, fill, flag_explanation_items, parameter_dependents, render_explanation,
    top_sensitivity_items, AnswerEffect, Explanation, ExplanationItem, ItemKind, Templates,
};
pub use sensitivity::{quantile_grid, sensitivity_scan, sweep_points, SensitivityRecord};
