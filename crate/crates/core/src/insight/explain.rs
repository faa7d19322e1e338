use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::display::divergences;
use super::sensitivity::{sensitivity_scan, SensitivityRecord};
use crate::assessment::{fold_answers, ConsultationState};
use crate::error::Result;
use crate::evaluation::{recommend_compiled, Recommendation};
use crate::network::{topological_order, NetworkModel, NodeId};
use crate::uncertainty::Parameter;

/// Sentence templates. Placeholders are written `{name}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Templates {
    pub recommendation: String,
    pub tie: String,
    pub unusual: String,
    pub critical_flip: String,
    pub critical_margin: String,
    pub generic_header: String,
    pub generic_recommendation: String,
    pub generic_parameter: String,
    pub top_sensitivity: String,
}

impl Default for Templates {
    fn default() -> Self {
        Self {
            recommendation: "Recommended: {best} (mean EU {best_eu} vs {runner_up_eu}). Runner-up: {runner_up}. \
                             {best} has the highest expected utility in {dominance} of {samples} simulated cases."
                .into(),
            tie: "{tied} are tied at the top; the first listed is shown.".into(),
            unusual: "{name} is unusual for this case: {current_mean} against a typical {generic_mean} (z = {z}). \
                      Factors that depend on it: {dependents}."
                .into(),
            critical_flip:
                "The answer \"{answer}\" to \"{question}\" changed the recommendation from {before} to {after} \
                            (it affects {dependents})."
                    .into(),
            critical_margin: "The answer \"{answer}\" to \"{question}\" narrowed the lead of {best} to {margin} \
                              (it affects {dependents})."
                .into(),
            generic_header: "Generic model summary".into(),
            generic_recommendation:
                "For the typical case the model recommends {best} (mean EU {best_eu} vs {runner_up_eu}).".into(),
            generic_parameter: "- {name}: {kind}, mean {mean}, sd {sd}".into(),
            top_sensitivity: "- {name} moves the lead by up to {swing}{flips}".into(),
        }
    }
}

/// Substitutes `{key}` placeholders.
pub fn fill(template: &str, vars: &[(&str, String)]) -> String {
    let mut out = template.to_owned();
    for (key, value) in vars {
        out = out.replace(&format!("{{{key}}}"), value);
    }
    out
}

fn num(x: f64) -> String {
    format!("{x:.3}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemKind {
    UnusualValue,
    DecisionCritical,
    TopSensitivity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationItem {
    pub kind: ItemKind,
    /// Parameter name, or question id for decision-critical items.
    pub subject: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub answer: Option<String>,
    /// z-score (unusual values), margin change (decision-critical) or swing.
    pub magnitude: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    pub swing: f64,
    pub dependents: Vec<String>,
    pub sentence: String,
}

/// Display names of the nodes downstream of a parameter's owners, in topological order.
pub fn parameter_dependents(model: &NetworkModel, param: &str) -> Vec<String> {
    let owners = model.parameter_owners();
    let owned: Vec<NodeId> = owners.get(param).cloned().unwrap_or_default();
    let mut downstream = BTreeSet::new();
    for o in &owned {
        downstream.extend(model.descendants(o.as_str()));
    }
    for o in &owned {
        downstream.remove(o);
    }
    ordered_names(model, &downstream)
}

fn ordered_names(model: &NetworkModel, ids: &BTreeSet<NodeId>) -> Vec<String> {
    topological_order(model)
        .expect("validated model is acyclic")
        .into_iter()
        .filter(|id| ids.contains(id))
        .map(|id| model.display_name(id.as_str()).unwrap_or(id.as_str()).to_owned())
        .collect()
}

fn join_or_none(names: &[String]) -> String {
    if names.is_empty() {
        "none".into()
    } else {
        names.join(", ")
    }
}

fn describe_mean(p: &Parameter) -> String {
    match p {
        Parameter::Scalar(q) => num(q.moments().0),
        Parameter::Row(r) => {
            let parts: Vec<String> = r.mean_vector().iter().map(|m| num(*m)).collect();
            format!("({})", parts.join(", "))
        }
    }
}

/// A recorded answer's effect on the decision at parameter means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerEffect {
    pub question: String,
    pub answer: String,
    pub before: Recommendation,
    pub after: Recommendation,
}

impl AnswerEffect {
    pub fn flipped(&self) -> bool {
        self.before.index != self.after.index
    }

    /// Lead of the pre-answer choice cut from at or above `threshold` to below it.
    pub fn cut_margin(&self, threshold: f64) -> bool {
        self.before.margin() >= threshold && self.after.margin() < threshold
    }
}

/// Replays the answer history, recording the recommendation around each answer.
pub fn answer_effects(state: &ConsultationState) -> Result<Vec<AnswerEffect>> {
    let model = state.model();
    let mut out = Vec::with_capacity(state.applied().len());
    for i in 0..state.applied().len() {
        let before = fold_answers(model, &state.applied()[..i])?;
        let after = fold_answers(model, &state.applied()[..=i])?;
        out.push(AnswerEffect {
            question: state.applied()[i].question.clone(),
            answer: state.applied()[i].answer.clone(),
            before: recommend_compiled(state.evaluator(), &before)?,
            after: recommend_compiled(state.evaluator(), &after)?,
        });
    }
    Ok(out)
}

/// Unusual subject values and decision-critical answers, largest swing first.
pub fn flag_explanation_items(state: &ConsultationState) -> Result<Vec<ExplanationItem>> {
    let records = sensitivity_scan(state)?;
    flag_with(state, &records)
}

fn flag_with(state: &ConsultationState, records: &[SensitivityRecord]) -> Result<Vec<ExplanationItem>> {
    let model = state.model();
    let templates = &model.templates;
    let thresholds = &model.thresholds;
    let swing: BTreeMap<&str, f64> = records.iter().map(|r| (r.parameter.as_str(), r.swing)).collect();
    let z = divergences(state);
    let mut items = Vec::new();

    for (name, current) in state.registry().iter() {
        let Some(zv) = z.get(name).copied().flatten() else {
            continue;
        };
        if zv < thresholds.unusual_z {
            continue;
        }
        let generic = state.generic_registry().get(name).expect("same keys");
        let dependents = parameter_dependents(model, name);
        let sentence = fill(
            &templates.unusual,
            &[
                ("name", model.parameter_label(name)),
                ("current_mean", describe_mean(current)),
                ("generic_mean", describe_mean(generic)),
                ("z", format!("{zv:.2}")),
                ("dependents", join_or_none(&dependents)),
            ],
        );
        items.push(ExplanationItem {
            kind: ItemKind::UnusualValue,
            subject: name.clone(),
            answer: None,
            magnitude: zv,
            z: Some(zv),
            swing: swing.get(name.as_str()).copied().unwrap_or(0.0),
            dependents,
            sentence,
        });
    }

    let owners = model.parameter_owners();
    for effect in answer_effects(state)? {
        let flipped = effect.flipped();
        if !flipped && !effect.cut_margin(thresholds.margin) {
            continue;
        }
        let question = state.question(&effect.question)?;
        let refined: Vec<&String> = question
            .answer(&effect.answer)
            .map(|a| a.refine.keys().collect())
            .unwrap_or_default();
        let mut touched = BTreeSet::new();
        for p in &refined {
            touched.extend(owners.get(p.as_str()).cloned().unwrap_or_default());
        }
        let dependents = ordered_names(model, &touched);
        let item_swing = refined
            .iter()
            .map(|p| swing.get(p.as_str()).copied().unwrap_or(0.0))
            .fold(0.0, f64::max);
        let item_z = refined
            .iter()
            .filter_map(|p| z.get(p.as_str()).copied().flatten())
            .reduce(f64::max);
        // change of the pre-answer leader's margin
        let before_margin = effect.before.margin();
        let after_margin = crate::evaluation::margin_of(&effect.after.eus(), effect.before.index);
        let sentence = if flipped {
            fill(
                &templates.critical_flip,
                &[
                    ("answer", effect.answer.clone()),
                    ("question", question.prompt.clone()),
                    ("before", effect.before.alternative.clone()),
                    ("after", effect.after.alternative.clone()),
                    ("dependents", join_or_none(&dependents)),
                ],
            )
        } else {
            fill(
                &templates.critical_margin,
                &[
                    ("answer", effect.answer.clone()),
                    ("question", question.prompt.clone()),
                    ("best", effect.after.alternative.clone()),
                    ("margin", num(effect.after.margin())),
                    ("dependents", join_or_none(&dependents)),
                ],
            )
        };
        items.push(ExplanationItem {
            kind: ItemKind::DecisionCritical,
            subject: effect.question.clone(),
            answer: Some(effect.answer.clone()),
            magnitude: after_margin - before_margin,
            z: item_z,
            swing: item_swing,
            dependents,
            sentence,
        });
    }

    items.sort_by(|a, b| {
        b.swing
            .total_cmp(&a.swing)
            .then(b.z.unwrap_or(0.0).total_cmp(&a.z.unwrap_or(0.0)))
    });
    Ok(items)
}

/// The most sensitive parameters of the generic model.
pub fn top_sensitivity_items(state: &ConsultationState, count: usize) -> Result<Vec<ExplanationItem>> {
    let model = state.model();
    let generic = ConsultationState::with_settings(std::sync::Arc::clone(model), *state.settings())?;
    let mut records = sensitivity_scan(&generic)?;
    records.retain(|r| r.swing > 0.0);
    records.sort_by(|a, b| b.swing.total_cmp(&a.swing));
    Ok(records
        .into_iter()
        .take(count)
        .map(|r| {
            let sentence = fill(
                &model.templates.top_sensitivity,
                &[
                    ("name", model.parameter_label(&r.parameter)),
                    ("swing", num(r.swing)),
                    (
                        "flips",
                        if r.flips {
                            " and can change the recommendation".into()
                        } else {
                            String::new()
                        },
                    ),
                ],
            );
            ExplanationItem {
                kind: ItemKind::TopSensitivity,
                dependents: parameter_dependents(model, &r.parameter),
                subject: r.parameter,
                answer: None,
                magnitude: r.swing,
                z: None,
                swing: r.swing,
                sentence,
            }
        })
        .collect())
}

/// Explanation text and the items behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub text: String,
    pub items: Vec<ExplanationItem>,
}

/// Template-based explanation of the current state, referenced to the generic model.
pub fn render_explanation(state: &ConsultationState, generic_summary: bool) -> Result<String> {
    Ok(explain(state, generic_summary)?.text)
}

pub fn explain(state: &ConsultationState, generic_summary: bool) -> Result<Explanation> {
    let model = state.model();
    let templates = &model.templates;
    let rec = state.recommendation()?;
    let summary = state.eu_summary()?;
    let mut text = recommendation_line(&templates.recommendation, &rec, Some(summary));
    if rec.tie {
        text.push(' ');
        text.push_str(&fill(&templates.tie, &[("tied", rec.tied.join(", "))]));
    }
    text.push('\n');
    let items = flag_explanation_items(state)?;
    for item in &items {
        text.push_str(&item.sentence);
        text.push('\n');
    }
    if generic_summary {
        let generic_rec = recommend_compiled(state.evaluator(), state.generic_registry())?;
        let _ = write!(
            text,
            "\n{}\n{}\n",
            templates.generic_header,
            recommendation_line(&templates.generic_recommendation, &generic_rec, None)
        );
        for (name, p) in state.generic_registry().iter() {
            let (mean, sd) = match p {
                Parameter::Scalar(q) => (num(q.moments().0), num(q.moments().1.sqrt())),
                Parameter::Row(r) => (
                    describe_mean(p),
                    format!(
                        "({})",
                        r.component_marginals()
                            .iter()
                            .map(|d| num(d.sd()))
                            .collect::<Vec<_>>()
                            .join(", ")
                    ),
                ),
            };
            text.push_str(&fill(
                &templates.generic_parameter,
                &[
                    ("name", model.parameter_label(name)),
                    ("kind", p.kind().replace('_', " ")),
                    ("mean", mean),
                    ("sd", sd),
                ],
            ));
            text.push('\n');
        }
        let top = top_sensitivity_items(state, 3)?;
        if !top.is_empty() {
            text.push_str("Most influential variables:\n");
            for item in &top {
                text.push_str(&item.sentence);
                text.push('\n');
            }
        }
    }
    Ok(Explanation { text, items })
}

fn recommendation_line(template: &str, rec: &Recommendation, summary: Option<&crate::evaluation::EuSummary>) -> String {
    let runner = rec.runner_up();
    let mut vars = vec![
        ("best", rec.alternative.clone()),
        ("best_eu", num(rec.eu_by_alternative[rec.index].eu)),
        ("runner_up", runner.map(|r| r.alternative.clone()).unwrap_or_default()),
        ("runner_up_eu", runner.map(|r| num(r.eu)).unwrap_or_default()),
        ("margin", num(rec.margin())),
    ];
    if let Some(s) = summary {
        let dominance = s.alternatives.get(rec.index).map(|a| a.dominance).unwrap_or(0.0);
        vars.push(("dominance", format!("{:.1}%", 100.0 * dominance)));
        vars.push(("samples", s.samples.to_string()));
    }
    fill(template, &vars)
}
