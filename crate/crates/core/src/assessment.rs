//! The consultation loop: question bank, value of information, ranking,
//! stopping rule, and answer application with undo.

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{
    mean_values, recommend_compiled, simulate_compiled, EuSummary, Evaluator, McSettings, Recommendation,
};
use crate::network::NetworkModel;
use crate::uncertainty::{Refinement, Registry};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Answer {
    pub label: String,
    /// Population share of this answer.
    pub weight: f64,
    /// Subgroup distributions that replace the current ones when this answer is given.
    #[serde(default)]
    pub refine: Refinement,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentQuestion {
    pub id: String,
    pub prompt: String,
    pub answers: Vec<Answer>,
    /// Time and difficulty of asking, in cost units.
    #[serde(default)]
    pub cost: f64,
}

impl AssessmentQuestion {
    pub fn answer(&self, label: &str) -> Option<&Answer> {
        self.answers.iter().find(|a| a.label == label)
    }

    pub fn check(&self, registry: &Registry) -> std::result::Result<(), String> {
        if self.answers.is_empty() {
            return Err("needs at least one answer".into());
        }
        if !(self.cost.is_finite() && self.cost >= 0.0) {
            return Err(format!("cost must be nonnegative (got {})", self.cost));
        }
        let mut labels = BTreeSet::new();
        for a in &self.answers {
            if !labels.insert(a.label.as_str()) {
                return Err(format!("answer `{}` listed twice", a.label));
            }
            if !(a.weight.is_finite() && a.weight > 0.0) {
                return Err(format!("answer `{}` weight must be > 0", a.label));
            }
            registry
                .check_refinement(&a.refine)
                .map_err(|e| format!("answer `{}`: {e}", a.label))?;
        }
        let total: f64 = self.answers.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(format!("answer weights sum to {total}, not 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AppliedAnswer {
    pub question: String,
    pub answer: String,
}

/// A subject-specific view of a generic model: the answers given so far and
/// the registry they produce. Transitions return new states.
#[derive(Debug, Clone)]
pub struct ConsultationState {
    model: Arc<NetworkModel>,
    evaluator: Arc<Evaluator>,
    applied: Vec<AppliedAnswer>,
    registry: Registry,
    mc: McSettings,
    summary: OnceLock<EuSummary>,
}

impl PartialEq for ConsultationState {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.model, &other.model) || self.model == other.model)
            && self.applied == other.applied
            && self.registry == other.registry
            && self.mc == other.mc
    }
}

impl ConsultationState {
    /// Fresh state on the generic model, with the model's Monte Carlo defaults.
    pub fn new(model: Arc<NetworkModel>) -> Result<Self> {
        let mc = McSettings::from_model(&model);
        Self::with_settings(model, mc)
    }

    pub fn with_settings(model: Arc<NetworkModel>, mc: McSettings) -> Result<Self> {
        let evaluator = Arc::new(Evaluator::new(&model)?);
        Ok(Self {
            registry: model.parameters.clone(),
            model,
            evaluator,
            applied: Vec::new(),
            mc,
            summary: OnceLock::new(),
        })
    }

    pub fn with_seed(model: Arc<NetworkModel>, seed: u64) -> Result<Self> {
        let mc = McSettings {
            seed,
            ..McSettings::from_model(&model)
        };
        Self::with_settings(model, mc)
    }

    /// Rebuilds a state by applying `answers` in order to the generic model.
    pub fn replay(model: Arc<NetworkModel>, mc: McSettings, answers: &[AppliedAnswer]) -> Result<Self> {
        answers.iter().try_fold(Self::with_settings(model, mc)?, |state, a| {
            apply_answer(&state, &a.question, &a.answer)
        })
    }

    pub fn model(&self) -> &Arc<NetworkModel> {
        &self.model
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }

    pub fn applied(&self) -> &[AppliedAnswer] {
        &self.applied
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn generic_registry(&self) -> &Registry {
        &self.model.parameters
    }

    pub fn settings(&self) -> &McSettings {
        &self.mc
    }

    pub fn is_answered(&self, question: &str) -> bool {
        self.applied.iter().any(|a| a.question == question)
    }

    pub fn question(&self, id: &str) -> Result<&AssessmentQuestion> {
        self.model
            .questions
            .iter()
            .find(|q| q.id == id)
            .ok_or_else(|| Error::Lookup(format!("unknown question `{id}`")))
    }

    /// Decision at the current parameter means.
    pub fn recommendation(&self) -> Result<Recommendation> {
        recommend_compiled(&self.evaluator, &self.registry)
    }

    /// Expected utilities at the means of `registry`, with this state's model.
    pub fn eus_with(&self, registry: &Registry) -> Result<Vec<f64>> {
        self.evaluator.eu(&mean_values(registry))
    }

    /// Monte Carlo summary for the current registry, computed once per state.
    pub fn eu_summary(&self) -> Result<&EuSummary> {
        if let Some(s) = self.summary.get() {
            return Ok(s);
        }
        let s = simulate_compiled(&self.evaluator, &self.registry, &self.mc)?;
        Ok(self.summary.get_or_init(|| s))
    }

    pub fn has_cached_summary(&self) -> bool {
        self.summary.get().is_some()
    }

    fn successor(&self, applied: Vec<AppliedAnswer>, registry: Registry) -> Self {
        Self {
            model: Arc::clone(&self.model),
            evaluator: Arc::clone(&self.evaluator),
            applied,
            registry,
            mc: self.mc,
            summary: OnceLock::new(),
        }
    }
}

/// Folds `answers` over the generic registry.
pub fn fold_answers(model: &NetworkModel, answers: &[AppliedAnswer]) -> Result<Registry> {
    answers.iter().try_fold(model.parameters.clone(), |reg, a| {
        let q = model
            .questions
            .iter()
            .find(|q| q.id == a.question)
            .ok_or_else(|| Error::Lookup(format!("unknown question `{}`", a.question)))?;
        let ans = q
            .answer(&a.answer)
            .ok_or_else(|| Error::Lookup(format!("question `{}` has no answer `{}`", q.id, a.answer)))?;
        reg.refine(&ans.refine)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evoi {
    pub question: String,
    pub value: f64,
    /// EU of each alternative at subgroup means, per answer.
    pub eu_by_answer: Vec<Vec<f64>>,
    /// Answer-weighted mixture of `eu_by_answer`.
    pub mixture: Vec<f64>,
    /// EU of each alternative in the current state.
    pub current: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coherence_warning: Option<String>,
}

/// Expected value of learning the answer to `q` before deciding.
///
/// `sum_k w_k max_a EU_k(a) - max_a sum_k w_k EU_k(a)`, with `EU_k` the
/// rollback at the means of the registry refined by answer `k`.
pub fn evoi(state: &ConsultationState, q: &AssessmentQuestion) -> Result<Evoi> {
    if state.is_answered(&q.id) {
        return Err(Error::State(format!("question `{}` is already answered", q.id)));
    }
    let mut eu_by_answer = Vec::with_capacity(q.answers.len());
    for a in &q.answers {
        let refined = state.registry.refine(&a.refine)?;
        eu_by_answer.push(state.eus_with(&refined)?);
    }
    let alts = state.evaluator.alternatives().len();
    let mut mixture = vec![0.0; alts];
    let mut expected_best = 0.0;
    for (a, eus) in q.answers.iter().zip(&eu_by_answer) {
        expected_best += a.weight * eus.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for (m, eu) in mixture.iter_mut().zip(eus) {
            *m += a.weight * eu;
        }
    }
    let best_of_mixture = mixture.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let current = state.eus_with(&state.registry)?;
    let tol = state.model.thresholds.coherence;
    let coherence_warning = mixture
        .iter()
        .zip(&current)
        .zip(state.evaluator.alternatives())
        .find(|((m, c), _)| (*m - *c).abs() > tol)
        .map(|((m, c), alt)| {
            format!(
                "answers to `{}` mix to EU {m:.6} for `{alt}` but the current model gives {c:.6}",
                q.id
            )
        });
    Ok(Evoi {
        question: q.id.clone(),
        value: expected_best - best_of_mixture,
        eu_by_answer,
        mixture,
        current,
        coherence_warning,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedQuestion {
    pub id: String,
    pub evoi: f64,
    pub cost: f64,
    pub net_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coherence_warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionRanking {
    pub questions: Vec<RankedQuestion>,
    /// No unanswered question is worth its cost.
    pub stop: bool,
}

/// Unanswered questions by `evoi - cost_scale * cost`, best first
/// (ties: lower cost, then id).
pub fn rank_questions(state: &ConsultationState) -> Result<QuestionRanking> {
    let lambda = state.model.cost_scale;
    let mut questions = Vec::new();
    for q in &state.model.questions {
        if state.is_answered(&q.id) {
            continue;
        }
        let e = evoi(state, q)?;
        questions.push(RankedQuestion {
            id: q.id.clone(),
            evoi: e.value,
            cost: q.cost,
            net_value: e.value - lambda * q.cost,
            coherence_warning: e.coherence_warning,
        });
    }
    questions.sort_by(|a, b| {
        b.net_value
            .total_cmp(&a.net_value)
            .then(a.cost.total_cmp(&b.cost))
            .then_with(|| a.id.cmp(&b.id))
    });
    let stop = questions.iter().all(|q| q.net_value <= 0.0);
    Ok(QuestionRanking { questions, stop })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "next", rename_all = "snake_case")]
pub enum NextQuestion {
    Ask { question: String },
    Stop,
}

/// The best-ranked question, or the advisory stop signal.
pub fn next_question(state: &ConsultationState) -> Result<NextQuestion> {
    let ranking = rank_questions(state)?;
    Ok(match (ranking.stop, ranking.questions.first()) {
        (false, Some(q)) => NextQuestion::Ask { question: q.id.clone() },
        _ => NextQuestion::Stop,
    })
}

/// Records an answer and refines the registry with its subgroup distributions.
pub fn apply_answer(state: &ConsultationState, question: &str, answer: &str) -> Result<ConsultationState> {
    let q = state.question(question)?;
    let a = q
        .answer(answer)
        .ok_or_else(|| Error::Lookup(format!("question `{question}` has no answer `{answer}`")))?;
    if state.is_answered(question) {
        return Err(Error::State(format!(
            "question `{question}` is already answered; undo it first"
        )));
    }
    let registry = state.registry.refine(&a.refine)?;
    let mut applied = state.applied.clone();
    applied.push(AppliedAnswer {
        question: question.to_owned(),
        answer: answer.to_owned(),
    });
    Ok(state.successor(applied, registry))
}

/// Removes the last answer and refolds the rest from the generic registry.
pub fn undo(state: &ConsultationState) -> Result<ConsultationState> {
    if state.applied.is_empty() {
        return Err(Error::State("nothing to undo".into()));
    }
    let applied = state.applied[..state.applied.len() - 1].to_vec();
    let registry = fold_answers(&state.model, &applied)?;
    Ok(state.successor(applied, registry))
}
