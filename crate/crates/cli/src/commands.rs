//! Command line definitions and the non-serving commands.

use std::fmt::Write as _;
use std::net::IpAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use consult_core::insight::{explain, Explanation};
use consult_core::{
    rank_questions, validate_network, AppliedAnswer, ConsultationState, Error, McSettings, NetworkModel, NextQuestion,
    QuestionRanking, Recommendation,
};
use serde::Serialize;

use crate::fixed;
use crate::models::resolve;
use crate::script::parse_script;

#[derive(Debug, Parser)]
#[command(
    name = "consult",
    version,
    about = "Evaluate and customize decision models with uncertain parameters"
)]
pub struct Cli {
    /// Output format; `mc` defaults to json, everything else to text.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model file and list its findings.
    Validate { model: String },
    /// Expected utility of each alternative at the parameter means.
    Evaluate(StateArgs),
    /// Monte Carlo distribution of expected utility.
    Mc {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Unanswered questions ranked by value of information net of cost.
    Evoi(StateArgs),
    /// Apply a scripted list of answers and trace the ranking after each one.
    Consult {
        model: String,
        /// One `question = answer` per line; `#` starts a comment line.
        #[arg(long)]
        script: PathBuf,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Explanation of the current state.
    Explain {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        mc: McArgs,
        /// Append a summary of the generic model.
        #[arg(long)]
        generic_summary: bool,
    },
    /// Run the HTTP session service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// Model file path or shipped model id.
    pub model: String,
    /// An answer to apply, in order; repeatable.
    #[arg(long = "answer", value_name = "QUESTION=ANSWER", value_parser = parse_answer)]
    pub answers: Vec<AppliedAnswer>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct McArgs {
    /// Monte Carlo samples (default: the model's).
    #[arg(long)]
    pub n: Option<usize>,
    /// Monte Carlo seed (default: the model's).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    /// Directory of model files (default: the shipped models).
    #[arg(long)]
    pub models: Option<PathBuf>,
    #[arg(long, env = "CONSULT_PORT", default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: IpAddr,
    /// Directory for session logs.
    #[arg(long, default_value = "sessions")]
    pub data: PathBuf,
}

fn parse_answer(s: &str) -> Result<AppliedAnswer, String> {
    let (q, a) = s.split_once('=').ok_or("expected QUESTION=ANSWER")?;
    Ok(AppliedAnswer {
        question: q.trim().into(),
        answer: a.trim().into(),
    })
}

impl McArgs {
    pub fn settings(&self, model: &NetworkModel) -> McSettings {
        let base = McSettings::from_model(model);
        McSettings {
            samples: self.n.unwrap_or(base.samples),
            seed: self.seed.unwrap_or(base.seed),
            bins: base.bins,
            workers: self.workers,
        }
    }
}

fn build(model: &str, answers: &[AppliedAnswer], mc: &McArgs) -> anyhow::Result<ConsultationState> {
    Ok(state_for(resolve(model)?.model, answers, mc)?)
}

fn json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("payloads serialize");
    s.push('\n');
    s
}

/// Runs every command except `serve` and returns what it prints.
pub fn run(command: &Command, format: Option<Format>) -> anyhow::Result<String> {
    let text = format.unwrap_or(Format::Text) == Format::Text;
    match command {
        Command::Validate { model } => validate(model, text),
        Command::Evaluate(s) => {
            let rec = build(&s.model, &s.answers, &McArgs::default())?.recommendation()?;
            Ok(if text {
                eu_line(&rec) + "\n" + &recommend_line(&rec) + "\n"
            } else {
                json(&rec)
            })
        }
        Command::Mc { state, mc } => {
            let st = build(&state.model, &state.answers, mc)?;
            let summary = st.eu_summary()?;
            Ok(match format.unwrap_or(Format::Json) {
                Format::Json => json(summary),
                Format::Text => {
                    let mut out = format!("samples {} seed {}\n", summary.samples, summary.seed);
                    for a in &summary.alternatives {
                        let _ = writeln!(
                            out,
                            "{} mean {} sd {} dominance {}",
                            a.alternative,
                            fixed(a.mean, 6),
                            fixed(a.sd, 6),
                            fixed(a.dominance, 4)
                        );
                    }
                    out
                }
            })
        }
        Command::Evoi(s) => {
            let ranking = rank_questions(&build(&s.model, &s.answers, &McArgs::default())?)?;
            Ok(if text { ranking_table(&ranking) } else { json(&ranking) })
        }
        Command::Consult { model, script, mc } => {
            let source =
                std::fs::read_to_string(script).with_context(|| format!("cannot read {}", script.display()))?;
            let answers = parse_script(&source)?;
            let trace = consult(model, &answers, mc)?;
            Ok(if text { trace.render() } else { json(&trace) })
        }
        Command::Explain {
            state,
            mc,
            generic_summary,
        } => {
            let e = explain(&build(&state.model, &state.answers, mc)?, *generic_summary)?;
            Ok(if text { e.text + "\n" } else { json(&e) })
        }
        Command::Serve(_) => anyhow::bail!("serve is run by the binary, not `run`"),
    }
}

#[derive(Debug, Serialize)]
struct ValidationOutput {
    model_id: String,
    valid: bool,
    nodes: usize,
    parameters: usize,
    questions: usize,
    warnings: Vec<String>,
}

fn validate(model: &str, text: bool) -> anyhow::Result<String> {
    let loaded = resolve(model)?;
    let m = &loaded.model;
    let report = validate_network(m);
    let out = ValidationOutput {
        model_id: m.id.clone(),
        valid: report.is_ok(),
        nodes: m.node_kinds().len(),
        parameters: m.parameters.len(),
        questions: m.questions.len(),
        warnings: report
            .warnings
            .iter()
            .map(|f| format!("{}: {}", f.code, f.message))
            .collect(),
    };
    if !text {
        return Ok(json(&out));
    }
    let mut s = format!(
        "ok: {} ({} nodes, {} parameters, {} questions)\n",
        out.model_id, out.nodes, out.parameters, out.questions
    );
    for w in &out.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    Ok(s)
}

/// `surgery 0.855, medication 0.700`
pub fn eu_line(rec: &Recommendation) -> String {
    rec.eu_by_alternative
        .iter()
        .map(|a| format!("{} {}", a.alternative, fixed(a.eu, 3)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn recommend_line(rec: &Recommendation) -> String {
    if rec.tie {
        format!("recommended: {} (tied: {})", rec.alternative, rec.tied.join(", "))
    } else {
        format!("recommended: {}", rec.alternative)
    }
}

fn next_line(ranking: &QuestionRanking) -> String {
    match (ranking.stop, ranking.questions.first()) {
        (false, Some(q)) => format!("next: {}", q.id),
        _ => "next: stop".into(),
    }
}

pub fn ranking_table(ranking: &QuestionRanking) -> String {
    let width = ranking
        .questions
        .iter()
        .map(|q| q.id.len())
        .max()
        .unwrap_or(0)
        .max("question".len());
    let mut s = format!("{:width$}  {:>10}  {:>8}  {:>10}\n", "question", "evoi", "cost", "net");
    for q in &ranking.questions {
        let _ = writeln!(
            s,
            "{:width$}  {:>10}  {:>8}  {:>10}",
            q.id,
            fixed(q.evoi, 6),
            fixed(q.cost, 3),
            fixed(q.net_value, 6)
        );
        if let Some(w) = &q.coherence_warning {
            let _ = writeln!(s, "  warning: {w}");
        }
    }
    s + &next_line(ranking) + "\n"
}

#[derive(Debug, Clone, Serialize)]
pub struct Step {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub applied: Option<AppliedAnswer>,
    pub recommendation: Recommendation,
    pub ranking: QuestionRanking,
    pub next: NextQuestion,
}

/// The state after each scripted answer, then the final explanation.
#[derive(Debug, Clone, Serialize)]
pub struct Trace {
    pub model_id: String,
    pub samples: usize,
    pub seed: u64,
    pub steps: Vec<Step>,
    pub explanation: Explanation,
}

pub fn consult(model: &str, answers: &[AppliedAnswer], mc: &McArgs) -> anyhow::Result<Trace> {
    let mut state = build(model, &[], mc)?;
    let step = |s: &ConsultationState, applied: Option<AppliedAnswer>| -> Result<Step, Error> {
        let ranking = rank_questions(s)?;
        let next = match (ranking.stop, ranking.questions.first()) {
            (false, Some(q)) => NextQuestion::Ask { question: q.id.clone() },
            _ => NextQuestion::Stop,
        };
        Ok(Step {
            applied,
            recommendation: s.recommendation()?,
            ranking,
            next,
        })
    };
    let mut steps = vec![step(&state, None)?];
    for a in answers {
        state = consult_core::apply_answer(&state, &a.question, &a.answer)?;
        steps.push(step(&state, Some(a.clone()))?);
    }
    Ok(Trace {
        model_id: state.model().id.clone(),
        samples: state.settings().samples,
        seed: state.settings().seed,
        steps,
        explanation: explain(&state, false)?,
    })
}

impl Trace {
    pub fn render(&self) -> String {
        let mut s = format!("model {} samples {} seed {}\n", self.model_id, self.samples, self.seed);
        for step in &self.steps {
            match &step.applied {
                Some(a) => {
                    let _ = writeln!(s, "\nanswer {} = {}", a.question, a.answer);
                }
                None => s.push_str("\nstart\n"),
            }
            let _ = writeln!(s, "eu: {}", eu_line(&step.recommendation));
            let _ = writeln!(s, "{}", recommend_line(&step.recommendation));
            s.push_str(&ranking_table(&step.ranking));
        }
        s.push_str("\nexplanation\n");
        s.push_str(&self.explanation.text);
        s.push('\n');
        s
    }
}

/// A state with `answers` applied in order to the generic model.
pub fn state_for(model: Arc<NetworkModel>, answers: &[AppliedAnswer], mc: &McArgs) -> Result<ConsultationState, Error> {
    let settings = mc.settings(&model);
    ConsultationState::replay(model, settings, answers)
}
