use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::substream;
use super::rollback::{same_eu, Evaluator, ParamValue};
use crate::error::{Error, Result};
use crate::network::NetworkModel;
use crate::uncertainty::{Parameter, Registry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McSettings {
    pub samples: usize,
    pub seed: u64,
    pub bins: usize,
    /// Worker threads; `None` uses the global pool. Results do not depend on it.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl McSettings {
    pub fn from_model(model: &NetworkModel) -> Self {
        Self {
            samples: model.monte_carlo.samples,
            seed: model.monte_carlo.seed,
            bins: model.monte_carlo.bins,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternativeSummary {
    pub alternative: String,
    pub mean: f64,
    pub sd: f64,
    /// Counts over equal-width bins on `[0, 1]`; values outside land in the end bins.
    pub histogram: Vec<u64>,
    /// Fraction of instantiations in which this alternative has the top EU
    /// (ties shared equally).
    pub dominance: f64,
}

/// Monte Carlo distribution of expected utility for each first-decision alternative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EuSummary {
    pub samples: usize,
    pub seed: u64,
    pub bins: usize,
    pub alternatives: Vec<AlternativeSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBar {
    pub alternative: String,
    pub lo: f64,
    pub hi: f64,
}

/// One random instantiation, every registry parameter drawn once, in name order.
pub fn sample_values<R: Rng + ?Sized>(registry: &Registry, rng: &mut R) -> Vec<ParamValue> {
    registry
        .iter()
        .map(|(_, p)| match p {
            Parameter::Scalar(q) => {
                let u: f64 = rng.random();
                ParamValue::Scalar(q.dist.quantile_unchecked(u))
            }
            Parameter::Row(r) => ParamValue::Row(r.sample(rng)),
        })
        .collect()
}

/// Monte Carlo over the model's generic parameters.
pub fn monte_carlo_eu(model: &NetworkModel, n: usize, seed: u64) -> Result<EuSummary> {
    let settings = McSettings {
        samples: n,
        seed,
        ..McSettings::from_model(model)
    };
    simulate(model, &model.parameters, &settings)
}

/// Monte Carlo with `registry` in place of the model's parameters.
pub fn simulate(model: &NetworkModel, registry: &Registry, settings: &McSettings) -> Result<EuSummary> {
    let evaluator = Evaluator::new(model)?;
    simulate_compiled(&evaluator, registry, settings)
}

pub(crate) fn simulate_compiled(
    evaluator: &Evaluator,
    registry: &Registry,
    settings: &McSettings,
) -> Result<EuSummary> {
    if settings.samples == 0 {
        return Err(Error::Domain("Monte Carlo needs at least one sample".into()));
    }
    if settings.bins == 0 {
        return Err(Error::Domain("histogram needs at least one bin".into()));
    }
    let draw = |i: usize| -> Result<Vec<f64>> {
        let mut rng = substream(settings.seed, i as u64);
        evaluator.eu(&sample_values(registry, &mut rng))
    };
    let run = || -> Result<Vec<Vec<f64>>> { (0..settings.samples).into_par_iter().map(draw).collect() };
    let draws = match settings.workers {
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    Ok(summarize(evaluator.alternatives(), &draws, settings))
}

fn summarize(alternatives: &[String], draws: &[Vec<f64>], settings: &McSettings) -> EuSummary {
    let n = draws.len();
    let k = alternatives.len();
    let bins = settings.bins;
    let mut sums = vec![0.0; k];
    let mut wins = vec![0.0; k];
    let mut histograms = vec![vec![0u64; bins]; k];
    for eus in draws {
        let top = eus.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let tied = eus.iter().filter(|v| same_eu(**v, top)).count() as f64;
        for (a, &eu) in eus.iter().enumerate() {
            sums[a] += eu;
            if same_eu(eu, top) {
                wins[a] += 1.0 / tied;
            }
            let bin = ((eu * bins as f64).floor().max(0.0) as usize).min(bins - 1);
            histograms[a][bin] += 1;
        }
    }
    // constant draws keep their exact value
    let means: Vec<f64> = (0..k)
        .map(|a| {
            let first = draws[0][a];
            if draws.iter().all(|eus| eus[a] == first) {
                first
            } else {
                sums[a] / n as f64
            }
        })
        .collect();
    let mut sq = vec![0.0; k];
    for eus in draws {
        for (a, &eu) in eus.iter().enumerate() {
            sq[a] += (eu - means[a]).powi(2);
        }
    }
    let alternatives = alternatives
        .iter()
        .enumerate()
        .map(|(a, name)| AlternativeSummary {
            alternative: name.clone(),
            mean: means[a],
            sd: if n > 1 { (sq[a] / (n - 1) as f64).sqrt() } else { 0.0 },
            histogram: std::mem::take(&mut histograms[a]),
            dominance: wins[a] / n as f64,
        })
        .collect();
    EuSummary {
        samples: n,
        seed: settings.seed,
        bins,
        alternatives,
    }
}

/// `mean -/+ k * sd` per alternative, clamped to `[0, 1]`. `k` is 1 or 2.
pub fn error_bars(summary: &EuSummary, k: u32) -> Result<Vec<ErrorBar>> {
    if k != 1 && k != 2 {
        return Err(Error::Domain(format!(
            "error bars use 1 or 2 standard deviations, not {k}"
        )));
    }
    let k = k as f64;
    Ok(summary
        .alternatives
        .iter()
        .map(|a| ErrorBar {
            alternative: a.alternative.clone(),
            lo: (a.mean - k * a.sd).clamp(0.0, 1.0),
            hi: (a.mean + k * a.sd).clamp(0.0, 1.0),
        })
        .collect())
}
