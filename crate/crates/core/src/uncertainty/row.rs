use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::distribution::Distribution;

/// Distribution over one conditional probability table row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RowDistribution {
    /// Two outcomes: `p` for the first, `1 - p` for the second.
    Binary {
        p: Distribution,
    },
    Dirichlet {
        alpha: Vec<f64>,
    },
    PointVector {
        probabilities: Vec<f64>,
    },
}

impl RowDistribution {
    pub fn binary(p: Distribution) -> Self {
        RowDistribution::Binary { p }
    }

    pub fn dirichlet(alpha: Vec<f64>) -> Self {
        RowDistribution::Dirichlet { alpha }
    }

    pub fn point_vector(probabilities: Vec<f64>) -> Self {
        RowDistribution::PointVector { probabilities }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RowDistribution::Binary { .. } => "binary",
            RowDistribution::Dirichlet { .. } => "dirichlet",
            RowDistribution::PointVector { .. } => "point_vector",
        }
    }

    pub fn dimension(&self) -> usize {
        match self {
            RowDistribution::Binary { .. } => 2,
            RowDistribution::Dirichlet { alpha } => alpha.len(),
            RowDistribution::PointVector { probabilities } => probabilities.len(),
        }
    }

    pub fn check(&self) -> Result<(), String> {
        match self {
            RowDistribution::Binary { p } => {
                p.check()?;
                let (lo, hi) = p.support();
                if lo < 0.0 || hi > 1.0 {
                    return Err(format!(
                        "binary row probability has support [{lo}, {hi}] outside [0, 1]"
                    ));
                }
            }
            RowDistribution::Dirichlet { alpha } => {
                if alpha.len() < 2 {
                    return Err("dirichlet row needs at least 2 components".into());
                }
                if alpha.iter().any(|a| !a.is_finite() || *a <= 0.0) {
                    return Err("dirichlet alpha entries must be > 0".into());
                }
            }
            RowDistribution::PointVector { probabilities } => {
                if probabilities.len() < 2 {
                    return Err("point-vector row needs at least 2 components".into());
                }
                if probabilities.iter().any(|p| !p.is_finite() || *p < 0.0) {
                    return Err("point-vector probabilities must be nonnegative".into());
                }
                let total: f64 = probabilities.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(format!("point-vector probabilities sum to {total}, not 1"));
                }
            }
        }
        Ok(())
    }

    pub fn mean_vector(&self) -> Vec<f64> {
        match self {
            RowDistribution::Binary { p } => {
                let m = p.mean();
                vec![m, 1.0 - m]
            }
            RowDistribution::Dirichlet { alpha } => {
                let total: f64 = alpha.iter().sum();
                alpha.iter().map(|a| a / total).collect()
            }
            RowDistribution::PointVector { probabilities } => probabilities.clone(),
        }
    }

    /// Marginal distribution of each independently sweepable component.
    ///
    /// A binary row has one free component; a Dirichlet component `i` is
    /// Beta(alpha_i, sum(alpha) - alpha_i).
    pub fn component_marginals(&self) -> Vec<Distribution> {
        match self {
            RowDistribution::Binary { p } => vec![p.clone()],
            RowDistribution::Dirichlet { alpha } => {
                let total: f64 = alpha.iter().sum();
                alpha.iter().map(|&a| Distribution::beta(a, total - a)).collect()
            }
            RowDistribution::PointVector { probabilities } => {
                probabilities.iter().map(|&p| Distribution::point(p)).collect()
            }
        }
    }

    /// The row with component `i` pinned at `value` and the remaining mass
    /// spread over the other components in proportion to their means.
    pub fn pinned(&self, i: usize, value: f64) -> Vec<f64> {
        let mean = self.mean_vector();
        let rest = 1.0 - mean[i];
        let others = mean.len() - 1;
        let scale = (1.0 - value) / rest;
        mean.iter()
            .enumerate()
            .map(|(j, &m)| {
                if j == i {
                    value
                } else if rest > 0.0 {
                    m * scale
                } else {
                    (1.0 - value) / others as f64
                }
            })
            .collect()
    }

    /// Draws one probability vector.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            RowDistribution::Binary { p } => {
                let u: f64 = rng.random();
                let p = p.quantile_unchecked(u);
                vec![p, 1.0 - p]
            }
            RowDistribution::Dirichlet { alpha } => {
                let logs: Vec<f64> = alpha.iter().map(|&a| ln_gamma_variate(rng, a)).collect();
                let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let weights: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
                let total: f64 = weights.iter().sum();
                weights.iter().map(|w| w / total).collect()
            }
            RowDistribution::PointVector { probabilities } => probabilities.clone(),
        }
    }
}

/// Log of a unit-scale Gamma(shape) variate.
///
/// Marsaglia-Tsang squeeze for shape >= 1; for shape < 1 the boost
/// `G(shape) = G(shape + 1) * U^(1/shape)`, kept in log space so tiny
/// shapes do not underflow.
pub fn ln_gamma_variate<R: Rng + ?Sized>(rng: &mut R, shape: f64) -> f64 {
    if shape < 1.0 {
        let u: f64 = 1.0 - rng.random::<f64>();
        return ln_gamma_variate(rng, shape + 1.0) + u.ln() / shape;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = 1.0 - rng.random::<f64>();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return (d * v).ln();
        }
    }
}

/// Draws a probability vector from `r`.
pub fn sample_row<R: Rng + ?Sized>(r: &RowDistribution, rng: &mut R) -> Vec<f64> {
    r.sample(rng)
}
