use serde::{Deserialize, Serialize};

use super::special::{bracketed_quantile, inc_beta, ln_beta, std_normal_cdf, std_normal_pdf};
use crate::error::{Error, Result};

/// Width of the final bracket in the quantile searches.
pub const QUANTILE_TOL: f64 = 1e-10;

/// What an uncertain quantity stands for in the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Probability,
    Utility,
    /// A descriptive subject attribute (age, weight) with an unrestricted range.
    Covariate,
}

/// A univariate distribution over a parameter's possible values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    Point {
        value: f64,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// Beta(alpha, beta) stretched over `[lo, hi]` (the unit interval unless stated).
    Beta {
        alpha: f64,
        beta: f64,
        #[serde(default, skip_serializing_if = "is_zero")]
        lo: f64,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        hi: f64,
    },
    TruncatedNormal {
        mean: f64,
        sd: f64,
        lo: f64,
        hi: f64,
    },
    /// Piecewise-uniform density: `masses[i]` spread evenly over `[edges[i], edges[i+1]]`.
    Histogram {
        edges: Vec<f64>,
        masses: Vec<f64>,
    },
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

fn one() -> f64 {
    1.0
}

impl Distribution {
    pub fn point(value: f64) -> Self {
        Distribution::Point { value }
    }

    pub fn uniform(lo: f64, hi: f64) -> Self {
        Distribution::Uniform { lo, hi }
    }

    pub fn beta(alpha: f64, beta: f64) -> Self {
        Distribution::Beta {
            alpha,
            beta,
            lo: 0.0,
            hi: 1.0,
        }
    }

    pub fn truncated_normal(mean: f64, sd: f64, lo: f64, hi: f64) -> Self {
        Distribution::TruncatedNormal { mean, sd, lo, hi }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Distribution::Point { .. } => "point",
            Distribution::Uniform { .. } => "uniform",
            Distribution::Beta { .. } => "beta",
            Distribution::TruncatedNormal { .. } => "truncated_normal",
            Distribution::Histogram { .. } => "histogram",
        }
    }

    /// Checks the parameter constraints of the family.
    pub fn check(&self) -> std::result::Result<(), String> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match self {
            Distribution::Point { value } => {
                if !value.is_finite() {
                    return Err("point value must be finite".into());
                }
            }
            Distribution::Uniform { lo, hi } => {
                if !finite(&[*lo, *hi]) || lo >= hi {
                    return Err(format!("uniform requires lo < hi (got {lo}, {hi})"));
                }
            }
            Distribution::Beta { alpha, beta, lo, hi } => {
                if !(alpha.is_finite() && beta.is_finite() && *alpha > 0.0 && *beta > 0.0) {
                    return Err(format!("beta requires alpha > 0 and beta > 0 (got {alpha}, {beta})"));
                }
                if !finite(&[*lo, *hi]) || lo >= hi {
                    return Err(format!("beta requires lo < hi (got {lo}, {hi})"));
                }
            }
            Distribution::TruncatedNormal { mean, sd, lo, hi } => {
                if !finite(&[*mean, *sd, *lo, *hi]) || *sd <= 0.0 {
                    return Err(format!("truncated normal requires sd > 0 (got {sd})"));
                }
                if lo >= hi {
                    return Err(format!("truncated normal requires lo < hi (got {lo}, {hi})"));
                }
                if self.normal_mass() <= 0.0 {
                    return Err("truncated normal has no mass inside [lo, hi]".into());
                }
            }
            Distribution::Histogram { edges, masses } => {
                if masses.is_empty() || edges.len() != masses.len() + 1 {
                    return Err(format!(
                        "histogram needs n >= 1 masses and n + 1 edges (got {} edges, {} masses)",
                        edges.len(),
                        masses.len()
                    ));
                }
                if !finite(edges) || edges.windows(2).any(|w| w[0] >= w[1]) {
                    return Err("histogram edges must be finite and strictly increasing".into());
                }
                if masses.iter().any(|m| !m.is_finite() || *m < 0.0) {
                    return Err("histogram masses must be nonnegative".into());
                }
                let total: f64 = masses.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(format!("histogram masses sum to {total}, not 1"));
                }
            }
        }
        Ok(())
    }

    /// Closed interval containing all the mass.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Distribution::Point { value } => (*value, *value),
            Distribution::Uniform { lo, hi }
            | Distribution::Beta { lo, hi, .. }
            | Distribution::TruncatedNormal { lo, hi, .. } => (*lo, *hi),
            Distribution::Histogram { edges, .. } => (edges[0], edges[edges.len() - 1]),
        }
    }

    /// `(mean, variance)`. Histograms use mass-weighted bin midpoints.
    pub fn moments(&self) -> (f64, f64) {
        match self {
            Distribution::Point { value } => (*value, 0.0),
            Distribution::Uniform { lo, hi } => ((lo + hi) / 2.0, (hi - lo).powi(2) / 12.0),
            Distribution::Beta { alpha, beta, lo, hi } => {
                let s = alpha + beta;
                let w = hi - lo;
                let mean = lo + w * alpha / s;
                let var = w * w * alpha * beta / (s * s * (s + 1.0));
                (mean, var)
            }
            Distribution::TruncatedNormal { mean, sd, lo, hi } => {
                let a = (lo - mean) / sd;
                let b = (hi - mean) / sd;
                let z = self.normal_mass();
                let (pa, pb) = (std_normal_pdf(a), std_normal_pdf(b));
                let shift = (pa - pb) / z;
                // a*pdf(a) is 0 at infinite bounds; bounds here are finite.
                let m = mean + sd * shift;
                let v = sd * sd * (1.0 + (a * pa - b * pb) / z - shift * shift);
                (m, v.max(0.0))
            }
            Distribution::Histogram { edges, masses } => {
                let mids = edges.windows(2).map(|w| 0.5 * (w[0] + w[1]));
                let mean: f64 = mids.clone().zip(masses).map(|(x, m)| x * m).sum();
                let var: f64 = mids.zip(masses).map(|(x, m)| m * (x - mean).powi(2)).sum();
                (mean, var)
            }
        }
    }

    pub fn mean(&self) -> f64 {
        self.moments().0
    }

    pub fn sd(&self) -> f64 {
        self.moments().1.sqrt()
    }

    /// Cumulative distribution function.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Distribution::Point { value } => {
                if x >= *value {
                    1.0
                } else {
                    0.0
                }
            }
            Distribution::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Distribution::Beta { alpha, beta, lo, hi } => {
                inc_beta(*alpha, *beta, ((x - lo) / (hi - lo)).clamp(0.0, 1.0))
            }
            Distribution::TruncatedNormal { mean, sd, lo, hi } => {
                if x <= *lo {
                    return 0.0;
                }
                if x >= *hi {
                    return 1.0;
                }
                let a = (lo - mean) / sd;
                let b = (hi - mean) / sd;
                let z = (x - mean) / sd;
                let f = if a > 0.0 {
                    // upper tail: use survival functions to keep precision
                    let (qa, qb, qz) = (std_normal_cdf(-a), std_normal_cdf(-b), std_normal_cdf(-z));
                    (qa - qz) / (qa - qb)
                } else {
                    let (pa, pb, pz) = (std_normal_cdf(a), std_normal_cdf(b), std_normal_cdf(z));
                    (pz - pa) / (pb - pa)
                };
                f.clamp(0.0, 1.0)
            }
            Distribution::Histogram { edges, masses } => {
                let mut acc = 0.0;
                for (w, m) in edges.windows(2).zip(masses) {
                    if x >= w[1] {
                        acc += m;
                    } else if x > w[0] {
                        acc += m * (x - w[0]) / (w[1] - w[0]);
                        break;
                    } else {
                        break;
                    }
                }
                acc.min(1.0)
            }
        }
    }

    /// Inverse CDF at level `u`, `u` in `[0, 1]`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain(format!("quantile level {u} outside [0, 1]")));
        }
        Ok(self.quantile_unchecked(u))
    }

    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        match self {
            Distribution::Point { value } => *value,
            Distribution::Uniform { lo, hi } => lo + u * (hi - lo),
            Distribution::Beta { alpha, beta, lo, hi } => {
                let y = if u <= 0.0 {
                    0.0
                } else if u >= 1.0 {
                    1.0
                } else {
                    let (a, b) = (*alpha, *beta);
                    let ln_norm = ln_beta(a, b);
                    let pdf = |y: f64| ((a - 1.0) * y.ln() + (b - 1.0) * (1.0 - y).ln() - ln_norm).exp();
                    bracketed_quantile(|y| inc_beta(a, b, y), pdf, u, 0.0, 1.0, QUANTILE_TOL)
                };
                lo + (hi - lo) * y
            }
            Distribution::TruncatedNormal { mean, sd, lo, hi } => {
                if u <= 0.0 {
                    *lo
                } else if u >= 1.0 {
                    *hi
                } else {
                    let (a, b) = ((lo - mean) / sd, (hi - mean) / sd);
                    let mass = if a > 0.0 {
                        std_normal_cdf(-a) - std_normal_cdf(-b)
                    } else {
                        std_normal_cdf(b) - std_normal_cdf(a)
                    };
                    let pdf = |x: f64| std_normal_pdf((x - mean) / sd) / (sd * mass);
                    bracketed_quantile(|x| self.cdf(x), pdf, u, *lo, *hi, QUANTILE_TOL)
                }
            }
            Distribution::Histogram { edges, masses } => histogram_quantile(edges, masses, u),
        }
    }

    /// The image of this distribution under `x -> scale * x + offset`, `scale > 0`.
    pub fn affine(&self, scale: f64, offset: f64) -> Distribution {
        let f = |x: f64| scale * x + offset;
        match self {
            Distribution::Point { value } => Distribution::Point { value: f(*value) },
            Distribution::Uniform { lo, hi } => Distribution::Uniform { lo: f(*lo), hi: f(*hi) },
            Distribution::Beta { alpha, beta, lo, hi } => Distribution::Beta {
                alpha: *alpha,
                beta: *beta,
                lo: f(*lo),
                hi: f(*hi),
            },
            Distribution::TruncatedNormal { mean, sd, lo, hi } => Distribution::TruncatedNormal {
                mean: f(*mean),
                sd: scale * sd,
                lo: f(*lo),
                hi: f(*hi),
            },
            Distribution::Histogram { edges, masses } => Distribution::Histogram {
                edges: edges.iter().map(|&e| f(e)).collect(),
                masses: masses.clone(),
            },
        }
    }

    fn normal_mass(&self) -> f64 {
        match self {
            Distribution::TruncatedNormal { mean, sd, lo, hi } => {
                let a = (lo - mean) / sd;
                let b = (hi - mean) / sd;
                if a > 0.0 {
                    std_normal_cdf(-a) - std_normal_cdf(-b)
                } else {
                    std_normal_cdf(b) - std_normal_cdf(a)
                }
            }
            _ => 1.0,
        }
    }
}

fn histogram_quantile(edges: &[f64], masses: &[f64], u: f64) -> f64 {
    let mut acc = 0.0;
    let mut last_positive = None;
    for (i, &m) in masses.iter().enumerate() {
        if m <= 0.0 {
            continue;
        }
        last_positive = Some(i);
        if u <= acc + m {
            let frac = ((u - acc) / m).clamp(0.0, 1.0);
            return edges[i] + frac * (edges[i + 1] - edges[i]);
        }
        acc += m;
    }
    // rounding left u above the accumulated total
    match last_positive {
        Some(i) => edges[i + 1],
        None => edges[edges.len() - 1],
    }
}

/// A distribution over a probability, utility or covariate parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertainQuantity {
    pub role: Role,
    #[serde(flatten)]
    pub dist: Distribution,
}

impl UncertainQuantity {
    pub fn new(role: Role, dist: Distribution) -> Self {
        Self { role, dist }
    }

    pub fn probability(dist: Distribution) -> Self {
        Self::new(Role::Probability, dist)
    }

    pub fn utility(dist: Distribution) -> Self {
        Self::new(Role::Utility, dist)
    }

    pub fn covariate(dist: Distribution) -> Self {
        Self::new(Role::Covariate, dist)
    }

    pub fn check(&self) -> std::result::Result<(), String> {
        self.dist.check()?;
        if matches!(self.role, Role::Probability | Role::Utility) {
            let (lo, hi) = self.dist.support();
            if lo < -1e-12 || hi > 1.0 + 1e-12 {
                return Err(format!(
                    "{:?} parameter has support [{lo}, {hi}] outside [0, 1]",
                    self.role
                ));
            }
        }
        Ok(())
    }

    pub fn moments(&self) -> (f64, f64) {
        self.dist.moments()
    }

    pub fn sample(&self, u: f64) -> Result<f64> {
        self.dist.quantile(u)
    }
}

/// `(mean, variance)` of `q`.
pub fn moments(q: &UncertainQuantity) -> (f64, f64) {
    q.moments()
}

/// The `u`-quantile of `q`.
pub fn sample(q: &UncertainQuantity, u: f64) -> Result<f64> {
    q.sample(u)
}

/// Mean-shift z-score of a subject-specific distribution against the generic one.
pub fn divergence_z(patient: &UncertainQuantity, generic: &UncertainQuantity) -> Result<f64> {
    divergence_z_moments(patient.moments().0, generic.moments())
}

pub(crate) fn divergence_z_moments(patient_mean: f64, (generic_mean, generic_var): (f64, f64)) -> Result<f64> {
    if generic_var <= 0.0 {
        return Err(Error::UndefinedDivergence);
    }
    Ok((patient_mean - generic_mean).abs() / generic_var.sqrt())
}
