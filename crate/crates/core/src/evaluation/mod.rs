//! Expected utility: exact rollback at parameter means decides, Monte Carlo
//! over parameter distributions shows how robust the decision is.

mod monte_carlo;
mod rng;
mod rollback;

pub use monte_carlo::{
    error_bars, monte_carlo_eu, sample_values, simulate, AlternativeSummary, ErrorBar, EuSummary, McSettings,
};
pub use rng::substream;
pub use rollback::{
    argmax_first, eu_at, margin_of, recommend, recommend_with, same_eu, AlternativeEu, Evaluator, Instantiation,
    ParamValue, Recommendation, TIE_TOLERANCE,
};

pub(crate) use monte_carlo::simulate_compiled;
pub(crate) use rollback::{mean_values, recommend_compiled};
