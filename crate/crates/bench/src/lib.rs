//! Setup shared by the benchmarks in `benches/`.

use std::sync::Arc;

use consult_core::{fixtures, ConsultationState, McSettings, NetworkModel};

pub fn model(id: &str) -> Arc<NetworkModel> {
    Arc::new(fixtures::load(id))
}

/// A consultation state on a shipped model with `samples` draws.
pub fn state(id: &str, samples: usize) -> ConsultationState {
    let model = model(id);
    let mc = McSettings {
        samples,
        ..McSettings::from_model(&model)
    };
    ConsultationState::with_settings(model, mc).expect("shipped models are valid")
}
