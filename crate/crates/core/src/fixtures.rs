//! The example models shipped in `models/`.

use crate::model_file::load_model_bytes;
use crate::network::NetworkModel;

pub const TOY_ANGINA: &str = include_str!("../../../models/toy-angina.json");
pub const TOY_ANGINA_VOI: &str = include_str!("../../../models/toy-angina-voi.json");
pub const TWO_STAGE: &str = include_str!("../../../models/two-stage.json");
pub const ELDERLY_PATIENT: &str = include_str!("../../../models/elderly-patient.json");

/// `(model id, file text)` for every shipped model.
pub const ALL: [(&str, &str); 4] = [
    ("toy-angina", TOY_ANGINA),
    ("toy-angina-voi", TOY_ANGINA_VOI),
    ("two-stage", TWO_STAGE),
    ("elderly-patient", ELDERLY_PATIENT),
];

/// Loads a shipped model by id. Panics on an unknown id or a broken file.
pub fn load(id: &str) -> NetworkModel {
    let (_, text) = ALL
        .iter()
        .find(|(name, _)| *name == id)
        .unwrap_or_else(|| panic!("no shipped model `{id}`"));
    load_model_bytes(text.as_bytes()).unwrap_or_else(|e| panic!("shipped model `{id}` is broken: {e}"))
}
