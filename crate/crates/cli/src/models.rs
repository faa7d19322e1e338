//! Model lookup: files on disk and the shipped models.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use consult_core::{fixtures, load_model_bytes, Error, NetworkModel};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub model: Arc<NetworkModel>,
    /// SHA-256 of the file bytes, hex.
    pub hash: String,
}

impl LoadedModel {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, Error> {
        Ok(Self {
            model: Arc::new(load_model_bytes(bytes)?),
            hash: content_hash(bytes),
        })
    }
}

pub fn content_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A readable path, or else the id of a shipped model.
pub fn resolve(arg: &str) -> Result<LoadedModel, Error> {
    let path = Path::new(arg);
    if path.is_file() {
        let bytes = std::fs::read(path).map_err(|e| Error::Lookup(format!("cannot read {arg}: {e}")))?;
        return LoadedModel::from_bytes(&bytes);
    }
    match fixtures::ALL.iter().find(|(id, _)| *id == arg) {
        Some((_, text)) => LoadedModel::from_bytes(text.as_bytes()),
        None => Err(Error::Lookup(format!("no model file or shipped model named `{arg}`"))),
    }
}

pub fn shipped() -> BTreeMap<String, LoadedModel> {
    fixtures::ALL
        .iter()
        .map(|(id, text)| {
            let m = LoadedModel::from_bytes(text.as_bytes()).expect("shipped models load");
            (id.to_string(), m)
        })
        .collect()
}

/// Files that failed to load, with the reason.
pub type LoadFailures = Vec<(PathBuf, String)>;

/// Every `*.json` file in `dir`, keyed by model id, plus the files that failed.
pub fn load_dir(dir: &Path) -> std::io::Result<(BTreeMap<String, LoadedModel>, LoadFailures)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    paths.retain(|p| p.extension().is_some_and(|x| x == "json"));
    paths.sort();
    let mut models = BTreeMap::new();
    let mut failures = Vec::new();
    for path in paths {
        let loaded = std::fs::read(&path)
            .map_err(|e| e.to_string())
            .and_then(|b| LoadedModel::from_bytes(&b).map_err(|e| e.to_string()));
        match loaded {
            Ok(m) if models.contains_key(&m.model.id) => {
                failures.push((path, format!("duplicate model id `{}`", m.model.id)));
            }
            Ok(m) => {
                models.insert(m.model.id.clone(), m);
            }
            Err(e) => failures.push((path, e)),
        }
    }
    Ok((models, failures))
}
