//! JSON model files.
//!
//! A model file is the serialized [`NetworkModel`]: tables are lists in
//! row-major parent-configuration order, distributions are tagged records
//! such as `{"kind":"beta","alpha":7,"beta":3}`. A file may declare a
//! `utility_scale`; utilities are mapped affinely onto `[0, 1]` on load.

use std::path::Path;

use crate::error::{Error, Result};
use crate::network::{validate_network, NetworkModel, FORMAT_VERSION};

pub fn load_model(path: impl AsRef<Path>) -> Result<NetworkModel> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::Lookup(format!("cannot read {}: {e}", path.display())))?;
    load_model_bytes(&bytes)
}

pub fn load_model_bytes(bytes: &[u8]) -> Result<NetworkModel> {
    let mut model = parse_model(bytes)?;
    normalize_utilities(&mut model)?;
    let report = validate_network(&model);
    if !report.is_ok() {
        return Err(Error::Invalid(report));
    }
    Ok(model)
}

/// Parses and schema-checks without validating the network.
pub fn parse_model(bytes: &[u8]) -> Result<NetworkModel> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let offset = e.valid_up_to();
        let (line, column) = line_column(&bytes[..offset]);
        Error::Parse {
            line,
            column,
            offset,
            message: "invalid UTF-8".into(),
        }
    })?;
    let mut de = serde_json::Deserializer::from_str(text);
    let model: NetworkModel = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let (line, column) = (inner.line(), inner.column());
        if inner.is_data() {
            Error::Schema(format!("at `{path}` (line {line}, column {column}): {inner}"))
        } else {
            let offset = match inner.classify() {
                serde_json::error::Category::Eof => text.len(),
                _ => offset_of(text, line, column),
            };
            Error::Parse {
                line,
                column,
                offset,
                message: inner.to_string(),
            }
        }
    })?;
    de.end().map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        offset: offset_of(text, e.line(), e.column()),
        message: e.to_string(),
    })?;
    if model.format_version != FORMAT_VERSION {
        return Err(Error::Schema(format!(
            "unsupported format_version {} (expected {FORMAT_VERSION})",
            model.format_version
        )));
    }
    Ok(model)
}

fn normalize_utilities(model: &mut NetworkModel) -> Result<()> {
    if let Some(scale) = model.utility_scale.take() {
        if !(scale.min.is_finite() && scale.max.is_finite() && scale.max > scale.min) {
            return Err(Error::Schema(format!(
                "utility_scale needs min < max (got {}, {})",
                scale.min, scale.max
            )));
        }
        let width = scale.max - scale.min;
        model.map_utilities(1.0 / width, -scale.min / width);
    }
    Ok(())
}

/// Canonical text of a model: pretty JSON with fields in declaration order
/// and maps in key order, newline-terminated.
pub fn emit(model: &NetworkModel) -> String {
    let mut text = serde_json::to_string_pretty(model).expect("model serializes");
    text.push('\n');
    text
}

fn line_column(prefix: &[u8]) -> (usize, usize) {
    let line = prefix.iter().filter(|&&b| b == b'\n').count() + 1;
    let column = prefix.iter().rev().take_while(|&&b| b != b'\n').count() + 1;
    (line, column)
}

fn offset_of(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let start: usize = text.split_inclusive('\n').take(line - 1).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}
