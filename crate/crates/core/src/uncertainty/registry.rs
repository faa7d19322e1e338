use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize};

use super::distribution::{divergence_z_moments, Distribution, Role, UncertainQuantity};
use super::row::RowDistribution;
use crate::error::{Error, Result};

/// An entry of the parameter registry: a scalar quantity or a table row.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Parameter {
    Scalar(UncertainQuantity),
    Row(RowDistribution),
}

const ROW_KINDS: [&str; 3] = ["binary", "dirichlet", "point_vector"];

impl<'de> Deserialize<'de> for Parameter {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let value = serde_json::Value::deserialize(deserializer)?;
        let kind = value
            .get("kind")
            .and_then(|k| k.as_str())
            .ok_or_else(|| D::Error::missing_field("kind"))?;
        if ROW_KINDS.contains(&kind) {
            RowDistribution::deserialize(value)
                .map(Parameter::Row)
                .map_err(D::Error::custom)
        } else {
            UncertainQuantity::deserialize(value)
                .map(Parameter::Scalar)
                .map_err(D::Error::custom)
        }
    }
}

impl Parameter {
    pub fn scalar(role: Role, dist: Distribution) -> Self {
        Parameter::Scalar(UncertainQuantity::new(role, dist))
    }

    pub fn check(&self) -> std::result::Result<(), String> {
        match self {
            Parameter::Scalar(q) => q.check(),
            Parameter::Row(r) => r.check(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Parameter::Scalar(q) => q.dist.kind(),
            Parameter::Row(r) => r.kind(),
        }
    }

    /// Short description of the parameter's shape, used in schema messages.
    pub fn shape(&self) -> String {
        match self {
            Parameter::Scalar(q) => format!("{:?} scalar", q.role).to_lowercase(),
            Parameter::Row(r) => format!("row of dimension {}", r.dimension()),
        }
    }

    pub fn same_shape(&self, other: &Parameter) -> bool {
        match (self, other) {
            (Parameter::Scalar(a), Parameter::Scalar(b)) => a.role == b.role,
            (Parameter::Row(a), Parameter::Row(b)) => a.dimension() == b.dimension(),
            _ => false,
        }
    }

    pub fn role(&self) -> Option<Role> {
        match self {
            Parameter::Scalar(q) => Some(q.role),
            Parameter::Row(_) => None,
        }
    }

    /// `(mean, variance)` of each free component.
    pub fn marginal_moments(&self) -> Vec<(f64, f64)> {
        match self {
            Parameter::Scalar(q) => vec![q.moments()],
            Parameter::Row(r) => r.component_marginals().iter().map(|d| d.moments()).collect(),
        }
    }

    /// Largest mean-shift z-score across components against `generic`.
    ///
    /// Components whose generic variance is zero are not comparable; if no
    /// component is, the divergence is undefined.
    pub fn divergence_z(&self, generic: &Parameter) -> Result<f64> {
        let mine = self.marginal_moments();
        let theirs = generic.marginal_moments();
        if mine.len() != theirs.len() {
            return Err(Error::Schema("divergence between parameters of different shape".into()));
        }
        let mut best: Option<f64> = None;
        for ((m, _), g) in mine.iter().zip(&theirs) {
            if let Ok(z) = divergence_z_moments(*m, *g) {
                best = Some(best.map_or(z, |b: f64| b.max(z)));
            }
        }
        best.ok_or(Error::UndefinedDivergence)
    }

    /// True when every draw is the same value.
    pub fn is_degenerate(&self) -> bool {
        self.marginal_moments().iter().all(|(_, v)| *v == 0.0)
    }
}

/// Named parameters of a model, in name order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Registry(BTreeMap<String, Parameter>);

/// Replacement distributions keyed by parameter name.
pub type Refinement = BTreeMap<String, Parameter>;

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, param: Parameter) -> Option<Parameter> {
        self.0.insert(name.into(), param)
    }

    pub fn get(&self, name: &str) -> Option<&Parameter> {
        self.0.get(name)
    }

    pub fn lookup(&self, name: &str) -> Result<&Parameter> {
        self.0
            .get(name)
            .ok_or_else(|| Error::Lookup(format!("unknown parameter `{name}`")))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Parameter)> {
        self.0.iter()
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.0.keys()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.0.keys().position(|k| k == name)
    }

    pub(crate) fn values_mut(&mut self) -> impl Iterator<Item = &mut Parameter> {
        self.0.values_mut()
    }

    /// Checks that a refinement only replaces known parameters with same-shape ones.
    pub fn check_refinement(&self, refinement: &Refinement) -> Result<()> {
        for (name, replacement) in refinement {
            let original = self.lookup(name)?;
            if !original.same_shape(replacement) {
                return Err(Error::Schema(format!(
                    "replacement for `{name}` is a {} but the parameter is a {}",
                    replacement.shape(),
                    original.shape()
                )));
            }
            replacement
                .check()
                .map_err(|e| Error::Schema(format!("replacement for `{name}`: {e}")))?;
        }
        Ok(())
    }

    /// A new registry with the refinement's replacements applied.
    pub fn refine(&self, refinement: &Refinement) -> Result<Registry> {
        self.check_refinement(refinement)?;
        let mut next = self.clone();
        for (name, replacement) in refinement {
            next.0.insert(name.clone(), replacement.clone());
        }
        Ok(next)
    }
}

impl FromIterator<(String, Parameter)> for Registry {
    fn from_iter<T: IntoIterator<Item = (String, Parameter)>>(iter: T) -> Self {
        Registry(iter.into_iter().collect())
    }
}

/// Applies a subgroup refinement to `registry`, leaving the input untouched.
pub fn refine(registry: &Registry, refinement: &Refinement) -> Result<Registry> {
    registry.refine(refinement)
}
