use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{NetworkModel, NodeId, ParentConfigs, MAX_TREE_LEAVES};
use crate::uncertainty::{Parameter, Registry};

/// Concrete value of one parameter in an instantiation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Scalar(f64),
    Row(Vec<f64>),
}

/// One concrete setting of every parameter.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Instantiation(pub BTreeMap<String, ParamValue>);

impl Instantiation {
    /// Every parameter at its mean (rows at their mean vectors).
    pub fn means(registry: &Registry) -> Self {
        Instantiation(registry.names().cloned().zip(mean_values(registry)).collect())
    }

    pub fn get(&self, name: &str) -> Option<&ParamValue> {
        self.0.get(name)
    }

    pub fn set(&mut self, name: impl Into<String>, value: ParamValue) {
        self.0.insert(name.into(), value);
    }
}

pub(crate) fn mean_value(p: &Parameter) -> ParamValue {
    match p {
        Parameter::Scalar(q) => ParamValue::Scalar(q.moments().0),
        Parameter::Row(r) => ParamValue::Row(r.mean_vector()),
    }
}

/// Mean of every parameter, in registry order.
pub(crate) fn mean_values(registry: &Registry) -> Vec<ParamValue> {
    registry.iter().map(|(_, p)| mean_value(p)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    Decision(usize),
    Chance(usize),
}

#[derive(Debug, Clone)]
struct Factor {
    /// Positions of the parents in the expansion order.
    parent_pos: Vec<usize>,
    own_pos: usize,
    configs: ParentConfigs,
    /// Registry slot of the row for each parent configuration.
    rows: Vec<usize>,
}

/// A model compiled for repeated expected-utility evaluation.
///
/// Variables are expanded in information order: chance nodes observed
/// before the first decision, the first decision, the chance nodes first
/// observed before the second decision, and so on; chance nodes never
/// observed come last. Within a block the topological order is kept.
/// Backward induction sums over chance branches weighted by their table
/// entries and maximizes over later decisions; weights are the joint
/// probabilities of the path so far, which leaves each maximization
/// unchanged and needs no conditioning.
#[derive(Debug, Clone)]
pub struct Evaluator {
    vars: Vec<Var>,
    cards: Vec<usize>,
    /// Factors that become fully assigned at each depth.
    factors_at: Vec<Vec<Factor>>,
    utility_pos: Vec<usize>,
    utility_configs: ParentConfigs,
    utility_slots: Vec<usize>,
    first_decision_pos: usize,
    alternatives: Vec<String>,
    names: Vec<String>,
    /// Expected vector length of each row-valued slot.
    row_dims: Vec<Option<usize>>,
}

impl Evaluator {
    pub fn new(model: &NetworkModel) -> Result<Self> {
        let leaves = model.tree_leaves();
        if leaves > MAX_TREE_LEAVES {
            return Err(Error::TooLarge {
                leaves,
                limit: MAX_TREE_LEAVES,
            });
        }
        let topo = crate::network::topological_order(model)?;
        let chance_index: BTreeMap<&NodeId, usize> = model.chance.iter().enumerate().map(|(i, c)| (&c.id, i)).collect();

        let mut placed: BTreeSet<&NodeId> = BTreeSet::new();
        let mut vars = Vec::new();
        for (k, d) in model.decisions.iter().enumerate() {
            let observed: BTreeSet<&NodeId> = d.parents.iter().collect();
            for id in &topo {
                if observed.contains(id) && !placed.contains(id) {
                    if let Some(&ci) = chance_index.get(id) {
                        vars.push(Var::Chance(ci));
                        placed.insert(&model.chance[ci].id);
                    }
                }
            }
            vars.push(Var::Decision(k));
        }
        for id in &topo {
            if let Some(&ci) = chance_index.get(id) {
                if !placed.contains(id) {
                    vars.push(Var::Chance(ci));
                    placed.insert(&model.chance[ci].id);
                }
            }
        }

        let mut position: BTreeMap<&NodeId, usize> = BTreeMap::new();
        let mut cards = Vec::with_capacity(vars.len());
        for (pos, v) in vars.iter().enumerate() {
            match *v {
                Var::Decision(k) => {
                    position.insert(&model.decisions[k].id, pos);
                    cards.push(model.decisions[k].alternatives.len());
                }
                Var::Chance(c) => {
                    position.insert(&model.chance[c].id, pos);
                    cards.push(model.chance[c].outcomes.len());
                }
            }
        }
        let pos_of = |id: &NodeId| -> Result<usize> {
            position
                .get(id)
                .copied()
                .ok_or_else(|| Error::Lookup(format!("`{id}` is not a chance or decision node")))
        };
        let slot_of = |name: &str| -> Result<usize> {
            model
                .parameters
                .position(name)
                .ok_or_else(|| Error::Lookup(format!("unknown parameter `{name}`")))
        };

        let mut row_dims = vec![None; model.parameters.len()];
        let mut factors_at: Vec<Vec<Factor>> = vec![Vec::new(); vars.len()];
        for c in &model.chance {
            let parent_pos = c.parents.iter().map(pos_of).collect::<Result<Vec<_>>>()?;
            let own_pos = pos_of(&c.id)?;
            let configs = model
                .parent_configs(&c.parents)
                .ok_or_else(|| Error::Lookup(format!("`{}` has a parent without states", c.id)))?;
            if c.cpt.len() != configs.len() {
                return Err(Error::Schema(format!("incomplete table for `{}`", c.id)));
            }
            let rows = c.cpt.iter().map(|n| slot_of(n)).collect::<Result<Vec<_>>>()?;
            for &slot in &rows {
                row_dims[slot] = Some(c.outcomes.len());
            }
            let done = parent_pos.iter().copied().chain([own_pos]).max().expect("own position");
            factors_at[done].push(Factor {
                parent_pos,
                own_pos,
                configs,
                rows,
            });
        }

        let utility_pos = model.utility.parents.iter().map(pos_of).collect::<Result<Vec<_>>>()?;
        let utility_configs = model
            .parent_configs(&model.utility.parents)
            .ok_or_else(|| Error::Lookup("utility node has a parent without states".into()))?;
        if model.utility.table.len() != utility_configs.len() {
            return Err(Error::Schema("incomplete utility table".into()));
        }
        let utility_slots = model
            .utility
            .table
            .iter()
            .map(|n| slot_of(n))
            .collect::<Result<Vec<_>>>()?;

        let first = model.first_decision();
        Ok(Self {
            first_decision_pos: pos_of(&first.id)?,
            alternatives: first.alternatives.clone(),
            vars,
            cards,
            factors_at,
            utility_pos,
            utility_configs,
            utility_slots,
            names: model.parameters.names().cloned().collect(),
            row_dims,
        })
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    /// Parameter names in slot order.
    pub fn parameter_names(&self) -> &[String] {
        &self.names
    }

    /// Expected utility of each first-decision alternative for parameter
    /// values given in registry order.
    pub fn eu(&self, values: &[ParamValue]) -> Result<Vec<f64>> {
        if values.len() != self.names.len() {
            return Err(Error::Schema(format!(
                "instantiation has {} values, model has {} parameters",
                values.len(),
                self.names.len()
            )));
        }
        for ((value, dim), name) in values.iter().zip(&self.row_dims).zip(&self.names) {
            if let (ParamValue::Row(row), Some(dim)) = (value, dim) {
                if row.len() != *dim {
                    return Err(Error::Domain(format!(
                        "row `{name}` has {} entries, its node has {dim} outcomes",
                        row.len()
                    )));
                }
            }
        }
        let mut assign = vec![0usize; self.vars.len()];
        (0..self.alternatives.len())
            .map(|a| {
                assign[self.first_decision_pos] = a;
                self.expand(0, Some(a), &mut assign, values)
            })
            .collect()
    }

    /// Like [`Evaluator::eu`] but keyed by parameter name.
    pub fn eu_instantiation(&self, inst: &Instantiation) -> Result<Vec<f64>> {
        let values = self
            .names
            .iter()
            .map(|n| {
                inst.get(n)
                    .cloned()
                    .ok_or_else(|| Error::Lookup(format!("instantiation is missing parameter `{n}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        self.eu(&values)
    }

    fn expand(&self, depth: usize, first: Option<usize>, assign: &mut [usize], values: &[ParamValue]) -> Result<f64> {
        if depth == self.vars.len() {
            return self.utility(assign, values);
        }
        let forced = match self.vars[depth] {
            Var::Decision(0) => first,
            _ => None,
        };
        let states = match forced {
            Some(a) => a..a + 1,
            None => 0..self.cards[depth],
        };
        let is_decision = matches!(self.vars[depth], Var::Decision(_));
        let mut acc = if is_decision { f64::NEG_INFINITY } else { 0.0 };
        for state in states {
            assign[depth] = state;
            let w = self.weight(depth, assign, values)?;
            let branch = if w == 0.0 {
                0.0
            } else {
                w * self.expand(depth + 1, first, assign, values)?
            };
            if is_decision {
                acc = acc.max(branch);
            } else {
                acc += branch;
            }
        }
        Ok(acc)
    }

    fn weight(&self, depth: usize, assign: &[usize], values: &[ParamValue]) -> Result<f64> {
        let mut w = 1.0;
        for f in &self.factors_at[depth] {
            let config: Vec<usize> = f.parent_pos.iter().map(|&p| assign[p]).collect();
            let slot = f.rows[f.configs.index(&config)];
            match &values[slot] {
                ParamValue::Row(row) => w *= row[assign[f.own_pos]],
                ParamValue::Scalar(_) => {
                    return Err(Error::Schema(format!(
                        "parameter `{}` should be a row",
                        self.names[slot]
                    )))
                }
            }
        }
        Ok(w)
    }

    fn utility(&self, assign: &[usize], values: &[ParamValue]) -> Result<f64> {
        let config: Vec<usize> = self.utility_pos.iter().map(|&p| assign[p]).collect();
        let slot = self.utility_slots[self.utility_configs.index(&config)];
        match &values[slot] {
            ParamValue::Scalar(u) => Ok(*u),
            ParamValue::Row(_) => Err(Error::Schema(format!(
                "parameter `{}` should be a utility scalar",
                self.names[slot]
            ))),
        }
    }
}

/// Expected utility of each first-decision alternative under `inst`, by
/// exhaustive rollback of the equivalent decision tree.
pub fn eu_at(model: &NetworkModel, inst: &Instantiation) -> Result<Vec<f64>> {
    Evaluator::new(model)?.eu_instantiation(inst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternativeEu {
    pub alternative: String,
    pub eu: f64,
}

/// The alternative with the highest expected utility at parameter means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recommendation {
    pub alternative: String,
    pub index: usize,
    pub eu_by_alternative: Vec<AlternativeEu>,
    /// Another alternative has the same expected utility (see [`same_eu`]).
    pub tie: bool,
    /// Alternatives sharing the top value, in declared order.
    pub tied: Vec<String>,
}

impl Recommendation {
    pub fn from_eus(alternatives: &[String], eus: &[f64]) -> Self {
        let (index, best) = argmax_first(eus);
        let tied: Vec<String> = eus
            .iter()
            .zip(alternatives)
            .filter(|(v, _)| same_eu(**v, best))
            .map(|(_, a)| a.clone())
            .collect();
        Recommendation {
            alternative: alternatives[index].clone(),
            index,
            eu_by_alternative: alternatives
                .iter()
                .zip(eus)
                .map(|(a, &eu)| AlternativeEu {
                    alternative: a.clone(),
                    eu,
                })
                .collect(),
            tie: tied.len() > 1,
            tied,
        }
    }

    pub fn eus(&self) -> Vec<f64> {
        self.eu_by_alternative.iter().map(|a| a.eu).collect()
    }

    /// Best EU minus the best of the others.
    pub fn margin(&self) -> f64 {
        margin_of(&self.eus(), self.index)
    }

    pub fn runner_up(&self) -> Option<&AlternativeEu> {
        self.eu_by_alternative
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.index)
            .max_by(|(ia, a), (ib, b)| a.eu.total_cmp(&b.eu).then(ib.cmp(ia)))
            .map(|(_, a)| a)
    }
}

/// Relative tolerance under which two expected utilities count as tied.
///
/// Rollback sums in different orders for different alternatives, so values
/// that are equal in exact arithmetic can differ in the last bits.
pub const TIE_TOLERANCE: f64 = 1e-12;

pub fn same_eu(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// Index and value of the largest entry; the first one wins ties.
pub fn argmax_first(values: &[f64]) -> (usize, f64) {
    let top = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let best = values.iter().position(|v| same_eu(*v, top)).unwrap_or(0);
    (best, values[best])
}

/// `values[index]` minus the largest other entry.
pub fn margin_of(values: &[f64], index: usize) -> f64 {
    let other = values
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != index)
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    values[index] - other
}

/// Recommendation for the generic model.
pub fn recommend(model: &NetworkModel) -> Result<Recommendation> {
    recommend_with(model, &model.parameters)
}

/// Recommendation with `registry` substituted for the model's parameters.
pub fn recommend_with(model: &NetworkModel, registry: &Registry) -> Result<Recommendation> {
    let evaluator = Evaluator::new(model)?;
    recommend_compiled(&evaluator, registry)
}

pub(crate) fn recommend_compiled(evaluator: &Evaluator, registry: &Registry) -> Result<Recommendation> {
    let eus = evaluator.eu(&mean_values(registry))?;
    Ok(Recommendation::from_eus(evaluator.alternatives(), &eus))
}
