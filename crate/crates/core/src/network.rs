//! Decision network structure: nodes, arcs, table bindings and validation.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::assessment::AssessmentQuestion;
use crate::error::{Error, Result};
use crate::insight::Templates;
use crate::uncertainty::{Parameter, Registry, Role};

/// Largest decision tree (product of all node cardinalities) that is evaluated.
pub const MAX_TREE_LEAVES: u128 = 1_000_000;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChanceNode {
    pub id: NodeId,
    pub display_name: String,
    pub outcomes: Vec<String>,
    #[serde(default)]
    pub parents: Vec<NodeId>,
    /// One row parameter per parent configuration, row-major over `parents`.
    pub cpt: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionNode {
    pub id: NodeId,
    pub display_name: String,
    pub alternatives: Vec<String>,
    /// Information available when the decision is made.
    #[serde(default)]
    pub parents: Vec<NodeId>,
}

/// A subject attribute that is displayed and explained but not part of the
/// expected-utility computation. `influences` are display-only arcs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariateNode {
    pub id: NodeId,
    pub display_name: String,
    pub parameter: String,
    #[serde(default)]
    pub influences: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityNode {
    pub id: NodeId,
    pub display_name: String,
    pub parents: Vec<NodeId>,
    /// One utility parameter per parent configuration, row-major over `parents`.
    pub table: Vec<String>,
}

/// Declared utility range of a model file; utilities are rescaled to `[0, 1]` on load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityScale {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McDefaults {
    pub samples: usize,
    pub seed: u64,
    pub bins: usize,
}

impl Default for McDefaults {
    fn default() -> Self {
        Self {
            samples: 10_000,
            seed: 42,
            bins: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// z-score at which a subject value counts as unusual.
    pub unusual_z: f64,
    /// EU margin below which an answer counts as decision-critical.
    pub margin: f64,
    /// Fraction of the largest swing below which a non-flipping node is pruned.
    pub prune: f64,
    /// Quantile grid points per sensitivity sweep.
    pub grid: usize,
    /// Largest tolerated gap between the answer mixture and the current EU.
    pub coherence: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            unusual_z: 2.0,
            margin: 0.02,
            prune: 0.05,
            grid: 9,
            coherence: 1e-3,
        }
    }
}

fn default_cost_scale() -> f64 {
    1.0
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

/// A decision network with uncertain parameters, plus its question bank and settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkModel {
    #[serde(default = "default_version")]
    pub format_version: u32,
    pub id: String,
    #[serde(default)]
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utility_scale: Option<UtilityScale>,
    /// In decision order.
    pub decisions: Vec<DecisionNode>,
    #[serde(default)]
    pub chance: Vec<ChanceNode>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub covariates: Vec<CovariateNode>,
    pub utility: UtilityNode,
    pub parameters: Registry,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameter_labels: BTreeMap<String, String>,
    #[serde(default)]
    pub questions: Vec<AssessmentQuestion>,
    /// Utility units per unit of question cost.
    #[serde(default = "default_cost_scale")]
    pub cost_scale: f64,
    #[serde(default)]
    pub monte_carlo: McDefaults,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub templates: Templates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Decision,
    Chance,
    Covariate,
    Utility,
}

/// Row-major enumeration of parent configurations (last parent varies fastest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParentConfigs {
    cards: Vec<usize>,
}

impl ParentConfigs {
    pub fn new(cards: Vec<usize>) -> Self {
        Self { cards }
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn len(&self) -> usize {
        self.cards.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, config: &[usize]) -> usize {
        debug_assert_eq!(config.len(), self.cards.len());
        config
            .iter()
            .zip(&self.cards)
            .fold(0, |acc, (&v, &card)| acc * card + v)
    }

    pub fn config(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.cards.len()];
        for (slot, &card) in out.iter_mut().zip(&self.cards).rev() {
            *slot = index % card;
            index /= card;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<Finding>,
    pub warnings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    fn error(&mut self, code: &str, message: impl Into<String>) {
        self.errors.push(Finding {
            code: code.to_owned(),
            message: message.into(),
        });
    }

    fn warn(&mut self, code: &str, message: impl Into<String>) {
        self.warnings.push(Finding {
            code: code.to_owned(),
            message: message.into(),
        });
    }

    pub fn has_error(&self, code: &str) -> bool {
        self.errors.iter().any(|f| f.code == code)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .errors
            .iter()
            .map(|e| format!("{}: {}", e.code, e.message))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl NetworkModel {
    pub fn first_decision(&self) -> &DecisionNode {
        &self.decisions[0]
    }

    /// Kind of every node id, in declaration order within each kind.
    pub fn node_kinds(&self) -> BTreeMap<NodeId, NodeKind> {
        let mut kinds = BTreeMap::new();
        for d in &self.decisions {
            kinds.insert(d.id.clone(), NodeKind::Decision);
        }
        for c in &self.chance {
            kinds.insert(c.id.clone(), NodeKind::Chance);
        }
        for c in &self.covariates {
            kinds.insert(c.id.clone(), NodeKind::Covariate);
        }
        kinds.insert(self.utility.id.clone(), NodeKind::Utility);
        kinds
    }

    pub fn display_name(&self, id: &str) -> Option<&str> {
        if let Some(d) = self.decisions.iter().find(|d| d.id.as_str() == id) {
            return Some(&d.display_name);
        }
        if let Some(c) = self.chance.iter().find(|c| c.id.as_str() == id) {
            return Some(&c.display_name);
        }
        if let Some(c) = self.covariates.iter().find(|c| c.id.as_str() == id) {
            return Some(&c.display_name);
        }
        (self.utility.id.as_str() == id).then_some(self.utility.display_name.as_str())
    }

    /// Number of states of a chance or decision node.
    pub fn cardinality(&self, id: &str) -> Option<usize> {
        if let Some(d) = self.decisions.iter().find(|d| d.id.as_str() == id) {
            return Some(d.alternatives.len());
        }
        self.chance
            .iter()
            .find(|c| c.id.as_str() == id)
            .map(|c| c.outcomes.len())
    }

    pub fn parent_configs(&self, parents: &[NodeId]) -> Option<ParentConfigs> {
        parents
            .iter()
            .map(|p| self.cardinality(p.as_str()))
            .collect::<Option<Vec<_>>>()
            .map(ParentConfigs::new)
    }

    /// Every arc of the graph as `(from, to)`, including display-only covariate arcs.
    pub fn arcs(&self) -> Vec<(NodeId, NodeId)> {
        let mut arcs = Vec::new();
        for d in &self.decisions {
            arcs.extend(d.parents.iter().map(|p| (p.clone(), d.id.clone())));
        }
        for c in &self.chance {
            arcs.extend(c.parents.iter().map(|p| (p.clone(), c.id.clone())));
        }
        for c in &self.covariates {
            arcs.extend(c.influences.iter().map(|t| (c.id.clone(), t.clone())));
        }
        arcs.extend(
            self.utility
                .parents
                .iter()
                .map(|p| (p.clone(), self.utility.id.clone())),
        );
        arcs
    }

    fn children(&self) -> BTreeMap<NodeId, Vec<NodeId>> {
        let mut children: BTreeMap<NodeId, Vec<NodeId>> =
            self.node_kinds().into_keys().map(|k| (k, Vec::new())).collect();
        for (from, to) in self.arcs() {
            if let Some(list) = children.get_mut(&from) {
                list.push(to);
            }
        }
        children
    }

    /// All nodes reachable from `id` along arcs, excluding `id` itself.
    pub fn descendants(&self, id: &str) -> BTreeSet<NodeId> {
        let children = self.children();
        let mut seen = BTreeSet::new();
        let mut stack: Vec<NodeId> = children.get(id).cloned().unwrap_or_default();
        while let Some(n) = stack.pop() {
            if seen.insert(n.clone()) {
                if let Some(next) = children.get(&n) {
                    stack.extend(next.iter().cloned());
                }
            }
        }
        seen
    }

    /// Nodes whose tables (or covariate slot) reference each parameter.
    pub fn parameter_owners(&self) -> BTreeMap<String, Vec<NodeId>> {
        let mut owners: BTreeMap<String, Vec<NodeId>> = BTreeMap::new();
        let mut add = |param: &str, node: &NodeId| {
            let list = owners.entry(param.to_owned()).or_default();
            if !list.contains(node) {
                list.push(node.clone());
            }
        };
        for c in &self.chance {
            for p in &c.cpt {
                add(p, &c.id);
            }
        }
        for c in &self.covariates {
            add(&c.parameter, &c.id);
        }
        for p in &self.utility.table {
            add(p, &self.utility.id);
        }
        owners
    }

    /// Human-readable name of a parameter: its label, else its owning node's name.
    pub fn parameter_label(&self, name: &str) -> String {
        if let Some(label) = self.parameter_labels.get(name) {
            return label.clone();
        }
        self.parameter_owners()
            .get(name)
            .and_then(|owners| owners.first())
            .and_then(|n| self.display_name(n.as_str()))
            .map(str::to_owned)
            .unwrap_or_else(|| name.to_owned())
    }

    /// Product of the cardinalities of all chance and decision nodes.
    pub fn tree_leaves(&self) -> u128 {
        self.decisions
            .iter()
            .map(|d| d.alternatives.len() as u128)
            .chain(self.chance.iter().map(|c| c.outcomes.len() as u128))
            .fold(1u128, |acc, c| acc.saturating_mul(c))
    }

    /// Applies `u -> scale * u + offset` to every utility parameter, including
    /// question replacements. Used for rescaling and invariance checks.
    pub fn map_utilities(&mut self, scale: f64, offset: f64) {
        let rescale = |p: &mut Parameter| {
            if let Parameter::Scalar(q) = p {
                if q.role == Role::Utility {
                    q.dist = q.dist.affine(scale, offset);
                }
            }
        };
        self.parameters.values_mut().for_each(rescale);
        for q in &mut self.questions {
            for a in &mut q.answers {
                a.refine.values_mut().for_each(rescale);
            }
        }
    }
}

/// Checks every structural, table and parameter invariant of a model.
pub fn validate_network(model: &NetworkModel) -> ValidationReport {
    let mut report = ValidationReport::default();

    // ids
    let mut seen = BTreeSet::new();
    let all_ids = model
        .decisions
        .iter()
        .map(|d| &d.id)
        .chain(model.chance.iter().map(|c| &c.id))
        .chain(model.covariates.iter().map(|c| &c.id))
        .chain(std::iter::once(&model.utility.id));
    for id in all_ids {
        if id.as_str().is_empty() {
            report.error("empty id", "node id must not be empty");
        } else if !seen.insert(id.clone()) {
            report.error("duplicate id", format!("node id `{id}` declared more than once"));
        }
    }
    let kinds = model.node_kinds();

    if model.decisions.is_empty() {
        report.error("no decision", "model needs at least one decision node");
    }
    for d in &model.decisions {
        if d.alternatives.len() < 2 {
            report.error(
                "too few alternatives",
                format!("decision `{}` needs at least 2 alternatives", d.id),
            );
        }
        check_labels(&mut report, &d.id, &d.alternatives);
    }
    for c in &model.chance {
        if c.outcomes.len() < 2 {
            report.error(
                "too few outcomes",
                format!("chance node `{}` needs at least 2 outcomes", c.id),
            );
        }
        check_labels(&mut report, &c.id, &c.outcomes);
    }

    // parents must be chance or decision nodes
    let check_parents = |report: &mut ValidationReport, node: &NodeId, parents: &[NodeId]| {
        let mut local = BTreeSet::new();
        for p in parents {
            if !local.insert(p) {
                report.error("duplicate parent", format!("`{node}` lists parent `{p}` twice"));
            }
            match kinds.get(p) {
                None => report.error("unknown node", format!("`{node}` has unknown parent `{p}`")),
                Some(NodeKind::Decision | NodeKind::Chance) => {}
                Some(kind) => report.error(
                    "invalid parent",
                    format!(
                        "`{node}` has parent `{p}` of kind {kind:?}; only chance and decision nodes can be parents"
                    ),
                ),
            }
        }
    };
    for d in &model.decisions {
        check_parents(&mut report, &d.id, &d.parents);
    }
    for c in &model.chance {
        check_parents(&mut report, &c.id, &c.parents);
    }
    check_parents(&mut report, &model.utility.id, &model.utility.parents);
    for c in &model.covariates {
        for t in &c.influences {
            if !kinds.contains_key(t) {
                report.error(
                    "unknown node",
                    format!("covariate `{}` influences unknown node `{t}`", c.id),
                );
            }
        }
    }

    // no-forgetting over the declared decision order
    for (k, d) in model.decisions.iter().enumerate() {
        for earlier in &model.decisions[..k] {
            if !d.parents.contains(&earlier.id) {
                report.error(
                    "decision order",
                    format!(
                        "decision `{}` must list earlier decision `{}` as a parent",
                        d.id, earlier.id
                    ),
                );
            }
        }
        for later in &model.decisions[k + 1..] {
            if d.parents.contains(&later.id) {
                report.error(
                    "decision order",
                    format!("decision `{}` cannot observe later decision `{}`", d.id, later.id),
                );
            }
        }
    }

    if find_cycle(model).is_some() {
        report.error("cycle detected", "the arc graph contains a directed cycle");
    }

    let structure_ok = report.errors.is_empty();

    // tables
    let mut used = BTreeSet::new();
    if structure_ok {
        for c in &model.chance {
            let configs = model.parent_configs(&c.parents).expect("parents checked");
            if c.cpt.len() != configs.len() {
                report.error(
                    "incomplete table",
                    format!(
                        "chance node `{}` has {} rows, expected {} (one per parent configuration)",
                        c.id,
                        c.cpt.len(),
                        configs.len()
                    ),
                );
            }
            for name in &c.cpt {
                used.insert(name.as_str());
                match model.parameters.get(name) {
                    None => report.error(
                        "unknown parameter",
                        format!("`{}` references unknown parameter `{name}`", c.id),
                    ),
                    Some(Parameter::Row(r)) if r.dimension() != c.outcomes.len() => report.error(
                        "row dimension",
                        format!(
                            "row `{name}` has dimension {} but `{}` has {} outcomes",
                            r.dimension(),
                            c.id,
                            c.outcomes.len()
                        ),
                    ),
                    Some(Parameter::Row(_)) => {}
                    Some(Parameter::Scalar(_)) => report.error(
                        "parameter kind",
                        format!("`{}` cpt entry `{name}` must be a row distribution", c.id),
                    ),
                }
            }
        }
        let configs = model.parent_configs(&model.utility.parents).expect("parents checked");
        if model.utility.table.len() != configs.len() {
            report.error(
                "incomplete table",
                format!(
                    "utility node `{}` has {} entries, expected {}",
                    model.utility.id,
                    model.utility.table.len(),
                    configs.len()
                ),
            );
        }
        for name in &model.utility.table {
            used.insert(name.as_str());
            match model.parameters.get(name) {
                None => report.error(
                    "unknown parameter",
                    format!("utility table references unknown parameter `{name}`"),
                ),
                Some(p) if p.role() != Some(Role::Utility) => report.error(
                    "parameter kind",
                    format!("utility entry `{name}` must be a utility scalar"),
                ),
                Some(_) => {}
            }
        }
        for c in &model.covariates {
            used.insert(c.parameter.as_str());
            match model.parameters.get(&c.parameter) {
                None => report.error(
                    "unknown parameter",
                    format!("covariate `{}` references unknown parameter `{}`", c.id, c.parameter),
                ),
                Some(p) if p.role() != Some(Role::Covariate) => report.error(
                    "parameter kind",
                    format!(
                        "covariate `{}` parameter `{}` must have the covariate role",
                        c.id, c.parameter
                    ),
                ),
                Some(_) => {}
            }
        }
        for name in model.parameters.names() {
            if !used.contains(name.as_str()) {
                report.error(
                    "orphan parameter",
                    format!("parameter `{name}` is not used by any table"),
                );
            }
        }
        let leaves = model.tree_leaves();
        if leaves > MAX_TREE_LEAVES {
            report.error(
                "tree too large",
                format!("decision tree has {leaves} leaves, limit is {MAX_TREE_LEAVES}"),
            );
        }
    }

    for (name, p) in model.parameters.iter() {
        if let Err(e) = p.check() {
            report.error("invalid parameter", format!("`{name}`: {e}"));
        }
    }
    for label in model.parameter_labels.keys() {
        if !model.parameters.contains(label) {
            report.warn("unknown label", format!("label given for unknown parameter `{label}`"));
        }
    }

    // questions
    let mut qids = BTreeSet::new();
    for q in &model.questions {
        if !qids.insert(q.id.as_str()) {
            report.error(
                "duplicate question",
                format!("question id `{}` declared more than once", q.id),
            );
        }
        if let Err(e) = q.check(&model.parameters) {
            report.error("invalid question", format!("question `{}`: {e}", q.id));
        }
    }

    if !(model.cost_scale.is_finite() && model.cost_scale >= 0.0) {
        report.error("invalid setting", "cost_scale must be a nonnegative number");
    }
    let t = &model.thresholds;
    if t.grid == 0 || t.unusual_z.is_nan() || t.margin.is_nan() || t.prune.is_nan() || t.coherence.is_nan() {
        report.error(
            "invalid setting",
            "thresholds must be numbers and the sweep grid must be >= 1",
        );
    }
    if model.monte_carlo.bins == 0 || model.monte_carlo.samples == 0 {
        report.error("invalid setting", "monte_carlo samples and bins must be >= 1");
    }

    // suspicious but legal
    if structure_ok {
        let reaching = ancestors_of(model, &model.utility.id);
        for c in &model.chance {
            if !reaching.contains(&c.id) {
                report.warn(
                    "no path to utility",
                    format!("chance node `{}` has no directed path to the utility node", c.id),
                );
            }
        }
        if let Some(first) = model.decisions.first() {
            if !first.parents.is_empty() {
                report.warn(
                    "observed before first decision",
                    format!(
                        "first decision `{}` observes {:?}; alternatives are evaluated as unconditional commitments",
                        first.id,
                        first.parents.iter().map(NodeId::as_str).collect::<Vec<_>>()
                    ),
                );
            }
        }
    }

    report
}

fn check_labels(report: &mut ValidationReport, node: &NodeId, labels: &[String]) {
    let mut seen = BTreeSet::new();
    for l in labels {
        if !seen.insert(l) {
            report.error("duplicate label", format!("`{node}` repeats the state label `{l}`"));
        }
    }
}

fn ancestors_of(model: &NetworkModel, target: &NodeId) -> BTreeSet<NodeId> {
    let mut parents: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for (from, to) in model.arcs() {
        parents.entry(to).or_default().push(from);
    }
    let mut seen = BTreeSet::new();
    let mut stack = vec![target.clone()];
    while let Some(n) = stack.pop() {
        if let Some(ps) = parents.get(&n) {
            for p in ps {
                if seen.insert(p.clone()) {
                    stack.push(p.clone());
                }
            }
        }
    }
    seen
}

/// Kahn's algorithm with lexicographic tie-breaking. Returns the order, or
/// the set of nodes left on a cycle.
fn kahn(model: &NetworkModel) -> std::result::Result<Vec<NodeId>, BTreeSet<NodeId>> {
    let kinds = model.node_kinds();
    let mut indegree: BTreeMap<NodeId, usize> = kinds.keys().map(|k| (k.clone(), 0)).collect();
    let mut children: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for (from, to) in model.arcs() {
        if !kinds.contains_key(&from) || !kinds.contains_key(&to) {
            continue;
        }
        *indegree.get_mut(&to).expect("known node") += 1;
        children.entry(from).or_default().push(to);
    }
    let mut ready: BTreeSet<NodeId> = indegree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(k, _)| k.clone())
        .collect();
    let mut order = Vec::with_capacity(indegree.len());
    while let Some(next) = ready.pop_first() {
        if let Some(cs) = children.get(&next) {
            for c in cs {
                let d = indegree.get_mut(c).expect("known node");
                *d -= 1;
                if *d == 0 {
                    ready.insert(c.clone());
                }
            }
        }
        order.push(next);
    }
    if order.len() == indegree.len() {
        Ok(order)
    } else {
        let placed: BTreeSet<_> = order.into_iter().collect();
        Err(indegree.into_keys().filter(|k| !placed.contains(k)).collect())
    }
}

fn find_cycle(model: &NetworkModel) -> Option<BTreeSet<NodeId>> {
    kahn(model).err()
}

/// Every node once, parents before children, ties broken by id.
pub fn topological_order(model: &NetworkModel) -> Result<Vec<NodeId>> {
    kahn(model).map_err(|stuck| {
        Error::Domain(format!(
            "cycle detected among {:?}",
            stuck.iter().map(NodeId::as_str).collect::<Vec<_>>()
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parent_configs_round_trip() {
        let pc = ParentConfigs::new(vec![2, 3, 2]);
        assert_eq!(pc.len(), 12);
        for i in 0..pc.len() {
            assert_eq!(pc.index(&pc.config(i)), i);
        }
        // last parent varies fastest
        assert_eq!(pc.config(1), vec![0, 0, 1]);
        assert_eq!(pc.config(2), vec![0, 1, 0]);
        assert_eq!(pc.config(6), vec![1, 0, 0]);
        let empty = ParentConfigs::new(vec![]);
        assert_eq!(empty.len(), 1);
        assert_eq!(empty.index(&[]), 0);
    }
}
