//! Test oracles and generators shared by the integration and acceptance suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use consult_core::network::{ChanceNode, DecisionNode, McDefaults, Thresholds, UtilityNode};
use consult_core::{
    display_graph, eu_at, Answer, AssessmentQuestion, ConsultationState, Distribution, Instantiation, NetworkModel,
    NodeId, ParamValue, Parameter, Registry, RowDistribution, Templates, UncertainQuantity,
};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Expected utility of each first-decision alternative by brute force: every
/// combination of later-decision policies is scored against every joint
/// chance outcome, and the best policy combination is kept.
///
/// Later decisions see everything earlier decisions saw (perfect recall).
/// Shares nothing with the evaluator beyond the model types.
pub fn policy_oracle(model: &NetworkModel, inst: &Instantiation) -> Vec<f64> {
    let nodes = OracleNodes::new(model);
    let first = &model.decisions[0];
    (0..first.alternatives.len())
        .map(|a| {
            let policies: Vec<Vec<Vec<usize>>> = model.decisions[1..]
                .iter()
                .enumerate()
                .map(|(k, d)| all_policies(nodes.info_configs(k + 1), d.alternatives.len()))
                .collect();
            let mut best = f64::NEG_INFINITY;
            for combo in cartesian(&policies.iter().map(Vec::len).collect::<Vec<_>>()) {
                let chosen: Vec<&Vec<usize>> = combo.iter().zip(&policies).map(|(&i, p)| &p[i]).collect();
                best = best.max(nodes.score(model, inst, a, &chosen));
            }
            best
        })
        .collect()
}

struct OracleNodes {
    /// Node ids in an order where parents come first.
    order: Vec<String>,
    cards: BTreeMap<String, usize>,
    /// Information set of each decision, in `order`.
    info: Vec<Vec<String>>,
}

impl OracleNodes {
    fn new(model: &NetworkModel) -> Self {
        let mut cards = BTreeMap::new();
        let mut parents: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for d in &model.decisions {
            cards.insert(d.id.to_string(), d.alternatives.len());
            parents.insert(d.id.to_string(), d.parents.iter().map(|p| p.to_string()).collect());
        }
        for c in &model.chance {
            cards.insert(c.id.to_string(), c.outcomes.len());
            parents.insert(c.id.to_string(), c.parents.iter().map(|p| p.to_string()).collect());
        }
        let mut order: Vec<String> = Vec::new();
        while order.len() < parents.len() {
            let next = parents
                .iter()
                .find(|(id, ps)| !order.contains(id) && ps.iter().all(|p| order.contains(p)))
                .map(|(id, _)| id.clone())
                .expect("acyclic");
            order.push(next);
        }
        let mut seen: Vec<String> = Vec::new();
        let mut info = Vec::new();
        for d in &model.decisions {
            for p in &d.parents {
                if !seen.contains(&p.to_string()) {
                    seen.push(p.to_string());
                }
            }
            let mut set: Vec<String> = order.iter().filter(|n| seen.contains(n)).cloned().collect();
            set.dedup();
            info.push(set);
            seen.push(d.id.to_string());
        }
        Self { order, cards, info }
    }

    fn info_configs(&self, k: usize) -> usize {
        self.info[k].iter().map(|n| self.cards[n]).product()
    }

    fn info_index(&self, k: usize, state: &BTreeMap<String, usize>) -> usize {
        self.info[k].iter().fold(0, |acc, n| acc * self.cards[n] + state[n])
    }

    fn score(&self, model: &NetworkModel, inst: &Instantiation, first: usize, policies: &[&Vec<usize>]) -> f64 {
        let chance: Vec<&ChanceNode> = model.chance.iter().collect();
        let cards: Vec<usize> = chance.iter().map(|c| c.outcomes.len()).collect();
        let mut total = 0.0;
        for outcome in cartesian(&cards) {
            let mut state: BTreeMap<String, usize> = BTreeMap::new();
            for (c, &o) in chance.iter().zip(&outcome) {
                state.insert(c.id.to_string(), o);
            }
            for id in &self.order {
                if let Some(k) = model.decisions.iter().position(|d| d.id.as_str() == id) {
                    let alt = if k == 0 {
                        first
                    } else {
                        policies[k - 1][self.info_index(k, &state)]
                    };
                    state.insert(id.clone(), alt);
                }
            }
            let mut p = 1.0;
            for c in &chance {
                let row_name = &c.cpt[table_index(&c.parents, &self.cards, &state)];
                p *= row_value(inst, row_name)[state[c.id.as_str()]];
            }
            if p == 0.0 {
                continue;
            }
            let u_name = &model.utility.table[table_index(&model.utility.parents, &self.cards, &state)];
            let u = match inst.get(u_name).expect("utility value") {
                ParamValue::Scalar(x) => *x,
                ParamValue::Row(_) => panic!("utility entry `{u_name}` is a row"),
            };
            total += p * u;
        }
        total
    }
}

fn table_index(parents: &[NodeId], cards: &BTreeMap<String, usize>, state: &BTreeMap<String, usize>) -> usize {
    parents
        .iter()
        .fold(0, |acc, p| acc * cards[p.as_str()] + state[p.as_str()])
}

fn row_value(inst: &Instantiation, name: &str) -> Vec<f64> {
    match inst.get(name).expect("row value") {
        ParamValue::Row(v) => v.clone(),
        ParamValue::Scalar(_) => panic!("`{name}` is not a row"),
    }
}

fn all_policies(configs: usize, alternatives: usize) -> Vec<Vec<usize>> {
    cartesian(&vec![alternatives; configs])
}

/// Every tuple in `0..cards[0] x 0..cards[1] x ...`, last position fastest.
pub fn cartesian(cards: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &c in cards {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..c).map(move |i| {
                    let mut next = prefix.clone();
                    next.push(i);
                    next
                })
            })
            .collect();
    }
    out
}

/// Parameter means computed from the distribution formulas directly.
pub fn oracle_means(registry: &Registry) -> Instantiation {
    let mut inst = Instantiation::default();
    for (name, p) in registry.iter() {
        let value = match p {
            Parameter::Scalar(q) => ParamValue::Scalar(dist_mean(&q.dist)),
            Parameter::Row(RowDistribution::Binary { p }) => {
                let p = dist_mean(p);
                ParamValue::Row(vec![p, 1.0 - p])
            }
            Parameter::Row(RowDistribution::Dirichlet { alpha }) => {
                let s: f64 = alpha.iter().sum();
                ParamValue::Row(alpha.iter().map(|a| a / s).collect())
            }
            Parameter::Row(RowDistribution::PointVector { probabilities }) => ParamValue::Row(probabilities.clone()),
        };
        inst.set(name.clone(), value);
    }
    inst
}

fn dist_mean(d: &Distribution) -> f64 {
    match d {
        Distribution::Point { value } => *value,
        Distribution::Uniform { lo, hi } => (lo + hi) / 2.0,
        Distribution::Beta { alpha, beta, lo, hi } => lo + (hi - lo) * alpha / (alpha + beta),
        Distribution::TruncatedNormal { .. } | Distribution::Histogram { .. } => d.mean(),
    }
}

/// Knobs for [`random_model`].
#[derive(Debug, Clone, Copy)]
pub struct GenOptions {
    pub max_chance: usize,
    pub two_decisions: bool,
    pub questions: usize,
    /// Allow one parameter to fill several table cells.
    pub share_parameters: bool,
}

impl Default for GenOptions {
    fn default() -> Self {
        Self {
            max_chance: 4,
            two_decisions: true,
            questions: 3,
            share_parameters: true,
        }
    }
}

fn random_scalar<R: Rng>(rng: &mut R) -> Distribution {
    match rng.random_range(0..4) {
        0 => Distribution::point(rng.random_range(0.0..1.0)),
        1 => {
            let a: f64 = rng.random_range(0.0..0.8);
            Distribution::uniform(a, a + rng.random_range(0.05..0.2))
        }
        _ => Distribution::beta(rng.random_range(0.5..20.0), rng.random_range(0.5..20.0)),
    }
}

fn random_row<R: Rng>(rng: &mut R, dim: usize) -> RowDistribution {
    match (dim, rng.random_range(0..3)) {
        (2, 0) => RowDistribution::binary(random_scalar(rng)),
        (_, 1) => {
            let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(0.01..1.0)).collect();
            let s: f64 = v.iter().sum();
            v.iter_mut().for_each(|x| *x /= s);
            RowDistribution::point_vector(v)
        }
        _ => RowDistribution::dirichlet((0..dim).map(|_| rng.random_range(0.3..8.0)).collect()),
    }
}

/// A small random decision network that passes validation.
///
/// Nodes are laid out on a line (first decision, chance nodes, optionally a
/// second decision somewhere after the first); parents are drawn from
/// earlier positions, so the graph is acyclic by construction.
pub fn random_model(seed: u64, opts: GenOptions) -> NetworkModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_chance = rng.random_range(1..=opts.max_chance);
    let second = opts.two_decisions && rng.random_bool(0.5);

    // positions: 0 = first decision; chance nodes and maybe the second decision after it
    let mut layout: Vec<char> = std::iter::repeat_n('c', n_chance).collect();
    if second {
        let at = rng.random_range(0..=n_chance);
        layout.insert(at, 'd');
    }
    layout.insert(0, 'D');

    let mut ids: Vec<String> = Vec::new();
    let mut cards: Vec<usize> = Vec::new();
    let mut decisions = Vec::new();
    let mut chance = Vec::new();
    let mut registry = Registry::new();
    let mut next_param = 0usize;
    let mut chance_count = 0;
    for (pos, kind) in layout.iter().enumerate() {
        match kind {
            'D' => {
                let alts = rng.random_range(2..=3);
                ids.push("d0".into());
                cards.push(alts);
                decisions.push(DecisionNode {
                    id: NodeId::new("d0"),
                    display_name: "first decision".into(),
                    alternatives: (0..alts).map(|i| format!("a{i}")).collect(),
                    parents: Vec::new(),
                });
            }
            'd' => {
                // keep the information set small enough to enumerate every policy
                let mut parents = vec![NodeId::new("d0")];
                let mut configs = cards[0];
                for (j, id) in ids.iter().enumerate().skip(1) {
                    if id.starts_with('c') && rng.random_bool(0.5) && configs * cards[j] <= 12 {
                        parents.push(NodeId::new(id.clone()));
                        configs *= cards[j];
                    }
                }
                ids.push("d1".into());
                cards.push(2);
                decisions.push(DecisionNode {
                    id: NodeId::new("d1"),
                    display_name: "second decision".into(),
                    alternatives: vec!["b0".into(), "b1".into()],
                    parents,
                });
            }
            _ => {
                let id = format!("c{chance_count}");
                chance_count += 1;
                let outcomes = rng.random_range(2..=3);
                let mut parents: Vec<NodeId> = Vec::new();
                let mut candidates: Vec<usize> = (0..pos).collect();
                candidates.shuffle(&mut rng);
                for j in candidates.into_iter().take(rng.random_range(0..=2)) {
                    parents.push(NodeId::new(ids[j].clone()));
                }
                let configs: usize = parents
                    .iter()
                    .map(|p| cards[ids.iter().position(|i| i == p.as_str()).unwrap()])
                    .product();
                let mut cpt = Vec::new();
                for _ in 0..configs {
                    if opts.share_parameters && !cpt.is_empty() && rng.random_bool(0.2) {
                        let reuse: &String = cpt.choose(&mut rng).unwrap();
                        cpt.push(reuse.clone());
                        continue;
                    }
                    let name = format!("p{next_param}");
                    next_param += 1;
                    registry.insert(name.clone(), Parameter::Row(random_row(&mut rng, outcomes)));
                    cpt.push(name);
                }
                ids.push(id.clone());
                cards.push(outcomes);
                chance.push(ChanceNode {
                    id: NodeId::new(id),
                    display_name: format!("chance {}", chance_count - 1),
                    outcomes: (0..outcomes).map(|i| format!("o{i}")).collect(),
                    parents,
                    cpt,
                });
            }
        }
    }

    let mut u_parents = vec![NodeId::new("d0")];
    let mut u_configs = cards[0];
    for (j, id) in ids.iter().enumerate().skip(1) {
        if rng.random_bool(0.6) && u_configs * cards[j] <= 36 {
            u_parents.push(NodeId::new(id.clone()));
            u_configs *= cards[j];
        }
    }
    let mut table: Vec<String> = Vec::new();
    let mut next_u = 0usize;
    for _ in 0..u_configs {
        if opts.share_parameters && !table.is_empty() && rng.random_bool(0.15) {
            let reuse = table.choose(&mut rng).unwrap().clone();
            table.push(reuse);
            continue;
        }
        let name = format!("u{next_u}");
        next_u += 1;
        registry.insert(
            name.clone(),
            Parameter::Scalar(UncertainQuantity::utility(random_scalar(&mut rng))),
        );
        table.push(name);
    }

    let names: Vec<String> = registry.names().cloned().collect();
    let mut questions = Vec::new();
    for qi in 0..opts.questions {
        let n_answers = rng.random_range(1..=3);
        let mut weights: Vec<f64> = (0..n_answers).map(|_| rng.random_range(0.1..1.0)).collect();
        let s: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= s);
        let fix: f64 = 1.0 - weights[..n_answers - 1].iter().sum::<f64>();
        weights[n_answers - 1] = fix;
        let n_targets = rng.random_range(0..=2);
        let targets: Vec<&String> = names.choose_multiple(&mut rng, n_targets).collect();
        let answers = weights
            .iter()
            .enumerate()
            .map(|(ai, &w)| {
                let refine = targets
                    .iter()
                    .map(|&name| {
                        let replacement = match registry.get(name).unwrap() {
                            Parameter::Scalar(q) => {
                                Parameter::Scalar(UncertainQuantity::new(q.role, random_scalar(&mut rng)))
                            }
                            Parameter::Row(r) => Parameter::Row(same_shape_row(&mut rng, r)),
                        };
                        (name.clone(), replacement)
                    })
                    .collect();
                Answer {
                    label: format!("ans{ai}"),
                    weight: w,
                    refine,
                }
            })
            .collect();
        questions.push(AssessmentQuestion {
            id: format!("q{qi}"),
            prompt: format!("question {qi}"),
            answers,
            cost: if rng.random_bool(0.3) {
                0.0
            } else {
                rng.random_range(0.0..0.05)
            },
        });
    }

    NetworkModel {
        format_version: 1,
        id: format!("random-{seed}"),
        title: String::new(),
        utility_scale: None,
        decisions,
        chance,
        covariates: Vec::new(),
        utility: UtilityNode {
            id: NodeId::new("value"),
            display_name: "value".into(),
            parents: u_parents,
            table,
        },
        parameters: registry,
        parameter_labels: BTreeMap::new(),
        questions,
        cost_scale: 1.0,
        monte_carlo: McDefaults::default(),
        thresholds: Thresholds::default(),
        templates: Templates::default(),
    }
}

fn same_shape_row<R: Rng>(rng: &mut R, r: &RowDistribution) -> RowDistribution {
    match r {
        RowDistribution::Binary { .. } => RowDistribution::binary(random_scalar(rng)),
        other => loop {
            let candidate = random_row(rng, other.dimension());
            if !matches!(candidate, RowDistribution::Binary { .. }) {
                break candidate;
            }
        },
    }
}

/// One-way sweep values of a parameter, built straight from its distribution:
/// quantiles `i / (grid + 1)`, rows pinned per component with the rest of the
/// mass spread in proportion to the other components' means.
pub fn oracle_sweep(param: &Parameter, grid: usize) -> Vec<ParamValue> {
    let levels: Vec<f64> = (1..=grid).map(|i| i as f64 / (grid as f64 + 1.0)).collect();
    match param {
        Parameter::Scalar(q) => levels
            .iter()
            .map(|&u| ParamValue::Scalar(q.dist.quantile(u).unwrap()))
            .collect(),
        Parameter::Row(RowDistribution::Binary { p }) => levels
            .iter()
            .map(|&u| {
                let x = p.quantile(u).unwrap();
                ParamValue::Row(vec![x, 1.0 - x])
            })
            .collect(),
        Parameter::Row(RowDistribution::Dirichlet { alpha }) => {
            let total: f64 = alpha.iter().sum();
            let mut out = Vec::new();
            for (i, &a) in alpha.iter().enumerate() {
                let marginal = Distribution::beta(a, total - a);
                for &u in &levels {
                    let x = marginal.quantile(u).unwrap();
                    out.push(ParamValue::Row(
                        alpha
                            .iter()
                            .enumerate()
                            .map(|(j, &b)| if j == i { x } else { (1.0 - x) * b / (total - a) })
                            .collect(),
                    ));
                }
            }
            out
        }
        Parameter::Row(RowDistribution::PointVector { probabilities }) => vec![ParamValue::Row(probabilities.clone())],
    }
}

/// Pruned parameters whose sweep moves the argmax, checked with `eu_at` at
/// the oracle means. Empty when pruning is safe.
pub fn prune_violations(state: &ConsultationState) -> Vec<String> {
    let m = state.model();
    let graph = display_graph(state).unwrap();
    let base_inst = oracle_means(state.registry());
    let base = eu_at(m, &base_inst).unwrap();
    let leader = base
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v > base[best] { i } else { best });
    let mut out = Vec::new();
    for node in graph.nodes.iter().filter(|n| n.pruned) {
        for name in &node.parameters {
            for value in oracle_sweep(state.registry().get(name).unwrap(), m.thresholds.grid) {
                let mut inst = base_inst.clone();
                inst.set(name.clone(), value);
                let eus = eu_at(m, &inst).unwrap();
                if eus.iter().any(|v| *v > eus[leader] + 1e-12 * (1.0 + eus[leader].abs())) {
                    out.push(format!("{}: {name} moves {base:?} to {eus:?}", m.id));
                }
            }
        }
    }
    out
}
