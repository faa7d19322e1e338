mod support;

use std::collections::BTreeMap;

use consult_core::network::NodeKind;
use consult_core::{
    emit, fixtures, load_model_bytes, topological_order, validate_network, Distribution, Error, NodeId, Parameter,
    UncertainQuantity,
};
use proptest::prelude::*;
use support::{random_model, GenOptions};

#[test]
fn toy_angina_loads_with_one_node_of_each_kind() {
    let m = fixtures::load("toy-angina");
    assert_eq!(m.decisions.len(), 1);
    assert_eq!(m.chance.len(), 1);
    assert_eq!(m.utility.id.as_str(), "quality");
    assert!(validate_network(&m).warnings.is_empty());
}

#[test]
fn every_fixture_is_clean() {
    for (id, text) in fixtures::ALL {
        let m = load_model_bytes(text.as_bytes()).unwrap();
        assert_eq!(m.id, id);
        let report = validate_network(&m);
        assert!(report.is_ok(), "{id}: {report}");
    }
}

#[test]
fn truncated_file_reports_offset() {
    let text = fixtures::TOY_ANGINA;
    let cut = &text[..text.len() / 2];
    match load_model_bytes(cut.as_bytes()).unwrap_err() {
        Error::Parse { offset, line, .. } => {
            assert_eq!(offset, cut.len());
            assert_eq!(line, cut.lines().count());
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn schema_errors_name_the_field() {
    let text = fixtures::TOY_ANGINA.replace("\"alpha\": 5.0", "\"alpha\": \"five\"");
    match load_model_bytes(text.as_bytes()).unwrap_err() {
        Error::Schema(msg) => assert!(msg.contains("parameters.p_surgical_death"), "{msg}"),
        other => panic!("expected a schema error, got {other:?}"),
    }
    let text = fixtures::TOY_ANGINA.replace("\"title\"", "\"titel\"");
    assert!(matches!(load_model_bytes(text.as_bytes()), Err(Error::Schema(_))));
}

#[test]
fn cyclic_file_lists_validation_errors() {
    let mut m = fixtures::load("two-stage");
    // disease <- survival closes survival <- treatment <- angio_result <- disease
    m.chance[0].parents = vec![NodeId::new("survival")];
    m.chance[0].cpt = vec!["p_severe".into(), "p_severe".into()];
    let text = emit(&m);
    match load_model_bytes(text.as_bytes()).unwrap_err() {
        Error::Invalid(report) => assert!(report.has_error("cycle detected"), "{report}"),
        other => panic!("expected validation errors, got {other:?}"),
    }
    assert!(topological_order(&m).is_err());
}

#[test]
fn validation_aggregates_errors() {
    let mut m = fixtures::load("toy-angina");
    m.chance[0].parents.push(NodeId::new("ghost"));
    m.decisions[0].alternatives = vec!["only".into()];
    let report = validate_network(&m);
    assert!(report.has_error("too few alternatives"));
    assert!(report.has_error("unknown node"));
    assert!(report.errors.len() >= 2, "{report}");
}

#[test]
fn validation_rejects_bad_references() {
    let mut m = fixtures::load("toy-angina");
    m.utility.table[1] = "u_missing".into();
    assert!(validate_network(&m).has_error("unknown parameter"));

    let mut m = fixtures::load("toy-angina");
    m.chance[0].cpt[0] = "u_angina".into();
    assert!(validate_network(&m).has_error("parameter kind"));

    let mut m = fixtures::load("toy-angina");
    m.parameters.insert(
        "unused",
        Parameter::Scalar(UncertainQuantity::utility(Distribution::point(0.5))),
    );
    assert!(validate_network(&m).has_error("orphan parameter"));

    let mut m = fixtures::load("two-stage");
    m.decisions[1].parents = vec![NodeId::new("angio_result")];
    assert!(validate_network(&m).has_error("decision order"));
}

#[test]
fn emit_then_load_round_trips() {
    for (id, _) in fixtures::ALL {
        let m = fixtures::load(id);
        let again = load_model_bytes(emit(&m).as_bytes()).unwrap();
        assert_eq!(again, m, "{id}");
        assert_eq!(emit(&again), emit(&m));
    }
}

#[test]
fn utility_scale_maps_onto_unit_interval() {
    let text = fixtures::TOY_ANGINA
        .replace(
            "\"title\":",
            "\"utility_scale\": {\"min\": 0.0, \"max\": 100.0},\n  \"title\":",
        )
        .replace(
            "\"alpha\": 9.0, \"beta\": 1.0 }",
            "\"alpha\": 9.0, \"beta\": 1.0, \"lo\": 0.0, \"hi\": 100.0 }",
        )
        .replace(
            "\"u_angina\": { \"role\": \"utility\", \"kind\": \"beta\", \"alpha\": 7.0, \"beta\": 3.0 }",
            "\"u_angina\": { \"role\": \"utility\", \"kind\": \"point\", \"value\": 70.0 }",
        );
    let m = load_model_bytes(text.as_bytes()).unwrap();
    assert!(m.utility_scale.is_none());
    assert_eq!(
        m.parameters.get("u_post_surgery"),
        Some(&Parameter::Scalar(UncertainQuantity::utility(Distribution::beta(
            9.0, 1.0
        ))))
    );
    match m.parameters.get("u_angina") {
        Some(Parameter::Scalar(q)) => assert!((q.dist.mean() - 0.7).abs() < 1e-15),
        other => panic!("{other:?}"),
    }
}

#[test]
fn node_kinds_cover_the_elderly_fixture() {
    let m = fixtures::load("elderly-patient");
    let kinds = m.node_kinds();
    assert_eq!(kinds[&NodeId::new("age")], NodeKind::Covariate);
    assert_eq!(kinds[&NodeId::new("survival")], NodeKind::Chance);
    assert_eq!(m.display_name("survival"), Some("surgical risk"));
}

fn respects_arcs(order: &[NodeId], arcs: &[(NodeId, NodeId)]) -> bool {
    let pos: BTreeMap<&NodeId, usize> = order.iter().enumerate().map(|(i, n)| (n, i)).collect();
    arcs.iter().all(|(a, b)| pos[a] < pos[b])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn topological_order_respects_every_arc(seed in any::<u64>()) {
        let m = random_model(seed, GenOptions::default());
        let report = validate_network(&m);
        prop_assert!(report.is_ok(), "{}", report);
        let order = topological_order(&m).unwrap();
        prop_assert_eq!(order.len(), m.node_kinds().len());
        prop_assert!(respects_arcs(&order, &m.arcs()));
        prop_assert_eq!(topological_order(&m).unwrap(), order);
    }

    #[test]
    fn back_arcs_are_rejected_as_cycles(seed in any::<u64>()) {
        let mut m = random_model(seed, GenOptions::default());
        let n = m.chance.len();
        prop_assume!(n >= 2);
        // a two-cycle between the first and last chance node
        let first = m.chance[0].id.clone();
        let last = m.chance[n - 1].id.clone();
        for (target, parent) in [(0, last), (n - 1, first)] {
            if !m.chance[target].parents.contains(&parent) {
                m.chance[target].parents.push(parent);
            }
        }
        prop_assert!(validate_network(&m).has_error("cycle detected"));
        prop_assert!(topological_order(&m).is_err());
    }
}
