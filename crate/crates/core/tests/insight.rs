mod support;

use std::collections::BTreeSet;
use std::sync::Arc;

use consult_core::insight::{display_graph_with, explain, ItemKind};
use consult_core::network::{CovariateNode, NodeKind};
use consult_core::{
    apply_answer, display_graph, eu_at, fixtures, flag_explanation_items, fold_answers, node_detail, overview,
    render_explanation, sensitivity_scan, Answer, AssessmentQuestion, ConsultationState, Distribution, Error,
    Instantiation, McSettings, NetworkModel, NextQuestion, NodeId, Parameter, Refinement, Registry, UncertainQuantity,
};
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use support::{prune_violations, random_model, GenOptions};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn state(m: NetworkModel) -> ConsultationState {
    ConsultationState::new(Arc::new(m)).unwrap()
}

fn record<'a>(records: &'a [consult_core::SensitivityRecord], name: &str) -> &'a consult_core::SensitivityRecord {
    records.iter().find(|r| r.parameter == name).unwrap()
}

fn with_inert_covariate(mut m: NetworkModel) -> NetworkModel {
    m.covariates.push(CovariateNode {
        id: NodeId::new("weight"),
        display_name: "body weight".into(),
        parameter: "weight_kg".into(),
        influences: vec![NodeId::new("survival")],
    });
    m.parameters.insert(
        "weight_kg",
        Parameter::Scalar(UncertainQuantity::covariate(Distribution::truncated_normal(
            75.0, 12.0, 40.0, 150.0,
        ))),
    );
    m
}

fn elderly_after(answers: &[(&str, &str)]) -> ConsultationState {
    answers
        .iter()
        .fold(state(fixtures::load("elderly-patient")), |s, (q, a)| {
            apply_answer(&s, q, a).unwrap()
        })
}

#[test]
fn angina_utility_flips_toy_angina() {
    // beta(7,3) 0.9-quantile is about 0.8705 > 0.855
    let records = sensitivity_scan(&state(fixtures::load("toy-angina"))).unwrap();
    let u = record(&records, "u_angina");
    assert!(u.flips);
    assert!(u.swing > 0.0);
    let death = record(&records, "u_death");
    assert_eq!((death.swing, death.flips, death.size_score), (0.0, false, 0.0));
    let top = records.iter().map(|r| r.size_score).fold(0.0, f64::max);
    assert_eq!(top, 1.0);
}

#[test]
fn swing_is_the_largest_gap_change() {
    // u_angina only moves medication's EU, so the gap moves by |q - 0.7|
    let records = sensitivity_scan(&state(fixtures::load("toy-angina"))).unwrap();
    let d = Distribution::beta(7.0, 3.0);
    let expected = (1..=9)
        .map(|i| (d.quantile(i as f64 / 10.0).unwrap() - 0.7).abs())
        .fold(0.0, f64::max);
    assert!(close(record(&records, "u_angina").swing, expected, 1e-12));
}

#[test]
fn inert_parameters_have_zero_swing() {
    let s = state(with_inert_covariate(fixtures::load("toy-angina")));
    let records = sensitivity_scan(&s).unwrap();
    let w = record(&records, "weight_kg");
    assert_eq!((w.swing, w.flips), (0.0, false));

    let g = display_graph(&s).unwrap();
    let node = |id: &str| g.nodes.iter().find(|n| n.id == id).unwrap();
    assert!(node("weight").pruned);
    assert!(!node("survival").pruned);
    assert!(!node("quality").pruned && !node("treatment").pruned);
    assert!(g.nodes.iter().all(|n| !n.unusual));
    assert!(g.arcs.iter().any(|a| a.from == "weight" && a.to == "survival"));
}

#[test]
fn age_answer_makes_age_unusual() {
    let s = elderly_after(&[("age", "85 or older")]);
    let detail = node_detail(&s, "age").unwrap();
    let z = detail.parameters[0].z.unwrap();
    assert!(close(z, 2.5, 1e-3), "{z}");
    assert!(detail.unusual);
    let g = display_graph(&s).unwrap();
    assert!(g.nodes.iter().find(|n| n.id == "age").unwrap().unusual);

    let items = flag_explanation_items(&s).unwrap();
    let age = items
        .iter()
        .find(|i| i.kind == ItemKind::UnusualValue && i.subject == "age_years")
        .unwrap();
    assert!(close(age.magnitude, 2.5, 1e-3));
    assert_eq!(age.dependents, ["surgical risk", "quality of life"]);
    assert!(
        age.sentence.contains("age") && age.sentence.contains("surgical risk"),
        "{}",
        age.sentence
    );
    assert!(items
        .iter()
        .all(|i| i.kind != ItemKind::UnusualValue || i.z.unwrap() >= 2.0));
}

#[test]
fn fresh_states_flag_nothing() {
    for (id, _) in fixtures::ALL {
        let s = state(fixtures::load(id));
        assert!(flag_explanation_items(&s).unwrap().is_empty(), "{id}");
        assert!(display_graph(&s).unwrap().nodes.iter().all(|n| !n.unusual), "{id}");
    }
}

#[test]
fn sedentary_answer_is_decision_critical() {
    let s = apply_answer(&state(fixtures::load("toy-angina-voi")), "activity", "sedentary").unwrap();
    let items = flag_explanation_items(&s).unwrap();
    let critical: Vec<_> = items.iter().filter(|i| i.kind == ItemKind::DecisionCritical).collect();
    assert_eq!(critical.len(), 1);
    assert_eq!(critical[0].subject, "activity");
    assert_eq!(critical[0].answer.as_deref(), Some("sedentary"));
    assert!(critical[0].sentence.contains("surgery") && critical[0].sentence.contains("medication"));
}

#[test]
fn margin_cut_is_decision_critical() {
    // surgery leads 0.75 to 0.7; u_angina 0.74 keeps surgery but cuts the lead to 0.01
    let mut m = fixtures::load("toy-angina-voi");
    m.questions.push(AssessmentQuestion {
        id: "stairs".into(),
        prompt: "Can the patient climb stairs?".into(),
        cost: 0.0,
        answers: vec![Answer {
            label: "with difficulty".into(),
            weight: 1.0,
            refine: Refinement::from([(
                "u_angina".to_string(),
                Parameter::Scalar(UncertainQuantity::utility(Distribution::point(0.74))),
            )]),
        }],
    });
    let s = apply_answer(&state(m), "stairs", "with difficulty").unwrap();
    let items = flag_explanation_items(&s).unwrap();
    let item = items.iter().find(|i| i.kind == ItemKind::DecisionCritical).unwrap();
    assert!(item.sentence.contains("narrowed"), "{}", item.sentence);
    assert!(close(item.magnitude, 0.01 - 0.05, 1e-12));
}

#[test]
fn fresh_toy_angina_explanation() {
    let text = render_explanation(&state(fixtures::load("toy-angina")), false).unwrap();
    assert!(
        text.starts_with("Recommended: surgery (mean EU 0.855 vs 0.700)"),
        "{text}"
    );
    assert_eq!(text.lines().count(), 1, "{text}");
}

#[test]
fn one_unusual_item_gives_one_sentence() {
    let mut m = fixtures::load("toy-angina-voi");
    m.questions.push(AssessmentQuestion {
        id: "bedridden".into(),
        prompt: "Is the patient bedridden?".into(),
        cost: 0.0,
        answers: vec![Answer {
            label: "yes".into(),
            weight: 1.0,
            refine: Refinement::from([(
                "u_angina".to_string(),
                Parameter::Scalar(UncertainQuantity::utility(Distribution::point(0.3))),
            )]),
        }],
    });
    let s = apply_answer(&state(m), "bedridden", "yes").unwrap();
    let e = explain(&s, false).unwrap();
    assert_eq!(e.items.len(), 1);
    assert_eq!(e.items[0].kind, ItemKind::UnusualValue);
    let lines: Vec<&str> = e.text.lines().collect();
    assert_eq!(lines.len(), 2, "{}", e.text);
    assert!(
        lines[1].starts_with("utility of living with angina is unusual"),
        "{}",
        lines[1]
    );
}

#[test]
fn generic_summary_only_on_request() {
    let s = elderly_after(&[("age", "85 or older")]);
    let header = &s.model().templates.generic_header;
    let with = render_explanation(&s, true).unwrap();
    let without = render_explanation(&s, false).unwrap();
    assert!(with.contains(header.as_str()));
    assert!(!without.contains(header.as_str()));
    assert!(with.starts_with(&without));
}

#[test]
fn explanations_are_deterministic() {
    let s = elderly_after(&[("age", "85 or older"), ("activity", "sedentary")]);
    let again = elderly_after(&[("age", "85 or older"), ("activity", "sedentary")]);
    for flag in [false, true] {
        assert_eq!(
            render_explanation(&s, flag).unwrap(),
            render_explanation(&again, flag).unwrap()
        );
    }
}

#[test]
fn overview_of_the_voi_fixture() {
    let s = state(fixtures::load("toy-angina-voi"));
    let o = overview(&s).unwrap();
    assert_eq!(o.model_id, "toy-angina-voi");
    assert_eq!(o.recommendation.alternative, "surgery");
    assert_eq!(
        o.next,
        NextQuestion::Ask {
            question: "activity".into()
        }
    );
    assert!(!o.stop);
    assert_eq!(o.error_bars.k1.len(), 2);
    assert_eq!(o.eu_summary.samples, s.settings().samples);
    assert_eq!(
        serde_json::to_string(&o).unwrap(),
        serde_json::to_string(&overview(&s).unwrap()).unwrap()
    );
}

#[test]
fn node_detail_examples() {
    let s = state(fixtures::load("elderly-patient"));
    let d = node_detail(&s, "survival").unwrap();
    assert_eq!(d.display_name, "surgical risk");
    assert_eq!(d.kind, NodeKind::Chance);
    assert_eq!(d.states, ["death", "survival"]);
    assert_eq!(d.parents, ["treatment", "age"]);
    assert_eq!(d.children, ["quality"]);
    let p = d.parameters.iter().find(|p| p.name == "p_surgical_death").unwrap();
    assert!(close(p.generic_moments[0].0, 0.04, 1e-15));
    assert_eq!(p.z, Some(0.0));
    assert!(matches!(node_detail(&s, "ghost"), Err(Error::Lookup(_))));
}

fn assert_prune_safe(s: &ConsultationState) {
    let violations = prune_violations(s);
    assert!(violations.is_empty(), "{violations:?}");
}

#[test]
fn pruning_is_safe_on_every_fixture() {
    for (id, _) in fixtures::ALL {
        let m = fixtures::load(id);
        let mut states = vec![state(m.clone())];
        for q in &m.questions {
            for a in &q.answers {
                states.push(apply_answer(&states[0], &q.id, &a.label).unwrap());
            }
        }
        for s in &states {
            assert_prune_safe(s);
        }
    }
}

fn pruned_at(s: &ConsultationState, records: &[consult_core::SensitivityRecord], t: f64) -> BTreeSet<String> {
    display_graph_with(s, records, t)
        .nodes
        .into_iter()
        .filter(|n| n.pruned)
        .map(|n| n.id)
        .collect()
}

fn random_state(seed: u64) -> ConsultationState {
    let s = state(random_model(seed, GenOptions::default()));
    let mut rng = consult_core::evaluation::substream(seed, 2);
    let questions = s.model().questions.clone();
    questions.iter().take(seed as usize % 3).fold(s, |s, q| {
        let a = q.answers.choose(&mut rng).unwrap();
        apply_answer(&s, &q.id, &a.label).unwrap()
    })
}

/// Argmax and margin of the rollback at a registry's means.
fn leader_and_margin(m: &NetworkModel, reg: &Registry) -> (usize, f64) {
    let eus = eu_at(m, &Instantiation::means(reg)).unwrap();
    let best = eus.iter().enumerate().fold(0, |b, (i, v)| {
        if *v > eus[b] * (1.0 + 1e-12f64.copysign(eus[b])) {
            i
        } else {
            b
        }
    });
    let runner = eus
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != best)
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    (best, eus[best] - runner)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn scan_invariants(seed in any::<u64>()) {
        let s = random_state(seed);
        let records = sensitivity_scan(&s).unwrap();
        prop_assert_eq!(records.len(), s.registry().len());
        for r in &records {
            prop_assert!(r.swing >= 0.0 && (0.0..=1.0).contains(&r.size_score));
            prop_assert!(!r.flips || r.swing > 0.0, "{:?}", r);
            if s.registry().get(&r.parameter).unwrap().is_degenerate() {
                prop_assert_eq!(r.swing, 0.0);
            }
        }
        prop_assert_eq!(&sensitivity_scan(&s).unwrap(), &records);
    }

    #[test]
    fn random_prunes_are_safe(seed in any::<u64>()) {
        assert_prune_safe(&random_state(seed));
    }

    #[test]
    fn raising_the_threshold_never_unprunes(seed in any::<u64>(), a in 0.0f64..1.2, b in 0.0f64..1.2) {
        let s = random_state(seed);
        let records = sensitivity_scan(&s).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(pruned_at(&s, &records, lo).is_subset(&pruned_at(&s, &records, hi)));
    }

    #[test]
    fn critical_items_match_the_answer_history(seed in any::<u64>()) {
        let s = random_state(seed);
        let m = s.model();
        let threshold = m.thresholds.margin;
        let items = flag_explanation_items(&s).unwrap();
        let flagged: BTreeSet<String> = items
            .iter()
            .filter(|i| i.kind == ItemKind::DecisionCritical)
            .map(|i| i.subject.clone())
            .collect();
        let mut expected = BTreeSet::new();
        for i in 0..s.applied().len() {
            let (b, mb) = leader_and_margin(m, &fold_answers(m, &s.applied()[..i]).unwrap());
            let (a, ma) = leader_and_margin(m, &fold_answers(m, &s.applied()[..=i]).unwrap());
            if a != b || (mb >= threshold && ma < threshold) {
                expected.insert(s.applied()[i].question.clone());
            }
        }
        prop_assert_eq!(flagged, expected);
    }

    #[test]
    fn explanation_is_a_function_of_state(seed in any::<u64>()) {
        let s = random_state(seed);
        let settings = McSettings { samples: 200, ..*s.settings() };
        let a = ConsultationState::replay(s.model().clone(), settings, s.applied()).unwrap();
        let b = ConsultationState::replay(s.model().clone(), settings, s.applied()).unwrap();
        prop_assert_eq!(render_explanation(&a, true).unwrap(), render_explanation(&b, true).unwrap());
        prop_assert_eq!(render_explanation(&a, false).unwrap(), render_explanation(&a, false).unwrap());
    }
}
