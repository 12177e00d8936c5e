use proptest::prelude::*;
use serde_json::Value;

use ccv::canon::{canonicalize, ccv_eq};
use ccv::corpus::{random_terms, target_terms, Pools};
use ccv::measure::verify_sight_decrease;
use ccv::parse::{parse_term, parse_tgt};
use ccv::reduce::{one_step, RuleSet};
use ccv::types::fixtures::ccv_fixtures;
use ccv::types::{check_ccv, check_tgt, transport_aei16, type_sn, CcvDerivation, TgtDerivation};

fn one_term(seed: u64, max: usize) -> ccv::Term {
    random_terms(1, seed, 1, max, &Pools::default()).remove(0)
}

/// Depth-first list of JSON paths to derivation nodes.
fn node_paths(v: &Value, here: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(here.clone());
    if let Some(ps) = v.get("premises").and_then(Value::as_array) {
        for (i, p) in ps.iter().enumerate() {
            here.push(i);
            node_paths(p, here, out);
            here.pop();
        }
    }
}

fn node_mut<'a>(v: &'a mut Value, path: &[usize]) -> &'a mut Value {
    path.iter().fold(v, |n, &i| &mut n["premises"][i])
}

/// Retypes a node to a fresh atom, or drops its last premise.
fn corrupt(v: &Value, pick: usize, drop_premise: bool) -> Option<Value> {
    let mut paths = Vec::new();
    node_paths(v, &mut Vec::new(), &mut paths);
    let mut out = v.clone();
    let node = node_mut(&mut out, &paths[pick % paths.len()]);
    if drop_premise {
        node["premises"].as_array_mut().filter(|ps| !ps.is_empty())?.pop();
    } else {
        node["judgment"]["type"] = Value::String("zz".into());
    }
    Some(out)
}

fn target_derivations() -> Vec<TgtDerivation> {
    let mut ds: Vec<TgtDerivation> =
        ccv_fixtures().unwrap().iter().map(|(_, d)| transport_aei16(d).unwrap()).collect();
    for t in target_terms(5, &["x", "k"], false).iter().step_by(7) {
        if let Ok(d) = type_sn(t, None, 5000) {
            ds.push(d);
        }
    }
    ds
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let t = one_term(seed, 12);
        let back = parse_term(&t.to_string()).unwrap();
        prop_assert!(back.alpha_eq(&t), "{} vs {}", t, back);
    }

    #[test]
    fn canonical_form_is_stable(seed in any::<u64>()) {
        let t = one_term(seed, 10);
        let c = canonicalize(&t).unwrap();
        prop_assert!(canonicalize(&c).unwrap().alpha_eq(&c));
        prop_assert!(ccv_eq(&t, &c).unwrap());
    }

    #[test]
    fn sight_decreases_beyond_the_corpus(seed in any::<u64>()) {
        let t = one_term(seed, 11);
        for s in one_step(&t, RuleSet::MU_FRAGMENT).unwrap() {
            prop_assert!(verify_sight_decrease(&s).unwrap(), "{}", s);
        }
    }

    #[test]
    fn corrupted_source_derivations_are_rejected(which in any::<usize>(), pick in any::<usize>(), drop in any::<bool>()) {
        let fx = ccv_fixtures().unwrap();
        let v = fx[which % fx.len()].1.to_json();
        prop_assert!(check_ccv(&CcvDerivation::from_json(&v).unwrap()).is_ok());
        if let Some(bad) = corrupt(&v, pick, drop) {
            let ok = CcvDerivation::from_json(&bad).map(|d| check_ccv(&d).is_ok()).unwrap_or(false);
            prop_assert!(!ok, "accepted {}", bad);
        }
    }
}

#[test]
fn target_terms_round_trip() {
    for t in target_terms(6, &["x", "k"], true) {
        assert!(parse_tgt(&t.to_string()).unwrap().alpha_key() == t.alpha_key(), "{t}");
    }
}

#[test]
fn corrupted_target_derivations_are_rejected() {
    let mut runner = proptest::test_runner::TestRunner::new(ProptestConfig::with_cases(300));
    let ds: Vec<Value> = target_derivations().iter().map(TgtDerivation::to_json).collect();
    for v in &ds {
        assert!(check_tgt(&TgtDerivation::from_json(v).unwrap(), true).is_ok());
    }
    runner
        .run(&(any::<usize>(), any::<usize>(), any::<bool>()), |(which, pick, drop)| {
            let v = &ds[which % ds.len()];
            if let Some(bad) = corrupt(v, pick, drop) {
                let ok = TgtDerivation::from_json(&bad).map(|d| check_tgt(&d, true).is_ok()).unwrap_or(false);
                prop_assert!(!ok, "accepted {}", bad);
            }
            Ok(())
        })
        .unwrap();
}
