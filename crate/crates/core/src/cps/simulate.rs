//! Checking that one CCV step becomes at least one target step.

use std::collections::{BTreeSet, HashSet};

use crate::cps::sn::{sn_translate, top_continuation, TildeEnv};
use crate::reduce::ReductionStep;
use crate::target::reach::{reach, Pattern, ReachOutcome, DEFAULT_NODE_CAP};
use crate::target::term::{tvar, Tgt};
use crate::term::Term;

pub const DEFAULT_SEARCH_FUEL: usize = 30;

#[derive(Clone, Debug)]
pub struct Simulation {
    pub source: Tgt,
    pub target: Tgt,
    pub outcome: ReachOutcome,
}

impl Simulation {
    pub fn holds(&self) -> bool {
        self.outcome.is_found()
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self.outcome, ReachOutcome::Unknown { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchMode {
    /// Translation-only variables instantiated consistently without capture;
    /// tilde variables must match exactly.
    Exact,
    /// Translation-only and tilde variables are independent holes.
    Garbage,
}

/// Translates both sides with one continuation and one tilde environment.
/// Tilde variables, bound or free, and variables free in the translated
/// target but not in the target term, are holes.
pub fn simulate_terms(from: &Term, to: &Term, fuel: usize) -> Simulation {
    simulate_terms_in(from, to, fuel, MatchMode::Garbage)
}

pub fn simulate_terms_in(from: &Term, to: &Term, fuel: usize, mode: MatchMode) -> Simulation {
    let k = top_continuation(&[from, to]);
    let mut env = TildeEnv::new();
    env.tilde_of(&k);
    let source = sn_translate(from, &tvar(&k), &mut env).expect("variable continuation");
    let target = sn_translate(to, &tvar(&k), &mut env).expect("variable continuation");
    let fv = to.free_names();
    let mut kept: BTreeSet<String> = [k].into();
    kept.extend(fv.vars.iter().map(|x| x.0.clone()));
    kept.extend(fv.conames.iter().map(|c| c.0.clone()));
    let wild: HashSet<String> =
        target.free_vars().into_iter().filter(|x| !kept.contains(x)).collect();
    let pat = match mode {
        MatchMode::Exact => Pattern::new(wild, false),
        MatchMode::Garbage => Pattern::garbage(wild),
    };
    let outcome = reach(&source, &target, &pat, fuel, true, DEFAULT_NODE_CAP);
    Simulation { source, target, outcome }
}

pub fn simulate_step(step: &ReductionStep, fuel: usize) -> Simulation {
    simulate_terms(&step.source, &step.target, fuel)
}

/// `Some(true)` when a simulating sequence was found, `None` when the search
/// ran out of nodes.
pub fn check_one_step_simulation(step: &ReductionStep, fuel: usize) -> Option<bool> {
    let s = simulate_step(step, fuel);
    if s.is_unknown() {
        None
    } else {
        Some(s.holds())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::t;
    use crate::reduce::{one_step, RuleId, RuleSet};

    fn step(src: &str, rule: RuleId) -> ReductionStep {
        one_step(&t(src), RuleSet::of(&[rule]))
            .unwrap()
            .into_iter()
            .next()
            .unwrap_or_else(|| panic!("no {rule} step from {src}"))
    }

    fn ok(src: &str, rule: RuleId) -> usize {
        let s = simulate_step(&step(src, rule), DEFAULT_SEARCH_FUEL);
        match s.outcome {
            ReachOutcome::Found(seq) => seq.len(),
            o => panic!("{src} {rule}: {o:?}\n  {}\n  {}", s.source, s.target),
        }
    }

    #[test]
    fn eta_mu_two_dots() {
        assert!(ok("mu k. [k] x", RuleId::EtaMu) >= 1);
    }

    #[test]
    fn root_cases() {
        ok("(\\x. x) y", RuleId::BetaLambda);
        ok("let x = (mu k. [k] z) in y", RuleId::BetaMu);
        ok("(x y) z", RuleId::Ad1);
        ok("x (y z)", RuleId::Ad2);
        ok("let x = y in x x", RuleId::BetaLet);
        ok("mu k. [l] mu h. [k] x", RuleId::BetaJmp);
        ok("\\x. y x", RuleId::EtaLambda);
        ok("let x = y z in x", RuleId::EtaLet);
        ok("let x = y z in mu k. [l] x", RuleId::Exch);
    }

    #[test]
    fn under_contexts() {
        ok("\\w. (\\x. x) w", RuleId::BetaLambda);
        ok("(\\w. (\\x. x) y) z", RuleId::BetaLambda);
        ok("(x y) ((\\x. x) z)", RuleId::BetaLambda);
        ok("mu k. [k] (\\x. y x) z", RuleId::EtaLambda);
        ok("(\\x. (\\y. y) x) (\\z. z)", RuleId::EtaLambda);
    }
}
