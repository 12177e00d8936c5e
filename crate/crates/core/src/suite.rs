//! Property suites over enumerated corpora, one per acceptance criterion.

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::corpus::{enumerate, random_terms, target_terms, Pools};
use crate::cps::coherence::{coherence, cps_agreement};
use crate::cps::{cps_colon, simulate_step};
use crate::error::CcvError;
use crate::measure::{places, verify_sight_decrease, Sight};
use crate::parse::parse_term;
use crate::reduce::{is_sn, one_step, RuleSet};
use crate::target::reduce::{is_sn_tgt, perpetual_sn, TgtRules};
use crate::target::sort::{sort_check_at, Sort};
use crate::term::{path_string, Term};
use crate::types::cderiv::check_ccv;
use crate::types::fixtures::ccv_fixtures;
use crate::types::{check_tgt, transport_aei16, type_sn};

pub const SN_FIXTURES: &str = include_str!("../fixtures/sn_fixtures.txt");

/// `(name, criterion)` in criterion order.
pub const SUITES: [(&str, u8); 9] = [
    ("sight-decrease", 1),
    ("mu-termination", 2),
    ("simulation", 3),
    ("coherence", 4),
    ("sn-equivalence", 5),
    ("typed-sn", 6),
    ("sn-typeable", 7),
    ("cps-agreement", 8),
    ("five-places", 9),
];

const MAX_EXAMPLES: usize = 10;

/// Overrides for the defaults of each suite; `None` keeps the default.
#[derive(Clone, Copy, Debug, Default)]
pub struct SuiteParams {
    pub size: Option<usize>,
    pub fuel: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub criterion: u8,
    pub pass: bool,
    pub checked: usize,
    pub failed: usize,
    pub inconclusive: usize,
    /// At most ten failing or inconclusive cases.
    pub examples: Vec<String>,
    pub params: Value,
    pub elapsed_ms: u128,
}

impl SuiteReport {
    pub fn line(&self) -> String {
        format!(
            "criterion {} {:<15} {}  checked={} failed={} inconclusive={} ({} ms)",
            self.criterion,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.checked,
            self.failed,
            self.inconclusive,
            self.elapsed_ms
        )
    }
}

enum Outcome {
    Ok,
    Fail(String),
    Unknown(String),
}

#[derive(Default)]
struct Tally {
    checked: usize,
    failed: usize,
    inconclusive: usize,
    examples: Vec<String>,
}

impl Tally {
    fn add(&mut self, o: Outcome) {
        self.checked += 1;
        match o {
            Outcome::Ok => {}
            Outcome::Fail(s) => {
                self.failed += 1;
                self.note(format!("fail: {s}"));
            }
            Outcome::Unknown(s) => {
                self.inconclusive += 1;
                self.note(format!("inconclusive: {s}"));
            }
        }
    }

    fn note(&mut self, s: String) {
        if self.examples.len() < MAX_EXAMPLES {
            self.examples.push(s);
        }
    }

    fn extend(&mut self, os: Vec<Outcome>) {
        for o in os {
            self.add(o);
        }
    }
}

fn err(e: impl std::fmt::Display) -> Outcome {
    Outcome::Fail(e.to_string())
}

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _)| *n).collect()
}

pub fn run_suite(name: &str, p: &SuiteParams) -> Result<SuiteReport, CcvError> {
    let criterion = SUITES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, c)| *c)
        .ok_or_else(|| CcvError::UnknownSuite(name.to_string()))?;
    let start = Instant::now();
    let (tally, params) = match criterion {
        1 => sight_decrease(p)?,
        2 => mu_termination(p)?,
        3 => simulation(p)?,
        4 => coherence_suite(p)?,
        5 => sn_equivalence(p)?,
        6 => typed_sn(p)?,
        7 => sn_typeable(p)?,
        8 => agreement(p)?,
        _ => five_places()?,
    };
    Ok(SuiteReport {
        name: name.to_string(),
        criterion,
        pass: tally.failed == 0 && tally.inconclusive == 0 && tally.checked > 0,
        checked: tally.checked,
        failed: tally.failed,
        inconclusive: tally.inconclusive,
        examples: tally.examples,
        params,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

pub fn run_all(p: &SuiteParams) -> Result<Vec<SuiteReport>, CcvError> {
    SUITES.iter().map(|(n, _)| run_suite(n, p)).collect()
}

fn corpus(size: usize) -> Result<(Vec<Term>, Value), CcvError> {
    let pools = Pools::default();
    let ts = enumerate(size, &pools)?;
    let v = json!({ "size": size, "vars": pools.vars, "conames": pools.conames, "terms": ts.len() });
    Ok((ts, v))
}

fn sight_decrease(p: &SuiteParams) -> Result<(Tally, Value), CcvError> {
    let (ts, params) = corpus(p.size.unwrap_or(7))?;
    let rows: Vec<Vec<Outcome>> = ts
        .par_iter()
        .map(|t| match one_step(t, RuleSet::MU_FRAGMENT) {
            Err(e) => vec![err(e)],
            Ok(steps) => steps
                .iter()
                .map(|s| match verify_sight_decrease(s) {
                    Ok(true) => Outcome::Ok,
                    Ok(false) => Outcome::Fail(format!("{} --{}--> {}", s.source, s.rule.name(), s.target)),
                    Err(e) => err(e),
                })
                .collect(),
        })
        .collect();
    let mut tally = Tally::default();
    rows.into_iter().for_each(|r| tally.extend(r));
    Ok((tally, json!({ "corpus": params, "rules": "beta_mu,beta_jmp,eta_mu" })))
}

fn mu_termination(p: &SuiteParams) -> Result<(Tally, Value), CcvError> {
    let (ts, params) = corpus(p.size.unwrap_or(7))?;
    let fuel = p.fuel.unwrap_or(100_000);
    let out: Vec<Outcome> = ts
        .par_iter()
        .map(|t| match is_sn(t, RuleSet::MU_FRAGMENT, fuel) {
            Ok(v) if v.is_sn() => Outcome::Ok,
            Ok(v) if v.is_unknown() => Outcome::Unknown(t.to_string()),
            Ok(v) => Outcome::Fail(format!("{t}: {}", v.label())),
            Err(e) => err(e),
        })
        .collect();
    let mut tally = Tally::default();
    tally.extend(out);
    Ok((tally, json!({ "corpus": params, "fuel": fuel })))
}

fn simulation(p: &SuiteParams) -> Result<(Tally, Value), CcvError> {
    let (ts, params) = corpus(p.size.unwrap_or(6))?;
    let fuel = p.fuel.unwrap_or(crate::cps::DEFAULT_SEARCH_FUEL);
    let rows: Vec<Vec<Outcome>> = ts
        .par_iter()
        .map(|t| match one_step(t, RuleSet::ALL) {
            Err(e) => vec![err(e)],
            Ok(steps) => steps
                .iter()
                .map(|s| {
                    let sim = simulate_step(s, fuel);
                    let what = format!("{} --{}--> {}", s.source, s.rule.name(), s.target);
                    if sim.holds() {
                        Outcome::Ok
                    } else if sim.is_unknown() {
                        Outcome::Unknown(what)
                    } else {
                        Outcome::Fail(what)
                    }
                })
                .collect(),
        })
        .collect();
    let mut tally = Tally::default();
    rows.into_iter().for_each(|r| tally.extend(r));
    Ok((tally, json!({ "corpus": params, "fuel": fuel, "rules": "all" })))
}

fn coherence_suite(p: &SuiteParams) -> Result<(Tally, Value), CcvError> {
    let seed = p.seed.unwrap_or(1);
    let max = p.size.unwrap_or(10);
    let fuel = p.fuel.unwrap_or(500);
    let cap = 4096;
    let ts = random_terms(1000, seed, 3, max, &Pools::default());
    let out: Vec<Outcome> = ts
        .par_iter()
        .map(|t| match coherence(t, cap, fuel) {
            Ok(r) if r.holds() => Outcome::Ok,
            Ok(r) => Outcome::Fail(format!("{t}: {r:?}")),
            Err(CcvError::CapExceeded(_)) => Outcome::Unknown(format!("{t}: class over cap")),
            Err(e) => err(e),
        })
        .collect();
    let mut tally = Tally::default();
    tally.extend(out);
    let params = json!({ "count": ts.len(), "seed": seed, "min_size": 3, "max_size": max, "cap": cap, "fuel": fuel });
    Ok((tally, params))
}

/// `(expected SN, term)` pairs from the curated fixture file.
pub fn sn_fixtures() -> Result<Vec<(bool, Term)>, CcvError> {
    SN_FIXTURES
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let (tag, src) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
            let expect = match tag {
                "sn" => true,
                "loop" => false,
                _ => return Err(CcvError::Parse { line: 0, col: 0, msg: format!("bad fixture tag {tag}") }),
            };
            Ok((expect, parse_term(src.trim())?))
        })
        .collect()
}

fn rules_fired(t: &Term, limit: usize) -> Result<BTreeSet<&'static str>, CcvError> {
    let mut seen = BTreeSet::new();
    let mut fired = BTreeSet::new();
    let mut stack = vec![t.clone()];
    while let Some(x) = stack.pop() {
        if seen.len() >= limit || !seen.insert(x.alpha_key()) {
            continue;
        }
        for s in one_step(&x, RuleSet::ALL)? {
            fired.insert(s.rule.name());
            stack.push(s.target);
        }
    }
    Ok(fired)
}

fn sn_equivalence(p: &SuiteParams) -> Result<(Tally, Value), CcvError> {
    let fuel = p.fuel.unwrap_or(20_000);
    let fx = sn_fixtures()?;
    let out: Vec<Outcome> = fx
        .par_iter()
        .map(|(expect, m)| {
            let src = match is_sn(m, RuleSet::ALL, fuel) {
                Ok(v) => v,
                Err(e) => return err(e),
            };
            let tgt = is_sn_tgt(&cps_colon(m), TgtRules::BETA, fuel);
            if src.is_unknown() || tgt.is_unknown() {
                return Outcome::Unknown(format!("{m}: {} / {}", src.label(), tgt.label()));
            }
            if src.is_sn() != tgt.is_sn() || src.is_sn() != *expect {
                return Outcome::Fail(format!("{m}: source {} target {}", src.label(), tgt.label()));
            }
            Outcome::Ok
        })
        .collect();
    let mut tally = Tally::default();
    tally.extend(out);
    let n_sn = fx.iter().filter(|(e, _)| *e).count();
    let n_loop = fx.len() - n_sn;
    let mut fired = BTreeSet::new();
    for (_, m) in fx.iter().filter(|(e, _)| *e) {
        fired.extend(rules_fired(m, 3000)?);
    }
    let all: BTreeSet<&str> = RuleSet::ALL.rules().iter().map(|r| r.name()).collect();
    let missing: Vec<&str> = all.difference(&fired).copied().collect();
    let shape = n_sn >= 15 && n_loop >= 15 && missing.is_empty();
    tally.add(if shape {
        Outcome::Ok
    } else {
        Outcome::Fail(format!("fixture set: {n_sn} SN, {n_loop} non-SN, rules not exercised {missing:?}"))
    });
    Ok((tally, json!({ "fixtures": fx.len(), "sn": n_sn, "non_sn": n_loop, "fuel": fuel, "target_rules": "beta" })))
}

fn typed_sn(p: &SuiteParams) -> Result<(Tally, Value), CcvError> {
    let fuel = p.fuel.unwrap_or(20_000);
    let steps = 100_000;
    let fx = ccv_fixtures()?;
    let out: Vec<Outcome> = fx
        .par_iter()
        .map(|(name, d)| {
            if let Err(e) = check_ccv(d) {
                return Outcome::Fail(format!("{name}: source derivation: {e}"));
            }
            let Some(m) = d.subject_term() else {
                return Outcome::Fail(format!("{name}: subject is a jump"));
            };
            match is_sn(m, RuleSet::ALL, fuel) {
                Ok(v) if v.is_sn() => {}
                Ok(v) if v.is_unknown() => return Outcome::Unknown(format!("{name}: source SN")),
                Ok(v) => return Outcome::Fail(format!("{name}: source {}", v.label())),
                Err(e) => return err(e),
            }
            let t = match transport_aei16(d) {
                Ok(t) => t,
                Err(e) => return Outcome::Fail(format!("{name}: transport: {e}")),
            };
            if let Err(e) = check_tgt(&t, true) {
                return Outcome::Fail(format!("{name}: target derivation: {e}"));
            }
            match perpetual_sn(&t.root.subject, steps, steps) {
                Some(_) => Outcome::Ok,
                None => Outcome::Unknown(format!("{name}: perpetual run exceeded {steps} steps")),
            }
        })
        .collect();
    let mut tally = Tally::default();
    tally.extend(out);
    tally.add(if fx.len() >= 10 { Outcome::Ok } else { Outcome::Fail(format!("only {} derivations", fx.len())) });
    Ok((tally, json!({ "derivations": fx.len(), "source_fuel": fuel, "perpetual_steps": steps, "target_rules": "beta,eta,dot" })))
}

const SORTS: [Sort; 4] = [Sort::T, Sort::Q, Sort::W, Sort::K];

fn sn_typeable(p: &SuiteParams) -> Result<(Tally, Value), CcvError> {
    let size = p.size.unwrap_or(7);
    let fuel = p.fuel.unwrap_or(20_000);
    let free = ["x", "k"];
    let ts = target_terms(size, &free, false);
    let skipped = std::sync::atomic::AtomicUsize::new(0);
    let rows: Vec<Vec<Outcome>> = ts
        .par_iter()
        .map(|t| {
            let v = is_sn_tgt(t, TgtRules::BETA, fuel);
            if v.is_unknown() {
                return vec![Outcome::Unknown(t.to_string())];
            }
            if v.is_not_sn() {
                skipped.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                return vec![];
            }
            let mut out = Vec::new();
            let sorts = SORTS.iter().filter(|s| sort_check_at(t, **s, false).is_ok()).map(|s| Some(*s));
            for s in std::iter::once(None).chain(sorts) {
                let o = match type_sn(t, s, fuel) {
                    Err(CcvError::OutOfFuel(_)) => Outcome::Unknown(t.to_string()),
                    Err(e) => Outcome::Fail(format!("{t} at {s:?}: {e}")),
                    Ok(d) => match check_tgt(&d, s.is_none()) {
                        Ok(()) if d.root.subject == *t => Outcome::Ok,
                        Ok(()) => Outcome::Fail(format!("{t}: derivation has subject {}", d.root.subject)),
                        Err(e) => Outcome::Fail(format!("{t} at {s:?}: {e}")),
                    },
                };
                out.push(o);
            }
            out
        })
        .collect();
    let mut tally = Tally::default();
    rows.into_iter().for_each(|r| tally.extend(r));
    let params = json!({
        "size": size, "free": free, "terms": ts.len(),
        "not_sn": skipped.into_inner(), "fuel": fuel,
    });
    Ok((tally, params))
}

fn agreement(p: &SuiteParams) -> Result<(Tally, Value), CcvError> {
    let (ts, params) = corpus(p.size.unwrap_or(6))?;
    let fuel = p.fuel.unwrap_or(500);
    let out: Vec<Outcome> = ts
        .par_iter()
        .map(|t| match cps_agreement(t, fuel) {
            Ok(a) if a.joinable && a.mod_reaches_colon => Outcome::Ok,
            Ok(a) => Outcome::Fail(format!("{t}: {a:?}")),
            Err(e) => err(e),
        })
        .collect();
    let mut tally = Tally::default();
    tally.extend(out);
    Ok((tally, json!({ "corpus": params, "fuel": fuel })))
}

pub const FIVE_PLACES: &str = "let y = x in mu k. [l] (\\z. x) y";

fn five_places() -> Result<(Tally, Value), CcvError> {
    let pm = places(&parse_term(FIVE_PLACES)?);
    let mut tally = Tally::default();
    let mut check = |ok: bool, what: &str| tally.add(if ok { Outcome::Ok } else { Outcome::Fail(what.to_string()) });
    let paths: Vec<String> = pm.places.iter().map(|p| path_string(p.path())).collect();
    check(paths == ["ε", "0.0.0", "0.0.0.0.0", "0.0.0.1", "1"], &format!("places {paths:?}"));
    let seen: Vec<Vec<usize>> = pm.vision.iter().map(|v| v.iter().copied().collect()).collect();
    check(
        seen == [vec![], vec![], vec![], vec![], vec![0, 1, 2, 3]],
        &format!("visions {seen:?}"),
    );
    check(pm.breadth == [0, 0, 0, 0, 1], &format!("breadths {:?}", pm.breadth));
    check(pm.sight() == Sight::from_exponents([0]), &format!("sight {}", pm.sight()));
    Ok((tally, json!({ "term": FIVE_PLACES })))
}
