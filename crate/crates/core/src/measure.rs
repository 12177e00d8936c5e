//! Places, visions, breadths and the sight ordinal.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Value};

use crate::error::CcvError;
use crate::name::CoName;
use crate::reduce::{ReductionStep, RuleId};
use crate::term::{path_string, Jump, Path, Term};

pub type PlaceId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Root,
    /// Argument of a let whose body starts at `body`.
    LetArg { body: PlaceId },
    AppArg,
    LamBody,
    /// Body of `μm.[l]N`; `binder` is the place of the μ binding `l`.
    JumperBody { binder: Option<PlaceId> },
}

#[derive(Clone, Debug)]
pub struct Place {
    pub id: PlaceId,
    /// Terms marked by this place, outermost first.
    pub marked: Vec<Path>,
    pub origin: Origin,
    /// Whether the place marks a μ-abstraction.
    pub is_mu: bool,
    /// Places occurring in the term at this place, itself included.
    pub occurring: Vec<PlaceId>,
}

impl Place {
    pub fn path(&self) -> &Path {
        &self.marked[0]
    }
}

/// Reads every jump-let as a let under the jumper: `let x = M in [k]L`
/// becomes `[k](let x = M in L)`. Paths refer to the read term.
pub fn read_jumps(t: &Term) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Lam(x, b) => Term::Lam(x.clone(), Box::new(read_jumps(b))),
        Term::App(f, a) => Term::App(Box::new(read_jumps(f)), Box::new(read_jumps(a))),
        Term::Let(b, x, a) => Term::Let(Box::new(read_jumps(b)), x.clone(), Box::new(read_jumps(a))),
        Term::Mu(k, j) => Term::Mu(k.clone(), Box::new(read_jump(j))),
    }
}

fn read_jump(j: &Jump) -> Jump {
    match j {
        Jump::Jmp(k, m) => Jump::Jmp(k.clone(), Box::new(read_jumps(m))),
        Jump::JLet(b, x, a) => {
            let Jump::Jmp(k, l) = read_jump(b) else { unreachable!() };
            Jump::Jmp(k, Box::new(Term::Let(l, x.clone(), Box::new(read_jumps(a)))))
        }
    }
}

struct Builder {
    places: Vec<Place>,
    /// For each let-argument place, the places occurring in the let body.
    body_sets: Vec<(PlaceId, Vec<PlaceId>)>,
}

impl Builder {
    fn fresh(&mut self, path: Path, origin: Origin) -> PlaceId {
        let id = self.places.len();
        self.places.push(Place { id, marked: vec![path], origin, is_mu: false, occurring: vec![id] });
        id
    }

    // Marks `t` at place `p`; returns the places created inside `t`.
    fn go(&mut self, t: &Term, p: PlaceId, path: &mut Path, mus: &mut Vec<(CoName, PlaceId)>) -> Vec<PlaceId> {
        if self.places[p].marked.last() != Some(path) {
            self.places[p].marked.push(path.clone());
        }
        match t {
            Term::Var(_) => vec![],
            Term::Lam(_, b) => {
                path.push(0);
                let q = self.fresh(path.clone(), Origin::LamBody);
                let mut inner = vec![q];
                inner.extend(self.go(b, q, path, mus));
                path.pop();
                self.places[q].occurring = inner.clone();
                inner
            }
            Term::App(f, a) => {
                path.push(0);
                let mut created = self.go(f, p, path, mus);
                path.pop();
                path.push(1);
                let q = self.fresh(path.clone(), Origin::AppArg);
                let mut inner = vec![q];
                inner.extend(self.go(a, q, path, mus));
                path.pop();
                self.places[q].occurring = inner.clone();
                created.extend(inner);
                created
            }
            Term::Let(b, _, a) => {
                path.push(0);
                let mut created = self.go(b, p, path, mus);
                path.pop();
                path.push(1);
                let q = self.fresh(path.clone(), Origin::LetArg { body: p });
                // the body's places: p itself plus those created under it
                let mut body_places = vec![p];
                body_places.extend(created.iter().copied());
                let mut inner = vec![q];
                inner.extend(self.go(a, q, path, mus));
                path.pop();
                self.places[q].occurring = inner.clone();
                self.body_sets.push((q, body_places));
                created.extend(inner);
                created
            }
            Term::Mu(k, j) => {
                self.places[p].is_mu = true;
                let Jump::Jmp(l, m) = &**j else {
                    panic!("jump-lets must be read under the jumper first")
                };
                mus.push((k.clone(), p));
                let binder = mus.iter().rev().find(|(c, _)| c == l).map(|(_, q)| *q);
                path.push(0);
                path.push(0);
                let q = self.fresh(path.clone(), Origin::JumperBody { binder });
                let mut inner = vec![q];
                inner.extend(self.go(m, q, path, mus));
                path.pop();
                path.pop();
                mus.pop();
                self.places[q].occurring = inner.clone();
                inner
            }
        }
    }
}

/// The place structure of a term: places in creation order plus visions.
#[derive(Clone, Debug)]
pub struct PlaceMap {
    pub places: Vec<Place>,
    pub vision: Vec<BTreeSet<PlaceId>>,
    pub breadth: Vec<u32>,
}

pub fn places(t: &Term) -> PlaceMap {
    let read = read_jumps(t);
    let mut b = Builder { places: Vec::new(), body_sets: Vec::new() };
    let root = b.fresh(Vec::new(), Origin::Root);
    let created = b.go(&read, root, &mut Vec::new(), &mut Vec::new());
    let mut occ = vec![root];
    occ.extend(created);
    b.places[root].occurring = occ;

    let n = b.places.len();
    let body_of: BTreeMap<PlaceId, Vec<PlaceId>> = b.body_sets.into_iter().collect();
    let mut vision: Vec<Option<BTreeSet<PlaceId>>> = vec![None; n];
    fn compute(
        p: PlaceId,
        places: &[Place],
        body_of: &BTreeMap<PlaceId, Vec<PlaceId>>,
        memo: &mut Vec<Option<BTreeSet<PlaceId>>>,
    ) -> BTreeSet<PlaceId> {
        if let Some(v) = &memo[p] {
            return v.clone();
        }
        let v = match &places[p].origin {
            Origin::LetArg { .. } => {
                let mut v = BTreeSet::new();
                for &q in &body_of[&p] {
                    v.insert(q);
                    v.extend(compute(q, places, body_of, memo));
                }
                v
            }
            Origin::JumperBody { binder: Some(b) } => compute(*b, places, body_of, memo),
            _ => BTreeSet::new(),
        };
        memo[p] = Some(v.clone());
        v
    }
    for p in 0..n {
        compute(p, &b.places, &body_of, &mut vision);
    }
    let vision: Vec<BTreeSet<PlaceId>> = vision.into_iter().map(Option::unwrap).collect();

    let mut breadth: Vec<Option<u32>> = vec![None; n];
    fn br(p: PlaceId, vision: &[BTreeSet<PlaceId>], memo: &mut Vec<Option<u32>>) -> u32 {
        if let Some(b) = memo[p] {
            return b;
        }
        let b = vision[p].iter().map(|&q| br(q, vision, memo) + 1).max().unwrap_or(0);
        memo[p] = Some(b);
        b
    }
    for p in 0..n {
        br(p, &vision, &mut breadth);
    }
    PlaceMap { places: b.places, vision, breadth: breadth.into_iter().map(Option::unwrap).collect() }
}

impl PlaceMap {
    /// `q ≺ p`: `q` is in the vision of `p` with nothing in between.
    pub fn immediately_visible(&self, q: PlaceId, p: PlaceId) -> bool {
        self.vision[p].contains(&q)
            && !self.vision[p].iter().any(|&r| self.vision[r].contains(&q))
    }

    /// Height of the tree of `≺`-chains ending at `p`.
    pub fn tree_height(&self, p: PlaceId) -> u32 {
        self.vision[p]
            .iter()
            .filter(|&&q| self.immediately_visible(q, p))
            .map(|&q| self.tree_height(q) + 1)
            .max()
            .unwrap_or(0)
    }

    pub fn mu_places(&self) -> Vec<PlaceId> {
        self.places.iter().filter(|p| p.is_mu).map(|p| p.id).collect()
    }

    pub fn sight(&self) -> Sight {
        Sight::from_exponents(self.mu_places().into_iter().map(|p| self.breadth[p]))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.places
                .iter()
                .map(|p| {
                    json!({
                        "place": format!("p{}", p.id),
                        "paths": p.marked.iter().map(|m| path_string(m)).collect::<Vec<_>>(),
                        "mu": p.is_mu,
                        "vision": self.vision[p.id].iter().map(|q| format!("p{q}")).collect::<Vec<_>>(),
                        "breadth": self.breadth[p.id],
                    })
                })
                .collect(),
        )
    }
}

/// An ordinal below ω^ω as exponent ↦ coefficient (Cantor normal form).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Sight(BTreeMap<u32, usize>);

impl Sight {
    pub fn zero() -> Self {
        Sight::default()
    }

    pub fn from_exponents(es: impl IntoIterator<Item = u32>) -> Self {
        let mut m = BTreeMap::new();
        for e in es {
            *m.entry(e).or_insert(0) += 1;
        }
        Sight(m)
    }

    /// ω^e · c terms, highest exponent first.
    pub fn terms(&self) -> Vec<(u32, usize)> {
        self.0.iter().rev().map(|(&e, &c)| (e, c)).collect()
    }

    pub fn natural_sum(&self, other: &Sight) -> Sight {
        let mut m = self.0.clone();
        for (&e, &c) in &other.0 {
            *m.entry(e).or_insert(0) += c;
        }
        Sight(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

impl Ord for Sight {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.terms(), other.terms());
        for (x, y) in a.iter().zip(b.iter()) {
            let o = x.0.cmp(&y.0).then(x.1.cmp(&y.1));
            if o != Ordering::Equal {
                return o;
            }
        }
        a.len().cmp(&b.len())
    }
}

impl PartialOrd for Sight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Sight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms().iter().map(|(e, c)| format!("w^{e}*{c}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

pub fn ordinal_lt(a: &Sight, b: &Sight) -> bool {
    a < b
}

pub fn natural_sum(a: &Sight, b: &Sight) -> Sight {
    a.natural_sum(b)
}

pub fn sight(t: &Term) -> Sight {
    places(t).sight()
}

/// Whether a μ-fragment step strictly lowers the sight.
pub fn verify_sight_decrease(step: &ReductionStep) -> Result<bool, CcvError> {
    if !matches!(step.rule, RuleId::BetaMu | RuleId::BetaJmp | RuleId::EtaMu) {
        return Err(CcvError::WrongRule(step.rule.to_string()));
    }
    Ok(ordinal_lt(&sight(&step.target), &sight(&step.source)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::{canonicalize, representatives};
    use crate::parse::t;
    use crate::reduce::{one_step, RuleSet};

    fn five() -> Term {
        t("let y = x in mu k. [l] (\\z. x) y")
    }

    #[test]
    fn five_places() {
        let pm = places(&five());
        assert_eq!(pm.places.len(), 5);
        let paths: Vec<String> = pm.places.iter().map(|p| path_string(p.path())).collect();
        // p0 root, p1 jumper body, p2 λ body, p3 argument y, p4 let argument x
        assert_eq!(paths, vec!["ε", "0.0.0", "0.0.0.0.0", "0.0.0.1", "1"]);
        assert_eq!(pm.places[0].marked, vec![vec![], vec![0]]);
        assert_eq!(pm.places[1].marked, vec![vec![0, 0, 0], vec![0, 0, 0, 0]]);
        assert_eq!(pm.vision[4], BTreeSet::from([0, 1, 2, 3]));
        for p in 0..4 {
            assert!(pm.vision[p].is_empty());
        }
        assert_eq!(pm.breadth, vec![0, 0, 0, 0, 1]);
        assert_eq!(pm.sight(), Sight::from_exponents([0]));
    }

    #[test]
    fn small_place_counts() {
        assert_eq!(places(&t("x")).places.len(), 1);
        assert_eq!(places(&t("\\x. x")).places.len(), 2);
        assert!(sight(&t("x")).is_zero());
    }

    #[test]
    fn mu_under_let_argument() {
        let pm = places(&t("let x = (mu k.[k]z) in y"));
        let mu = pm.mu_places();
        assert_eq!(mu.len(), 1);
        assert_eq!(pm.vision[mu[0]], BTreeSet::from([0]));
        assert_eq!(pm.breadth[mu[0]], 1);
        assert_eq!(pm.sight(), Sight::from_exponents([1]));
        assert_eq!(pm.sight().to_string(), "w^1*1");
    }

    #[test]
    fn ordinal_arithmetic() {
        let one = Sight::from_exponents([0]);
        let w = Sight::from_exponents([1]);
        assert!(ordinal_lt(&one, &w));
        let s = natural_sum(&Sight::from_exponents([1, 0, 0]), &Sight::from_exponents([1]));
        assert_eq!(s, Sight::from_exponents([1, 1, 0, 0]));
        assert_eq!(s.to_string(), "w^1*2 + w^0*2");
        assert!(ordinal_lt(&Sight::from_exponents([1, 1]), &Sight::from_exponents([2])));
        assert!(ordinal_lt(&Sight::zero(), &one));
        assert!(!ordinal_lt(&w, &w));
    }

    #[test]
    fn decrease_examples() {
        for (src, rule) in [
            ("let x = (mu k.[k]z) in y", RuleId::BetaMu),
            ("mu k.[k]x", RuleId::EtaMu),
            ("mu l. [l] mu k. [k] x", RuleId::BetaJmp),
        ] {
            let steps = one_step(&t(src), RuleSet::of(&[rule])).unwrap();
            assert!(!steps.is_empty(), "{src}");
            for s in &steps {
                assert!(verify_sight_decrease(s).unwrap(), "{src}");
            }
        }
        let s = &one_step(&t("(\\x. x) y"), RuleSet::ALL).unwrap()[0];
        assert!(verify_sight_decrease(s).is_err());
    }

    #[test]
    fn jumper_inherits_binder_vision() {
        // the inner jumper [k] sees what the μk place sees
        let pm = places(&t("let x = (mu k. [k] mu l. [k] z) in y"));
        let k_place = pm.places.iter().find(|p| p.is_mu && p.path() == &vec![1]).unwrap().id;
        let inner = pm
            .places
            .iter()
            .find(|p| matches!(p.origin, Origin::JumperBody { binder: Some(b) } if b == k_place) && p.path().len() > 3)
            .unwrap();
        assert_eq!(pm.vision[inner.id], pm.vision[k_place]);
    }

    #[test]
    fn bracketing_invariance_and_tree_height() {
        let s = canonicalize(&t("mu m. [m] let a = (let b = mu k. [k] x in b) in let c = a in mu q. [m] c")).unwrap();
        let base = places(&s);
        let mut want: Vec<u32> = base.breadth.clone();
        want.sort();
        for r in representatives(&s, 100).unwrap() {
            let pm = places(&r);
            let mut got = pm.breadth.clone();
            got.sort();
            assert_eq!(got, want);
            assert_eq!(pm.sight(), base.sight());
            for p in 0..pm.places.len() {
                assert_eq!(pm.tree_height(p), pm.breadth[p]);
                for &q in &pm.vision[p] {
                    assert!(pm.vision[q].is_subset(&pm.vision[p]));
                }
            }
        }
    }
}
