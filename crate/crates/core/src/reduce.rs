//! The ten reduction rules, applied on equality classes.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::canon::{canonicalize, canonicalize_expr, representatives, DEFAULT_REP_CAP};
use crate::error::CcvError;
use crate::graph::{explore, Verdict};
use crate::name::{CoName, Fresh, Name};
use crate::subst::{subst_coname, subst_jump_context_raw, subst_value};
use crate::term::{path_string, Expr, Jump, Node, Path, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    Ad1,
    Ad2,
    BetaLambda,
    BetaLet,
    BetaMu,
    BetaJmp,
    EtaLambda,
    EtaLet,
    EtaMu,
    Exch,
}

impl RuleId {
    pub const ALL: [RuleId; 10] = [
        RuleId::Ad1,
        RuleId::Ad2,
        RuleId::BetaLambda,
        RuleId::BetaLet,
        RuleId::BetaMu,
        RuleId::BetaJmp,
        RuleId::EtaLambda,
        RuleId::EtaLet,
        RuleId::EtaMu,
        RuleId::Exch,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::Ad1 => "ad1",
            RuleId::Ad2 => "ad2",
            RuleId::BetaLambda => "beta_lambda",
            RuleId::BetaLet => "beta_let",
            RuleId::BetaMu => "beta_mu",
            RuleId::BetaJmp => "beta_jmp",
            RuleId::EtaLambda => "eta_lambda",
            RuleId::EtaLet => "eta_let",
            RuleId::EtaMu => "eta_mu",
            RuleId::Exch => "exch",
        }
    }

    pub fn is_administrative(self) -> bool {
        matches!(self, RuleId::Ad1 | RuleId::Ad2)
    }

    pub fn is_vertical(self) -> bool {
        self == RuleId::EtaMu
    }

    pub fn is_practical(self) -> bool {
        !self.is_administrative()
    }

    pub fn is_eta(self) -> bool {
        matches!(self, RuleId::EtaLambda | RuleId::EtaLet | RuleId::EtaMu)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        RuleId::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| format!("unknown rule `{s}`"))
    }
}

/// A set of rules, as a bit mask over [`RuleId::ALL`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RuleSet(u16);

impl RuleSet {
    pub const ALL: RuleSet = RuleSet(0x3ff);
    pub const MU_FRAGMENT: RuleSet =
        RuleSet((1 << RuleId::BetaMu as u16) | (1 << RuleId::BetaJmp as u16) | (1 << RuleId::EtaMu as u16));

    pub fn empty() -> Self {
        RuleSet(0)
    }

    pub fn of(rules: &[RuleId]) -> Self {
        RuleSet(rules.iter().fold(0, |m, r| m | (1 << *r as u16)))
    }

    pub fn contains(self, r: RuleId) -> bool {
        self.0 & (1 << r as u16) != 0
    }

    pub fn without_eta(self) -> Self {
        RuleSet(self.0 & !Self::of(&[RuleId::EtaLambda, RuleId::EtaLet, RuleId::EtaMu]).0)
    }

    pub fn rules(self) -> Vec<RuleId> {
        RuleId::ALL.into_iter().filter(|r| self.contains(*r)).collect()
    }

    /// Comma-separated rule names.
    pub fn parse(s: &str) -> Result<Self, String> {
        let mut rules = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            rules.push(part.parse::<RuleId>()?);
        }
        Ok(Self::of(&rules))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Index into `representatives(source)`; 0 is the canonical form.
    pub rep_index: usize,
    pub rep: Term,
    pub path: Path,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub source: Term,
    pub rule: RuleId,
    pub target: Term,
    pub witness: Witness,
}

impl ReductionStep {
    pub fn to_json(&self) -> Value {
        json!({
            "source": self.source.to_string(),
            "rule": self.rule.name(),
            "target": self.target.to_string(),
            "witness": {
                "rep_index": self.witness.rep_index,
                "rep": self.witness.rep.to_string(),
                "path": path_string(&self.witness.path),
            },
            "target_ast": self.target.to_json(),
        })
    }
}

impl fmt::Display for ReductionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "-- {} @ {} --> {}", self.rule, path_string(&self.witness.path), self.target)
    }
}

pub type SnVerdict = Verdict<ReductionStep>;

/// A redex found in one representative, before canonicalization.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub rule: RuleId,
    pub path: Path,
    /// Position in print order among the redexes of the representative.
    pub ordinal: usize,
    pub result: Term,
}

fn fresh_for(rep: &Term) -> Fresh {
    Fresh::avoiding(rep.all_names())
}

/// Contracts `rule` at the root of `node`, if it is a redex there.
pub fn contract_at(node: Node<'_>, rule: RuleId, fresh: &mut Fresh) -> Option<Expr> {
    use Term::*;
    match (node, rule) {
        (Node::Term(App(n, m)), RuleId::Ad1) if !n.is_value() => {
            let z = Name(fresh.name("z"));
            Some(Expr::Term(Let(Box::new(App(Box::new(Var(z.clone())), m.clone())), z, n.clone())))
        }
        (Node::Term(App(v, n)), RuleId::Ad2) if v.is_value() && !n.is_value() => {
            let z = Name(fresh.name("z"));
            Some(Expr::Term(Let(Box::new(App(v.clone(), Box::new(Var(z.clone())))), z, n.clone())))
        }
        (Node::Term(App(f, v)), RuleId::BetaLambda) if v.is_value() => match &**f {
            Lam(x, m) => Some(Expr::Term(Let(m.clone(), x.clone(), v.clone()))),
            _ => None,
        },
        (Node::Term(Let(m, x, v)), RuleId::BetaLet) if v.is_value() => {
            Some(Expr::Term(subst_value(m, x, v).ok()?))
        }
        (Node::Term(Let(m, x, a)), RuleId::BetaMu) => match &**a {
            Mu(k, j) => {
                // keep the free continuations of m out of reach of the binder
                let (k, j) = if m.has_free_coname(k) {
                    let k2 = CoName(fresh.name(&k.0));
                    let j2 = subst_coname(j, k, &k2);
                    (k2, Box::new(j2))
                } else {
                    (k.clone(), j.clone())
                };
                Some(Expr::Term(Mu(k.clone(), Box::new(subst_jump_context_raw(&j, &k, x, m)))))
            }
            _ => None,
        },
        (Node::Jump(Jump::Jmp(l, body)), RuleId::BetaJmp) => match &**body {
            Mu(k, j) => Some(Expr::Jump(subst_coname(j, k, l))),
            _ => None,
        },
        (Node::Term(Lam(x, body)), RuleId::EtaLambda) => match &**body {
            App(v, arg) if v.is_value() && **arg == Var(x.clone()) && !v.has_free_var(x) => {
                Some(Expr::Term((**v).clone()))
            }
            _ => None,
        },
        (Node::Term(Let(body, x, m)), RuleId::EtaLet) if **body == Var(x.clone()) => {
            Some(Expr::Term((**m).clone()))
        }
        (Node::Term(Mu(k, j)), RuleId::EtaMu) => match &**j {
            Jump::Jmp(k2, m) if k2 == k && !m.has_free_coname(k) => Some(Expr::Term((**m).clone())),
            _ => None,
        },
        (Node::Term(Let(body, x, m)), RuleId::Exch) => match &**body {
            Mu(k, j) if !m.has_free_coname(k) => Some(Expr::Term(Mu(
                k.clone(),
                Box::new(Jump::JLet(j.clone(), x.clone(), m.clone())),
            ))),
            _ => None,
        },
        _ => None,
    }
}

/// All redexes of one representative for the rules in `filter`.
pub fn contractions(rep: &Term, filter: RuleSet) -> Vec<Contraction> {
    let mut out = Vec::new();
    let mut fresh = fresh_for(rep);
    let mut path = Vec::new();
    let mut ordinal = 0;
    walk(Node::Term(rep), &mut path, &mut |node, path| {
        let mut found = false;
        for rule in filter.rules() {
            let mut f = fresh.clone();
            if let Some(e) = contract_at(node, rule, &mut f) {
                if let Some(result) = rep.replace_at(path, &e) {
                    out.push(Contraction { rule, path: path.to_vec(), ordinal, result });
                    found = true;
                }
            }
        }
        if found {
            ordinal += 1;
        }
    });
    fresh.reserve("z");
    out
}

// Visits nodes in print order: a let's argument before its body.
fn walk<'a>(n: Node<'a>, path: &mut Path, f: &mut impl FnMut(Node<'a>, &[u8])) {
    f(n, path);
    let kids = n.children();
    let order: &[u8] = match n {
        Node::Term(Term::Let(..)) | Node::Jump(Jump::JLet(..)) => &[1, 0],
        _ => &[0, 1],
    };
    for &i in order {
        if let Some(&c) = kids.get(i as usize) {
            path.push(i);
            walk(c, path, f);
            path.pop();
        }
    }
}

/// One-step reducts of the class of `t`, each canonicalized, deduplicated by
/// rule and target class.
pub fn one_step(t: &Term, filter: RuleSet) -> Result<Vec<ReductionStep>, CcvError> {
    one_step_capped(t, filter, DEFAULT_REP_CAP)
}

pub fn one_step_capped(t: &Term, filter: RuleSet, cap: usize) -> Result<Vec<ReductionStep>, CcvError> {
    let reps = representatives(t, cap)?;
    let source = reps[0].clone();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, rep) in reps.iter().enumerate() {
        for c in contractions(rep, filter) {
            let target = canonicalize(&c.result)?;
            if seen.insert((c.rule, target.alpha_key())) {
                out.push(ReductionStep {
                    source: source.clone(),
                    rule: c.rule,
                    target,
                    witness: Witness { rep_index: i, rep: rep.clone(), path: c.path },
                });
            }
        }
    }
    Ok(out)
}

/// Distinct target classes of [`one_step`].
pub fn reducts(t: &Term, filter: RuleSet) -> Result<Vec<Term>, CcvError> {
    let mut seen = HashSet::new();
    Ok(one_step(t, filter)?
        .into_iter()
        .filter(|s| seen.insert(s.target.alpha_key()))
        .map(|s| s.target)
        .collect())
}

/// Re-checks a step from its witness: the representative belongs to the
/// source class, the redex matches the rule with its side condition, and the
/// contractum canonicalizes to the target.
pub fn audit_step(step: &ReductionStep) -> Result<(), String> {
    let src = canonicalize(&step.witness.rep).map_err(|e| e.to_string())?;
    if src.alpha_key() != canonicalize(&step.source).map_err(|e| e.to_string())?.alpha_key() {
        return Err("witness is not in the source class".into());
    }
    let node = step
        .witness
        .rep
        .at(&step.witness.path)
        .ok_or("witness path does not exist")?;
    if !side_condition_holds(node, step.rule) {
        return Err(format!("side condition of {} violated", step.rule));
    }
    let mut fresh = fresh_for(&step.witness.rep);
    let e = contract_at(node, step.rule, &mut fresh).ok_or("no redex at witness")?;
    let result = step.witness.rep.replace_at(&step.witness.path, &e).ok_or("category mismatch")?;
    let got = canonicalize_expr(&Expr::Term(result)).map_err(|e| e.to_string())?;
    if got.alpha_key() != step.target.alpha_key() {
        return Err("contractum differs from target".into());
    }
    Ok(())
}

/// Independent statement of each rule's side condition.
fn side_condition_holds(node: Node<'_>, rule: RuleId) -> bool {
    match (node, rule) {
        (Node::Term(Term::App(n, _)), RuleId::Ad1) => !n.is_value(),
        (Node::Term(Term::App(v, n)), RuleId::Ad2) => v.is_value() && !n.is_value(),
        (Node::Term(Term::App(f, v)), RuleId::BetaLambda) => {
            matches!(**f, Term::Lam(..)) && v.is_value()
        }
        (Node::Term(Term::Let(_, _, v)), RuleId::BetaLet) => v.is_value(),
        (Node::Term(Term::Let(_, _, a)), RuleId::BetaMu) => matches!(**a, Term::Mu(..)),
        (Node::Jump(Jump::Jmp(_, b)), RuleId::BetaJmp) => matches!(**b, Term::Mu(..)),
        (Node::Term(Term::Lam(x, b)), RuleId::EtaLambda) => match &**b {
            Term::App(v, a) => v.is_value() && **a == Term::Var(x.clone()) && !v.has_free_var(x),
            _ => false,
        },
        (Node::Term(Term::Let(b, x, _)), RuleId::EtaLet) => **b == Term::Var(x.clone()),
        (Node::Term(Term::Mu(k, j)), RuleId::EtaMu) => match &**j {
            Jump::Jmp(k2, m) => k2 == k && !m.has_free_coname(k),
            _ => false,
        },
        (Node::Term(Term::Let(b, _, m)), RuleId::Exch) => match &**b {
            Term::Mu(k, _) => !m.has_free_coname(k),
            _ => false,
        },
        _ => false,
    }
}

/// Bounded strong-normalization verdict; `fuel` bounds the number of classes
/// expanded.
pub fn is_sn(t: &Term, filter: RuleSet, fuel: usize) -> Result<SnVerdict, CcvError> {
    let start = canonicalize(t)?;
    explore(
        start,
        Term::alpha_key,
        |n| Ok(one_step(n, filter)?.into_iter().map(|s| (s.clone(), s.target)).collect()),
        fuel,
    )
}

pub enum Strategy<'a> {
    Leftmost,
    Random(u64),
    /// Receives the available steps and returns the index to follow, or
    /// `None` to stop.
    Pick(Box<dyn FnMut(&[ReductionStep]) -> Option<usize> + 'a>),
}

/// A single reduction path under `strategy`, at most `fuel` steps long.
pub fn trace(t: &Term, strategy: Strategy<'_>, fuel: usize) -> Result<Vec<ReductionStep>, CcvError> {
    let mut cur = canonicalize(t)?;
    let mut out = Vec::new();
    let mut rng = match &strategy {
        Strategy::Random(seed) => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let mut strategy = strategy;
    while out.len() < fuel {
        let steps = one_step(&cur, RuleSet::ALL)?;
        if steps.is_empty() {
            break;
        }
        let idx = match &mut strategy {
            Strategy::Leftmost => leftmost(&steps),
            Strategy::Random(_) => rng.as_mut().unwrap().gen_range(0..steps.len()),
            Strategy::Pick(f) => match f(&steps) {
                Some(i) if i < steps.len() => i,
                _ => break,
            },
        };
        let step = steps[idx].clone();
        cur = step.target.clone();
        out.push(step);
    }
    Ok(out)
}

fn leftmost(steps: &[ReductionStep]) -> usize {
    let order_key = |s: &ReductionStep| {
        let ord = print_order(&s.witness.rep, &s.witness.path);
        (s.witness.rep_index, ord, s.rule)
    };
    (0..steps.len()).min_by_key(|&i| order_key(&steps[i])).unwrap()
}

// Rank of a path in the print-order traversal of `rep`.
fn print_order(rep: &Term, target: &[u8]) -> usize {
    let mut rank = 0;
    let mut found = usize::MAX;
    walk(Node::Term(rep), &mut Vec::new(), &mut |_, p| {
        if p == target {
            found = rank;
        }
        rank += 1;
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::t;

    fn keys(steps: &[ReductionStep]) -> Vec<(RuleId, String)> {
        steps.iter().map(|s| (s.rule, s.target.alpha_key())).collect()
    }

    #[test]
    fn beta_lambda_only() {
        let steps = one_step(&t("(\\x. x) y"), RuleSet::ALL).unwrap();
        assert_eq!(keys(&steps), vec![(RuleId::BetaLambda, t("let x = y in x").alpha_key())]);
    }

    #[test]
    fn beta_mu_instance() {
        let steps = one_step(&t("let x = (mu k.[k]z) in y"), RuleSet::ALL).unwrap();
        let want = t("mu k.[k](let x = z in y)").alpha_key();
        assert!(steps.iter().any(|s| s.rule == RuleId::BetaMu && s.target.alpha_key() == want));
    }

    #[test]
    fn eta_mu_filter() {
        let steps = one_step(&t("mu k.[k]x"), RuleSet::of(&[RuleId::EtaMu])).unwrap();
        assert_eq!(keys(&steps), vec![(RuleId::EtaMu, t("x").alpha_key())]);
        let steps = one_step(&t("mu k.[k] k"), RuleSet::of(&[RuleId::EtaMu])).unwrap();
        assert_eq!(steps.len(), 1);
        let steps = one_step(&t("mu k.[k] mu l. [k] x"), RuleSet::of(&[RuleId::EtaMu])).unwrap();
        assert!(steps.iter().all(|s| s.witness.path != Vec::<u8>::new()));
    }

    #[test]
    fn administrative_rules() {
        let steps = one_step(&t("(x y) z"), RuleSet::of(&[RuleId::Ad1, RuleId::Ad2])).unwrap();
        assert_eq!(keys(&steps), vec![(RuleId::Ad1, t("let z1 = x y in z1 z").alpha_key())]);
        let steps = one_step(&t("x (y z)"), RuleSet::of(&[RuleId::Ad1, RuleId::Ad2])).unwrap();
        assert_eq!(keys(&steps), vec![(RuleId::Ad2, t("let w = y z in x w").alpha_key())]);
    }

    #[test]
    fn jump_and_exchange() {
        let steps = one_step(&t("mu l. [l] mu k. [k] x"), RuleSet::of(&[RuleId::BetaJmp])).unwrap();
        assert_eq!(keys(&steps), vec![(RuleId::BetaJmp, t("mu l. [l] x").alpha_key())]);
        let steps = one_step(&t("let x = y in mu k. [k] x"), RuleSet::of(&[RuleId::Exch])).unwrap();
        assert_eq!(keys(&steps), vec![(RuleId::Exch, t("mu k. [k] let x = y in x").alpha_key())]);
        // a free k in the argument forces the binder to be renamed
        let steps = one_step(&t("let x = mu m. [k] y in mu k. [k] x"), RuleSet::of(&[RuleId::Exch]))
            .unwrap();
        assert_eq!(
            keys(&steps),
            vec![(RuleId::Exch, t("mu q. [q] let x = (mu m. [k] y) in x").alpha_key())]
        );
    }

    #[test]
    fn eta_lambda_side_condition() {
        assert_eq!(one_step(&t("\\x. y x"), RuleSet::of(&[RuleId::EtaLambda])).unwrap().len(), 1);
        assert!(one_step(&t("\\x. x x"), RuleSet::of(&[RuleId::EtaLambda])).unwrap().is_empty());
    }

    #[test]
    fn beta_mu_uses_other_bracketings() {
        // the jump-let may sit inside or outside the captured continuation
        let steps = one_step(&t("let x = (mu k. [k] let y = w in y) in x"), RuleSet::of(&[RuleId::BetaMu]))
            .unwrap();
        assert!(!steps.is_empty());
        for s in &steps {
            audit_step(s).unwrap();
        }
    }

    #[test]
    fn sn_verdicts() {
        assert_eq!(is_sn(&t("x"), RuleSet::ALL, 100).unwrap(), Verdict::Sn { max_len: 0 });
        assert_eq!(is_sn(&t("(\\x. x) y"), RuleSet::ALL, 100).unwrap(), Verdict::Sn { max_len: 2 });
        match is_sn(&t("(\\x. x x) (\\x. x x)"), RuleSet::ALL, 100).unwrap() {
            Verdict::NotSn { cycle } => {
                let rules: Vec<_> = cycle.iter().map(|s| s.rule).collect();
                assert_eq!(rules, vec![RuleId::BetaLambda, RuleId::BetaLet]);
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn traces() {
        assert!(trace(&t("x"), Strategy::Leftmost, 10).unwrap().is_empty());
        let tr = trace(&t("(\\x. x) y"), Strategy::Leftmost, 10).unwrap();
        assert_eq!(tr.len(), 2);
        assert_eq!(tr[1].target, t("y"));
        assert_eq!(trace(&t("(\\x. x x) (\\x. x x)"), Strategy::Leftmost, 5).unwrap().len(), 5);
        let a = trace(&t("(\\x. x x) (\\x. x x)"), Strategy::Random(7), 5).unwrap();
        let b = trace(&t("(\\x. x x) (\\x. x x)"), Strategy::Random(7), 5).unwrap();
        assert_eq!(a, b);
        let tr = trace(&t("(\\x. x) y"), Strategy::Pick(Box::new(|s| if s.is_empty() { None } else { Some(s.len() - 1) })), 10)
            .unwrap();
        assert_eq!(tr.last().unwrap().target, t("y"));
    }

    #[test]
    fn rule_names_round_trip() {
        for r in RuleId::ALL {
            assert_eq!(r.name().parse::<RuleId>().unwrap(), r);
        }
        assert_eq!(RuleSet::parse("beta_mu,beta_jmp,eta_mu").unwrap(), RuleSet::MU_FRAGMENT);
        assert!(RuleSet::parse("beta").is_err());
        assert!(RuleId::EtaMu.is_vertical() && RuleId::Ad1.is_administrative());
    }
}
