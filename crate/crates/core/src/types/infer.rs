//! Typing of β-normal target terms, subject expansion along β-steps, and
//! typing of β-strongly-normalizing terms by expanding head redexes.

use std::collections::{BTreeMap, HashMap};

use crate::error::CcvError;
use crate::target::reduce::{is_beta_normal, is_sn_tgt, steps, TgtRules, TgtStep};
use crate::target::sort::{sort_check_at, sort_check_with, Kind, Sort};
use crate::target::term::{tapps, Tgt};
use crate::types::strict::{neg, sarrow, Inter, Sty};
use crate::types::tderiv::{TEnv, TNode, TRule, TgtDerivation};

/// Free-variable assumptions collected bottom-up, one copy of each type.
type FEnv = BTreeMap<String, Vec<Sty>>;

fn add(env: &mut FEnv, x: &str, t: Sty) {
    let v = env.entry(x.to_string()).or_default();
    if !v.contains(&t) {
        v.push(t);
    }
}

fn merge(env: &mut FEnv, other: FEnv) {
    for (x, ts) in other {
        for t in ts {
            add(env, &x, t);
        }
    }
}

fn finish(env: FEnv) -> TEnv {
    env.into_iter().map(|(x, v)| (x, Inter::new(v).expect("nonempty"))).collect()
}

fn terr(m: impl Into<String>) -> CcvError {
    CcvError::Type(m.into())
}

struct Typer {
    next_atom: usize,
    budget: usize,
    sorted: bool,
}

impl Typer {
    fn new(sorted: bool, budget: usize) -> Self {
        Typer { next_atom: 0, budget, sorted }
    }

    fn atom(&mut self) -> Sty {
        self.next_atom += 1;
        Sty::Atom(format!("a{}", self.next_atom - 1))
    }

    /// A fresh type of the given sort.
    fn fresh(&mut self, s: Option<Sort>) -> Sty {
        match s {
            None | Some(Sort::W) => self.atom(),
            Some(Sort::K) => neg(Inter::of(self.atom())),
            Some(Sort::T) => {
                let a = self.atom();
                neg(Inter::of(neg(Inter::of(a))))
            }
            Some(Sort::Q) => Sty::Bot,
        }
    }

    fn sorts_of(&self, p: &Tgt, s: Option<Sort>, kinds: &HashMap<String, Kind>, paths: &[Vec<u8>]) -> Result<Vec<Option<Sort>>, CcvError> {
        let Some(s) = s.filter(|_| self.sorted) else {
            return Ok(vec![None; paths.len()]);
        };
        let asg = sort_check_with(p, s, false, kinds).map_err(|e| terr(e.to_string()))?;
        paths
            .iter()
            .map(|q| asg.sort_at(q).map(Some).ok_or_else(|| terr("unsorted subterm")))
            .collect()
    }

    fn ty(&mut self, p: &Tgt, s: Option<Sort>, kinds: &HashMap<String, Kind>) -> Result<(FEnv, TNode), CcvError> {
        if self.budget == 0 {
            return Err(CcvError::OutOfFuel(0));
        }
        self.budget -= 1;
        match p {
            Tgt::Var(x) => {
                let t = self.fresh(s);
                let mut env = FEnv::new();
                add(&mut env, x, t.clone());
                Ok((env, TNode::var(x, t)))
            }
            Tgt::Lam(x, b) => {
                let (bs, xs, xk) = match s.filter(|_| self.sorted) {
                    Some(Sort::T) => (Some(Sort::Q), Some(Sort::K), Kind::Continuation),
                    Some(Sort::W) => (Some(Sort::T), Some(Sort::W), Kind::Ordinary),
                    Some(Sort::K) => (Some(Sort::Q), Some(Sort::W), Kind::Ordinary),
                    Some(Sort::Q) => return Err(terr("an abstraction is never a jump")),
                    None => (None, None, Kind::Ordinary),
                };
                let mut k2 = kinds.clone();
                k2.insert(x.clone(), xk);
                let (mut env, d) = self.ty(b, bs, &k2)?;
                let dom = match env.remove(x) {
                    Some(v) => Inter::new(v)?,
                    None => Inter::of(self.fresh(xs)),
                };
                Ok((env, TNode::lam(x, dom, d)))
            }
            Tgt::Dot(_) => Err(terr("dot chains are outside the sorted calculus")),
            Tgt::App(..) => {
                let (head, args) = spine(p);
                let n = args.len();
                let arg_path = |i: usize| {
                    let mut q = vec![0u8; n - 1 - i];
                    q.push(1);
                    q
                };
                match head {
                    Tgt::Lam(y, m) => {
                        let mut paths: Vec<Vec<u8>> = vec![vec![0u8; n]];
                        paths.push(arg_path(0));
                        let ss = self.sorts_of(p, s, kinds, &paths)?;
                        let reduct = tapps(m.subst1(y, args[0]), args[1..].iter().map(|a| (*a).clone()));
                        let (env, d) = self.ty(&reduct, s, kinds)?;
                        let mut fams = Vec::new();
                        let mut inner = d;
                        for _ in 1..n {
                            let mut ps = inner.premises;
                            let f = ps.remove(0);
                            fams.push(ps);
                            inner = f;
                        }
                        let mut env = env;
                        let node = self.expand_root(y, m, args[0], inner, ss[1], kinds, &mut env, &|_| false)?;
                        let mut node = node;
                        for fam in fams.into_iter().rev() {
                            node = TNode::app(node, fam)?;
                        }
                        Ok((env, node))
                    }
                    Tgt::Var(h) => {
                        let paths: Vec<Vec<u8>> = (0..n).map(arg_path).collect();
                        let ss = self.sorts_of(p, s, kinds, &paths)?;
                        let mut env = FEnv::new();
                        let mut ds = Vec::new();
                        for (a, sa) in args.iter().zip(ss) {
                            let (e, d) = self.ty(a, sa, kinds)?;
                            merge(&mut env, e);
                            ds.push(d);
                        }
                        let result = self.fresh(s);
                        let hty = ds.iter().rev().fold(result, |acc, d| sarrow(Inter::of(d.ty.clone()), acc));
                        add(&mut env, h, hty.clone());
                        let mut node = TNode::var(h, hty);
                        for d in ds {
                            node = TNode::app(node, vec![d])?;
                        }
                        Ok((env, node))
                    }
                    _ => Err(terr("dot chains are outside the sorted calculus")),
                }
            }
        }
    }

    /// From a derivation `d` of `m{N/y}`, a derivation of `(λy.m)N` with
    /// the same type. When `y` does not occur, `N` is typed on its own and
    /// its assumptions join `env`; `bound` tells which of them the context
    /// binds, which is refused.
    #[allow(clippy::too_many_arguments)]
    fn expand_root(
        &mut self,
        y: &str,
        m: &Tgt,
        arg: &Tgt,
        d: TNode,
        arg_sort: Option<Sort>,
        kinds: &HashMap<String, Kind>,
        env: &mut FEnv,
        bound: &dyn Fn(&str) -> bool,
    ) -> Result<TNode, CcvError> {
        let mut coll = Vec::new();
        let dm = unsub(m, &d, y, &mut coll)?;
        if coll.is_empty() {
            let (e, dn) = self.ty_sn(arg, arg_sort, kinds)?;
            if let Some(x) = e.keys().find(|x| bound(x)) {
                return Err(terr(format!("erased argument mentions `{x}`, bound by the context")));
            }
            merge(env, e);
            coll.push(dn);
        }
        let mut fam: Vec<TNode> = Vec::new();
        for c in coll {
            if !fam.iter().any(|f| f.ty == c.ty) {
                fam.push(c);
            }
        }
        let dom = Inter::new(fam.iter().map(|f| f.ty.clone()).collect())?;
        TNode::app(TNode::lam(y, dom, dm), fam)
    }

    /// Types a term that is β-strongly normalizing; `ty` already handles
    /// redexes by expansion.
    fn ty_sn(&mut self, p: &Tgt, s: Option<Sort>, kinds: &HashMap<String, Kind>) -> Result<(FEnv, TNode), CcvError> {
        self.ty(p, s, kinds)
    }
}

fn spine(p: &Tgt) -> (&Tgt, Vec<&Tgt>) {
    let mut args = Vec::new();
    let mut cur = p;
    while let Tgt::App(f, a) = cur {
        args.push(&**a);
        cur = f;
    }
    args.reverse();
    (cur, args)
}

/// Walks `m` against a derivation of `m{N/y}`, replacing the derivations of
/// the copies of `N` by axioms for `y` and collecting them.
fn unsub(m: &Tgt, d: &TNode, y: &str, coll: &mut Vec<TNode>) -> Result<TNode, CcvError> {
    if d.rule == TRule::Inherit {
        let p = unsub(m, &d.premises[0], y, coll)?;
        return Ok(p.inherit(d.ty.clone()));
    }
    let mismatch = || terr(format!("derivation does not follow `{m}`"));
    Ok(match m {
        Tgt::Var(x) if x == y => {
            coll.push(d.clone());
            TNode::var(y, d.ty.clone())
        }
        Tgt::Var(x) => {
            if d.rule != TRule::Var {
                return Err(mismatch());
            }
            TNode::var(x, d.ty.clone())
        }
        Tgt::Lam(x, _) if x == y => d.clone(),
        Tgt::Lam(x, b) => {
            let (TRule::Lam, Sty::Arrow(dom, _)) = (d.rule, &d.ty) else { return Err(mismatch()) };
            let body = unsub(b, &d.premises[0], y, coll)?;
            TNode::lam(x, dom.clone(), body)
        }
        Tgt::App(f, a) => {
            if d.rule != TRule::App {
                return Err(mismatch());
            }
            let df = unsub(f, &d.premises[0], y, coll)?;
            let args = d.premises[1..].iter().map(|p| unsub(a, p, y, coll)).collect::<Result<_, _>>()?;
            TNode::app(df, args)?
        }
        Tgt::Dot(ps) => {
            if d.rule != TRule::Dot || d.premises.len() != ps.len() {
                return Err(mismatch());
            }
            let parts = ps.iter().zip(&d.premises).map(|(q, p)| unsub(q, p, y, coll)).collect::<Result<_, _>>()?;
            TNode::dot(parts)
        }
    })
}

fn check_sorted(p: &Tgt, sort: Option<Sort>) -> Result<HashMap<String, Kind>, CcvError> {
    match sort {
        None => Ok(HashMap::new()),
        Some(s) => Ok(sort_check_at(p, s, false).map_err(|e| terr(e.to_string()))?.free_kinds),
    }
}

/// Types a β-normal term without the inheritance rule. With a sort, the
/// result lives in the sorted system; without, in the sortless one.
pub fn infer_nf(t: &Tgt, sort: Option<Sort>) -> Result<TgtDerivation, CcvError> {
    if !is_beta_normal(t) {
        return Err(CcvError::NotNormal(t.to_string()));
    }
    let kinds = check_sorted(t, sort)?;
    let mut ty = Typer::new(sort.is_some(), usize::MAX);
    let (env, root) = ty.ty(t, sort, &kinds)?;
    Ok(TgtDerivation { env: finish(env), root })
}

/// From a derivation of the reduct of a β-step out of `p`, a derivation of
/// `p` under an environment extended by intersection.
pub fn expand_subject(
    p: &Tgt,
    step: &TgtStep,
    d1: &TgtDerivation,
    sort: Option<Sort>,
) -> Result<TgtDerivation, CcvError> {
    let ok = steps(p, TgtRules::BETA)
        .iter()
        .any(|s| s.path == step.path && s.target.alpha_key() == step.target.alpha_key());
    if !ok {
        return Err(CcvError::NotBetaStep(format!("{p} {step}")));
    }
    let kinds = check_sorted(p, sort)?;
    let mut ty = Typer::new(sort.is_some(), 1 << 20);
    let mut env: FEnv = d1
        .env
        .iter()
        .map(|(x, t)| (x.clone(), t.members().to_vec()))
        .collect();
    let asg = match sort {
        Some(s) => Some(sort_check_at(p, s, false).map_err(|e| terr(e.to_string()))?),
        None => None,
    };
    let root = descend(&mut ty, p, &d1.root, &step.path, 0, &mut Vec::new(), &kinds, asg.as_ref(), &mut env)?;
    Ok(TgtDerivation { env: finish(env), root })
}

#[allow(clippy::too_many_arguments)]
fn descend(
    ty: &mut Typer,
    p: &Tgt,
    d: &TNode,
    path: &[u8],
    depth: usize,
    bound: &mut Vec<String>,
    kinds: &HashMap<String, Kind>,
    asg: Option<&crate::target::sort::SortAssignment>,
    env: &mut FEnv,
) -> Result<TNode, CcvError> {
    if d.rule == TRule::Inherit {
        let inner = descend(ty, p, &d.premises[0], path, depth, bound, kinds, asg, env)?;
        return Ok(inner.inherit(d.ty.clone()));
    }
    let bad = || terr("derivation does not follow the reduct");
    if depth == path.len() {
        let Tgt::App(f, a) = p else { return Err(bad()) };
        let Tgt::Lam(y, m) = &**f else { return Err(bad()) };
        let mut q = path.to_vec();
        q.push(1);
        let arg_sort = asg.and_then(|s| s.sort_at(&q));
        let mut k2 = kinds.clone();
        if let Some(s) = asg {
            for (x, k) in &s.free_kinds {
                k2.insert(x.clone(), *k);
            }
        }
        let bs: Vec<String> = bound.clone();
        return ty.expand_root(y, m, a, d.clone(), arg_sort, &k2, env, &|x| bs.iter().any(|b| b == x));
    }
    let i = path[depth];
    match (p, i) {
        (Tgt::Lam(x, b), 0) => {
            let Sty::Arrow(dom, _) = &d.ty else { return Err(bad()) };
            bound.push(x.clone());
            let body = descend(ty, b, &d.premises[0], path, depth + 1, bound, kinds, asg, env);
            bound.pop();
            Ok(TNode::lam(x, dom.clone(), body?))
        }
        (Tgt::App(f, _), 0) => {
            let nf = descend(ty, f, &d.premises[0], path, depth + 1, bound, kinds, asg, env)?;
            TNode::app(nf, d.premises[1..].to_vec())
        }
        (Tgt::App(_, a), 1) => {
            let args = d.premises[1..]
                .iter()
                .map(|q| descend(ty, a, q, path, depth + 1, bound, kinds, asg, env))
                .collect::<Result<_, _>>()?;
            TNode::app(d.premises[0].clone(), args)
        }
        (Tgt::Dot(ps), i) => {
            let mut parts = d.premises.clone();
            let i = i as usize;
            parts[i] = descend(ty, &ps[i], &d.premises[i], path, depth + 1, bound, kinds, asg, env)?;
            Ok(TNode::dot(parts))
        }
        _ => Err(bad()),
    }
}

/// A derivation for a β-strongly-normalizing term, found by typing the head
/// normal form and expanding head redexes, with `fuel` bounding the
/// strong-normalization check.
pub fn type_sn(p: &Tgt, sort: Option<Sort>, fuel: usize) -> Result<TgtDerivation, CcvError> {
    if p.has_dot() {
        return Err(terr("dot chains are outside the sorted calculus"));
    }
    let v = is_sn_tgt(p, TgtRules::BETA, fuel);
    if v.is_unknown() {
        return Err(CcvError::OutOfFuel(fuel));
    }
    if v.is_not_sn() {
        return Err(terr(format!("`{p}` is not strongly normalizing")));
    }
    let kinds = check_sorted(p, sort)?;
    let mut ty = Typer::new(sort.is_some(), fuel.saturating_mul(64).max(1 << 16));
    let (env, root) = ty.ty(p, sort, &kinds)?;
    Ok(TgtDerivation { env: finish(env), root })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::tg;
    use crate::types::tderiv::check_tgt;

    fn ok(d: &TgtDerivation, sorted: bool) {
        if let Err(e) = check_tgt(d, !sorted) {
            panic!("{e}\n{}", serde_json::to_string_pretty(&d.to_json()).unwrap());
        }
    }

    #[test]
    fn normal_forms() {
        let d = infer_nf(&tg("x"), None).unwrap();
        assert_eq!(d.root.ty.to_string(), "a0");
        assert_eq!(d.env["x"].to_string(), "a0");
        let d = infer_nf(&tg("\\x. y"), None).unwrap();
        ok(&d, false);
        assert!(matches!(&d.root.ty, Sty::Arrow(..)));
        assert!(!d.env.contains_key("x"));
        let d = infer_nf(&tg("x y"), None).unwrap();
        ok(&d, false);
        assert_eq!(d.env["x"].to_string(), "a0 -> a1");
        assert_eq!(d.env["y"].to_string(), "a0");
        assert!(!d.root.uses_inherit());
        assert!(infer_nf(&tg("(\\x. x) y"), None).is_err());
    }

    #[test]
    fn sorted_normal_forms() {
        let d = infer_nf(&tg("\\k. x w k"), Some(Sort::T)).unwrap();
        ok(&d, true);
        let d = infer_nf(&tg("k x"), Some(Sort::Q)).unwrap();
        assert_eq!(d.root.ty, Sty::Bot);
        ok(&d, true);
    }

    #[test]
    fn expansion_of_identity() {
        let p = tg("(\\x. x) y");
        let st = steps(&p, TgtRules::BETA).remove(0);
        let d1 = infer_nf(&st.target, None).unwrap();
        let d = expand_subject(&p, &st, &d1, None).unwrap();
        ok(&d, false);
        assert_eq!(d.root.subject, p);
        assert_eq!(d.env["y"], d1.env["y"]);
    }

    #[test]
    fn expansion_with_vacuous_binder() {
        let p = tg("(\\x. z) w");
        let st = steps(&p, TgtRules::BETA).remove(0);
        let d1 = infer_nf(&st.target, None).unwrap();
        let d = expand_subject(&p, &st, &d1, None).unwrap();
        ok(&d, false);
        assert!(d.env.contains_key("w"));
    }

    #[test]
    fn expansion_inside_a_context() {
        let p = tg("\\v. f ((\\x. x x) v)");
        let st = steps(&p, TgtRules::BETA).remove(0);
        let d1 = infer_nf(&st.target, None).unwrap();
        let d = expand_subject(&p, &st, &d1, None).unwrap();
        ok(&d, false);
    }

    #[test]
    fn non_beta_step_is_rejected() {
        let p = tg("\\x. f x");
        let fake = TgtStep { rule: crate::target::reduce::TgtRule::Eta, path: vec![], target: tg("f") };
        let d1 = infer_nf(&tg("f"), None).unwrap();
        assert!(expand_subject(&p, &fake, &d1, None).is_err());
    }

    #[test]
    fn sn_terms_get_types() {
        for src in ["\\k. k x", "(\\x. y) z", "(\\x. x) (\\y. y)", "(\\x. x x) (\\y. y)", "(\\f. f (f z)) (\\y. y)"] {
            let d = type_sn(&tg(src), None, 1000).unwrap();
            ok(&d, false);
            assert_eq!(d.root.subject, tg(src));
        }
        let d = type_sn(&tg("(\\x. x) (\\y. y)"), None, 1000).unwrap();
        let Sty::Arrow(dom, cod) = &d.root.ty else { panic!() };
        assert_eq!(dom.members(), &[(**cod).clone()]);
    }

    #[test]
    fn sorted_sn_terms_get_sorted_types() {
        for (src, s) in [
            ("\\k. (\\x. \\h. h x) y k", Sort::T),
            ("(\\k. k x) (\\y. l y)", Sort::Q),
            ("(\\x. \\k. k x) (\\h. h w)", Sort::T),
        ] {
            let d = type_sn(&tg(src), Some(s), 1000).unwrap();
            ok(&d, true);
        }
    }

    #[test]
    fn divergent_terms_are_refused() {
        assert!(type_sn(&tg("(\\x. x x) (\\x. x x)"), None, 1000).is_err());
    }
}
