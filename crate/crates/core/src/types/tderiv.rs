//! Derivations `Π,Θ ⊢s P : σ` of the target intersection system and their
//! checker. Only the root carries an environment; every `λ` node extends it
//! with the domain of its own type.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Map, Value};

use crate::error::CcvError;
use crate::parse::parse_tgt;
use crate::target::term::Tgt;
use crate::types::strict::{classify, inter_class, subtype_tgt, Class, Inter, Sty};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TRule {
    Var,
    Lam,
    App,
    Dot,
    Inherit,
}

impl TRule {
    pub fn name(self) -> &'static str {
        match self {
            TRule::Var => "var",
            TRule::Lam => "lam",
            TRule::App => "app",
            TRule::Dot => "dot",
            TRule::Inherit => "inherit",
        }
    }

    fn parse(s: &str) -> Result<TRule, CcvError> {
        Ok(match s {
            "var" => TRule::Var,
            "lam" => TRule::Lam,
            "app" => TRule::App,
            "dot" => TRule::Dot,
            "inherit" => TRule::Inherit,
            _ => return Err(CcvError::Json(format!("unknown target rule `{s}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TNode {
    pub rule: TRule,
    pub subject: Tgt,
    pub ty: Sty,
    pub premises: Vec<TNode>,
}

pub type TEnv = BTreeMap<String, Inter>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TgtDerivation {
    pub env: TEnv,
    pub root: TNode,
}

/// Where and why a derivation was rejected. `path` lists premise indices
/// from the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivError {
    pub path: Vec<usize>,
    pub rule: String,
    pub reason: String,
}

impl fmt::Display for DerivError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p: Vec<String> = self.path.iter().map(usize::to_string).collect();
        let p = if p.is_empty() { "root".to_string() } else { p.join(".") };
        write!(f, "node {p} ({}): {}", self.rule, self.reason)
    }
}

impl From<DerivError> for CcvError {
    fn from(e: DerivError) -> CcvError {
        CcvError::Type(e.to_string())
    }
}

impl TNode {
    pub fn var(x: &str, ty: Sty) -> TNode {
        TNode { rule: TRule::Var, subject: Tgt::Var(x.to_string()), ty, premises: vec![] }
    }

    pub fn lam(x: &str, dom: Inter, body: TNode) -> TNode {
        TNode {
            rule: TRule::Lam,
            subject: Tgt::Lam(x.to_string(), Box::new(body.subject.clone())),
            ty: Sty::Arrow(dom, Box::new(body.ty.clone())),
            premises: vec![body],
        }
    }

    /// Application of `f : τ→σ` to one derivation of the argument per member
    /// of `τ`. Fails if the family does not match `τ`.
    pub fn app(f: TNode, args: Vec<TNode>) -> Result<TNode, CcvError> {
        let Sty::Arrow(d, c) = &f.ty else {
            return Err(CcvError::Type(format!("`{}` is not a function type", f.ty)));
        };
        let mut tys: Vec<Sty> = args.iter().map(|a| a.ty.clone()).collect();
        tys.sort();
        if tys != d.members() {
            return Err(CcvError::Type(format!("argument family does not match `{d}`")));
        }
        let a = args
            .first()
            .ok_or_else(|| CcvError::Type("empty argument family".into()))?
            .subject
            .clone();
        Ok(TNode {
            rule: TRule::App,
            subject: Tgt::App(Box::new(f.subject.clone()), Box::new(a)),
            ty: (**c).clone(),
            premises: std::iter::once(f).chain(args).collect(),
        })
    }

    /// Dot chain of `⊥⊥` derivations; nested chains are spliced.
    pub fn dot(parts: Vec<TNode>) -> TNode {
        let mut ps = Vec::new();
        for p in parts {
            if p.rule == TRule::Dot {
                ps.extend(p.premises);
            } else {
                ps.push(p);
            }
        }
        if ps.len() == 1 {
            return ps.pop().unwrap();
        }
        TNode {
            rule: TRule::Dot,
            subject: Tgt::Dot(ps.iter().map(|p| p.subject.clone()).collect()),
            ty: Sty::Bot,
            premises: ps,
        }
    }

    /// Lifts to a supertype; the identity when the types already agree.
    pub fn inherit(self, ty: Sty) -> TNode {
        if self.ty == ty {
            return self;
        }
        TNode { rule: TRule::Inherit, subject: self.subject.clone(), ty, premises: vec![self] }
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(TNode::size).sum::<usize>()
    }

    pub fn uses_inherit(&self) -> bool {
        self.rule == TRule::Inherit || self.premises.iter().any(TNode::uses_inherit)
    }

    /// Renames every identifier in every subject.
    pub fn rename(&self, map: &dyn Fn(&str) -> String) -> TNode {
        TNode {
            rule: self.rule,
            subject: rename_tgt(&self.subject, map),
            ty: self.ty.clone(),
            premises: self.premises.iter().map(|p| p.rename(map)).collect(),
        }
    }
}

fn rename_tgt(t: &Tgt, map: &dyn Fn(&str) -> String) -> Tgt {
    match t {
        Tgt::Var(x) => Tgt::Var(map(x)),
        Tgt::Lam(x, b) => Tgt::Lam(map(x), Box::new(rename_tgt(b, map))),
        Tgt::App(f, a) => Tgt::App(Box::new(rename_tgt(f, map)), Box::new(rename_tgt(a, map))),
        Tgt::Dot(ps) => Tgt::Dot(ps.iter().map(|p| rename_tgt(p, map)).collect()),
    }
}

struct Checker<'d> {
    env: &'d TEnv,
    bound: Vec<(String, Inter)>,
    sorted: bool,
    dot_allowed: bool,
}

impl<'d> Checker<'d> {
    fn lookup(&self, x: &str) -> Option<&Inter> {
        self.bound
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, t)| t)
            .or_else(|| self.env.get(x))
    }

    fn node(&mut self, n: &TNode, path: &mut Vec<usize>) -> Result<(), DerivError> {
        let fail = |path: &Vec<usize>, reason: String| DerivError {
            path: path.clone(),
            rule: n.rule.name().to_string(),
            reason,
        };
        let class = classify(&n.ty);
        if self.sorted && class.is_none() {
            return Err(fail(path, format!("type `{}` belongs to no sort", n.ty)));
        }
        let arity = |k: usize| -> Result<(), DerivError> {
            if n.premises.len() == k {
                Ok(())
            } else {
                Err(fail(path, format!("expected {k} premises, found {}", n.premises.len())))
            }
        };
        match n.rule {
            TRule::Var => {
                arity(0)?;
                let Tgt::Var(x) = &n.subject else {
                    return Err(fail(path, "subject is not a variable".into()));
                };
                let Some(t) = self.lookup(x) else {
                    return Err(fail(path, format!("`{x}` is not in the environment")));
                };
                if !t.contains(&n.ty) {
                    return Err(fail(path, format!("`{}` is not a member of `{x} : {t}`", n.ty)));
                }
                if self.sorted && !matches!(class, Some(Class::W | Class::K)) {
                    return Err(fail(path, "variables are values or continuations".into()));
                }
            }
            TRule::Lam => {
                arity(1)?;
                let (Tgt::Lam(x, b), Sty::Arrow(d, c)) = (&n.subject, &n.ty) else {
                    return Err(fail(path, "expected an abstraction with an arrow type".into()));
                };
                let p = &n.premises[0];
                if p.subject != **b || p.ty != **c {
                    return Err(fail(path, "premise does not match the body".into()));
                }
                self.bound.push((x.clone(), d.clone()));
                path.push(0);
                let r = self.node(p, path);
                path.pop();
                self.bound.pop();
                r?;
            }
            TRule::App => {
                let Tgt::App(f, a) = &n.subject else {
                    return Err(fail(path, "subject is not an application".into()));
                };
                if n.premises.len() < 2 {
                    return Err(fail(path, "needs a function and a nonempty argument family".into()));
                }
                let pf = &n.premises[0];
                let Sty::Arrow(d, c) = &pf.ty else {
                    return Err(fail(path, "function premise has no arrow type".into()));
                };
                if pf.subject != **f || **c != n.ty {
                    return Err(fail(path, "function premise does not match".into()));
                }
                let mut tys = Vec::new();
                for p in &n.premises[1..] {
                    if p.subject != **a {
                        return Err(fail(path, "argument premise has the wrong subject".into()));
                    }
                    tys.push(p.ty.clone());
                }
                tys.sort();
                if tys != d.members() {
                    return Err(fail(path, format!("argument family does not match `{d}`")));
                }
                if self.sorted && !matches!(class, Some(Class::T | Class::Q)) {
                    return Err(fail(path, "applications are terms or jumps".into()));
                }
                self.premises(n, path)?;
            }
            TRule::Dot => {
                if !self.dot_allowed {
                    return Err(fail(path, "the dot rule is not part of this system".into()));
                }
                let Tgt::Dot(ps) = &n.subject else {
                    return Err(fail(path, "subject is not a dot chain".into()));
                };
                arity(ps.len())?;
                if n.ty != Sty::Bot {
                    return Err(fail(path, "a dot chain has type bot".into()));
                }
                for (p, q) in n.premises.iter().zip(ps) {
                    if p.subject != *q || p.ty != Sty::Bot {
                        return Err(fail(path, "every dot premise is a bot-typed part".into()));
                    }
                }
                self.premises(n, path)?;
            }
            TRule::Inherit => {
                arity(1)?;
                let p = &n.premises[0];
                if p.subject != n.subject {
                    return Err(fail(path, "inheritance changes the subject".into()));
                }
                if !subtype_tgt(&p.ty, &n.ty) {
                    return Err(fail(path, format!("`{}` is not a subtype of `{}`", p.ty, n.ty)));
                }
                if self.sorted && classify(&p.ty) != class {
                    return Err(fail(path, "inheritance changes the sort".into()));
                }
                self.premises(n, path)?;
            }
        }
        Ok(())
    }

    fn premises(&mut self, n: &TNode, path: &mut Vec<usize>) -> Result<(), DerivError> {
        for (i, p) in n.premises.iter().enumerate() {
            path.push(i);
            let r = self.node(p, path);
            path.pop();
            r?;
        }
        Ok(())
    }
}

/// Checks `d` in the sorted system (`dot_allowed = false`) or in the
/// sortless system with the dot rule (`dot_allowed = true`).
pub fn check_tgt(d: &TgtDerivation, dot_allowed: bool) -> Result<(), DerivError> {
    let sorted = !dot_allowed;
    if sorted {
        for (x, t) in &d.env {
            if !matches!(inter_class(t), Some(Class::W | Class::K)) {
                return Err(DerivError {
                    path: vec![],
                    rule: "env".into(),
                    reason: format!("`{x} : {t}` is neither a value nor a continuation type"),
                });
            }
        }
    }
    let mut c = Checker { env: &d.env, bound: Vec::new(), sorted, dot_allowed };
    c.node(&d.root, &mut Vec::new())
}

fn env_json(env: &TEnv, bound: &[(String, Inter)]) -> Value {
    let mut m: BTreeMap<String, String> = env.iter().map(|(k, v)| (k.clone(), v.to_string())).collect();
    for (x, t) in bound {
        m.insert(x.clone(), t.to_string());
    }
    Value::Object(m.into_iter().map(|(k, v)| (k, Value::String(v))).collect::<Map<_, _>>())
}

fn node_json(n: &TNode, env: &TEnv, bound: &mut Vec<(String, Inter)>) -> Value {
    let mut indices = Vec::new();
    if let (TRule::App, Some(Sty::Arrow(d, _))) = (n.rule, n.premises.first().map(|p| &p.ty)) {
        let mut used = vec![false; d.members().len()];
        for p in &n.premises[1..] {
            let i = (0..used.len()).find(|&i| !used[i] && d.members()[i] == p.ty).unwrap_or(0);
            if i < used.len() {
                used[i] = true;
            }
            indices.push(i);
        }
    }
    let judgment = json!({
        "env": env_json(env, bound),
        "subject": n.subject.to_string(),
        "type": n.ty.to_string(),
    });
    let premises: Vec<Value> = match (&n.rule, &n.subject, &n.ty) {
        (TRule::Lam, Tgt::Lam(x, _), Sty::Arrow(d, _)) => {
            bound.push((x.clone(), d.clone()));
            let v = n.premises.iter().map(|p| node_json(p, env, bound)).collect();
            bound.pop();
            v
        }
        _ => n.premises.iter().map(|p| node_json(p, env, bound)).collect(),
    };
    json!({ "rule": n.rule.name(), "judgment": judgment, "premises": premises, "indices": indices })
}

impl TgtDerivation {
    pub fn to_json(&self) -> Value {
        node_json(&self.root, &self.env, &mut Vec::new())
    }

    /// Reads a derivation tree. The root's environment is authoritative;
    /// environments on inner nodes, when present, must agree with it.
    pub fn from_json(v: &Value) -> Result<TgtDerivation, CcvError> {
        let env = parse_env(v.get("judgment").and_then(|j| j.get("env")))?;
        let mut bound = Vec::new();
        let root = node_from_json(v, &env, &mut bound, &mut Vec::new())?;
        Ok(TgtDerivation { env, root })
    }
}

fn parse_env(v: Option<&Value>) -> Result<TEnv, CcvError> {
    let mut env = TEnv::new();
    if let Some(v) = v {
        let o = v.as_object().ok_or_else(|| CcvError::Json("env must be an object".into()))?;
        for (k, t) in o {
            let t = t.as_str().ok_or_else(|| CcvError::Json("env types are strings".into()))?;
            env.insert(k.clone(), Inter::parse(t)?);
        }
    }
    Ok(env)
}

fn node_from_json(
    v: &Value,
    env: &TEnv,
    bound: &mut Vec<(String, Inter)>,
    path: &mut Vec<usize>,
) -> Result<TNode, CcvError> {
    let at = |path: &Vec<usize>, m: &str| {
        let p: Vec<String> = path.iter().map(usize::to_string).collect();
        CcvError::Json(format!("node {}: {m}", if p.is_empty() { "root".into() } else { p.join(".") }))
    };
    let rule = TRule::parse(v.get("rule").and_then(Value::as_str).ok_or_else(|| at(path, "missing rule"))?)?;
    let j = v.get("judgment").ok_or_else(|| at(path, "missing judgment"))?;
    let subject = parse_tgt(j.get("subject").and_then(Value::as_str).ok_or_else(|| at(path, "missing subject"))?)?;
    let ty = Sty::parse(j.get("type").and_then(Value::as_str).ok_or_else(|| at(path, "missing type"))?)?;
    if let Some(e) = j.get("env") {
        if !path.is_empty() && *e != env_json(env, bound) {
            return Err(at(path, "environment disagrees with the root and the binders above"));
        }
    }
    let pushed = match (rule, &subject, &ty) {
        (TRule::Lam, Tgt::Lam(x, _), Sty::Arrow(d, _)) => {
            bound.push((x.clone(), d.clone()));
            true
        }
        _ => false,
    };
    let mut premises = Vec::new();
    for (i, p) in v.get("premises").and_then(Value::as_array).into_iter().flatten().enumerate() {
        path.push(i);
        let r = node_from_json(p, env, bound, path);
        path.pop();
        premises.push(r?);
    }
    if pushed {
        bound.pop();
    }
    Ok(TNode { rule, subject, ty, premises })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::tg;
    use crate::types::strict::{neg, satom, sarrow};

    fn env(pairs: &[(&str, &str)]) -> TEnv {
        pairs.iter().map(|(x, t)| (x.to_string(), Inter::parse(t).unwrap())).collect()
    }

    fn a() -> Sty {
        satom("a")
    }

    #[test]
    fn value_application_matches_the_displayed_rule() {
        // x : a -> ((a -> bot) -> bot), y : a  ⊢  x y : (a -> bot) -> bot
        let tau = neg(Inter::of(neg(Inter::of(a()))));
        let fx = TNode::var("x", sarrow(Inter::of(a()), tau.clone()));
        let d = TNode::app(fx, vec![TNode::var("y", a())]).unwrap();
        let e = env(&[("x", "a -> (a -> bot) -> bot"), ("y", "a")]);
        let der = TgtDerivation { env: e, root: d };
        assert_eq!(der.root.subject, tg("x y"));
        check_tgt(&der, false).unwrap();
        check_tgt(&der, true).unwrap();
    }

    #[test]
    fn argument_family_must_cover_the_domain() {
        let fx = TNode::var("x", sarrow(Inter::parse("a & b").unwrap(), satom("c")));
        assert!(TNode::app(fx.clone(), vec![TNode::var("y", a())]).is_err());
        let bad = TNode {
            rule: TRule::App,
            subject: tg("x y"),
            ty: satom("c"),
            premises: vec![fx, TNode::var("y", a())],
        };
        let der = TgtDerivation { env: env(&[("x", "(a & b) -> c"), ("y", "a")]), root: bad };
        let e = check_tgt(&der, true).unwrap_err();
        assert!(e.reason.contains("family"), "{e}");
    }

    #[test]
    fn dot_rule() {
        let e = env(&[("q", "bot"), ("r", "bot")]);
        let d = TNode::dot(vec![TNode::var("q", Sty::Bot), TNode::var("r", Sty::Bot)]);
        let der = TgtDerivation { env: e.clone(), root: d };
        check_tgt(&der, true).unwrap();
        assert!(check_tgt(&der, false).is_err());
        // a non-bot premise
        let e2 = env(&[("q", "bot"), ("r", "a")]);
        let bad = TNode {
            rule: TRule::Dot,
            subject: tg("q . r"),
            ty: Sty::Bot,
            premises: vec![TNode::var("q", Sty::Bot), TNode::var("r", a())],
        };
        assert!(check_tgt(&TgtDerivation { env: e2, root: bad }, true).is_err());
    }

    #[test]
    fn inheritance_with_valid_subtyping() {
        // k : a -> bot lifts to (a & b) -> bot
        let d = TNode::var("k", neg(Inter::of(a()))).inherit(neg(Inter::parse("a & b").unwrap()));
        assert_eq!(d.rule, TRule::Inherit);
        let der = TgtDerivation { env: env(&[("k", "a -> bot")]), root: d };
        check_tgt(&der, false).unwrap();
        let wrong = TNode::var("k", neg(Inter::parse("a & b").unwrap())).inherit(neg(Inter::of(a())));
        let der = TgtDerivation { env: env(&[("k", "(a & b) -> bot")]), root: wrong };
        assert!(check_tgt(&der, false).is_err());
    }

    #[test]
    fn lambda_extends_the_environment() {
        let body = TNode::var("x", a());
        let d = TNode::lam("x", Inter::parse("a & b").unwrap(), body);
        let der = TgtDerivation { env: TEnv::new(), root: d };
        check_tgt(&der, true).unwrap();
        let j = der.to_json();
        assert_eq!(TgtDerivation::from_json(&j).unwrap(), der);
    }

    #[test]
    fn json_env_must_agree() {
        let d = TNode::lam("x", Inter::of(a()), TNode::var("x", a()));
        let der = TgtDerivation { env: TEnv::new(), root: d };
        let mut j = der.to_json();
        j["premises"][0]["judgment"]["env"]["x"] = Value::String("b".into());
        assert!(TgtDerivation::from_json(&j).is_err());
    }

    #[test]
    fn unsorted_types_are_rejected_in_the_sorted_system() {
        let d = TNode::var("x", sarrow(Inter::of(a()), satom("b")));
        let der = TgtDerivation { env: env(&[("x", "a -> b")]), root: d };
        check_tgt(&der, true).unwrap();
        assert!(check_tgt(&der, false).is_err());
    }
}
