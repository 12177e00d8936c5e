//! Terms and jumps of the call-by-value λμ-calculus with let.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Value};

use crate::error::CcvError;
use crate::name::{CoName, Name};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Name),
    Lam(Name, Box<Term>),
    App(Box<Term>, Box<Term>),
    /// `Let(body, x, arg)` is `let x = arg in body`; `x` scopes over `body` only.
    Let(Box<Term>, Name, Box<Term>),
    Mu(CoName, Box<Jump>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Jump {
    Jmp(CoName, Box<Term>),
    /// `JLet(body, x, arg)` is `let x = arg in body` at jump level.
    JLet(Box<Jump>, Name, Box<Term>),
}

/// Either syntactic category, for code that walks both.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Term(Term),
    Jump(Jump),
}

#[derive(Clone, Copy, Debug)]
pub enum Node<'a> {
    Term(&'a Term),
    Jump(&'a Jump),
}

/// Child-index path from the root. `App`: 0 fun, 1 arg. `Let`/`JLet`: 0 body,
/// 1 arg. `Lam`, `Mu`, `Jmp`: 0.
pub type Path = Vec<u8>;

pub fn path_string(p: &[u8]) -> String {
    if p.is_empty() {
        "ε".to_string()
    } else {
        p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

pub fn var(x: &str) -> Term {
    Term::Var(Name::new(x))
}

pub fn lam(x: &str, body: Term) -> Term {
    Term::Lam(Name::new(x), Box::new(body))
}

pub fn app(f: Term, a: Term) -> Term {
    Term::App(Box::new(f), Box::new(a))
}

/// `let x = arg in body`.
pub fn let_(x: &str, arg: Term, body: Term) -> Term {
    Term::Let(Box::new(body), Name::new(x), Box::new(arg))
}

pub fn mu(k: &str, j: Jump) -> Term {
    Term::Mu(CoName::new(k), Box::new(j))
}

pub fn jmp(k: &str, body: Term) -> Jump {
    Jump::Jmp(CoName::new(k), Box::new(body))
}

/// `let x = arg in body` at jump level.
pub fn jlet(x: &str, arg: Term, body: Jump) -> Jump {
    Jump::JLet(Box::new(body), Name::new(x), Box::new(arg))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeNames {
    pub vars: BTreeSet<Name>,
    pub conames: BTreeSet<CoName>,
}

impl Term {
    pub fn is_value(&self) -> bool {
        matches!(self, Term::Var(_) | Term::Lam(..))
    }

    /// Node count; `Mu` and its jumper count separately, binders do not.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Lam(_, b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Let(b, _, a) => 1 + b.size() + a.size(),
            Term::Mu(_, j) => 1 + j.size(),
        }
    }

    pub fn free_names(&self) -> FreeNames {
        let mut out = FreeNames::default();
        free_term(self, &mut Vec::new(), &mut Vec::new(), &mut out);
        out
    }

    pub fn has_free_var(&self, x: &Name) -> bool {
        self.free_names().vars.contains(x)
    }

    pub fn has_free_coname(&self, k: &CoName) -> bool {
        self.free_names().conames.contains(k)
    }

    /// Every identifier in the term, bound or free, in both namespaces.
    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        names_term(self, &mut out);
        out
    }

    pub fn at(&self, path: &[u8]) -> Option<Node<'_>> {
        Node::Term(self).at(path)
    }

    /// Replaces the node at `path`. The replacement must match the category of
    /// the node it replaces.
    pub fn replace_at(&self, path: &[u8], with: &Expr) -> Option<Term> {
        replace_term(self, path, with)
    }

    /// α-invariant key: bound names become de Bruijn indices per namespace.
    pub fn alpha_key(&self) -> String {
        let mut s = String::new();
        key_term(self, &mut Vec::new(), &mut Vec::new(), &mut s);
        s
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        self.alpha_key() == other.alpha_key()
    }

    pub fn to_json(&self) -> Value {
        match self {
            Term::Var(x) => json!({"tag": "Var", "name": x.as_str()}),
            Term::Lam(x, b) => json!({"tag": "Lam", "binder": x.as_str(), "body": b.to_json()}),
            Term::App(f, a) => json!({"tag": "App", "fun": f.to_json(), "arg": a.to_json()}),
            Term::Let(b, x, a) => json!({
                "tag": "Let", "binder": x.as_str(), "arg": a.to_json(), "body": b.to_json()
            }),
            Term::Mu(k, j) => json!({"tag": "Mu", "binder": k.as_str(), "jump": j.to_json()}),
        }
    }

    pub fn from_json(v: &Value) -> Result<Term, CcvError> {
        let tag = field_str(v, "tag")?;
        Ok(match tag {
            "Var" => Term::Var(Name::new(field_str(v, "name")?)),
            "Lam" => Term::Lam(
                Name::new(field_str(v, "binder")?),
                Box::new(Term::from_json(field(v, "body")?)?),
            ),
            "App" => Term::App(
                Box::new(Term::from_json(field(v, "fun")?)?),
                Box::new(Term::from_json(field(v, "arg")?)?),
            ),
            "Let" => Term::Let(
                Box::new(Term::from_json(field(v, "body")?)?),
                Name::new(field_str(v, "binder")?),
                Box::new(Term::from_json(field(v, "arg")?)?),
            ),
            "Mu" => Term::Mu(
                CoName::new(field_str(v, "binder")?),
                Box::new(Jump::from_json(field(v, "jump")?)?),
            ),
            other => return Err(CcvError::Json(format!("unknown term tag `{other}`"))),
        })
    }
}

impl Jump {
    pub fn size(&self) -> usize {
        match self {
            Jump::Jmp(_, m) => 1 + m.size(),
            Jump::JLet(j, _, a) => 1 + j.size() + a.size(),
        }
    }

    pub fn free_names(&self) -> FreeNames {
        let mut out = FreeNames::default();
        free_jump(self, &mut Vec::new(), &mut Vec::new(), &mut out);
        out
    }

    pub fn all_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        names_jump(self, &mut out);
        out
    }

    pub fn alpha_key(&self) -> String {
        let mut s = String::new();
        key_jump(self, &mut Vec::new(), &mut Vec::new(), &mut s);
        s
    }

    pub fn to_json(&self) -> Value {
        match self {
            Jump::Jmp(k, m) => json!({"tag": "Jmp", "target": k.as_str(), "body": m.to_json()}),
            Jump::JLet(j, x, a) => json!({
                "tag": "JLet", "binder": x.as_str(), "arg": a.to_json(), "body": j.to_json()
            }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Jump, CcvError> {
        let tag = field_str(v, "tag")?;
        Ok(match tag {
            "Jmp" => Jump::Jmp(
                CoName::new(field_str(v, "target")?),
                Box::new(Term::from_json(field(v, "body")?)?),
            ),
            "JLet" => Jump::JLet(
                Box::new(Jump::from_json(field(v, "body")?)?),
                Name::new(field_str(v, "binder")?),
                Box::new(Term::from_json(field(v, "arg")?)?),
            ),
            other => return Err(CcvError::Json(format!("unknown jump tag `{other}`"))),
        })
    }
}

impl Expr {
    pub fn as_node(&self) -> Node<'_> {
        match self {
            Expr::Term(t) => Node::Term(t),
            Expr::Jump(j) => Node::Jump(j),
        }
    }

    pub fn free_names(&self) -> FreeNames {
        match self {
            Expr::Term(t) => t.free_names(),
            Expr::Jump(j) => j.free_names(),
        }
    }

    pub fn alpha_key(&self) -> String {
        match self {
            Expr::Term(t) => t.alpha_key(),
            Expr::Jump(j) => format!("J{}", j.alpha_key()),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Expr::Term(t) => t.to_json(),
            Expr::Jump(j) => j.to_json(),
        }
    }

    pub fn from_json(v: &Value) -> Result<Expr, CcvError> {
        match field_str(v, "tag")? {
            "Jmp" | "JLet" => Ok(Expr::Jump(Jump::from_json(v)?)),
            _ => Ok(Expr::Term(Term::from_json(v)?)),
        }
    }
}

impl<'a> Node<'a> {
    pub fn children(self) -> Vec<Node<'a>> {
        match self {
            Node::Term(t) => match t {
                Term::Var(_) => vec![],
                Term::Lam(_, b) => vec![Node::Term(b)],
                Term::App(f, a) => vec![Node::Term(f), Node::Term(a)],
                Term::Let(b, _, a) => vec![Node::Term(b), Node::Term(a)],
                Term::Mu(_, j) => vec![Node::Jump(j)],
            },
            Node::Jump(j) => match j {
                Jump::Jmp(_, m) => vec![Node::Term(m)],
                Jump::JLet(b, _, a) => vec![Node::Jump(b), Node::Term(a)],
            },
        }
    }

    pub fn at(self, path: &[u8]) -> Option<Node<'a>> {
        let mut cur = self;
        for &i in path {
            cur = *cur.children().get(i as usize)?;
        }
        Some(cur)
    }

    pub fn to_expr(self) -> Expr {
        match self {
            Node::Term(t) => Expr::Term(t.clone()),
            Node::Jump(j) => Expr::Jump(j.clone()),
        }
    }
}

fn field<'v>(v: &'v Value, k: &str) -> Result<&'v Value, CcvError> {
    v.get(k)
        .ok_or_else(|| CcvError::Json(format!("missing field `{k}`")))
}

fn field_str<'v>(v: &'v Value, k: &str) -> Result<&'v str, CcvError> {
    field(v, k)?
        .as_str()
        .ok_or_else(|| CcvError::Json(format!("field `{k}` is not a string")))
}

fn replace_term(t: &Term, path: &[u8], with: &Expr) -> Option<Term> {
    let Some((&i, rest)) = path.split_first() else {
        return match with {
            Expr::Term(w) => Some(w.clone()),
            Expr::Jump(_) => None,
        };
    };
    Some(match (t, i) {
        (Term::Lam(x, b), 0) => Term::Lam(x.clone(), Box::new(replace_term(b, rest, with)?)),
        (Term::App(f, a), 0) => Term::App(Box::new(replace_term(f, rest, with)?), a.clone()),
        (Term::App(f, a), 1) => Term::App(f.clone(), Box::new(replace_term(a, rest, with)?)),
        (Term::Let(b, x, a), 0) => {
            Term::Let(Box::new(replace_term(b, rest, with)?), x.clone(), a.clone())
        }
        (Term::Let(b, x, a), 1) => {
            Term::Let(b.clone(), x.clone(), Box::new(replace_term(a, rest, with)?))
        }
        (Term::Mu(k, j), 0) => Term::Mu(k.clone(), Box::new(replace_jump(j, rest, with)?)),
        _ => return None,
    })
}

fn replace_jump(j: &Jump, path: &[u8], with: &Expr) -> Option<Jump> {
    let Some((&i, rest)) = path.split_first() else {
        return match with {
            Expr::Jump(w) => Some(w.clone()),
            Expr::Term(_) => None,
        };
    };
    Some(match (j, i) {
        (Jump::Jmp(k, m), 0) => Jump::Jmp(k.clone(), Box::new(replace_term(m, rest, with)?)),
        (Jump::JLet(b, x, a), 0) => {
            Jump::JLet(Box::new(replace_jump(b, rest, with)?), x.clone(), a.clone())
        }
        (Jump::JLet(b, x, a), 1) => {
            Jump::JLet(b.clone(), x.clone(), Box::new(replace_term(a, rest, with)?))
        }
        _ => return None,
    })
}

fn free_term(t: &Term, bv: &mut Vec<Name>, bk: &mut Vec<CoName>, out: &mut FreeNames) {
    match t {
        Term::Var(x) => {
            if !bv.contains(x) {
                out.vars.insert(x.clone());
            }
        }
        Term::Lam(x, b) => {
            bv.push(x.clone());
            free_term(b, bv, bk, out);
            bv.pop();
        }
        Term::App(f, a) => {
            free_term(f, bv, bk, out);
            free_term(a, bv, bk, out);
        }
        Term::Let(b, x, a) => {
            free_term(a, bv, bk, out);
            bv.push(x.clone());
            free_term(b, bv, bk, out);
            bv.pop();
        }
        Term::Mu(k, j) => {
            bk.push(k.clone());
            free_jump(j, bv, bk, out);
            bk.pop();
        }
    }
}

fn free_jump(j: &Jump, bv: &mut Vec<Name>, bk: &mut Vec<CoName>, out: &mut FreeNames) {
    match j {
        Jump::Jmp(k, m) => {
            if !bk.contains(k) {
                out.conames.insert(k.clone());
            }
            free_term(m, bv, bk, out);
        }
        Jump::JLet(b, x, a) => {
            free_term(a, bv, bk, out);
            bv.push(x.clone());
            free_jump(b, bv, bk, out);
            bv.pop();
        }
    }
}

fn names_term(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(x) => {
            out.insert(x.0.clone());
        }
        Term::Lam(x, b) => {
            out.insert(x.0.clone());
            names_term(b, out);
        }
        Term::App(f, a) => {
            names_term(f, out);
            names_term(a, out);
        }
        Term::Let(b, x, a) => {
            out.insert(x.0.clone());
            names_term(b, out);
            names_term(a, out);
        }
        Term::Mu(k, j) => {
            out.insert(k.0.clone());
            names_jump(j, out);
        }
    }
}

fn names_jump(j: &Jump, out: &mut BTreeSet<String>) {
    match j {
        Jump::Jmp(k, m) => {
            out.insert(k.0.clone());
            names_term(m, out);
        }
        Jump::JLet(b, x, a) => {
            out.insert(x.0.clone());
            names_jump(b, out);
            names_term(a, out);
        }
    }
}

fn index_of<T: PartialEq>(stack: &[T], x: &T) -> Option<usize> {
    stack.iter().rev().position(|y| y == x)
}

fn key_term(t: &Term, bv: &mut Vec<Name>, bk: &mut Vec<CoName>, s: &mut String) {
    use std::fmt::Write;
    match t {
        Term::Var(x) => match index_of(bv, x) {
            Some(i) => write!(s, "#{i}").unwrap(),
            None => write!(s, "'{x}'").unwrap(),
        },
        Term::Lam(x, b) => {
            s.push_str("L(");
            bv.push(x.clone());
            key_term(b, bv, bk, s);
            bv.pop();
            s.push(')');
        }
        Term::App(f, a) => {
            s.push_str("A(");
            key_term(f, bv, bk, s);
            s.push(',');
            key_term(a, bv, bk, s);
            s.push(')');
        }
        Term::Let(b, x, a) => {
            s.push_str("E(");
            key_term(a, bv, bk, s);
            s.push(',');
            bv.push(x.clone());
            key_term(b, bv, bk, s);
            bv.pop();
            s.push(')');
        }
        Term::Mu(k, j) => {
            s.push_str("M(");
            bk.push(k.clone());
            key_jump(j, bv, bk, s);
            bk.pop();
            s.push(')');
        }
    }
}

fn key_jump(j: &Jump, bv: &mut Vec<Name>, bk: &mut Vec<CoName>, s: &mut String) {
    use std::fmt::Write;
    match j {
        Jump::Jmp(k, m) => {
            match index_of(bk, k) {
                Some(i) => write!(s, "[#{i}]").unwrap(),
                None => write!(s, "['{k}']").unwrap(),
            }
            key_term(m, bv, bk, s);
        }
        Jump::JLet(b, x, a) => {
            s.push_str("F(");
            key_term(a, bv, bk, s);
            s.push(',');
            bv.push(x.clone());
            key_jump(b, bv, bk, s);
            bv.pop();
            s.push(')');
        }
    }
}

// Precedence: 0 open-ended binders, 1 application, 2 atoms.
fn fmt_term(t: &Term, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        Term::Var(x) => write!(f, "{x}"),
        Term::Lam(x, b) => {
            if prec > 0 {
                f.write_str("(")?;
            }
            write!(f, "\\{x}. ")?;
            fmt_term(b, 0, f)?;
            if prec > 0 {
                f.write_str(")")?;
            }
            Ok(())
        }
        Term::App(g, a) => {
            if prec > 1 {
                f.write_str("(")?;
            }
            fmt_term(g, 1, f)?;
            f.write_str(" ")?;
            fmt_term(a, 2, f)?;
            if prec > 1 {
                f.write_str(")")?;
            }
            Ok(())
        }
        Term::Let(b, x, a) => {
            if prec > 0 {
                f.write_str("(")?;
            }
            write!(f, "let {x} = ")?;
            fmt_term(a, 0, f)?;
            f.write_str(" in ")?;
            fmt_term(b, 0, f)?;
            if prec > 0 {
                f.write_str(")")?;
            }
            Ok(())
        }
        Term::Mu(k, j) => {
            if prec > 0 {
                f.write_str("(")?;
            }
            write!(f, "mu {k}. ")?;
            fmt_jump(j, f)?;
            if prec > 0 {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

fn fmt_jump(j: &Jump, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match j {
        Jump::Jmp(k, m) => {
            write!(f, "[{k}] ")?;
            fmt_term(m, 0, f)
        }
        Jump::JLet(b, x, a) => {
            write!(f, "let {x} = ")?;
            fmt_term(a, 0, f)?;
            f.write_str(" in ")?;
            fmt_jump(b, f)
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, 0, f)
    }
}

impl fmt::Display for Jump {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_jump(self, f)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Term(t) => t.fmt(f),
            Expr::Jump(j) => j.fmt(f),
        }
    }
}

/// Counts of each constructor, used by corpus reports.
pub fn constructor_histogram(t: &Term) -> BTreeMap<&'static str, usize> {
    fn go(n: Node<'_>, h: &mut BTreeMap<&'static str, usize>) {
        let tag = match n {
            Node::Term(Term::Var(_)) => "Var",
            Node::Term(Term::Lam(..)) => "Lam",
            Node::Term(Term::App(..)) => "App",
            Node::Term(Term::Let(..)) => "Let",
            Node::Term(Term::Mu(..)) => "Mu",
            Node::Jump(Jump::Jmp(..)) => "Jmp",
            Node::Jump(Jump::JLet(..)) => "JLet",
        };
        *h.entry(tag).or_default() += 1;
        for c in n.children() {
            go(c, h);
        }
    }
    let mut h = BTreeMap::new();
    go(Node::Term(t), &mut h);
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_names_examples() {
        let t = lam("x", app(var("x"), var("y")));
        let fv = t.free_names();
        assert_eq!(fv.vars.into_iter().collect::<Vec<_>>(), vec![Name::new("y")]);
        assert!(fv.conames.is_empty());

        let t = mu("k", jmp("l", var("x")));
        let fv = t.free_names();
        assert_eq!(fv.vars.into_iter().collect::<Vec<_>>(), vec![Name::new("x")]);
        assert_eq!(fv.conames.into_iter().collect::<Vec<_>>(), vec![CoName::new("l")]);
    }

    #[test]
    fn let_binds_body_only() {
        // let x = x in x: the argument's x is free
        let t = let_("x", var("x"), var("x"));
        assert!(t.has_free_var(&Name::new("x")));
        let t = let_("x", var("y"), var("x"));
        assert!(!t.has_free_var(&Name::new("x")));
    }

    #[test]
    fn values() {
        assert!(var("x").is_value());
        assert!(lam("x", var("x")).is_value());
        assert!(!let_("x", var("y"), var("x")).is_value());
        assert!(!app(var("x"), var("y")).is_value());
        assert!(!mu("k", jmp("k", var("x"))).is_value());
    }

    #[test]
    fn alpha_keys() {
        assert_eq!(
            mu("k", jmp("k", var("x"))).alpha_key(),
            mu("l", jmp("l", var("x"))).alpha_key()
        );
        assert_ne!(var("x").alpha_key(), var("y").alpha_key());
        // namespaces are indexed separately
        assert_ne!(
            lam("x", mu("k", jmp("k", var("x")))).alpha_key(),
            lam("x", mu("k", jmp("m", var("x")))).alpha_key()
        );
    }

    #[test]
    fn sizes() {
        assert_eq!(mu("k", jmp("k", var("x"))).size(), 3);
        assert_eq!(lam("x", var("x")).size(), 2);
        assert_eq!(app(var("x"), var("x")).size(), 3);
    }

    #[test]
    fn json_round_trip() {
        let t = let_("x", mu("k", jmp("k", var("z"))), app(var("x"), lam("y", var("y"))));
        let v = t.to_json();
        assert_eq!(v["tag"], "Let");
        assert_eq!(Term::from_json(&v).unwrap(), t);
    }

    #[test]
    fn path_replace() {
        let t = app(var("f"), let_("x", var("y"), var("x")));
        let r = t.replace_at(&[1, 0], &Expr::Term(var("z"))).unwrap();
        assert_eq!(r, app(var("f"), let_("x", var("y"), var("z"))));
        assert!(t.replace_at(&[1, 0], &Expr::Jump(jmp("k", var("z")))).is_none());
    }
}
