//! Canonical forms modulo the two let-associativity axioms, and enumeration of
//! the bracketing variants of a class.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::CcvError;
use crate::name::{base_of, CoName, Fresh, Name};
use crate::term::{Expr, Jump, Term};

pub const DEFAULT_REP_CAP: usize = 4096;

/// Rejects terms in which some identifier is free both as an ordinary
/// variable and as a continuation variable; the translations put both into
/// one namespace.
pub fn check_scope(e: &Expr) -> Result<(), CcvError> {
    let fv = e.free_names();
    for x in &fv.vars {
        if fv.conames.contains(&CoName(x.0.clone())) {
            return Err(CcvError::IllScoped(format!(
                "`{x}` is free both as a variable and as a continuation"
            )));
        }
    }
    Ok(())
}

/// Renames every binder apart from every other binder and from every free
/// name, keeping user names where they are already unique. Both namespaces
/// share one supply.
pub fn rename_apart(e: &Expr) -> Expr {
    rename_apart_avoiding(e, &HashSet::new())
}

pub fn rename_apart_avoiding(e: &Expr, avoid: &HashSet<String>) -> Expr {
    let fv = e.free_names();
    let mut fresh = Fresh::avoiding(
        fv.vars
            .iter()
            .map(|x| x.0.clone())
            .chain(fv.conames.iter().map(|k| k.0.clone()))
            .chain(avoid.iter().cloned()),
    );
    let mut r = Renamer { fresh: &mut fresh, vars: Vec::new(), conames: Vec::new() };
    match e {
        Expr::Term(t) => Expr::Term(r.term(t)),
        Expr::Jump(j) => Expr::Jump(r.jump(j)),
    }
}

pub fn rename_term_apart(t: &Term) -> Term {
    match rename_apart(&Expr::Term(t.clone())) {
        Expr::Term(t) => t,
        Expr::Jump(_) => unreachable!(),
    }
}

struct Renamer<'f> {
    fresh: &'f mut Fresh,
    vars: Vec<(Name, Name)>,
    conames: Vec<(CoName, CoName)>,
}

impl Renamer<'_> {
    fn var(&self, x: &Name) -> Name {
        self.vars
            .iter()
            .rev()
            .find(|(o, _)| o == x)
            .map(|(_, n)| n.clone())
            .unwrap_or_else(|| x.clone())
    }

    fn coname(&self, k: &CoName) -> CoName {
        self.conames
            .iter()
            .rev()
            .find(|(o, _)| o == k)
            .map(|(_, n)| n.clone())
            .unwrap_or_else(|| k.clone())
    }

    fn bind_var(&mut self, x: &Name) -> Name {
        let n = Name(self.fresh.name(base_of(&x.0)));
        self.vars.push((x.clone(), n.clone()));
        n
    }

    fn term(&mut self, t: &Term) -> Term {
        match t {
            Term::Var(x) => Term::Var(self.var(x)),
            Term::Lam(x, b) => {
                let x2 = self.bind_var(x);
                let b2 = self.term(b);
                self.vars.pop();
                Term::Lam(x2, Box::new(b2))
            }
            Term::App(f, a) => {
                let f2 = self.term(f);
                Term::App(Box::new(f2), Box::new(self.term(a)))
            }
            Term::Let(b, x, a) => {
                let a2 = self.term(a);
                let x2 = self.bind_var(x);
                let b2 = self.term(b);
                self.vars.pop();
                Term::Let(Box::new(b2), x2, Box::new(a2))
            }
            Term::Mu(k, j) => {
                let k2 = CoName(self.fresh.name(base_of(&k.0)));
                self.conames.push((k.clone(), k2.clone()));
                let j2 = self.jump(j);
                self.conames.pop();
                Term::Mu(k2, Box::new(j2))
            }
        }
    }

    fn jump(&mut self, j: &Jump) -> Jump {
        match j {
            Jump::Jmp(k, m) => {
                let k2 = self.coname(k);
                Jump::Jmp(k2, Box::new(self.term(m)))
            }
            Jump::JLet(b, x, a) => {
                let a2 = self.term(a);
                let x2 = self.bind_var(x);
                let b2 = self.jump(b);
                self.vars.pop();
                Jump::JLet(Box::new(b2), x2, Box::new(a2))
            }
        }
    }
}

// Structural normalization; assumes binders are already apart.
fn norm_term(t: &Term) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Lam(x, b) => Term::Lam(x.clone(), Box::new(norm_term(b))),
        Term::App(f, a) => Term::App(Box::new(norm_term(f)), Box::new(norm_term(a))),
        Term::Let(b, x, a) => float_let(norm_term(b), x.clone(), norm_term(a)),
        Term::Mu(k, j) => Term::Mu(k.clone(), Box::new(norm_jump(j))),
    }
}

/// `let x = arg in body` with both parts normal; floats the let-chain of `arg`
/// outwards.
fn float_let(body: Term, x: Name, arg: Term) -> Term {
    match arg {
        Term::Let(inner_body, y, inner_arg) => {
            // inner_arg is not a let since arg is normal
            Term::Let(Box::new(float_let(body, x, *inner_body)), y, inner_arg)
        }
        arg => Term::Let(Box::new(body), x, Box::new(arg)),
    }
}

fn norm_jump(j: &Jump) -> Jump {
    match j {
        Jump::Jmp(k, m) => Jump::Jmp(k.clone(), Box::new(norm_term(m))),
        Jump::JLet(b, x, a) => {
            let Jump::Jmp(k, m) = norm_jump(b) else { unreachable!() };
            Jump::Jmp(k, Box::new(float_let(*m, x.clone(), norm_term(a))))
        }
    }
}

pub fn canonicalize_expr(e: &Expr) -> Result<Expr, CcvError> {
    check_scope(e)?;
    let apart = rename_apart(e);
    let normal = match &apart {
        Expr::Term(t) => Expr::Term(norm_term(t)),
        Expr::Jump(j) => Expr::Jump(norm_jump(j)),
    };
    Ok(rename_apart(&normal))
}

pub fn canonicalize(t: &Term) -> Result<Term, CcvError> {
    match canonicalize_expr(&Expr::Term(t.clone()))? {
        Expr::Term(t) => Ok(t),
        Expr::Jump(_) => unreachable!(),
    }
}

pub fn canonicalize_jump(j: &Jump) -> Result<Jump, CcvError> {
    match canonicalize_expr(&Expr::Jump(j.clone()))? {
        Expr::Jump(j) => Ok(j),
        Expr::Term(_) => unreachable!(),
    }
}

/// Canonical shape: no let-argument is a let and no jump-let remains.
pub fn is_canonical_shape(e: &Expr) -> bool {
    fn t_ok(t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::Lam(_, b) => t_ok(b),
            Term::App(f, a) => t_ok(f) && t_ok(a),
            Term::Let(b, _, a) => !matches!(**a, Term::Let(..)) && t_ok(a) && t_ok(b),
            Term::Mu(_, j) => j_ok(j),
        }
    }
    fn j_ok(j: &Jump) -> bool {
        match j {
            Jump::Jmp(_, m) => t_ok(m),
            Jump::JLet(..) => false,
        }
    }
    match e {
        Expr::Term(t) => t_ok(t),
        Expr::Jump(j) => j_ok(j),
    }
}

pub fn ccv_eq(a: &Term, b: &Term) -> Result<bool, CcvError> {
    Ok(canonicalize(a)?.alpha_key() == canonicalize(b)?.alpha_key())
}

pub fn ccv_eq_expr(a: &Expr, b: &Expr) -> Result<bool, CcvError> {
    Ok(canonicalize_expr(a)?.alpha_key() == canonicalize_expr(b)?.alpha_key())
}

/// Every result of applying one axiom, in either direction, at one position.
pub fn axiom_neighbours(e: &Expr) -> Vec<Expr> {
    let mut out = Vec::new();
    match e {
        Expr::Term(t) => {
            for t2 in term_neighbours(t) {
                out.push(Expr::Term(t2));
            }
        }
        Expr::Jump(j) => {
            for j2 in jump_neighbours(j) {
                out.push(Expr::Jump(j2));
            }
        }
    }
    out
}

fn term_neighbours(t: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    if let Term::Let(l, x, a) = t {
        // let x = (let y = N in M) in L  ->  let y = N in (let x = M in L)
        if let Term::Let(m, y, n) = &**a {
            if !l.has_free_var(y) {
                out.push(Term::Let(
                    Box::new(Term::Let(l.clone(), x.clone(), m.clone())),
                    y.clone(),
                    n.clone(),
                ));
            }
        }
        // let y = N in (let x = M in L)  ->  let x = (let y = N in M) in L
        if let Term::Let(ll, xx, m) = &**l {
            let (y, n) = (x, a);
            if !ll.has_free_var(y) && xx != y {
                out.push(Term::Let(
                    ll.clone(),
                    xx.clone(),
                    Box::new(Term::Let(m.clone(), y.clone(), n.clone())),
                ));
            }
        }
    }
    match t {
        Term::Var(_) => {}
        Term::Lam(x, b) => {
            for b2 in term_neighbours(b) {
                out.push(Term::Lam(x.clone(), Box::new(b2)));
            }
        }
        Term::App(f, a) => {
            for f2 in term_neighbours(f) {
                out.push(Term::App(Box::new(f2), a.clone()));
            }
            for a2 in term_neighbours(a) {
                out.push(Term::App(f.clone(), Box::new(a2)));
            }
        }
        Term::Let(b, x, a) => {
            for b2 in term_neighbours(b) {
                out.push(Term::Let(Box::new(b2), x.clone(), a.clone()));
            }
            for a2 in term_neighbours(a) {
                out.push(Term::Let(b.clone(), x.clone(), Box::new(a2)));
            }
        }
        Term::Mu(k, j) => {
            for j2 in jump_neighbours(j) {
                out.push(Term::Mu(k.clone(), Box::new(j2)));
            }
        }
    }
    out
}

fn jump_neighbours(j: &Jump) -> Vec<Jump> {
    let mut out = Vec::new();
    match j {
        Jump::Jmp(k, m) => {
            // [k](let x = M in L)  ->  let x = M in [k]L
            if let Term::Let(l, x, a) = &**m {
                out.push(Jump::JLet(
                    Box::new(Jump::Jmp(k.clone(), l.clone())),
                    x.clone(),
                    a.clone(),
                ));
            }
            for m2 in term_neighbours(m) {
                out.push(Jump::Jmp(k.clone(), Box::new(m2)));
            }
        }
        Jump::JLet(b, x, a) => {
            // let x = M in [k]L  ->  [k](let x = M in L)
            if let Jump::Jmp(k, l) = &**b {
                out.push(Jump::Jmp(
                    k.clone(),
                    Box::new(Term::Let(l.clone(), x.clone(), a.clone())),
                ));
            }
            for b2 in jump_neighbours(b) {
                out.push(Jump::JLet(Box::new(b2), x.clone(), a.clone()));
            }
            for a2 in term_neighbours(a) {
                out.push(Jump::JLet(b.clone(), x.clone(), Box::new(a2)));
            }
        }
    }
    out
}

/// All bracketing variants of the class of `e`, the canonical form first,
/// in breadth-first order.
pub fn representatives_expr(e: &Expr, cap: usize) -> Result<Vec<Expr>, CcvError> {
    let c = canonicalize_expr(e)?;
    let mut seen: HashMap<String, ()> = HashMap::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(c.alpha_key(), ());
    queue.push_back(c);
    while let Some(cur) = queue.pop_front() {
        for n in axiom_neighbours(&cur) {
            if seen.insert(n.alpha_key(), ()).is_none() {
                if seen.len() > cap {
                    return Err(CcvError::CapExceeded(cap));
                }
                queue.push_back(n);
            }
        }
        out.push(cur);
    }
    Ok(out)
}

pub fn representatives(t: &Term, cap: usize) -> Result<Vec<Term>, CcvError> {
    Ok(representatives_expr(&Expr::Term(t.clone()), cap)?
        .into_iter()
        .map(|e| match e {
            Expr::Term(t) => t,
            Expr::Jump(_) => unreachable!(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{j, t};

    fn key(s: &str) -> String {
        t(s).alpha_key()
    }

    #[test]
    fn axiom_one_floats_out() {
        let c = canonicalize(&t("let x = (let y = z in y) in x")).unwrap();
        assert_eq!(c.alpha_key(), key("let y = z in let x = y in x"));
    }

    #[test]
    fn axiom_two_absorbs() {
        let c = canonicalize_jump(&j("let x = w in [k] m")).unwrap();
        assert_eq!(c.alpha_key(), j("[k] let x = w in m").alpha_key());
        let c = canonicalize(&t("mu k. let x = w in let y = x in [k] y")).unwrap();
        assert_eq!(c.alpha_key(), key("mu k. [k] let x = w in let y = x in y"));
    }

    #[test]
    fn idempotent() {
        for s in [
            "let x = (let y = z in y) in x",
            "mu k. let x = (let y = z in y) in [k] let w = x in w",
            "\\x. let x = x in let x = (let x = x in x) in x",
        ] {
            let c = canonicalize(&t(s)).unwrap();
            assert_eq!(canonicalize(&c).unwrap(), c);
            assert!(is_canonical_shape(&Expr::Term(c)));
        }
    }

    #[test]
    fn equality_examples() {
        assert!(ccv_eq(
            &t("let x = m in let y = n in l"),
            &t("let y = (let x = m in n) in l")
        )
        .unwrap());
        assert!(!ccv_eq(&t("x"), &t("y")).unwrap());
        assert!(ccv_eq(&t("mu k.[k]x"), &t("mu l.[l]x")).unwrap());
    }

    #[test]
    fn representative_counts() {
        assert_eq!(representatives(&t("x"), 10).unwrap().len(), 1);
        assert_eq!(
            representatives(&t("let y = z in let x = y in x"), 10).unwrap().len(),
            2
        );
        let reps = representatives_expr(&Expr::Jump(j("[k] let x = n in m")), 10).unwrap();
        assert_eq!(reps.len(), 2);
    }

    #[test]
    fn representatives_are_closed_and_class_constant() {
        let s = t("mu k. let a = (let b = x in b) in [k] let c = a in c");
        let reps = representatives(&s, 100).unwrap();
        let keys: HashSet<String> = reps.iter().map(Term::alpha_key).collect();
        let c = canonicalize(&s).unwrap().alpha_key();
        for r in &reps {
            assert_eq!(canonicalize(r).unwrap().alpha_key(), c);
            for n in axiom_neighbours(&Expr::Term(r.clone())) {
                assert!(keys.contains(&n.alpha_key()));
            }
        }
    }

    #[test]
    fn cap_is_reported() {
        let s = t("let a = x in let b = a in let c = b in let d = c in let e = d in e");
        assert_eq!(representatives(&s, 5), Err(CcvError::CapExceeded(5)));
    }

    #[test]
    fn clash_rejected() {
        assert!(canonicalize(&t("mu m. [k] k")).is_err());
        assert!(canonicalize(&t("mu k. [k] k")).is_ok());
    }

    #[test]
    fn binders_renamed_apart() {
        let c = canonicalize(&t("(\\x. x) (\\x. x)")).unwrap();
        assert_eq!(c.to_string(), "(\\x. x) (\\x1. x1)");
    }
}
