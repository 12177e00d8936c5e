//! Capture-avoiding substitutions on CCV terms and jumps.

use std::collections::HashSet;

use crate::canon::{canonicalize_jump, rename_apart_avoiding};
use crate::error::CcvError;
use crate::name::{CoName, Name};
use crate::term::{Expr, Jump, Term};

fn names_of(e: &Expr) -> HashSet<String> {
    let fv = e.free_names();
    fv.vars
        .into_iter()
        .map(|x| x.0)
        .chain(fv.conames.into_iter().map(|k| k.0))
        .collect()
}

fn apart_term(t: &Term, avoid: &HashSet<String>) -> Term {
    match rename_apart_avoiding(&Expr::Term(t.clone()), avoid) {
        Expr::Term(t) => t,
        Expr::Jump(_) => unreachable!(),
    }
}

fn apart_jump(j: &Jump, avoid: &HashSet<String>) -> Jump {
    match rename_apart_avoiding(&Expr::Jump(j.clone()), avoid) {
        Expr::Jump(j) => j,
        Expr::Term(_) => unreachable!(),
    }
}

/// `M{V/x}`.
pub fn subst_value(m: &Term, x: &Name, v: &Term) -> Result<Term, CcvError> {
    if !v.is_value() {
        return Err(CcvError::NotValue(v.to_string()));
    }
    if !m.has_free_var(x) {
        return Ok(m.clone());
    }
    let mut avoid = names_of(&Expr::Term(v.clone()));
    avoid.insert(x.0.clone());
    // binders of m are moved away from x and from the free names of v, so
    // plain replacement cannot capture
    let m = apart_term(m, &avoid);
    Ok(replace_var_term(&m, x, v))
}

pub fn subst_value_jump(j: &Jump, x: &Name, v: &Term) -> Result<Jump, CcvError> {
    if !v.is_value() {
        return Err(CcvError::NotValue(v.to_string()));
    }
    let mut avoid = names_of(&Expr::Term(v.clone()));
    avoid.insert(x.0.clone());
    let j = apart_jump(j, &avoid);
    Ok(replace_var_jump(&j, x, v))
}

fn replace_var_term(t: &Term, x: &Name, v: &Term) -> Term {
    match t {
        Term::Var(y) if y == x => v.clone(),
        Term::Var(_) => t.clone(),
        Term::Lam(y, b) => Term::Lam(y.clone(), Box::new(replace_var_term(b, x, v))),
        Term::App(f, a) => Term::App(
            Box::new(replace_var_term(f, x, v)),
            Box::new(replace_var_term(a, x, v)),
        ),
        Term::Let(b, y, a) => Term::Let(
            Box::new(replace_var_term(b, x, v)),
            y.clone(),
            Box::new(replace_var_term(a, x, v)),
        ),
        Term::Mu(k, j) => Term::Mu(k.clone(), Box::new(replace_var_jump(j, x, v))),
    }
}

fn replace_var_jump(j: &Jump, x: &Name, v: &Term) -> Jump {
    match j {
        Jump::Jmp(k, m) => Jump::Jmp(k.clone(), Box::new(replace_var_term(m, x, v))),
        Jump::JLet(b, y, a) => Jump::JLet(
            Box::new(replace_var_jump(b, x, v)),
            y.clone(),
            Box::new(replace_var_term(a, x, v)),
        ),
    }
}

/// `J{l/k}`.
pub fn subst_coname(j: &Jump, k: &CoName, l: &CoName) -> Jump {
    let mut avoid = HashSet::new();
    avoid.insert(k.0.clone());
    avoid.insert(l.0.clone());
    let j = apart_jump(j, &avoid);
    rename_coname_jump(&j, k, l)
}

pub fn subst_coname_term(t: &Term, k: &CoName, l: &CoName) -> Term {
    let mut avoid = HashSet::new();
    avoid.insert(k.0.clone());
    avoid.insert(l.0.clone());
    let t = apart_term(t, &avoid);
    rename_coname_term(&t, k, l)
}

fn rename_coname_term(t: &Term, k: &CoName, l: &CoName) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Lam(y, b) => Term::Lam(y.clone(), Box::new(rename_coname_term(b, k, l))),
        Term::App(f, a) => Term::App(
            Box::new(rename_coname_term(f, k, l)),
            Box::new(rename_coname_term(a, k, l)),
        ),
        Term::Let(b, y, a) => Term::Let(
            Box::new(rename_coname_term(b, k, l)),
            y.clone(),
            Box::new(rename_coname_term(a, k, l)),
        ),
        Term::Mu(m, j) => Term::Mu(m.clone(), Box::new(rename_coname_jump(j, k, l))),
    }
}

fn rename_coname_jump(j: &Jump, k: &CoName, l: &CoName) -> Jump {
    match j {
        Jump::Jmp(m, body) => {
            let target = if m == k { l.clone() } else { m.clone() };
            Jump::Jmp(target, Box::new(rename_coname_term(body, k, l)))
        }
        Jump::JLet(b, y, a) => Jump::JLet(
            Box::new(rename_coname_jump(b, k, l)),
            y.clone(),
            Box::new(rename_coname_term(a, k, l)),
        ),
    }
}

/// `J{[k]□ ↦ [k] let x = □ in M}` without canonicalizing the result.
pub fn subst_jump_context_raw(j: &Jump, k: &CoName, x: &Name, m: &Term) -> Jump {
    let mut avoid = names_of(&Expr::Term(m.clone()));
    avoid.insert(x.0.clone());
    avoid.insert(k.0.clone());
    let j = apart_jump(j, &avoid);
    ctx_jump(&j, k, x, m)
}

/// `J{[k]□ ↦ [k] let x = □ in M}`, canonicalized.
pub fn subst_jump_context(j: &Jump, k: &CoName, x: &Name, m: &Term) -> Result<Jump, CcvError> {
    canonicalize_jump(&subst_jump_context_raw(j, k, x, m))
}

fn ctx_term(t: &Term, k: &CoName, x: &Name, m: &Term) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Lam(y, b) => Term::Lam(y.clone(), Box::new(ctx_term(b, k, x, m))),
        Term::App(f, a) => {
            Term::App(Box::new(ctx_term(f, k, x, m)), Box::new(ctx_term(a, k, x, m)))
        }
        Term::Let(b, y, a) => Term::Let(
            Box::new(ctx_term(b, k, x, m)),
            y.clone(),
            Box::new(ctx_term(a, k, x, m)),
        ),
        Term::Mu(l, j) => Term::Mu(l.clone(), Box::new(ctx_jump(j, k, x, m))),
    }
}

fn ctx_jump(j: &Jump, k: &CoName, x: &Name, m: &Term) -> Jump {
    match j {
        Jump::Jmp(l, n) => {
            let n2 = ctx_term(n, k, x, m);
            if l == k {
                Jump::Jmp(l.clone(), Box::new(Term::Let(Box::new(m.clone()), x.clone(), Box::new(n2))))
            } else {
                Jump::Jmp(l.clone(), Box::new(n2))
            }
        }
        Jump::JLet(b, y, a) => Jump::JLet(
            Box::new(ctx_jump(b, k, x, m)),
            y.clone(),
            Box::new(ctx_term(a, k, x, m)),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{j, t};

    fn n(s: &str) -> Name {
        Name::new(s)
    }

    fn c(s: &str) -> CoName {
        CoName::new(s)
    }

    #[test]
    fn value_substitution() {
        assert_eq!(subst_value(&t("x"), &n("x"), &t("\\y. y")).unwrap(), t("\\y. y"));
        assert_eq!(subst_value(&t("\\x. x"), &n("x"), &t("z")).unwrap(), t("\\x. x"));
        let r = subst_value(&t("\\y. x"), &n("x"), &t("y")).unwrap();
        assert!(r.alpha_eq(&t("\\w. y")));
        assert!(matches!(&r, Term::Lam(b, _) if b.as_str() != "y"));
        assert!(subst_value(&t("x"), &n("x"), &t("y z")).is_err());
        // the let binder scopes over the body only
        let r = subst_value(&t("let x = x in x"), &n("x"), &t("w")).unwrap();
        assert!(r.alpha_eq(&t("let x = w in x")));
    }

    #[test]
    fn coname_substitution() {
        assert_eq!(subst_coname(&j("[k]x"), &c("k"), &c("l")), j("[l]x"));
        assert_eq!(subst_coname(&j("[m]x"), &c("k"), &c("l")), j("[m]x"));
        let r = subst_coname(&j("[k](mu k.[k]y)"), &c("k"), &c("l"));
        assert_eq!(r.alpha_key(), j("[l](mu k.[k]y)").alpha_key());
        // l would be captured by an inner binder named l
        let r = subst_coname(&j("[m] mu l. [k] y"), &c("k"), &c("l"));
        assert_eq!(r.alpha_key(), j("[m] mu q. [l] y").alpha_key());
    }

    #[test]
    fn jump_context_substitution() {
        let r = subst_jump_context(&j("[k]z"), &c("k"), &n("x"), &t("y")).unwrap();
        assert_eq!(r.alpha_key(), j("[k] let x = z in y").alpha_key());
        let r = subst_jump_context(&j("[l]z"), &c("k"), &n("x"), &t("y")).unwrap();
        assert_eq!(r.alpha_key(), j("[l]z").alpha_key());
        let r = subst_jump_context(&j("let w = n in [k]z"), &c("k"), &n("x"), &t("y")).unwrap();
        assert_eq!(
            r.alpha_key(),
            canonicalize_jump(&j("let w = n in [k] let x = z in y")).unwrap().alpha_key()
        );
        // nested occurrences under a different binder are reached, shadowed ones are not
        let r = subst_jump_context_raw(&j("[k] mu l. [k] mu k. [k] z"), &c("k"), &n("x"), &t("y"));
        assert_eq!(
            r.alpha_key(),
            j("[k] let x = (mu l. [k] let x = (mu m. [m] z) in y) in y").alpha_key()
        );
    }

    #[test]
    fn context_substitution_avoids_capture() {
        // the λy inside J must not capture the free y of M
        let r = subst_jump_context_raw(&j("[k] \\y. y"), &c("k"), &n("x"), &t("y"));
        assert_eq!(r.alpha_key(), j("[k] let x = \\w. w in y").alpha_key());
    }
}
