//! The dot-extended translation `⟨⟨·⟩⟩` used for strong normalization.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::canon::rename_apart_avoiding;
use crate::error::CcvError;
use crate::name::{Fresh, Name};
use crate::target::term::{dot, tapp, tapps, tlam, tvar, Tgt};
use crate::term::{Expr, Jump, Term};

/// Pairs each continuation variable `k` with its tilde variable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TildeEnv {
    map: BTreeMap<String, String>,
}

impl TildeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    /// The tilde of `k`, allocating `k~` on first use.
    pub fn tilde_of(&mut self, k: &str) -> String {
        self.map.entry(k.to_string()).or_insert_with(|| format!("{k}~")).clone()
    }

    pub fn get(&self, k: &str) -> Option<&str> {
        self.map.get(k).map(String::as_str)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    fn names(&self) -> impl Iterator<Item = String> + '_ {
        self.map.iter().flat_map(|(a, b)| [a.clone(), b.clone()])
    }
}

/// `K̃`: the tilde variable for a continuation variable, the body for an
/// abstraction.
pub fn tilde(kk: &Tgt, env: &TildeEnv) -> Result<Tgt, CcvError> {
    match kk {
        Tgt::Var(k) => env
            .get(k)
            .map(tvar)
            .ok_or_else(|| CcvError::NotContinuation(format!("no tilde for {k}"))),
        Tgt::Lam(_, q) => Ok((**q).clone()),
        _ => Err(CcvError::NotContinuation(kk.to_string())),
    }
}

pub(crate) struct Sn<'e> {
    pub fresh: Fresh,
    pub env: &'e mut TildeEnv,
}

impl<'e> Sn<'e> {
    pub fn new(names: impl IntoIterator<Item = String>, env: &'e mut TildeEnv) -> Self {
        let mut fresh = Fresh::avoiding(names);
        for n in env.names() {
            fresh.reserve(n);
        }
        Sn { fresh, env }
    }

    pub fn tilde(&mut self, kk: &Tgt) -> Tgt {
        match kk {
            Tgt::Var(k) => tvar(&self.env.tilde_of(k)),
            _ => tilde(kk, self.env).expect("continuation"),
        }
    }

    pub fn term(&mut self, m: &Term, kk: &Tgt) -> Tgt {
        match m {
            Term::Var(_) | Term::Lam(..) => tapp(kk.clone(), self.value(m)),
            Term::Let(body, x, arg) => {
                let l = self.term(body, kk);
                let kt = self.tilde(kk);
                let k2 = tlam(&x.0, dot([kt, l.clone()]));
                let a = self.term(arg, &k2);
                dot([l, a])
            }
            Term::App(f, a) => {
                let kt = self.tilde(kk);
                if f.is_value() && a.is_value() {
                    let vf = self.value(f);
                    let va = self.value(a);
                    return tapps(vf, [kk.clone(), kt, va]);
                }
                let z = Name::new(self.fresh.name("z"));
                let (n, body) = if f.is_value() {
                    ((**a).clone(), Term::App(f.clone(), Box::new(Term::Var(z.clone()))))
                } else {
                    ((**f).clone(), Term::App(Box::new(Term::Var(z.clone())), a.clone()))
                };
                let inner = self.term(&Term::Let(Box::new(body), z, Box::new(n)), kk);
                dot([kt, inner])
            }
            Term::Mu(k, j) => {
                let kt = self.tilde(kk);
                let ktk = self.env.tilde_of(&k.0);
                let tj = self.jump(j);
                let mut sub = HashMap::new();
                sub.insert(k.0.clone(), kk.clone());
                sub.insert(ktk, kt.clone());
                dot([kt, tj.subst(&sub)])
            }
        }
    }

    pub fn jump(&mut self, j: &Jump) -> Tgt {
        match j {
            Jump::Jmp(k, m) => {
                let kt = tvar(&self.env.tilde_of(&k.0));
                let tm = self.term(m, &tvar(&k.0));
                dot([kt, tm])
            }
            Jump::JLet(body, x, arg) => {
                let tj = self.jump(body);
                let a = self.term(arg, &tlam(&x.0, tj.clone()));
                dot([tj, a])
            }
        }
    }

    pub fn value(&mut self, v: &Term) -> Tgt {
        match v {
            Term::Var(x) => tvar(&x.0),
            Term::Lam(x, b) => {
                let k = self.fresh.name("k");
                let kt = self.fresh.name(&format!("{k}~"));
                self.env.map.insert(k.clone(), kt.clone());
                let m = self.term(b, &tvar(&k));
                let second = tapp(tlam(&x.0, dot([tvar(&kt), m.clone()])), tvar(&x.0));
                tlam(&k, tlam(&kt, tlam(&x.0, dot([m, second]))))
            }
            _ => unreachable!("not a value"),
        }
    }
}

/// Renames binders apart only when two binders share a name or a binder
/// clashes with a free name of the expression or of `K`.
fn prepared(e: &Expr, kk: &Tgt) -> Expr {
    let fv = e.free_names();
    let mut seen: HashSet<String> = kk.all_names().into_iter().collect();
    seen.extend(fv.vars.iter().map(|x| x.0.clone()));
    seen.extend(fv.conames.iter().map(|k| k.0.clone()));
    let mut bs = Vec::new();
    match e {
        Expr::Term(t) => binders_term(t, &mut bs),
        Expr::Jump(j) => binders_jump(j, &mut bs),
    }
    if bs.into_iter().all(|b| seen.insert(b)) {
        return e.clone();
    }
    let avoid = kk.all_names().into_iter().collect();
    rename_apart_avoiding(e, &avoid)
}

pub(crate) fn binders_term(t: &Term, out: &mut Vec<String>) {
    match t {
        Term::Var(_) => {}
        Term::Lam(x, b) => {
            out.push(x.0.clone());
            binders_term(b, out);
        }
        Term::App(f, a) => {
            binders_term(f, out);
            binders_term(a, out);
        }
        Term::Let(b, x, a) => {
            out.push(x.0.clone());
            binders_term(b, out);
            binders_term(a, out);
        }
        Term::Mu(k, j) => {
            out.push(k.0.clone());
            binders_jump(j, out);
        }
    }
}

fn binders_jump(j: &Jump, out: &mut Vec<String>) {
    match j {
        Jump::Jmp(_, m) => binders_term(m, out),
        Jump::JLet(b, x, a) => {
            out.push(x.0.clone());
            binders_jump(b, out);
            binders_term(a, out);
        }
    }
}

fn names_of(e: &Expr, kk: &Tgt) -> Vec<String> {
    let mut v: Vec<String> = match e {
        Expr::Term(t) => t.all_names().into_iter().collect(),
        Expr::Jump(j) => j.all_names().into_iter().collect(),
    };
    v.extend(kk.all_names());
    v
}

/// `⟨⟨M⟩⟩[K]`, extending `env` with tildes for every continuation variable
/// it meets.
pub fn sn_translate(m: &Term, kk: &Tgt, env: &mut TildeEnv) -> Result<Tgt, CcvError> {
    check_continuation(kk)?;
    let e = prepared(&Expr::Term(m.clone()), kk);
    let Expr::Term(m) = e else { unreachable!() };
    let names = names_of(&Expr::Term(m.clone()), kk);
    let mut sn = Sn::new(names, env);
    Ok(sn.term(&m, kk))
}

pub fn sn_translate_jump(j: &Jump, env: &mut TildeEnv) -> Result<Tgt, CcvError> {
    let e = prepared(&Expr::Jump(j.clone()), &tvar("_"));
    let Expr::Jump(j) = e else { unreachable!() };
    let names = names_of(&Expr::Jump(j.clone()), &tvar("_"));
    let mut sn = Sn::new(names, env);
    Ok(sn.jump(&j))
}

/// A continuation variable that is fresh for every term in `terms`.
pub fn top_continuation(terms: &[&Term]) -> String {
    let mut fresh = Fresh::avoiding(terms.iter().flat_map(|t| t.all_names()));
    fresh.name("k")
}

/// `⟨⟨M⟩⟩[k]` for a fresh `k`, with the environment it used.
pub fn sn_top(m: &Term) -> (Tgt, TildeEnv) {
    let k = top_continuation(&[m]);
    let mut env = TildeEnv::new();
    env.tilde_of(&k);
    let t = sn_translate(m, &tvar(&k), &mut env).expect("variable continuation");
    (t, env)
}

fn check_continuation(kk: &Tgt) -> Result<(), CcvError> {
    match kk {
        Tgt::Var(_) | Tgt::Lam(..) => Ok(()),
        _ => Err(CcvError::NotContinuation(kk.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{t, tg};

    fn sn(s: &str, k: &str) -> Tgt {
        let mut env = TildeEnv::new();
        env.tilde_of("k");
        sn_translate(&t(s), &tg(k), &mut env).unwrap()
    }

    fn same(a: &Tgt, b: &str) {
        assert_eq!(a.alpha_key(), tg(b).alpha_key(), "{a} vs {b}");
    }

    #[test]
    fn tilde_rows() {
        let mut env = TildeEnv::new();
        env.tilde_of("k");
        same(&tilde(&tg("k"), &env).unwrap(), "k~");
        same(&tilde(&tg("\\x. k x"), &env).unwrap(), "k x");
        assert!(tilde(&tg("k x"), &env).is_err());
        // substituting k leaves k~ alone
        same(&tg("k~").subst1("k", &tg("\\x. x")), "k~");
    }

    #[test]
    fn rows() {
        same(&sn("x", "k"), "k x");
        same(&sn("x y", "k"), "x k k~ y");
        same(&sn("mu h. [h] x", "k"), "k~ . k~ . k x");
        same(&sn("mu h. [h] x", "\\v. k v"), "k v . k v . (\\v. k v) x");
    }

    #[test]
    fn lambda_row() {
        same(
            &sn("\\x. x", "k"),
            "k (\\h. \\h~. \\x. h x . (\\x. h~ . h x) x)",
        );
    }

    #[test]
    fn let_row_copies_body() {
        let r = sn("let x = y z in x", "k");
        same(&r, "k x . y (\\x. k~ . k x) (k~ . k x) z");
    }

    #[test]
    fn application_rows_use_fresh_z() {
        let r = sn("(x y) w", "k");
        // k~ . <z w>[k] . <x y>[\z. k~ . <z w>[k]]
        same(&r, "k~ . z k k~ w . x (\\z. k~ . z k k~ w) (k~ . z k k~ w) y");
    }
}
