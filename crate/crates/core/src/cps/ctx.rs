//! Evaluation contexts, their translations and E-depth.

use crate::cps::sn::{Sn, TildeEnv};
use crate::error::CcvError;
use crate::measure::{places, PlaceId};
use crate::name::Name;
use crate::target::term::{dot, tlam, Tgt};
use crate::term::{Jump, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalCtx {
    Hole,
    /// `E[V □]`
    AppR(Box<EvalCtx>, Term),
    /// `E[□ M]`
    AppL(Box<EvalCtx>, Term),
    /// `E[let x = □ in M]`
    LetArg(Box<EvalCtx>, Name, Term),
}

impl EvalCtx {
    pub fn app_r(self, v: Term) -> Result<Self, CcvError> {
        if !v.is_value() {
            return Err(CcvError::NotValue(v.to_string()));
        }
        Ok(EvalCtx::AppR(Box::new(self), v))
    }

    pub fn app_l(self, m: Term) -> Self {
        EvalCtx::AppL(Box::new(self), m)
    }

    pub fn let_arg(self, x: &str, body: Term) -> Self {
        EvalCtx::LetArg(Box::new(self), Name::new(x), body)
    }

    pub fn plug(&self, n: Term) -> Term {
        match self {
            EvalCtx::Hole => n,
            EvalCtx::AppR(e, v) => e.plug(Term::App(Box::new(v.clone()), Box::new(n))),
            EvalCtx::AppL(e, m) => e.plug(Term::App(Box::new(n), Box::new(m.clone()))),
            EvalCtx::LetArg(e, x, m) => {
                e.plug(Term::Let(Box::new(m.clone()), x.clone(), Box::new(n)))
            }
        }
    }

    fn names(&self, out: &mut Vec<String>) {
        match self {
            EvalCtx::Hole => {}
            EvalCtx::AppR(e, m) | EvalCtx::AppL(e, m) => {
                out.extend(m.all_names());
                e.names(out);
            }
            EvalCtx::LetArg(e, x, m) => {
                out.push(x.0.clone());
                out.extend(m.all_names());
                e.names(out);
            }
        }
    }
}

/// `(Q_E, 𝒦_E)`; `Q_E` is `None` when void.
pub fn build_eval_ctx(
    e: &EvalCtx,
    kk: &Tgt,
    env: &mut TildeEnv,
) -> Result<(Option<Tgt>, Tgt), CcvError> {
    match kk {
        Tgt::Var(_) | Tgt::Lam(..) => {}
        _ => return Err(CcvError::NotContinuation(kk.to_string())),
    }
    let mut names = Vec::new();
    e.names(&mut names);
    names.extend(kk.all_names());
    let mut sn = Sn::new(names, env);
    Ok(build(e, kk, &mut sn))
}

fn build(e: &EvalCtx, kk: &Tgt, sn: &mut Sn<'_>) -> (Option<Tgt>, Tgt) {
    match e {
        EvalCtx::Hole => (None, kk.clone()),
        EvalCtx::AppL(inner, _) | EvalCtx::AppR(inner, _) => {
            let (q, ke) = build(inner, kk, sn);
            let z = Name::new(sn.fresh.name("z"));
            let zv = Box::new(Term::Var(z.clone()));
            let body = match e {
                EvalCtx::AppL(_, m) => Term::App(zv, Box::new(m.clone())),
                EvalCtx::AppR(_, v) => Term::App(Box::new(v.clone()), zv),
                _ => unreachable!(),
            };
            let t = sn.term(&body, &ke);
            let kt = sn.tilde(&ke);
            let part = dot([kt, t]);
            (Some(dot(q.into_iter().chain([part.clone()]))), tlam(&z.0, part))
        }
        EvalCtx::LetArg(inner, x, m) => {
            let (q, ke) = build(inner, kk, sn);
            let t = sn.term(m, &ke);
            let kt = sn.tilde(&ke);
            (
                Some(dot(q.into_iter().chain([t.clone()]))),
                tlam(&x.0, dot([kt, t])),
            )
        }
    }
}

/// E-depth of the subterm at `path` (JSON tree positions).
pub fn e_depth_at(m: &Term, path: &[u8]) -> Result<usize, CcvError> {
    let mut d = 0;
    let mut cur = crate::term::Node::Term(m);
    for &i in path {
        d += match cur {
            crate::term::Node::Term(Term::App(f, _)) => usize::from(f.is_value() == (i == 0)),
            crate::term::Node::Term(Term::Let(..)) => usize::from(i == 0),
            crate::term::Node::Term(Term::Lam(..)) => 1,
            crate::term::Node::Term(Term::Mu(..)) => 1,
            crate::term::Node::Jump(Jump::Jmp(..)) => 0,
            crate::term::Node::Jump(Jump::JLet(..)) => usize::from(i == 0),
            crate::term::Node::Term(Term::Var(_)) => {
                return Err(CcvError::NoSuchPlace(crate::term::path_string(path)))
            }
        };
        cur = cur
            .children()
            .into_iter()
            .nth(i as usize)
            .ok_or_else(|| CcvError::NoSuchPlace(crate::term::path_string(path)))?;
    }
    Ok(d)
}

/// E-depth of place `q`.
pub fn e_depth(m: &Term, q: PlaceId) -> Result<usize, CcvError> {
    let pm = places(m);
    let p = pm
        .places
        .get(q)
        .ok_or_else(|| CcvError::NoSuchPlace(format!("p{q}")))?;
    e_depth_at(m, p.path())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cps::sn::sn_translate;
    use crate::parse::t;
    use crate::target::term::tvar;

    fn junk_key(x: &Tgt, keep: &[&str]) -> String {
        x.key_with(&|n| keep.contains(&n))
    }

    #[test]
    fn hole_and_let() {
        let mut env = TildeEnv::new();
        env.tilde_of("k");
        let (q, k) = build_eval_ctx(&EvalCtx::Hole, &tvar("k"), &mut env).unwrap();
        assert!(q.is_none());
        assert_eq!(k, tvar("k"));
        let e = EvalCtx::Hole.let_arg("x", t("x y"));
        let (q, k) = build_eval_ctx(&e, &tvar("k"), &mut env).unwrap();
        let m = sn_translate(&t("x y"), &tvar("k"), &mut env).unwrap();
        assert_eq!(q.unwrap().alpha_key(), m.alpha_key());
        assert_eq!(k.alpha_key(), tlam("x", dot([tvar("k~"), m])).alpha_key());
    }

    #[test]
    fn decomposition() {
        let n = t("x y");
        let ctxs = [
            EvalCtx::Hole.app_l(t("w")),
            EvalCtx::Hole.app_r(t("\\a. a")).unwrap(),
            EvalCtx::Hole.let_arg("u", t("u u")).app_l(t("v")),
            EvalCtx::Hole.app_l(t("mu h. [h] w")).let_arg("u", t("u")),
        ];
        for e in ctxs {
            let mut env = TildeEnv::new();
            env.tilde_of("k");
            let whole = sn_translate(&e.plug(n.clone()), &tvar("k"), &mut env).unwrap();
            let (q, ke) = build_eval_ctx(&e, &tvar("k"), &mut env).unwrap();
            let inner = sn_translate(&n, &ke, &mut env).unwrap();
            let parts = dot(q.into_iter().chain([inner]));
            let keep = ["k", "k~", "x", "y", "w", "v"];
            assert_eq!(junk_key(&whole, &keep), junk_key(&parts, &keep), "{e:?}");
        }
    }

    #[test]
    fn depths() {
        assert_eq!(e_depth_at(&t("(\\y. y) z"), &[]).unwrap(), 0);
        assert_eq!(e_depth_at(&t("\\x. (\\y. y) z"), &[0]).unwrap(), 1);
        assert_eq!(e_depth_at(&t("let x = y z in (\\y. y) z"), &[0]).unwrap(), 1);
        assert_eq!(e_depth_at(&t("let x = (\\y. y) z in x"), &[1]).unwrap(), 0);
        assert_eq!(e_depth_at(&t("(x y) ((\\y. y) z)"), &[1]).unwrap(), 1);
        assert_eq!(e_depth_at(&t("x ((\\y. y) z)"), &[1]).unwrap(), 0);
        assert_eq!(e_depth_at(&t("mu k. [k] (\\y. y) z"), &[0, 0]).unwrap(), 1);
        assert!(e_depth_at(&t("x"), &[0]).is_err());
    }
}
