//! Derivations `Γ ⊢ M : T | Δ` of the union-intersection system, with
//! constructors that compute conclusions from premises and a checker that
//! validates every node.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::CcvError;
use crate::name::{CoName, Name};
use crate::parse::parse_expr;
use crate::term::{Expr, Jump, Term};
use crate::types::ccv::{union_le, CcvType, Raw, Sub, Union};
use crate::types::tderiv::DerivError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CcvRule {
    Var,
    Lam,
    App,
    Let,
    Mu,
    Jump,
    JumpLet,
    Sub,
}

impl CcvRule {
    pub fn name(self) -> &'static str {
        match self {
            CcvRule::Var => "var",
            CcvRule::Lam => "lam",
            CcvRule::App => "app",
            CcvRule::Let => "let",
            CcvRule::Mu => "mu",
            CcvRule::Jump => "jump",
            CcvRule::JumpLet => "jump-let",
            CcvRule::Sub => "sub",
        }
    }

    fn parse(s: &str) -> Result<CcvRule, CcvError> {
        Ok(match s {
            "var" => CcvRule::Var,
            "lam" => CcvRule::Lam,
            "app" => CcvRule::App,
            "let" => CcvRule::Let,
            "mu" => CcvRule::Mu,
            "jump" => CcvRule::Jump,
            "jump-let" => CcvRule::JumpLet,
            "sub" => CcvRule::Sub,
            _ => return Err(CcvError::Json(format!("unknown rule `{s}`"))),
        })
    }
}

pub type Gamma = BTreeMap<String, Sub>;
pub type Delta = BTreeMap<String, Union>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CcvJudgment {
    pub gamma: Gamma,
    pub delta: Delta,
    pub subject: Expr,
    pub ty: CcvType,
}

/// Premise order: `lam` the family; `app` the function, then one argument
/// premise per member of its union; `let`/`jump-let` the bound term, then
/// one body premise per member of its union; `mu`, `jump`, `sub` one premise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CcvDerivation {
    pub rule: CcvRule,
    pub judgment: CcvJudgment,
    pub premises: Vec<CcvDerivation>,
}

fn terr(m: impl Into<String>) -> CcvError {
    CcvError::Type(m.into())
}

impl CcvDerivation {
    pub fn subject_term(&self) -> Option<&Term> {
        match &self.judgment.subject {
            Expr::Term(t) => Some(t),
            Expr::Jump(_) => None,
        }
    }

    pub fn union(&self) -> Option<&Union> {
        self.judgment.ty.as_union()
    }

    pub fn var(gamma: &Gamma, delta: &Delta, x: &str) -> Result<CcvDerivation, CcvError> {
        let s = gamma.get(x).ok_or_else(|| terr(format!("`{x}` is not in Γ")))?;
        Ok(CcvDerivation {
            rule: CcvRule::Var,
            judgment: CcvJudgment {
                gamma: gamma.clone(),
                delta: delta.clone(),
                subject: Expr::Term(Term::Var(Name::new(x))),
                ty: CcvType::Union(Union::of(s.clone())),
            },
            premises: vec![],
        })
    }

    /// `λx.M : ∩(S_i→T_i)` from premises typing `M` under `x : S_i`.
    pub fn lam(x: &str, family: Vec<CcvDerivation>) -> Result<CcvDerivation, CcvError> {
        let first = family.first().ok_or_else(|| terr("empty λ family"))?;
        let m = first.subject_term().ok_or_else(|| terr("λ body is a jump"))?.clone();
        let mut gamma = first.judgment.gamma.clone();
        gamma.remove(x);
        let mut raws = Vec::new();
        for p in &family {
            let s = p.judgment.gamma.get(x).ok_or_else(|| terr(format!("`{x}` missing in premise")))?;
            let t = p.union().ok_or_else(|| terr("λ premise has the jump type"))?;
            raws.push(Raw::Arrow(s.clone(), t.clone()));
        }
        Ok(CcvDerivation {
            rule: CcvRule::Lam,
            judgment: CcvJudgment {
                gamma,
                delta: first.judgment.delta.clone(),
                subject: Expr::Term(Term::Lam(Name::new(x), Box::new(m))),
                ty: CcvType::Union(Union::of(Sub::new(raws)?)),
            },
            premises: family,
        })
    }

    pub fn app(f: CcvDerivation, args: Vec<CcvDerivation>) -> Result<CcvDerivation, CcvError> {
        let u = f.union().ok_or_else(|| terr("function has the jump type"))?;
        let t = match u.subs().first().and_then(|s| s.raws().first()) {
            Some(Raw::Arrow(_, t)) => t.clone(),
            _ => return Err(terr("function type is not an arrow")),
        };
        let m = f.subject_term().ok_or_else(|| terr("function is a jump"))?.clone();
        let n = args
            .first()
            .and_then(|a| a.subject_term())
            .ok_or_else(|| terr("missing argument"))?
            .clone();
        Ok(CcvDerivation {
            rule: CcvRule::App,
            judgment: CcvJudgment {
                gamma: f.judgment.gamma.clone(),
                delta: f.judgment.delta.clone(),
                subject: Expr::Term(Term::App(Box::new(m), Box::new(n))),
                ty: CcvType::Union(t),
            },
            premises: std::iter::once(f).chain(args).collect(),
        })
    }

    /// `let x = N in M`, or the jump-level form when the body premises type
    /// a jump.
    pub fn let_(x: &str, arg: CcvDerivation, body: Vec<CcvDerivation>) -> Result<CcvDerivation, CcvError> {
        let first = body.first().ok_or_else(|| terr("empty let family"))?;
        let n = arg.subject_term().ok_or_else(|| terr("bound expression is a jump"))?.clone();
        let (rule, subject) = match &first.judgment.subject {
            Expr::Term(m) => (CcvRule::Let, Expr::Term(Term::Let(Box::new(m.clone()), Name::new(x), Box::new(n)))),
            Expr::Jump(j) => (CcvRule::JumpLet, Expr::Jump(Jump::JLet(Box::new(j.clone()), Name::new(x), Box::new(n)))),
        };
        Ok(CcvDerivation {
            rule,
            judgment: CcvJudgment {
                gamma: arg.judgment.gamma.clone(),
                delta: arg.judgment.delta.clone(),
                subject,
                ty: first.judgment.ty.clone(),
            },
            premises: std::iter::once(arg).chain(body).collect(),
        })
    }

    pub fn mu(k: &str, j: CcvDerivation) -> Result<CcvDerivation, CcvError> {
        let Expr::Jump(body) = &j.judgment.subject else {
            return Err(terr("μ body is not a jump"));
        };
        let mut delta = j.judgment.delta.clone();
        let t = delta.remove(k).ok_or_else(|| terr(format!("`{k}` missing in Δ")))?;
        Ok(CcvDerivation {
            rule: CcvRule::Mu,
            judgment: CcvJudgment {
                gamma: j.judgment.gamma.clone(),
                delta,
                subject: Expr::Term(Term::Mu(CoName::new(k), Box::new(body.clone()))),
                ty: CcvType::Union(t),
            },
            premises: vec![j],
        })
    }

    /// `[k]M`, adding `k : T` to Δ when absent.
    pub fn jump(k: &str, m: CcvDerivation) -> Result<CcvDerivation, CcvError> {
        let t = m.union().ok_or_else(|| terr("jump body has the jump type"))?.clone();
        let body = m.subject_term().ok_or_else(|| terr("jump body is a jump"))?.clone();
        let mut m = m;
        if !m.judgment.delta.contains_key(k) {
            m = m.with_coname(k, &t);
        }
        Ok(CcvDerivation {
            rule: CcvRule::Jump,
            judgment: CcvJudgment {
                gamma: m.judgment.gamma.clone(),
                delta: m.judgment.delta.clone(),
                subject: Expr::Jump(Jump::Jmp(CoName::new(k), Box::new(body))),
                ty: CcvType::Bot,
            },
            premises: vec![m],
        })
    }

    pub fn sub(self, to: Union) -> CcvDerivation {
        CcvDerivation {
            rule: CcvRule::Sub,
            judgment: CcvJudgment { ty: CcvType::Union(to), ..self.judgment.clone() },
            premises: vec![self],
        }
    }

    /// Adds `k : T` to Δ throughout, except under binders of `k`.
    pub fn with_coname(&self, k: &str, t: &Union) -> CcvDerivation {
        let mut d = self.clone();
        d.judgment.delta.insert(k.to_string(), t.clone());
        let shadow = matches!(&d.judgment.subject, Expr::Term(Term::Mu(k2, _)) if k2.0 == k);
        if !shadow {
            d.premises = d.premises.iter().map(|p| p.with_coname(k, t)).collect();
        }
        d
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(CcvDerivation::size).sum::<usize>()
    }
}

struct Check<'p> {
    path: &'p [usize],
    rule: CcvRule,
}

impl Check<'_> {
    fn err(&self, m: impl Into<String>) -> DerivError {
        DerivError { path: self.path.to_vec(), rule: self.rule.name().to_string(), reason: m.into() }
    }
}

fn same_env(a: &CcvJudgment, b: &CcvJudgment) -> bool {
    a.gamma == b.gamma && a.delta == b.delta
}

fn sorted<T: Ord + Clone>(v: &[T]) -> Vec<T> {
    let mut v = v.to_vec();
    v.sort();
    v
}

/// Validates every node; the error names the first offending node.
pub fn check_ccv(d: &CcvDerivation) -> Result<(), DerivError> {
    check_at(d, &mut Vec::new())
}

fn check_at(d: &CcvDerivation, path: &mut Vec<usize>) -> Result<(), DerivError> {
    let c = Check { path, rule: d.rule };
    let j = &d.judgment;
    let ps = &d.premises;
    let arity = |k: usize| {
        if ps.len() == k {
            Ok(())
        } else {
            Err(c.err(format!("expected {k} premises, found {}", ps.len())))
        }
    };
    let term_ty = || j.ty.as_union().ok_or_else(|| c.err("a term is typed by a union type"));
    match d.rule {
        CcvRule::Var => {
            arity(0)?;
            let Expr::Term(Term::Var(x)) = &j.subject else { return Err(c.err("subject is not a variable")) };
            let s = j.gamma.get(&x.0).ok_or_else(|| c.err(format!("`{x}` is not in Γ")))?;
            if *term_ty()? != Union::of(s.clone()) {
                return Err(c.err(format!("axiom gives `{x}` the type `{s}`")));
            }
        }
        CcvRule::Lam => {
            let Expr::Term(Term::Lam(x, m)) = &j.subject else { return Err(c.err("subject is not an abstraction")) };
            let u = term_ty()?;
            let [s] = u.subs() else { return Err(c.err("an abstraction has a single intersection type")) };
            if ps.is_empty() {
                return Err(c.err("empty family"));
            }
            let mut raws = Vec::new();
            for p in ps {
                if p.judgment.subject != Expr::Term((**m).clone()) {
                    return Err(c.err("premise subject is not the body"));
                }
                let si = p.judgment.gamma.get(&x.0).ok_or_else(|| c.err(format!("premise lacks `{x}`")))?;
                let mut g = j.gamma.clone();
                g.insert(x.0.clone(), si.clone());
                if g != p.judgment.gamma || p.judgment.delta != j.delta {
                    return Err(c.err("premise environment is not Γ, x:S_i | Δ"));
                }
                let ti = p.union().ok_or_else(|| c.err("premise has the jump type"))?;
                raws.push(Raw::Arrow(si.clone(), ti.clone()));
            }
            if sorted(&raws) != s.raws() {
                return Err(c.err("conclusion is not the intersection of the premise arrows"));
            }
        }
        CcvRule::App => {
            let Expr::Term(Term::App(m, n)) = &j.subject else { return Err(c.err("subject is not an application")) };
            let t = term_ty()?;
            if ps.len() < 2 {
                return Err(c.err("needs a function premise and an argument family"));
            }
            let f = &ps[0];
            if f.judgment.subject != Expr::Term((**m).clone()) || !same_env(&f.judgment, j) {
                return Err(c.err("function premise does not match"));
            }
            let fu = f.union().ok_or_else(|| c.err("function premise has the jump type"))?;
            let mut wanted = Vec::new();
            for s in fu.subs() {
                let mut doms = Vec::new();
                for r in s.raws() {
                    match r {
                        Raw::Arrow(sij, ti) if ti == t => doms.push(sij.clone()),
                        _ => return Err(c.err(format!("`{r}` is not an arrow into `{t}`"))),
                    }
                }
                wanted.push(Union::new(doms).map_err(|e| c.err(e.to_string()))?);
            }
            let mut got = Vec::new();
            for a in &ps[1..] {
                if a.judgment.subject != Expr::Term((**n).clone()) || !same_env(&a.judgment, j) {
                    return Err(c.err("argument premise does not match"));
                }
                got.push(a.union().ok_or_else(|| c.err("argument premise has the jump type"))?.clone());
            }
            if sorted(&wanted) != sorted(&got) {
                return Err(c.err("argument family does not match the index sets of the function type"));
            }
        }
        CcvRule::Let | CcvRule::JumpLet => {
            let (body, x, n) = match (&j.subject, d.rule) {
                (Expr::Term(Term::Let(b, x, n)), CcvRule::Let) => (Expr::Term((**b).clone()), x, n),
                (Expr::Jump(Jump::JLet(b, x, n)), CcvRule::JumpLet) => (Expr::Jump((**b).clone()), x, n),
                _ => return Err(c.err("subject does not fit the rule")),
            };
            if d.rule == CcvRule::Let {
                term_ty()?;
            } else if j.ty != CcvType::Bot {
                return Err(c.err("a jump has the jump type"));
            }
            if ps.len() < 2 {
                return Err(c.err("needs a bound-term premise and a body family"));
            }
            let a = &ps[0];
            if a.judgment.subject != Expr::Term((**n).clone()) || !same_env(&a.judgment, j) {
                return Err(c.err("bound-term premise does not match"));
            }
            let au = a.union().ok_or_else(|| c.err("bound term has the jump type"))?;
            let mut got = Vec::new();
            for p in &ps[1..] {
                if p.judgment.subject != body || p.judgment.ty != j.ty || p.judgment.delta != j.delta {
                    return Err(c.err("body premise does not match"));
                }
                let si = p.judgment.gamma.get(&x.0).ok_or_else(|| c.err(format!("body premise lacks `{x}`")))?;
                let mut g = j.gamma.clone();
                g.insert(x.0.clone(), si.clone());
                if g != p.judgment.gamma {
                    return Err(c.err("body environment is not Γ, x:S_i"));
                }
                got.push(si.clone());
            }
            if sorted(&got) != au.subs() {
                return Err(c.err("body family does not match the union of the bound term"));
            }
        }
        CcvRule::Mu => {
            arity(1)?;
            let Expr::Term(Term::Mu(k, body)) = &j.subject else { return Err(c.err("subject is not a μ")) };
            let t = term_ty()?;
            let p = &ps[0];
            let mut delta = j.delta.clone();
            delta.insert(k.0.clone(), t.clone());
            if p.judgment.subject != Expr::Jump((**body).clone())
                || p.judgment.ty != CcvType::Bot
                || p.judgment.gamma != j.gamma
                || p.judgment.delta != delta
            {
                return Err(c.err("premise is not J : bot | Δ, k:T"));
            }
        }
        CcvRule::Jump => {
            arity(1)?;
            let Expr::Jump(Jump::Jmp(k, m)) = &j.subject else { return Err(c.err("subject is not a jump")) };
            if j.ty != CcvType::Bot {
                return Err(c.err("a jump has the jump type"));
            }
            let t = j.delta.get(&k.0).ok_or_else(|| c.err(format!("`{k}` is not in Δ")))?;
            let p = &ps[0];
            if p.judgment.subject != Expr::Term((**m).clone()) || !same_env(&p.judgment, j) || p.union() != Some(t) {
                return Err(c.err("premise is not M : T with k : T in Δ"));
            }
        }
        CcvRule::Sub => {
            arity(1)?;
            let t2 = term_ty()?;
            let p = &ps[0];
            if p.judgment.subject != j.subject || !same_env(&p.judgment, j) {
                return Err(c.err("subsumption changes subject or environment"));
            }
            let t1 = p.union().ok_or_else(|| c.err("premise has the jump type"))?;
            if !union_le(t1, t2) {
                return Err(c.err(format!("`{t1}` is not a subtype of `{t2}`")));
            }
        }
    }
    for (i, p) in ps.iter().enumerate() {
        path.push(i);
        let r = check_at(p, path);
        path.pop();
        r?;
    }
    Ok(())
}

fn gamma_json(g: &Gamma) -> Value {
    Value::Object(g.iter().map(|(k, v)| (k.clone(), Value::String(v.to_string()))).collect())
}

fn delta_json(d: &Delta) -> Value {
    Value::Object(d.iter().map(|(k, v)| (k.clone(), Value::String(v.to_string()))).collect())
}

impl CcvDerivation {
    pub fn to_json(&self) -> Value {
        let j = &self.judgment;
        let subject = match &j.subject {
            Expr::Term(t) => t.to_string(),
            Expr::Jump(x) => x.to_string(),
        };
        let indices: Vec<usize> = (0..self.premises.len()).collect();
        json!({
            "rule": self.rule.name(),
            "judgment": {
                "gamma": gamma_json(&j.gamma),
                "delta": delta_json(&j.delta),
                "subject": subject,
                "type": j.ty.to_string(),
            },
            "premises": self.premises.iter().map(CcvDerivation::to_json).collect::<Vec<_>>(),
            "indices": indices,
        })
    }

    pub fn from_json(v: &Value) -> Result<CcvDerivation, CcvError> {
        let miss = |k: &str| CcvError::Json(format!("missing `{k}`"));
        let rule = CcvRule::parse(v.get("rule").and_then(Value::as_str).ok_or_else(|| miss("rule"))?)?;
        let j = v.get("judgment").ok_or_else(|| miss("judgment"))?;
        let mut gamma = Gamma::new();
        if let Some(o) = j.get("gamma").and_then(Value::as_object) {
            for (k, t) in o {
                gamma.insert(k.clone(), Sub::parse(t.as_str().ok_or_else(|| miss("gamma type"))?)?);
            }
        }
        let mut delta = Delta::new();
        if let Some(o) = j.get("delta").and_then(Value::as_object) {
            for (k, t) in o {
                delta.insert(k.clone(), Union::parse(t.as_str().ok_or_else(|| miss("delta type"))?)?);
            }
        }
        let subject = parse_expr(j.get("subject").and_then(Value::as_str).ok_or_else(|| miss("subject"))?)?;
        let ty = CcvType::parse(j.get("type").and_then(Value::as_str).ok_or_else(|| miss("type"))?)?;
        let premises = v
            .get("premises")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
            .map(CcvDerivation::from_json)
            .collect::<Result<_, _>>()?;
        Ok(CcvDerivation { rule, judgment: CcvJudgment { gamma, delta, subject, ty }, premises })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::ccv::atom;

    fn g(pairs: &[(&str, &str)]) -> Gamma {
        pairs.iter().map(|(x, t)| (x.to_string(), Sub::parse(t).unwrap())).collect()
    }

    #[test]
    fn axiom() {
        let d = CcvDerivation::var(&g(&[("x", "a & b"), ("y", "c")]), &Delta::new(), "x").unwrap();
        check_ccv(&d).unwrap();
        assert_eq!(d.judgment.ty.to_string(), "a & b");
    }

    #[test]
    fn identity_from_one_lambda_instance() {
        let p = CcvDerivation::var(&g(&[("x", "a")]), &Delta::new(), "x").unwrap();
        let d = CcvDerivation::lam("x", vec![p]).unwrap();
        check_ccv(&d).unwrap();
        assert!(d.judgment.gamma.is_empty());
        assert_eq!(d.judgment.ty.to_string(), "a -> a");
    }

    #[test]
    fn application_with_mismatched_index_sets_is_rejected() {
        let gm = g(&[("f", "(a -> c) & (b -> c)"), ("y", "a & b")]);
        let f = CcvDerivation::var(&gm, &Delta::new(), "f").unwrap();
        let y = CcvDerivation::var(&gm, &Delta::new(), "y").unwrap();
        // the argument must be typed at a | b, a single family member
        let ya = y.clone().sub(Union::parse("a | b").unwrap());
        let ok = CcvDerivation::app(f.clone(), vec![ya]).unwrap();
        check_ccv(&ok).unwrap();
        let bad = CcvDerivation::app(f, vec![y.clone(), y]).unwrap();
        let e = check_ccv(&bad).unwrap_err();
        assert_eq!(e.path, Vec::<usize>::new());
        assert_eq!(e.rule, "app");
    }

    #[test]
    fn subsumption_checks_the_side_condition() {
        let gm = g(&[("x", "a")]);
        let x = CcvDerivation::var(&gm, &Delta::new(), "x").unwrap();
        check_ccv(&x.clone().sub(Union::parse("a | b").unwrap())).unwrap();
        let e = check_ccv(&x.sub(Union::parse("b").unwrap())).unwrap_err();
        assert_eq!(e.rule, "sub");
    }

    #[test]
    fn mu_and_jump() {
        let gm = g(&[("x", "a")]);
        let x = CcvDerivation::var(&gm, &Delta::new(), "x").unwrap();
        let j = CcvDerivation::jump("k", x).unwrap();
        let m = CcvDerivation::mu("k", j).unwrap();
        check_ccv(&m).unwrap();
        assert_eq!(m.judgment.ty, CcvType::Union(Union::raw(atom("a"))));
        assert_eq!(CcvDerivation::from_json(&m.to_json()).unwrap(), m);
    }

    #[test]
    fn errors_point_at_the_first_bad_node() {
        let gm = g(&[("x", "a")]);
        let x = CcvDerivation::var(&gm, &Delta::new(), "x").unwrap();
        let mut d = CcvDerivation::lam("x", vec![x]).unwrap();
        d.premises[0].judgment.ty = CcvType::parse("b").unwrap();
        let e = check_ccv(&d).unwrap_err();
        assert_eq!(e.path, Vec::<usize>::new());
        d.judgment.ty = CcvType::parse("a -> b").unwrap();
        let e = check_ccv(&d).unwrap_err();
        assert_eq!(e.path, vec![0]);
        assert_eq!(e.rule, "var");
    }
}
