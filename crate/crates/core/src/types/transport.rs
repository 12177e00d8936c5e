//! Carries a source typing `Γ ⊢ M : T | Δ` over to a dot-extended target
//! typing of `⟨⟨M⟩⟩[k] : ⊥⊥` under `Γ*`, `k : T⁺`, `k̃ : ⊥⊥`.
//!
//! The target term and its derivation are built together, with private
//! names for the administrative binders; the result is then renamed onto
//! the output of [`sn_translate`]. Dead code in front of a dot always uses
//! the first member of the relevant family.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::rc::Rc;

use crate::cps::sn::binders_term;
use crate::cps::{sn_translate, top_continuation, TildeEnv};
use crate::error::CcvError;
use crate::target::term::{tvar, Tgt};
use crate::term::{Expr, Jump, Term};
use crate::types::ccv::{raw_le, sub_le, Raw, Sub, Union};
use crate::types::cderiv::{check_ccv, CcvDerivation, CcvRule};
use crate::types::strict::{neg, Inter, Sty};
use crate::types::tderiv::{TEnv, TNode, TgtDerivation};
use crate::types::translate::{plus, raw_star, sub_star};

type Cos<'a> = Rc<BTreeMap<String, Rc<KOr<'a>>>>;

/// A continuation together with enough information to type it at `¬S*`
/// for every `S` it is asked about, and to type its tilde at `⊥⊥`.
enum KOr<'a> {
    Var { k: String, kt: String },
    Let { x: String, body: Vec<&'a CcvDerivation>, outer: Rc<KOr<'a>>, path: Vec<u8>, cos: Cos<'a> },
    JLet { x: String, body: Vec<&'a CcvDerivation>, path: Vec<u8>, cos: Cos<'a> },
    /// `λz.K̃·(V* K K̃ z)`
    AppR { z: String, v: &'a CcvDerivation, row: Sub, res: Union, outer: Rc<KOr<'a>>, path: Vec<u8>, cos: Cos<'a> },
    /// `λz.K̃·⟨zM⟩[K]`
    AppL { z: String, w: String, args: Vec<&'a CcvDerivation>, fu: Union, res: Union, outer: Rc<KOr<'a>>, path: Vec<u8>, cos: Cos<'a> },
    /// `λw.K̃·(z K K̃ w)`
    AppW { z: String, w: String, row: Sub, res: Union, outer: Rc<KOr<'a>> },
    Sub { inner: Rc<KOr<'a>>, target: Union },
}

fn terr(m: impl Into<String>) -> CcvError {
    CcvError::Type(m.into())
}

fn site(prefix: &str, path: &[u8]) -> String {
    let p: Vec<String> = path.iter().map(u8::to_string).collect();
    format!("{prefix}#{}", p.join("_"))
}

fn child(path: &[u8], i: u8) -> Vec<u8> {
    let mut p = path.to_vec();
    p.push(i);
    p
}

fn union_of(d: &CcvDerivation) -> Result<&Union, CcvError> {
    d.union().ok_or_else(|| terr("expected a term premise"))
}

fn single(u: &Union) -> Result<&Sub, CcvError> {
    match u.subs() {
        [s] => Ok(s),
        _ => Err(terr("a value has a single intersection type")),
    }
}

/// Axioms `x : r*` for every raw `r` of `s`.
fn axioms(x: &str, s: &Sub) -> Vec<TNode> {
    s.raws().iter().map(|r| TNode::var(x, raw_star(r))).collect()
}

/// The domain union `∪_j S_ij` of a row `∩_j (S_ij → T)`.
fn row_domains(row: &Sub) -> Result<Vec<&Sub>, CcvError> {
    row.raws()
        .iter()
        .map(|r| match r {
            Raw::Arrow(s, _) => Ok(s),
            Raw::Atom(_) => Err(terr("function type is not an arrow")),
        })
        .collect()
}

/// The argument premise whose union is the domain union of `row`.
fn arg_for<'a>(args: &[&'a CcvDerivation], row: &Sub) -> Result<&'a CcvDerivation, CcvError> {
    let want = Union::new(row_domains(row)?.into_iter().cloned().collect())?;
    args.iter()
        .copied()
        .find(|a| a.union() == Some(&want))
        .ok_or_else(|| terr("no argument premise for a row of the function type"))
}

/// Peels subsumption off a value derivation.
fn value_base(d: &CcvDerivation) -> &CcvDerivation {
    let mut d = d;
    while d.rule == CcvRule::Sub {
        d = &d.premises[0];
    }
    d
}

fn base_sub(d: &CcvDerivation) -> Result<&Sub, CcvError> {
    single(union_of(value_base(d))?)
}

struct Builder;

impl Builder {
    fn kfam<'a>(&self, k: &KOr<'a>, t: &Union) -> Result<Vec<TNode>, CcvError> {
        t.subs().iter().map(|s| self.kderiv(k, s)).collect()
    }

    /// `f K K̃ a` with `f : T⁺→⊥⊥→¬S*` and `a` typed at the members of `S*`.
    fn app3<'a>(&self, f: TNode, k: &KOr<'a>, res: &Union, args: Vec<TNode>) -> Result<TNode, CcvError> {
        let f = TNode::app(f, self.kfam(k, res)?)?;
        let f = TNode::app(f, vec![self.tilde(k)?])?;
        TNode::app(f, args)
    }

    fn kderiv<'a>(&self, k: &KOr<'a>, s: &Sub) -> Result<TNode, CcvError> {
        let ty = neg(sub_star(s));
        match k {
            KOr::Var { k, .. } => Ok(TNode::var(k, ty)),
            KOr::Let { x, body, outer, path, cos } => {
                let b = find_body(body, x, s)?;
                let l = self.term(b, outer, &child(path, 0), cos)?;
                Ok(TNode::lam(x, sub_star(s), TNode::dot(vec![self.tilde(outer)?, l])))
            }
            KOr::JLet { x, body, path, cos } => {
                let b = find_body(body, x, s)?;
                Ok(TNode::lam(x, sub_star(s), self.jump(b, &child(path, 0), cos)?))
            }
            KOr::AppR { z, v, row, res, outer, path, cos } => {
                if !row_domains(row)?.contains(&s) {
                    return Err(terr(format!("`{s}` is not a domain of `{row}`")));
                }
                let body = self.appr_body(z, v, s, res, outer, path, cos)?;
                Ok(TNode::lam(z, sub_star(s), body))
            }
            KOr::AppL { z, w, args, fu, res, outer, path, cos } => {
                let i = fu.subs().iter().position(|r| r == s).ok_or_else(|| terr("row not in the function type"))?;
                let body = self.zm(z, w, args, &fu.subs()[i], res, outer, path, cos)?;
                Ok(TNode::lam(z, sub_star(s), TNode::dot(vec![self.tilde(outer)?, body])))
            }
            KOr::AppW { z, w, row, res, outer } => {
                if !row_domains(row)?.contains(&s) {
                    return Err(terr(format!("`{s}` is not a domain of `{row}`")));
                }
                let zw = self.zw(z, w, s, res, outer)?;
                Ok(TNode::lam(w, sub_star(s), TNode::dot(vec![self.tilde(outer)?, zw])))
            }
            KOr::Sub { inner, target } => {
                let s2 = target
                    .subs()
                    .iter()
                    .find(|s2| sub_le(s, s2))
                    .ok_or_else(|| terr(format!("`{s}` lies below no member of `{target}`")))?;
                Ok(self.kderiv(inner, s2)?.inherit(ty))
            }
        }
    }

    /// `K̃`, with the free variable of an abstraction typed by the first
    /// member of its family.
    fn tilde<'a>(&self, k: &KOr<'a>) -> Result<TNode, CcvError> {
        match k {
            KOr::Var { kt, .. } => Ok(TNode::var(kt, Sty::Bot)),
            KOr::Let { body, outer, path, cos, .. } => {
                let l = self.term(body[0], outer, &child(path, 0), cos)?;
                Ok(TNode::dot(vec![self.tilde(outer)?, l]))
            }
            KOr::JLet { body, path, cos, .. } => self.jump(body[0], &child(path, 0), cos),
            KOr::AppR { z, v, row, res, outer, path, cos } => {
                let s0 = row_domains(row)?[0];
                self.appr_body(z, v, s0, res, outer, path, cos)
            }
            KOr::AppL { z, w, args, fu, res, outer, path, cos } => {
                let body = self.zm(z, w, args, &fu.subs()[0], res, outer, path, cos)?;
                Ok(TNode::dot(vec![self.tilde(outer)?, body]))
            }
            KOr::AppW { z, w, row, res, outer } => {
                let s0 = row_domains(row)?[0];
                let zw = self.zw(z, w, s0, res, outer)?;
                Ok(TNode::dot(vec![self.tilde(outer)?, zw]))
            }
            KOr::Sub { inner, .. } => self.tilde(inner),
        }
    }

    /// `K̃·(V* K K̃ z)` with `z : S*`.
    #[allow(clippy::too_many_arguments)]
    fn appr_body<'a>(
        &self,
        z: &str,
        v: &CcvDerivation,
        s: &Sub,
        res: &Union,
        outer: &KOr<'a>,
        path: &[u8],
        cos: &Cos<'a>,
    ) -> Result<TNode, CcvError> {
        let r = Raw::Arrow(s.clone(), res.clone());
        let vf = self.value_raw(v, &r, &child(path, 0), cos)?;
        let app = self.app3(vf, outer, res, axioms(z, s))?;
        Ok(TNode::dot(vec![self.tilde(outer)?, app]))
    }

    /// `z K K̃ w` with `z : (S→T)*` and `w : S*`.
    fn zw<'a>(&self, z: &str, w: &str, s: &Sub, res: &Union, outer: &KOr<'a>) -> Result<TNode, CcvError> {
        let zt = raw_star(&Raw::Arrow(s.clone(), res.clone()));
        self.app3(TNode::var(z, zt), outer, res, axioms(w, s))
    }

    /// `⟨zM⟩[K]` with `z` typed by the row `∩_j (S_ij → T)`.
    #[allow(clippy::too_many_arguments)]
    fn zm<'a>(
        &self,
        z: &str,
        w: &str,
        args: &[&'a CcvDerivation],
        row: &Sub,
        res: &Union,
        outer: &Rc<KOr<'a>>,
        path: &[u8],
        cos: &Cos<'a>,
    ) -> Result<TNode, CcvError> {
        let arg = arg_for(args, row)?;
        let m = arg.subject_term().ok_or_else(|| terr("argument is a jump"))?;
        let doms = row_domains(row)?;
        if m.is_value() {
            let sm = base_sub(arg)?;
            let s = doms
                .iter()
                .find(|s| sub_le(sm, s))
                .ok_or_else(|| terr("value argument fits no domain"))?;
            let zt = raw_star(&Raw::Arrow((*s).clone(), res.clone()));
            let a = self.value_sub(arg, s, &child(path, 1), cos)?;
            return self.app3(TNode::var(z, zt), outer, res, a);
        }
        let front = self.zw(z, w, doms[0], res, outer)?;
        let kw = Rc::new(KOr::AppW {
            z: z.to_string(),
            w: w.to_string(),
            row: row.clone(),
            res: res.clone(),
            outer: outer.clone(),
        });
        let rest = self.term(arg, &kw, &child(path, 1), cos)?;
        Ok(TNode::dot(vec![self.tilde(outer)?, front, rest]))
    }

    /// `V*` typed at exactly `r*`, from a base raw below `r`.
    fn value_raw<'a>(&self, d: &CcvDerivation, r: &Raw, path: &[u8], cos: &Cos<'a>) -> Result<TNode, CcvError> {
        let b = value_base(d);
        let s = single(union_of(b)?)?;
        let r0 = s
            .raws()
            .iter()
            .find(|r0| raw_le(r0, r))
            .ok_or_else(|| terr(format!("no member of `{s}` lies below `{r}`")))?;
        let node = match (&b.rule, b.subject_term()) {
            (CcvRule::Var, Some(Term::Var(x))) => TNode::var(&x.0, raw_star(r0)),
            (CcvRule::Lam, Some(Term::Lam(x, _))) => self.lambda(b, &x.0, r0, path, cos)?,
            _ => return Err(terr("value derivation does not end in a variable or λ rule")),
        };
        Ok(node.inherit(raw_star(r)))
    }

    fn value_sub<'a>(&self, d: &CcvDerivation, s: &Sub, path: &[u8], cos: &Cos<'a>) -> Result<Vec<TNode>, CcvError> {
        s.raws().iter().map(|r| self.value_raw(d, r, path, cos)).collect()
    }

    /// `(λx.B)* = λk.λk̃.λx.(⟨B⟩[k]·((λx.k̃·⟨B⟩[k])x))` at `(S_i→T_i)*`.
    fn lambda<'a>(&self, d: &CcvDerivation, x: &str, r: &Raw, path: &[u8], cos: &Cos<'a>) -> Result<TNode, CcvError> {
        let Raw::Arrow(si, ti) = r else { return Err(terr("λ typed by an atom")) };
        let di = d
            .premises
            .iter()
            .find(|p| p.judgment.gamma.get(x) == Some(si) && p.union() == Some(ti))
            .ok_or_else(|| terr("no λ premise for a member of the conclusion"))?;
        let k = site("k", path);
        let kt = format!("{k}~");
        let kor = Rc::new(KOr::Var { k: k.clone(), kt: kt.clone() });
        let b = self.term(di, &kor, &child(path, 0), cos)?;
        let inner = TNode::lam(x, sub_star(si), TNode::dot(vec![TNode::var(&kt, Sty::Bot), b.clone()]));
        let second = TNode::app(inner, axioms(x, si))?;
        let body = TNode::dot(vec![b, second]);
        Ok(TNode::lam(&k, plus(ti), TNode::lam(&kt, Inter::of(Sty::Bot), TNode::lam(x, sub_star(si), body))))
    }

    fn term<'a>(&self, d: &'a CcvDerivation, k: &Rc<KOr<'a>>, path: &[u8], cos: &Cos<'a>) -> Result<TNode, CcvError> {
        let t = union_of(d)?;
        match d.rule {
            CcvRule::Sub => {
                let k2 = Rc::new(KOr::Sub { inner: k.clone(), target: t.clone() });
                self.term(&d.premises[0], &k2, path, cos)
            }
            CcvRule::Var | CcvRule::Lam => {
                let s = single(t)?;
                let kd = self.kderiv(k, s)?;
                TNode::app(kd, self.value_sub(d, s, path, cos)?)
            }
            CcvRule::App => {
                let f = &d.premises[0];
                let args: Vec<&CcvDerivation> = d.premises[1..].iter().collect();
                let fu = union_of(f)?;
                let Some(Term::App(m1, m2)) = d.subject_term() else { return Err(terr("malformed application")) };
                if m1.is_value() {
                    let sv = base_sub(f)?;
                    let row = fu
                        .subs()
                        .iter()
                        .find(|s| sub_le(sv, s))
                        .ok_or_else(|| terr("function value fits no row of its type"))?;
                    let arg = arg_for(&args, row)?;
                    if m2.is_value() {
                        let sa = base_sub(arg)?;
                        let s = row_domains(row)?
                            .into_iter()
                            .find(|s| sub_le(sa, s))
                            .ok_or_else(|| terr("value argument fits no domain"))?;
                        let vf = self.value_raw(f, &Raw::Arrow(s.clone(), t.clone()), &child(path, 0), cos)?;
                        let va = self.value_sub(arg, s, &child(path, 1), cos)?;
                        return self.app3(vf, k, t, va);
                    }
                    let z = site("z", path);
                    let s0 = row_domains(row)?[0];
                    let front = self.appr_body(&z, f, s0, t, k, path, cos)?;
                    let k2 = Rc::new(KOr::AppR {
                        z,
                        v: f,
                        row: row.clone(),
                        res: t.clone(),
                        outer: k.clone(),
                        path: path.to_vec(),
                        cos: cos.clone(),
                    });
                    let rest = self.term(arg, &k2, &child(path, 1), cos)?;
                    return Ok(TNode::dot(vec![front, rest]));
                }
                let (z, w) = (site("z", path), site("w", path));
                let front = self.zm(&z, &w, &args, &fu.subs()[0], t, k, path, cos)?;
                let k2 = Rc::new(KOr::AppL {
                    z,
                    w,
                    args,
                    fu: fu.clone(),
                    res: t.clone(),
                    outer: k.clone(),
                    path: path.to_vec(),
                    cos: cos.clone(),
                });
                let rest = self.term(f, &k2, &child(path, 0), cos)?;
                Ok(TNode::dot(vec![self.tilde(k)?, front, rest]))
            }
            CcvRule::Let => {
                let Some(Term::Let(_, x, _)) = d.subject_term() else { return Err(terr("malformed let")) };
                let body: Vec<&CcvDerivation> = d.premises[1..].iter().collect();
                let front = self.term(body[0], k, &child(path, 0), cos)?;
                let k2 = Rc::new(KOr::Let {
                    x: x.0.clone(),
                    body,
                    outer: k.clone(),
                    path: path.to_vec(),
                    cos: cos.clone(),
                });
                let rest = self.term(&d.premises[0], &k2, &child(path, 1), cos)?;
                Ok(TNode::dot(vec![front, rest]))
            }
            CcvRule::Mu => {
                let Some(Term::Mu(c, _)) = d.subject_term() else { return Err(terr("malformed μ")) };
                let mut m = (**cos).clone();
                m.insert(c.0.clone(), k.clone());
                let j = self.jump(&d.premises[0], &child(path, 0), &Rc::new(m))?;
                Ok(TNode::dot(vec![self.tilde(k)?, j]))
            }
            CcvRule::Jump | CcvRule::JumpLet => Err(terr("a jump where a term was expected")),
        }
    }

    fn jump<'a>(&self, d: &'a CcvDerivation, path: &[u8], cos: &Cos<'a>) -> Result<TNode, CcvError> {
        match (&d.rule, &d.judgment.subject) {
            (CcvRule::Jump, Expr::Jump(Jump::Jmp(c, _))) => {
                let k = cos.get(&c.0).ok_or_else(|| terr(format!("co-name `{c}` is unbound")))?;
                let m = self.term(&d.premises[0], k, &child(path, 0), cos)?;
                Ok(TNode::dot(vec![self.tilde(k)?, m]))
            }
            (CcvRule::JumpLet, Expr::Jump(Jump::JLet(_, x, _))) => {
                let body: Vec<&CcvDerivation> = d.premises[1..].iter().collect();
                let front = self.jump(body[0], &child(path, 0), cos)?;
                let k2 = Rc::new(KOr::JLet { x: x.0.clone(), body, path: path.to_vec(), cos: cos.clone() });
                let rest = self.term(&d.premises[0], &k2, &child(path, 1), cos)?;
                Ok(TNode::dot(vec![front, rest]))
            }
            _ => Err(terr("a term where a jump was expected")),
        }
    }
}

fn find_body<'a>(body: &[&'a CcvDerivation], x: &str, s: &Sub) -> Result<&'a CcvDerivation, CcvError> {
    body.iter()
        .copied()
        .find(|b| b.judgment.gamma.get(x) == Some(s))
        .ok_or_else(|| terr(format!("no body premise with `{x} : {s}`")))
}

/// Adds the type of every free variable occurrence to `env`.
fn collect_free(n: &TNode, bound: &mut Vec<String>, env: &mut BTreeMap<String, Vec<Sty>>) {
    match (&n.rule, &n.subject) {
        (crate::types::tderiv::TRule::Var, Tgt::Var(x)) if !bound.contains(x) => {
            let v = env.entry(x.clone()).or_default();
            if !v.contains(&n.ty) {
                v.push(n.ty.clone());
            }
        }
        (crate::types::tderiv::TRule::Lam, Tgt::Lam(x, _)) => {
            bound.push(x.clone());
            collect_free(&n.premises[0], bound, env);
            bound.pop();
        }
        _ => n.premises.iter().for_each(|p| collect_free(p, bound, env)),
    }
}

/// A name bijection taking `a` onto `b`, if the two have the same shape.
fn bijection(a: &Tgt, b: &Tgt, fwd: &mut HashMap<String, String>, bwd: &mut HashMap<String, String>) -> bool {
    let mut bind = |x: &str, y: &str| match (fwd.get(x), bwd.get(y)) {
        (None, None) => {
            fwd.insert(x.to_string(), y.to_string());
            bwd.insert(y.to_string(), x.to_string());
            true
        }
        (Some(y2), Some(x2)) => y2 == y && x2 == x,
        _ => false,
    };
    match (a, b) {
        (Tgt::Var(x), Tgt::Var(y)) => bind(x, y),
        (Tgt::Lam(x, p), Tgt::Lam(y, q)) => bind(x, y) && bijection(p, q, fwd, bwd),
        (Tgt::App(f, p), Tgt::App(g, q)) => bijection(f, g, fwd, bwd) && bijection(p, q, fwd, bwd),
        (Tgt::Dot(ps), Tgt::Dot(qs)) => {
            ps.len() == qs.len() && ps.iter().zip(qs).all(|(p, q)| bijection(p, q, fwd, bwd))
        }
        _ => false,
    }
}

/// Requires binders that are pairwise distinct and distinct from the free
/// names, so that every name has one meaning throughout the derivation.
fn check_binders(m: &Term) -> Result<(), CcvError> {
    let mut bs = Vec::new();
    binders_term(m, &mut bs);
    let fv = m.free_names();
    let mut seen: HashSet<String> = fv.vars.iter().map(|x| x.0.clone()).collect();
    seen.extend(fv.conames.iter().map(|k| k.0.clone()));
    for b in bs {
        if !seen.insert(b.clone()) {
            return Err(terr(format!("binder `{b}` is not distinct; rename the subject apart first")));
        }
    }
    Ok(())
}

/// From a valid derivation of `Γ ⊢ M : T | Δ`, a derivation of
/// `⟨⟨M⟩⟩[k] : ⊥⊥` in the sortless system with the dot rule, under `Γ*`,
/// `l : U⁺, l̃ : ⊥⊥` for `l : U` in `Δ`, `k : T⁺`, `k̃ : ⊥⊥` and the dead-code
/// variables in front of dots.
pub fn transport_aei16(d: &CcvDerivation) -> Result<TgtDerivation, CcvError> {
    check_ccv(d)?;
    let m = d.subject_term().ok_or_else(|| terr("transport expects a term derivation"))?;
    let t = union_of(d)?;
    check_binders(m)?;
    let top = top_continuation(&[m]);
    let top_t = format!("{top}~");
    let mine_k = "top#".to_string();
    let mine_kt = "top#~".to_string();

    let mut cos = BTreeMap::new();
    let mut env: BTreeMap<String, Vec<Sty>> = BTreeMap::new();
    for (x, s) in &d.judgment.gamma {
        env.insert(x.clone(), sub_star(s).members().to_vec());
    }
    for (l, u) in &d.judgment.delta {
        cos.insert(l.clone(), Rc::new(KOr::Var { k: l.clone(), kt: format!("{l}~") }));
        env.insert(l.clone(), plus(u).members().to_vec());
        env.insert(format!("{l}~"), vec![Sty::Bot]);
    }
    env.insert(mine_k.clone(), plus(t).members().to_vec());
    env.insert(mine_kt.clone(), vec![Sty::Bot]);

    let k = Rc::new(KOr::Var { k: mine_k.clone(), kt: mine_kt.clone() });
    let root = Builder.term(d, &k, &[], &Rc::new(cos))?;
    collect_free(&root, &mut Vec::new(), &mut env);

    let mut tenv = TildeEnv::new();
    tenv.tilde_of(&top);
    for l in d.judgment.delta.keys() {
        tenv.tilde_of(l);
    }
    let reference = sn_translate(m, &tvar(&top), &mut tenv)?.flatten();
    let mut fwd = HashMap::from([(mine_k.clone(), top.clone()), (mine_kt.clone(), top_t.clone())]);
    let mut bwd = HashMap::from([(top.clone(), mine_k), (top_t, mine_kt)]);
    if !bijection(&root.subject, &reference, &mut fwd, &mut bwd) {
        return Err(terr(format!("transported subject `{}` does not match `{reference}`", root.subject)));
    }
    let rename = |x: &str| fwd.get(x).cloned().unwrap_or_else(|| x.to_string());
    let root = root.rename(&rename);
    let mut out = TEnv::new();
    for (x, v) in env {
        if !fwd.contains_key(&x) && bwd.contains_key(&x) {
            continue;
        }
        let t = Inter::new(v)?;
        let key = rename(&x);
        let merged = match out.get(&key) {
            Some(t0) => t0.meet_set(&t),
            None => t,
        };
        out.insert(key, merged);
    }
    Ok(TgtDerivation { env: out, root })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::tg;
    use crate::types::ccv::Sub;
    use crate::types::cderiv::{Delta, Gamma};
    use crate::types::tderiv::check_tgt;

    fn g(pairs: &[(&str, &str)]) -> Gamma {
        pairs.iter().map(|(x, s)| (x.to_string(), Sub::parse(s).unwrap())).collect()
    }

    fn run(d: &CcvDerivation) -> TgtDerivation {
        let out = transport_aei16(d).unwrap();
        if let Err(e) = check_tgt(&out, true) {
            panic!("{e}\n{}", serde_json::to_string_pretty(&out.to_json()).unwrap());
        }
        out
    }

    #[test]
    fn variable_gives_one_application() {
        let d = CcvDerivation::var(&g(&[("x", "a")]), &Delta::new(), "x").unwrap();
        let out = run(&d);
        assert_eq!(out.root.subject.alpha_key(), tg("k x").alpha_key());
        assert_eq!(out.env["k"].to_string(), "a -> bot");
        assert_eq!(out.env["x"].to_string(), "a");
    }

    #[test]
    fn application_of_values_reverses_arguments() {
        let gamma = g(&[("x", "a -> b"), ("y", "a")]);
        let f = CcvDerivation::var(&gamma, &Delta::new(), "x").unwrap();
        let a = CcvDerivation::var(&gamma, &Delta::new(), "y").unwrap();
        let d = CcvDerivation::app(f, vec![a]).unwrap();
        let out = run(&d);
        assert_eq!(out.root.subject, tg("x k k~ y"));
    }

    #[test]
    fn mu_uses_the_dot_rule() {
        let gamma = g(&[("x", "a")]);
        let x = CcvDerivation::var(&gamma, &Delta::new(), "x").unwrap();
        let d = CcvDerivation::mu("h", CcvDerivation::jump("h", x).unwrap()).unwrap();
        let out = run(&d);
        assert_eq!(out.root.subject.alpha_key(), tg("k~ . k~ . k x").alpha_key());
        assert_eq!(out.root.rule, crate::types::tderiv::TRule::Dot);
    }

    #[test]
    fn shared_binders_are_refused() {
        let id = |s: &str| {
            let x = CcvDerivation::var(&g(&[("x", s)]), &Delta::new(), "x").unwrap();
            CcvDerivation::lam("x", vec![x]).unwrap()
        };
        let d = CcvDerivation::app(id("a -> a"), vec![id("a")]).unwrap();
        check_ccv(&d).unwrap();
        assert!(transport_aei16(&d).is_err());
    }

    #[test]
    fn every_fixture_transports() {
        use crate::reduce::{is_sn, RuleSet};
        use crate::target::reduce::perpetual_sn;
        for (name, d) in crate::types::fixtures::ccv_fixtures().unwrap() {
            let out = transport_aei16(&d).unwrap_or_else(|e| panic!("{name}: {e}"));
            if let Err(e) = check_tgt(&out, true) {
                panic!("{name}: {e}");
            }
            let m = d.subject_term().unwrap();
            assert!(is_sn(m, RuleSet::ALL, 20_000).unwrap().is_sn(), "{name}");
            assert!(perpetual_sn(&out.root.subject, 100_000, 100_000).is_some(), "{name}");
        }
    }
}
