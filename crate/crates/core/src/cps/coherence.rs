//! Corpus-level properties of the translations.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::canon::{canonicalize, rename_apart_avoiding, representatives};
use crate::cps::sn::{sn_translate, sn_translate_jump, top_continuation, TildeEnv};
use crate::cps::translate::{colon, cps_colon, cps_standard, cps_standard_mod, Std};
use crate::error::CcvError;
use crate::name::{CoName, Fresh, Name};
use crate::subst::subst_jump_context_raw;
use crate::target::reach::{reach, Pattern, DEFAULT_NODE_CAP};
use crate::target::reduce::joinable;
use crate::target::term::{dot, tlam, tvar, Tgt};
use crate::term::{Expr, Jump, Term};

/// α-key with every free variable outside `keep` replaced by one anonymous
/// variable. Such variables are let-binders exposed by garbage copies.
fn key_keeping(t: &Tgt, keep: &BTreeSet<String>) -> String {
    let sub: HashMap<String, Tgt> = t
        .free_vars()
        .into_iter()
        .filter(|x| !keep.contains(x))
        .map(|x| (x, tvar("?")))
        .collect();
    t.subst(&sub).alpha_key()
}

fn free_names(m: &Term) -> BTreeSet<String> {
    let fv = m.free_names();
    fv.vars.iter().map(|x| x.0.clone()).chain(fv.conames.iter().map(|k| k.0.clone())).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoherenceReport {
    pub representatives: usize,
    pub sn_translate: bool,
    pub colon: bool,
    pub standard: bool,
    /// Raw-representative standard translations are βη-joinable with the
    /// canonical one.
    pub standard_raw_joinable: bool,
    pub canonical_idempotent: bool,
    pub canonical_constant: bool,
}

impl CoherenceReport {
    pub fn holds(&self) -> bool {
        self.sn_translate
            && self.colon
            && self.standard
            && self.standard_raw_joinable
            && self.canonical_idempotent
            && self.canonical_constant
    }
}

/// Translates every representative of `m` and compares the results.
pub fn coherence(m: &Term, cap: usize, fuel: usize) -> Result<CoherenceReport, CcvError> {
    let c = canonicalize(m)?;
    let reps = representatives(m, cap)?;
    let k = top_continuation(&reps.iter().collect::<Vec<_>>());
    let mut keep = free_names(m);
    keep.insert(k.clone());
    let mut env = TildeEnv::new();
    for x in keep.clone() {
        keep.insert(env.tilde_of(&x));
    }
    let sn_key = |r: &Term, env: &mut TildeEnv| {
        sn_translate(r, &tvar(&k), env).map(|t| key_keeping(&t, &keep))
    };
    let colon_key = |r: &Term| key_keeping(&colon(r, &tvar(&k)), &keep);
    let std_canon = cps_standard(&c);
    let sn0 = sn_key(&c, &mut env)?;
    let colon0 = colon_key(&c);
    let mut rep = CoherenceReport {
        representatives: reps.len(),
        sn_translate: true,
        colon: true,
        standard: true,
        standard_raw_joinable: true,
        canonical_idempotent: canonicalize(&c)?.alpha_key() == c.alpha_key(),
        canonical_constant: true,
    };
    for r in &reps {
        rep.sn_translate &= sn_key(r, &mut env)? == sn0;
        rep.colon &= colon_key(r) == colon0;
        rep.standard &= cps_standard(&canonicalize(r)?).alpha_key() == std_canon.alpha_key();
        rep.canonical_constant &= canonicalize(r)?.alpha_key() == c.alpha_key();
        rep.standard_raw_joinable &= joinable(&Std::raw(r), &std_canon, fuel);
    }
    Ok(rep)
}

/// `⟨⟨M⟩⟩[k]{K/k, K̃/k̃}` against `⟨⟨M⟩⟩[K]` for `K = λv. k0 v` with a fresh
/// top continuation `k0`.
pub fn substitution_coherent(m: &Term) -> Result<bool, CcvError> {
    let k = top_continuation(&[m]);
    let k0 = format!("{k}0");
    let v = "v0";
    let kk = tlam(v, Tgt::App(Box::new(tvar(&k0)), Box::new(tvar(v))));
    let mut env = TildeEnv::new();
    let kt = env.tilde_of(&k);
    env.tilde_of(&k0);
    let at_k = sn_translate(m, &tvar(&k), &mut env)?;
    let at_kk = sn_translate(m, &kk, &mut env)?;
    let mut sub = std::collections::HashMap::new();
    sub.insert(k.clone(), kk.clone());
    sub.insert(kt, crate::cps::sn::tilde(&kk, &env)?);
    let mut keep = free_names(m);
    keep.extend([k0.clone(), format!("{k0}~")]);
    for x in free_names(m) {
        keep.insert(env.tilde_of(&x));
    }
    Ok(key_keeping(&at_k.subst(&sub), &keep) == key_keeping(&at_kk, &keep))
}

/// For a non-value `M`, `k̃` occurs free in `⟨⟨M⟩⟩[k]`. Values translate to
/// `K V*`, so they are vacuously accepted.
pub fn tilde_occurs(m: &Term) -> Result<bool, CcvError> {
    if m.is_value() {
        return Ok(true);
    }
    let k = top_continuation(&[m]);
    let mut env = TildeEnv::new();
    let kt = env.tilde_of(&k);
    let t = sn_translate(m, &tvar(&k), &mut env)?;
    Ok(t.occurs_free(&kt))
}

/// `⟨⟨J⟩⟩θ = ⟨⟨J{[k]□ ↦ [k] let x = □ in M}⟩⟩θ₀` where `Q = ⟨⟨M⟩⟩[K]`,
/// `θ₀ = {K/k, K̃/k̃}` and `θ = {λx.K̃·Q / k, K̃·Q / k̃}`, for a fresh
/// continuation variable `K`.
pub fn context_substitution_coherent(
    j: &Jump,
    k: &CoName,
    x: &Name,
    m: &Term,
) -> Result<bool, CcvError> {
    let mut avoid: HashSet<String> = m.all_names().into_iter().collect();
    avoid.insert(x.0.clone());
    let Expr::Jump(j) = rename_apart_avoiding(&Expr::Jump(j.clone()), &avoid) else {
        unreachable!()
    };
    let j = &j;
    let mut fresh = Fresh::avoiding(j.all_names().into_iter().chain(m.all_names()));
    fresh.reserve(x.0.clone());
    fresh.reserve(k.0.clone());
    let k0 = fresh.name("k0");
    let mut env = TildeEnv::new();
    let kt = env.tilde_of(&k.0);
    let k0t = env.tilde_of(&k0);
    let q = sn_translate(m, &tvar(&k0), &mut env)?;
    let lhs_raw = sn_translate_jump(j, &mut env)?;
    let j2 = subst_jump_context_raw(j, k, x, m);
    let rhs_raw = sn_translate_jump(&j2, &mut env)?;
    let theta: HashMap<String, Tgt> = [
        (k.0.clone(), tlam(&x.0, dot([tvar(&k0t), q.clone()]))),
        (kt.clone(), dot([tvar(&k0t), q])),
    ]
    .into();
    let theta0: HashMap<String, Tgt> = [(k.0.clone(), tvar(&k0)), (kt, tvar(&k0t))].into();
    let mut keep: BTreeSet<String> = [k0, k0t].into();
    for n in j.free_names().vars.iter().chain(m.free_names().vars.iter()) {
        keep.insert(n.0.clone());
    }
    for c in j.free_names().conames.iter().chain(m.free_names().conames.iter()) {
        keep.insert(c.0.clone());
        keep.insert(env.tilde_of(&c.0));
    }
    keep.remove(&x.0);
    Ok(key_keeping(&lhs_raw.subst(&theta), &keep) == key_keeping(&rhs_raw.subst(&theta0), &keep))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agreement {
    pub joinable: bool,
    pub mod_reaches_colon: bool,
}

/// `cps_standard(M)` and `cps_colon(M)` are βη-joinable, and
/// `cps_standard_mod(M) →* cps_colon(M)`.
pub fn cps_agreement(m: &Term, fuel: usize) -> Result<Agreement, CcvError> {
    let c = canonicalize(m)?;
    let colon = cps_colon(&c);
    let joinable = joinable(&cps_standard(&c), &colon, fuel);
    let md = cps_standard_mod(&c);
    let mod_reaches_colon =
        reach(&md, &colon, &Pattern::exact(), fuel, false, DEFAULT_NODE_CAP).is_found();
    Ok(Agreement { joinable, mod_reaches_colon })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::t;

    #[test]
    fn coherent_on_floating_lets() {
        for s in [
            "let x = (let y = z w in y y) in x",
            "mu k. [k] let x = z w in x",
            "(x y) (let z = w w in z)",
        ] {
            let r = coherence(&t(s), 4096, 500).unwrap();
            assert!(r.representatives > 1 || s.starts_with('('), "{s}");
            assert!(r.holds(), "{s}: {r:?}");
        }
    }

    #[test]
    fn substitution_and_occurrence() {
        for s in ["x", "x y", "mu h. [h] x", "let x = y z in mu h. [l] x", "\\x. x (y z)"] {
            assert!(substitution_coherent(&t(s)).unwrap(), "{s}");
            assert!(tilde_occurs(&t(s)).unwrap(), "{s}");
        }
    }

    #[test]
    fn context_substitution() {
        let k = CoName::new("k");
        let x = Name::new("x");
        for (j, m) in [
            ("[k] y", "x x"),
            ("[l] mu h. [k] y z", "x"),
            ("[k] \\v. mu h. [k] v", "x w"),
            ("[l] y", "x"),
            ("[k] let y = z in \\x1. y", "x y"),
        ] {
            let j = crate::parse::j(j);
            assert!(context_substitution_coherent(&j, &k, &x, &t(m)).unwrap(), "{j}");
        }
    }

    #[test]
    fn agreement_seed() {
        let a = cps_agreement(&t("mu k. [k] x"), 500).unwrap();
        assert!(a.joinable && a.mod_reaches_colon);
    }
}
