//! Exhaustive enumeration of small terms.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::canon::canonicalize;
use crate::error::CcvError;
use crate::name::{CoName, Name};
use crate::target::term::{dot2, tapp, tlam, tvar, Tgt};
use crate::term::{Jump, Term};

pub const MAX_CORPUS_SIZE: usize = 9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pools {
    pub vars: Vec<String>,
    pub conames: Vec<String>,
}

impl Default for Pools {
    fn default() -> Self {
        Pools {
            vars: vec!["x".into(), "y".into()],
            conames: vec!["k".into(), "l".into()],
        }
    }
}

impl Pools {
    pub fn new(vars: &[&str], conames: &[&str]) -> Self {
        Pools {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            conames: conames.iter().map(|s| s.to_string()).collect(),
        }
    }
}

struct Gen<'p> {
    pools: &'p Pools,
    terms: Vec<Vec<Term>>,
    jumps: Vec<Vec<Jump>>,
}

impl Gen<'_> {
    fn grow(&mut self, n: usize) {
        let mut ts = Vec::new();
        let mut js = Vec::new();
        if n == 1 {
            ts.extend(self.pools.vars.iter().map(|x| Term::Var(Name::new(x))));
        }
        if n >= 2 {
            for x in &self.pools.vars {
                for b in &self.terms[n - 1] {
                    ts.push(Term::Lam(Name::new(x), Box::new(b.clone())));
                }
            }
            for k in &self.pools.conames {
                for j in &self.jumps[n - 1] {
                    ts.push(Term::Mu(CoName::new(k), Box::new(j.clone())));
                }
                for m in &self.terms[n - 1] {
                    js.push(Jump::Jmp(CoName::new(k), Box::new(m.clone())));
                }
            }
        }
        for a in 1..n.saturating_sub(1) {
            let b = n - 1 - a;
            for f in &self.terms[a] {
                for g in &self.terms[b] {
                    ts.push(Term::App(Box::new(f.clone()), Box::new(g.clone())));
                    for x in &self.pools.vars {
                        ts.push(Term::Let(Box::new(f.clone()), Name::new(x), Box::new(g.clone())));
                    }
                }
            }
            for j in &self.jumps[a] {
                for g in &self.terms[b] {
                    for x in &self.pools.vars {
                        js.push(Jump::JLet(Box::new(j.clone()), Name::new(x), Box::new(g.clone())));
                    }
                }
            }
        }
        self.terms.push(ts);
        self.jumps.push(js);
    }
}

/// Raw syntax trees of exactly each size up to `size`, including
/// non-canonical ones.
pub fn raw_terms(size: usize, pools: &Pools) -> Vec<Vec<Term>> {
    let mut g = Gen { pools, terms: vec![Vec::new()], jumps: vec![Vec::new()] };
    for n in 1..=size {
        g.grow(n);
    }
    g.terms
}

/// Canonical terms of size at most `size`, deduplicated up to equality, in a
/// fixed order (by size, then by first appearance).
pub fn enumerate(size: usize, pools: &Pools) -> Result<Vec<Term>, CcvError> {
    if size > MAX_CORPUS_SIZE {
        return Err(CcvError::CapExceeded(MAX_CORPUS_SIZE));
    }
    let raw = raw_terms(size, pools);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for level in raw {
        let canon: Vec<Option<(String, Term)>> = level
            .par_iter()
            .map(|t| canonicalize(t).ok().map(|c| (c.alpha_key(), c)))
            .collect();
        for (key, c) in canon.into_iter().flatten() {
            if seen.insert(key) {
                out.push(c);
            }
        }
    }
    Ok(out)
}

fn pick<'a>(rng: &mut ChaCha8Rng, v: &'a [String]) -> &'a str {
    &v[rng.gen_range(0..v.len())]
}

fn random_raw(rng: &mut ChaCha8Rng, n: usize, pools: &Pools) -> Term {
    let mut choices = vec![0u8];
    if n >= 2 {
        choices = vec![1];
    }
    if n >= 3 {
        choices.extend([2, 3, 4]);
    }
    match choices[rng.gen_range(0..choices.len())] {
        0 => Term::Var(Name::new(pick(rng, &pools.vars))),
        1 => Term::Lam(Name::new(pick(rng, &pools.vars)), Box::new(random_raw(rng, n - 1, pools))),
        2 => Term::Mu(CoName::new(pick(rng, &pools.conames)), Box::new(random_jump(rng, n - 1, pools))),
        c => {
            let a = rng.gen_range(1..n - 1);
            let (f, g) = (random_raw(rng, a, pools), random_raw(rng, n - 1 - a, pools));
            if c == 3 {
                Term::App(Box::new(f), Box::new(g))
            } else {
                Term::Let(Box::new(f), Name::new(pick(rng, &pools.vars)), Box::new(g))
            }
        }
    }
}

fn random_jump(rng: &mut ChaCha8Rng, n: usize, pools: &Pools) -> Jump {
    if n >= 4 && rng.gen_bool(0.3) {
        let a = rng.gen_range(2..=n - 2);
        return Jump::JLet(
            Box::new(random_jump(rng, a, pools)),
            Name::new(pick(rng, &pools.vars)),
            Box::new(random_raw(rng, n - 1 - a, pools)),
        );
    }
    Jump::Jmp(CoName::new(pick(rng, &pools.conames)), Box::new(random_raw(rng, n - 1, pools)))
}

/// `count` canonical terms with sizes drawn from `min_size..=max_size`,
/// reproducible from `seed`. Duplicates are kept.
pub fn random_terms(count: usize, seed: u64, min_size: usize, max_size: usize, pools: &Pools) -> Vec<Term> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(min_size..=max_size);
        if let Ok(c) = canonicalize(&random_raw(&mut rng, n, pools)) {
            out.push(c);
        }
    }
    out
}

struct TgtGen<'f> {
    free: &'f [&'f str],
    dots: bool,
    memo: HashMap<(usize, usize), Vec<Tgt>>,
}

impl TgtGen<'_> {
    fn gen(&mut self, n: usize, depth: usize) -> Vec<Tgt> {
        if let Some(v) = self.memo.get(&(n, depth)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if n == 1 {
            out.extend(self.free.iter().map(|x| tvar(x)));
            out.extend((0..depth).map(|d| tvar(&format!("v{d}"))));
        }
        if n >= 2 {
            let x = format!("v{depth}");
            out.extend(self.gen(n - 1, depth + 1).into_iter().map(|b| tlam(&x, b)));
        }
        for fsz in 1..n.saturating_sub(1) {
            let fs = self.gen(fsz, depth);
            let as_ = self.gen(n - 1 - fsz, depth);
            for f in &fs {
                for a in &as_ {
                    out.push(tapp(f.clone(), a.clone()));
                }
            }
            if self.dots {
                let mut seen = HashSet::new();
                for f in &fs {
                    for a in &as_ {
                        let d = dot2(f.clone(), a.clone());
                        if d.size() == n && seen.insert(d.alpha_key()) {
                            out.push(d);
                        }
                    }
                }
            }
        }
        let mut seen = HashSet::new();
        out.retain(|t| seen.insert(t.alpha_key()));
        self.memo.insert((n, depth), out.clone());
        out
    }
}

/// Closed-up-to-`free` target terms of size at most `size`, binders named
/// by depth, with dot chains only when `dots` is set.
pub fn target_terms(size: usize, free: &[&str], dots: bool) -> Vec<Tgt> {
    let mut g = TgtGen { free, dots, memo: HashMap::new() };
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for n in 1..=size {
        for t in g.gen(n, 0) {
            if seen.insert(t.alpha_key()) {
                out.push(t);
            }
        }
    }
    out
}
