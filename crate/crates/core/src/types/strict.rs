//! Strict intersection types of the target calculus, `σ ::= α | ⊥⊥ | τ→σ`
//! with `τ ::= ∩σ` nonempty.

use std::fmt;

use crate::error::CcvError;
use crate::types::syntax::{inter_members, parse_ast, type_err, Ast};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sty {
    Atom(String),
    Bot,
    Arrow(Inter, Box<Sty>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Inter(Vec<Sty>);

pub fn satom(a: &str) -> Sty {
    Sty::Atom(a.to_string())
}

pub fn sarrow(d: Inter, c: Sty) -> Sty {
    Sty::Arrow(d, Box::new(c))
}

/// `¬τ = τ → ⊥⊥`.
pub fn neg(d: Inter) -> Sty {
    sarrow(d, Sty::Bot)
}

impl Inter {
    pub fn new(mut v: Vec<Sty>) -> Result<Inter, CcvError> {
        if v.is_empty() {
            return Err(type_err("empty intersection"));
        }
        v.sort();
        Ok(Inter(v))
    }

    pub fn of(s: Sty) -> Inter {
        Inter(vec![s])
    }

    pub fn members(&self) -> &[Sty] {
        &self.0
    }

    pub fn contains(&self, s: &Sty) -> bool {
        self.0.contains(s)
    }

    pub fn meet(&self, other: &Inter) -> Inter {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        v.sort();
        Inter(v)
    }

    /// Like [`Inter::meet`] but keeps one copy of members already present.
    pub fn meet_set(&self, other: &Inter) -> Inter {
        let mut v = self.0.clone();
        for s in &other.0 {
            if !v.contains(s) {
                v.push(s.clone());
            }
        }
        v.sort();
        Inter(v)
    }

    pub fn parse(src: &str) -> Result<Inter, CcvError> {
        inter_of(&parse_ast(src)?)
    }
}

impl Sty {
    pub fn parse(src: &str) -> Result<Sty, CcvError> {
        sty_of(&parse_ast(src)?)
    }
}

fn sty_of(a: &Ast) -> Result<Sty, CcvError> {
    match a {
        Ast::Atom(s) => Ok(satom(s)),
        Ast::Bot => Ok(Sty::Bot),
        Ast::Arrow(d, c) => Ok(sarrow(inter_of(d)?, sty_of(c)?)),
        Ast::Inter(_) => Err(type_err("intersection where a strict type is required")),
        Ast::Union(_) => Err(type_err("unions do not exist in the target")),
    }
}

fn inter_of(a: &Ast) -> Result<Inter, CcvError> {
    Inter::new(inter_members(a).into_iter().map(sty_of).collect::<Result<_, _>>()?)
}

pub fn subtype_tgt(a: &Sty, b: &Sty) -> bool {
    match (a, b) {
        (Sty::Atom(x), Sty::Atom(y)) => x == y,
        (Sty::Bot, Sty::Bot) => true,
        (Sty::Arrow(d, c), Sty::Arrow(d2, c2)) => inter_le(d2, d) && subtype_tgt(c, c2),
        _ => false,
    }
}

pub fn inter_le(a: &Inter, b: &Inter) -> bool {
    b.0.iter().all(|s2| a.0.iter().any(|s| subtype_tgt(s, s2)))
}

/// The sort a strict type belongs to in the sorted system: `⊥⊥` for jumps,
/// `¬κ̲` for terms, `α | σ̲→τ` for values, `¬σ̲` for continuations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Class {
    T,
    Q,
    W,
    K,
}

pub fn classify(s: &Sty) -> Option<Class> {
    match s {
        Sty::Bot => Some(Class::Q),
        Sty::Atom(_) => Some(Class::W),
        Sty::Arrow(d, c) => {
            let ds = inter_class(d)?;
            match (**c == Sty::Bot, ds) {
                (true, Class::W) => Some(Class::K),
                (true, Class::K) => Some(Class::T),
                (false, Class::W) if classify(c)? == Class::T => Some(Class::W),
                _ => None,
            }
        }
    }
}

/// The common class of all members, if there is one.
pub fn inter_class(i: &Inter) -> Option<Class> {
    let c = classify(&i.0[0])?;
    for s in &i.0[1..] {
        if classify(s)? != c {
            return None;
        }
    }
    Some(c)
}

impl fmt::Display for Sty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sty::Atom(a) => f.write_str(a),
            Sty::Bot => f.write_str("bot"),
            Sty::Arrow(d, c) => {
                match d.0.as_slice() {
                    [Sty::Atom(_)] | [Sty::Bot] => write!(f, "{d}")?,
                    _ => write!(f, "({d})")?,
                }
                write!(f, " -> {c}")
            }
        }
    }
}

impl fmt::Display for Inter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self
            .0
            .iter()
            .map(|s| match s {
                Sty::Arrow(..) if self.0.len() > 1 => format!("({s})"),
                _ => s.to_string(),
            })
            .collect();
        f.write_str(&v.join(" & "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: &str) -> Sty {
        Sty::parse(s).unwrap()
    }

    #[test]
    fn printing_round_trips() {
        for src in ["a", "bot", "a -> bot", "(a & b) -> c", "(a -> bot) -> bot", "(a & (b -> c)) -> bot -> c"] {
            let t = st(src);
            assert_eq!(st(&t.to_string()), t, "{src} printed as {t}");
        }
    }

    #[test]
    fn subtyping() {
        assert!(subtype_tgt(&st("a -> b"), &st("(a & c) -> b")));
        assert!(!subtype_tgt(&st("(a & c) -> b"), &st("a -> b")));
        assert!(!subtype_tgt(&st("(a -> bot) -> bot"), &st("((a & c) -> bot) -> bot")));
        assert!(subtype_tgt(&st("((a & c) -> bot) -> bot"), &st("(a -> bot) -> bot")));
        assert!(inter_le(&Inter::parse("a & b").unwrap(), &Inter::parse("b").unwrap()));
    }

    #[test]
    fn classes() {
        assert_eq!(classify(&st("bot")), Some(Class::Q));
        assert_eq!(classify(&st("a")), Some(Class::W));
        assert_eq!(classify(&st("a -> bot")), Some(Class::K));
        assert_eq!(classify(&st("(a -> bot) -> bot")), Some(Class::T));
        assert_eq!(classify(&st("a -> (a -> bot) -> bot")), Some(Class::W));
        assert_eq!(classify(&st("a -> b")), None);
        assert_eq!(classify(&st("bot -> bot")), None);
        assert_eq!(classify(&st("(a & (a -> bot)) -> bot")), None);
    }
}
