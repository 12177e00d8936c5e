//! Union-intersection types `R ::= α | S→T`, `S ::= ∩R`, `T ::= ∪S`, kept as
//! sorted multisets so associativity and commutativity hold structurally.

use std::fmt;

use crate::error::CcvError;
use crate::types::syntax::{inter_members, parse_ast, type_err, union_members, Ast};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Raw {
    Atom(String),
    Arrow(Sub, Union),
}

/// Nonempty intersection of raw types.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sub(Vec<Raw>);

/// Nonempty union of subsidiary types.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Union(Vec<Sub>);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CcvType {
    Raw(Raw),
    Sub(Sub),
    Union(Union),
    /// The jump type.
    Bot,
}

pub fn atom(a: &str) -> Raw {
    Raw::Atom(a.to_string())
}

pub fn arrow(s: Sub, t: Union) -> Raw {
    Raw::Arrow(s, t)
}

impl Sub {
    pub fn new(mut rs: Vec<Raw>) -> Result<Sub, CcvError> {
        if rs.is_empty() {
            return Err(type_err("empty intersection"));
        }
        rs.sort();
        Ok(Sub(rs))
    }

    pub fn of(r: Raw) -> Sub {
        Sub(vec![r])
    }

    pub fn raws(&self) -> &[Raw] {
        &self.0
    }

    pub fn meet(&self, other: &Sub) -> Sub {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        v.sort();
        Sub(v)
    }

    pub fn parse(src: &str) -> Result<Sub, CcvError> {
        sub_of(&parse_ast(src)?)
    }
}

impl Union {
    pub fn new(mut ss: Vec<Sub>) -> Result<Union, CcvError> {
        if ss.is_empty() {
            return Err(type_err("empty union"));
        }
        ss.sort();
        Ok(Union(ss))
    }

    pub fn of(s: Sub) -> Union {
        Union(vec![s])
    }

    pub fn raw(r: Raw) -> Union {
        Union(vec![Sub::of(r)])
    }

    pub fn subs(&self) -> &[Sub] {
        &self.0
    }

    pub fn join(&self, other: &Union) -> Union {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        v.sort();
        Union(v)
    }

    pub fn parse(src: &str) -> Result<Union, CcvError> {
        union_of(&parse_ast(src)?)
    }
}

fn raw_of(a: &Ast) -> Result<Raw, CcvError> {
    match a {
        Ast::Atom(s) => Ok(atom(s)),
        Ast::Arrow(d, c) => Ok(Raw::Arrow(sub_of(d)?, union_of(c)?)),
        Ast::Bot => Err(type_err("the jump type is not a raw type")),
        Ast::Inter(_) | Ast::Union(_) => Err(type_err("expected a raw type")),
    }
}

fn sub_of(a: &Ast) -> Result<Sub, CcvError> {
    Sub::new(inter_members(a).into_iter().map(raw_of).collect::<Result<_, _>>()?)
}

fn union_of(a: &Ast) -> Result<Union, CcvError> {
    Union::new(union_members(a).into_iter().map(sub_of).collect::<Result<_, _>>()?)
}

impl CcvType {
    /// Parses `bot` as the jump type and anything else as a union type.
    pub fn parse(src: &str) -> Result<CcvType, CcvError> {
        let a = parse_ast(src)?;
        if a == Ast::Bot {
            return Ok(CcvType::Bot);
        }
        Ok(CcvType::Union(union_of(&a)?))
    }

    pub fn as_union(&self) -> Option<&Union> {
        match self {
            CcvType::Union(u) => Some(u),
            _ => None,
        }
    }
}

pub fn raw_le(a: &Raw, b: &Raw) -> bool {
    match (a, b) {
        (Raw::Atom(x), Raw::Atom(y)) => x == y,
        (Raw::Arrow(s, t), Raw::Arrow(s2, t2)) => sub_le(s2, s) && union_le(t, t2),
        _ => false,
    }
}

/// Split the right side into singletons, then drop the unused left factors.
pub fn sub_le(a: &Sub, b: &Sub) -> bool {
    b.0.iter().all(|r2| a.0.iter().any(|r| raw_le(r, r2)))
}

/// Split the left side into singletons, then drop the unused right members.
pub fn union_le(a: &Union, b: &Union) -> bool {
    a.0.iter().all(|s| b.0.iter().any(|s2| sub_le(s, s2)))
}

pub fn subtype_ccv(a: &CcvType, b: &CcvType) -> Result<bool, CcvError> {
    match (a, b) {
        (CcvType::Raw(x), CcvType::Raw(y)) => Ok(raw_le(x, y)),
        (CcvType::Sub(x), CcvType::Sub(y)) => Ok(sub_le(x, y)),
        (CcvType::Union(x), CcvType::Union(y)) => Ok(union_le(x, y)),
        (CcvType::Bot, CcvType::Bot) => Ok(true),
        _ => Err(type_err(format!("cannot compare `{a}` with `{b}`: category mismatch"))),
    }
}

impl fmt::Display for Raw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Raw::Atom(a) => f.write_str(a),
            Raw::Arrow(s, t) => {
                match s.0.as_slice() {
                    [Raw::Atom(a)] => write!(f, "{a}")?,
                    _ => write!(f, "({s})")?,
                }
                match t.0.as_slice() {
                    [s1] if s1.0.len() == 1 => write!(f, " -> {s1}"),
                    _ => write!(f, " -> ({t})"),
                }
            }
        }
    }
}

impl fmt::Display for Sub {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self
            .0
            .iter()
            .map(|r| match r {
                Raw::Arrow(..) if self.0.len() > 1 => format!("({r})"),
                _ => r.to_string(),
            })
            .collect();
        f.write_str(&v.join(" & "))
    }
}

impl fmt::Display for Union {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.0.iter().map(Sub::to_string).collect();
        f.write_str(&v.join(" | "))
    }
}

impl fmt::Display for CcvType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CcvType::Raw(r) => write!(f, "{r}"),
            CcvType::Sub(s) => write!(f, "{s}"),
            CcvType::Union(u) => write!(f, "{u}"),
            CcvType::Bot => f.write_str("bot"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(s: &str) -> Union {
        Union::parse(s).unwrap()
    }

    fn s(x: &str) -> Sub {
        Sub::parse(x).unwrap()
    }

    #[test]
    fn printing_round_trips() {
        for src in ["a", "a & b", "a | b & c", "(a & b) -> c | d", "a -> (b | c)", "(a -> b) & c", "a -> b -> c"] {
            let t = u(src);
            assert_eq!(u(&t.to_string()), t, "{src} printed as {t}");
        }
    }

    #[test]
    fn ac_normalized() {
        assert_eq!(s("a & b"), s("b & a"));
        assert_eq!(u("a | b & c"), u("c & b | a"));
        assert_ne!(s("a & a"), s("a"));
    }

    #[test]
    fn subtyping_examples() {
        let a = CcvType::Raw(atom("a"));
        assert!(subtype_ccv(&a, &a).unwrap());
        assert!(sub_le(&s("r & q"), &s("r")));
        assert!(sub_le(&s("(a -> b) & c"), &s("a -> b")));
        // contravariant domain, covariant codomain
        assert!(raw_le(&Raw::Arrow(s("a"), u("b")), &Raw::Arrow(s("a & c"), u("b | d"))));
        assert!(!raw_le(&Raw::Arrow(s("a & c"), u("b")), &Raw::Arrow(s("a"), u("b"))));
        assert!(union_le(&u("a"), &u("a | b")));
        assert!(!union_le(&u("a | b"), &u("a")));
        assert!(union_le(&u("a & b | b"), &u("b")));
        assert!(sub_le(&s("a"), &s("a & a")));
    }

    #[test]
    fn category_mismatch_is_rejected() {
        let r = CcvType::Raw(atom("a"));
        let t = CcvType::Union(u("a"));
        assert!(subtype_ccv(&r, &t).is_err());
        assert!(subtype_ccv(&CcvType::Bot, &t).is_err());
    }

    #[test]
    fn reflexivity_holds_for_composite_types() {
        for src in ["(a & b) -> c | d", "((a -> b) & c) -> (a | b -> c)"] {
            let t = u(src);
            assert!(union_le(&t, &t));
        }
    }

    #[test]
    fn empty_types_are_unrepresentable() {
        assert!(Sub::new(vec![]).is_err());
        assert!(Union::new(vec![]).is_err());
        assert!(CcvType::parse("a & (b | c)").is_err());
    }
}
