//! `α* = α`, `(S→T)* = T⁺→⊥⊥→¬S*`, `(∩R)* = ∩R*`, `(∪S)⁺ = ∩¬S*`,
//! `[[T]] = ¬T⁺`.

use crate::types::ccv::{Raw, Sub, Union};
use crate::types::strict::{neg, sarrow, Inter, Sty};

pub fn raw_star(r: &Raw) -> Sty {
    match r {
        Raw::Atom(a) => Sty::Atom(a.clone()),
        Raw::Arrow(s, t) => sarrow(plus(t), sarrow(Inter::of(Sty::Bot), neg(sub_star(s)))),
    }
}

pub fn sub_star(s: &Sub) -> Inter {
    Inter::new(s.raws().iter().map(raw_star).collect()).expect("nonempty")
}

pub fn plus(t: &Union) -> Inter {
    Inter::new(t.subs().iter().map(|s| neg(sub_star(s))).collect()).expect("nonempty")
}

pub fn semantic(t: &Union) -> Sty {
    neg(plus(t))
}

/// `(T⁺, [[T]])`.
pub fn translate_type(t: &Union) -> (Inter, Sty) {
    (plus(t), semantic(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::ccv::{raw_le, sub_le, union_le};
    use crate::types::strict::{inter_le, subtype_tgt};

    #[test]
    fn single_atom() {
        let (p, s) = translate_type(&Union::parse("a").unwrap());
        assert_eq!(p.to_string(), "a -> bot");
        assert_eq!(s.to_string(), "(a -> bot) -> bot");
    }

    #[test]
    fn arrow_reverses_arguments() {
        let r = Raw::Arrow(Sub::parse("a").unwrap(), Union::parse("a").unwrap());
        assert_eq!(raw_star(&r), Sty::parse("(a -> bot) -> bot -> a -> bot").unwrap());
    }

    #[test]
    fn intersections_map_memberwise() {
        let s = Sub::parse("a & (b -> c)").unwrap();
        let want: Vec<Sty> = s.raws().iter().map(raw_star).collect();
        let mut want = want;
        want.sort();
        assert_eq!(sub_star(&s).members(), want.as_slice());
    }

    #[test]
    fn translation_is_monotone() {
        let cases = [
            ("(a & c) -> b", "a & c & d -> b | e"),
            ("a -> b", "(a & c) -> (b | d)"),
            ("a & b", "b"),
        ];
        for (x, y) in cases {
            let (x, y) = (Union::parse(x).unwrap(), Union::parse(y).unwrap());
            if union_le(&x, &y) {
                assert!(inter_le(&plus(&y), &plus(&x)), "{x} <= {y}");
                for s in x.subs() {
                    let s2 = y.subs().iter().find(|s2| sub_le(s, s2)).unwrap();
                    assert!(inter_le(&sub_star(s), &sub_star(s2)));
                }
            }
        }
        let r1 = Raw::Arrow(Sub::parse("a").unwrap(), Union::parse("b").unwrap());
        let r2 = Raw::Arrow(Sub::parse("a & c").unwrap(), Union::parse("b | d").unwrap());
        assert!(raw_le(&r1, &r2));
        assert!(subtype_tgt(&raw_star(&r1), &raw_star(&r2)));
    }
}
