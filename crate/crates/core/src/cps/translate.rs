//! The standard, modified and colon CPS translations.

use crate::name::Fresh;
use crate::target::term::{tapp, tapps, tlam, tvar, Tgt};
use crate::term::{Jump, Term};

fn supply(m: &Term) -> Fresh {
    Fresh::avoiding(m.all_names())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Variant {
    Standard,
    Modified,
}

pub(crate) struct Std {
    fresh: Fresh,
    variant: Variant,
}

impl Std {
    /// The standard translation of a term as written, without canonicalizing.
    pub fn raw(m: &Term) -> Tgt {
        Std { fresh: supply(m), variant: Variant::Standard }.term(m)
    }

    fn term(&mut self, m: &Term) -> Tgt {
        match m {
            Term::Var(_) | Term::Lam(..) => {
                let k = self.fresh.name("k");
                tlam(&k, tapp(tvar(&k), self.value(m)))
            }
            Term::App(f, a) => {
                let k = self.fresh.name("k");
                let x = self.fresh.name("x");
                let y = self.fresh.name("y");
                let tf = self.term(f);
                let ta = self.term(a);
                let inner = tlam(&y, tapps(tvar(&x), [tvar(&y), tvar(&k)]));
                tlam(&k, tapp(tf, tlam(&x, tapp(ta, inner))))
            }
            Term::Let(body, x, arg) => {
                let k = self.fresh.name("k");
                let ta = self.term(arg);
                let tb = self.term(body);
                tlam(&k, tapp(ta, tlam(&x.0, tapp(tb, tvar(&k)))))
            }
            Term::Mu(k, j) => {
                let tj = self.jump(j);
                match self.variant {
                    Variant::Standard => tlam(&k.0, tj),
                    Variant::Modified => {
                        let k0 = self.fresh.name("k");
                        tlam(&k0, tapp(tlam(&k.0, tj), tvar(&k0)))
                    }
                }
            }
        }
    }

    fn jump(&mut self, j: &Jump) -> Tgt {
        match j {
            Jump::Jmp(k, m) => tapp(self.term(m), tvar(&k.0)),
            Jump::JLet(b, x, arg) => {
                let ta = self.term(arg);
                let tb = self.jump(b);
                tapp(ta, tlam(&x.0, tb))
            }
        }
    }

    fn value(&mut self, v: &Term) -> Tgt {
        match v {
            Term::Var(x) => tvar(&x.0),
            Term::Lam(x, b) => match self.variant {
                Variant::Standard => tlam(&x.0, self.term(b)),
                Variant::Modified => {
                    let k = self.fresh.name("k");
                    let tb = self.term(b);
                    tlam(&x.0, tlam(&k, tapp(tb, tvar(&k))))
                }
            },
            _ => unreachable!("not a value"),
        }
    }
}

/// The standard call-by-value CPS translation of the canonical form of `m`.
pub fn cps_standard(m: &Term) -> Tgt {
    let c = crate::canon::canonicalize(m).unwrap_or_else(|_| m.clone());
    Std::raw(&c)
}

/// The standard translation with μ-abstractions and λ-bodies η-expanded,
/// of the canonical form of `m`.
pub fn cps_standard_mod(m: &Term) -> Tgt {
    let c = crate::canon::canonicalize(m).unwrap_or_else(|_| m.clone());
    Std { fresh: supply(&c), variant: Variant::Modified }.term(&c)
}

pub fn cps_standard_jump(j: &Jump) -> Tgt {
    let mut fresh = Fresh::avoiding(crate::term::Jump::all_names(j));
    fresh.reserve("k");
    Std { fresh, variant: Variant::Standard }.jump(j)
}

pub(crate) struct Colon {
    pub fresh: Fresh,
}

impl Colon {
    pub fn term(&mut self, m: &Term, kk: &Tgt) -> Tgt {
        match m {
            Term::Var(_) | Term::Lam(..) => tapp(kk.clone(), self.value(m)),
            Term::App(f, a) => match (f.is_value(), a.is_value()) {
                (true, true) => tapps(self.value(f), [self.value(a), kk.clone()]),
                (true, false) => {
                    let y = self.fresh.name("y");
                    let vf = self.value(f);
                    let k2 = tlam(&y, tapps(vf, [tvar(&y), kk.clone()]));
                    self.term(a, &k2)
                }
                (false, true) => {
                    let x = self.fresh.name("x");
                    let va = self.value(a);
                    let k2 = tlam(&x, tapps(tvar(&x), [va, kk.clone()]));
                    self.term(f, &k2)
                }
                (false, false) => {
                    let x = self.fresh.name("x");
                    let y = self.fresh.name("y");
                    let k_inner = tlam(&y, tapps(tvar(&x), [tvar(&y), kk.clone()]));
                    let inner = self.term(a, &k_inner);
                    self.term(f, &tlam(&x, inner))
                }
            },
            Term::Let(body, x, arg) => {
                let tb = self.term(body, kk);
                self.term(arg, &tlam(&x.0, tb))
            }
            Term::Mu(k, j) => tapp(tlam(&k.0, self.jump(j)), kk.clone()),
        }
    }

    pub fn jump(&mut self, j: &Jump) -> Tgt {
        match j {
            Jump::Jmp(k, m) => self.term(m, &tvar(&k.0)),
            Jump::JLet(b, x, arg) => {
                let tb = self.jump(b);
                self.term(arg, &tlam(&x.0, tb))
            }
        }
    }

    pub fn value(&mut self, v: &Term) -> Tgt {
        match v {
            Term::Var(x) => tvar(&x.0),
            Term::Lam(x, b) => {
                let k = self.fresh.name("k");
                let tb = self.term(b, &tvar(&k));
                tlam(&x.0, tlam(&k, tb))
            }
            _ => unreachable!("not a value"),
        }
    }
}

/// `⟨M⟩[K]`; fresh names avoid both `M` and `K`.
pub fn colon(m: &Term, kk: &Tgt) -> Tgt {
    let mut fresh = supply(m);
    for n in kk.all_names() {
        fresh.reserve(n);
    }
    Colon { fresh }.term(m, kk)
}

pub fn colon_jump(j: &Jump) -> Tgt {
    Colon { fresh: Fresh::avoiding(j.all_names()) }.jump(j)
}

/// `λk.⟨M⟩[k]`.
pub fn cps_colon(m: &Term) -> Tgt {
    let mut fresh = supply(m);
    let k = fresh.name("k");
    let body = Colon { fresh }.term(m, &tvar(&k));
    tlam(&k, body)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{t, tg};
    use crate::target::reduce::{joinable, TgtRules};
    use crate::target::sort::{sort_check, Sort};

    fn same(a: &Tgt, b: &str) {
        assert_eq!(a.alpha_key(), tg(b).alpha_key(), "{a} vs {b}");
    }

    #[test]
    fn standard_rows() {
        same(&cps_standard(&t("x")), "\\k. k x");
        same(&cps_standard(&t("\\x. x")), "\\k. k (\\x. \\h. h x)");
        same(&cps_standard(&t("mu k.[k]x")), "\\k. (\\h. h x) k");
    }

    #[test]
    fn modified_rows() {
        same(&cps_standard_mod(&t("x")), "\\k. k x");
        same(&cps_standard_mod(&t("mu k.[k]x")), "\\k0. (\\k. (\\k1. k1 x) k) k0");
    }

    #[test]
    fn colon_rows() {
        same(&colon(&t("x"), &tvar("k")), "k x");
        same(&colon(&t("x y"), &tvar("k")), "x y k");
        same(&colon(&t("(x y) z"), &tvar("k")), "x y (\\w. w z k)");
        same(&cps_colon(&t("mu k.[k]x")), "\\h. (\\k. k x) h");
    }

    #[test]
    fn colon_output_is_sorted() {
        for s in [
            "x",
            "\\x. x",
            "(x y) (z w)",
            "let x = mu k. [k] y in x y",
            "mu k. let x = y z in [l] \\w. w",
            "\\x. x (mu k. [k] x)",
        ] {
            let c = cps_colon(&t(s));
            let a = sort_check(&c, false).unwrap_or_else(|e| panic!("{s}: {e}"));
            assert_eq!(a.sort_at(&[]), Some(Sort::T));
        }
    }

    #[test]
    fn standard_and_colon_join() {
        for s in ["x y", "(x y) z", "let x = y z in x", "mu k. [k] x", "(\\x. x) y"] {
            let m = t(s);
            assert!(joinable(&cps_standard(&m), &cps_colon(&m), 200), "{s}");
        }
        let _ = TgtRules::ALL;
    }
}
