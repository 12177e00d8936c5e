//! Surface syntax for CCV terms and target terms.

use crate::error::CcvError;
use crate::name::{CoName, Name};
use crate::target::term::{dot, tapp, Tgt};
use crate::term::{Expr, Jump, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Lambda,
    Dot,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Eq,
    Let,
    In,
    Mu,
    Eof,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str, target: bool) -> Result<Vec<Spanned>, CcvError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let single = match c {
            '\\' | 'λ' => Some(Tok::Lambda),
            '.' | '·' => Some(Tok::Dot),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned { tok, line: l0, col: c0 });
            i += 1;
            col += 1;
            continue;
        }
        let starts = c.is_ascii_lowercase() || (target && (c.is_ascii_alphabetic() || c == '_'));
        if !starts {
            return Err(CcvError::Parse {
                line: l0,
                col: c0,
                msg: format!("unexpected character `{c}`"),
            });
        }
        let mut s = String::new();
        while i < chars.len() {
            let d = chars[i];
            if d.is_ascii_alphanumeric() || d == '_' || (target && d == '~') {
                s.push(d);
                i += 1;
                col += 1;
            } else {
                break;
            }
        }
        let tok = match (s.as_str(), target) {
            ("let", false) => Tok::Let,
            ("in", false) => Tok::In,
            ("mu", false) => Tok::Mu,
            _ => Tok::Ident(s),
        };
        out.push(Spanned { tok, line: l0, col: c0 });
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, CcvError> {
        let s = &self.toks[self.pos];
        Err(CcvError::Parse { line: s.line, col: s.col, msg: msg.into() })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), CcvError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn ident(&mut self) -> Result<String, CcvError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn at_atom_start(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::LParen)
    }

    // ---- CCV ----

    fn expr(&mut self) -> Result<Expr, CcvError> {
        match self.peek() {
            Tok::Lambda => {
                self.bump();
                let mut binders = vec![self.ident()?];
                while let Tok::Ident(_) = self.peek() {
                    binders.push(self.ident()?);
                }
                self.expect(Tok::Dot, "`.` after binder")?;
                let mut body = self.term()?;
                for x in binders.into_iter().rev() {
                    body = Term::Lam(Name(x), Box::new(body));
                }
                Ok(Expr::Term(body))
            }
            Tok::Let => {
                self.bump();
                let x = Name(self.ident()?);
                self.expect(Tok::Eq, "`=`")?;
                let arg = Box::new(self.term()?);
                self.expect(Tok::In, "`in`")?;
                Ok(match self.expr()? {
                    Expr::Term(b) => Expr::Term(Term::Let(Box::new(b), x, arg)),
                    Expr::Jump(j) => Expr::Jump(Jump::JLet(Box::new(j), x, arg)),
                })
            }
            Tok::Mu => {
                self.bump();
                let k = CoName(self.ident()?);
                self.expect(Tok::Dot, "`.` after mu binder")?;
                let j = self.jump()?;
                Ok(Expr::Term(Term::Mu(k, Box::new(j))))
            }
            Tok::LBrack => {
                self.bump();
                let k = CoName(self.ident()?);
                self.expect(Tok::RBrack, "`]`")?;
                let m = self.term()?;
                Ok(Expr::Jump(Jump::Jmp(k, Box::new(m))))
            }
            _ => {
                // a parenthesised jump is allowed only on its own
                if *self.peek() == Tok::LParen {
                    let save = self.pos;
                    self.bump();
                    if let Ok(Expr::Jump(j)) = self.expr() {
                        if *self.peek() == Tok::RParen {
                            self.bump();
                            return Ok(Expr::Jump(j));
                        }
                    }
                    self.pos = save;
                }
                Ok(Expr::Term(self.app()?))
            }
        }
    }

    fn term(&mut self) -> Result<Term, CcvError> {
        let start = self.pos;
        match self.expr()? {
            Expr::Term(t) => Ok(t),
            Expr::Jump(_) => {
                self.pos = start;
                self.err("expected a term, found a jump")
            }
        }
    }

    fn jump(&mut self) -> Result<Jump, CcvError> {
        let start = self.pos;
        match self.expr()? {
            Expr::Jump(j) => Ok(j),
            Expr::Term(_) => {
                self.pos = start;
                self.err("expected a jump `[k] M`")
            }
        }
    }

    fn app(&mut self) -> Result<Term, CcvError> {
        let mut t = self.atom()?;
        loop {
            if self.at_atom_start() {
                let a = self.atom()?;
                t = Term::App(Box::new(t), Box::new(a));
            } else if matches!(self.peek(), Tok::Lambda | Tok::Let | Tok::Mu) {
                // trailing binder extends to the right
                let a = self.term()?;
                t = Term::App(Box::new(t), Box::new(a));
                return Ok(t);
            } else {
                return Ok(t);
            }
        }
    }

    fn atom(&mut self) -> Result<Term, CcvError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Term::Var(Name(s)))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => self.err("expected a term"),
        }
    }

    // ---- target ----

    fn tgt(&mut self) -> Result<Tgt, CcvError> {
        if *self.peek() == Tok::Lambda {
            self.bump();
            let mut binders = vec![self.ident()?];
            while let Tok::Ident(_) = self.peek() {
                binders.push(self.ident()?);
            }
            self.expect(Tok::Dot, "`.` after binder")?;
            let mut body = self.tgt()?;
            for x in binders.into_iter().rev() {
                body = Tgt::Lam(x, Box::new(body));
            }
            return Ok(body);
        }
        let mut parts = vec![self.tgt_app()?];
        while *self.peek() == Tok::Dot {
            self.bump();
            if *self.peek() == Tok::Lambda {
                parts.push(self.tgt()?);
                break;
            }
            parts.push(self.tgt_app()?);
        }
        Ok(dot(parts))
    }

    fn tgt_app(&mut self) -> Result<Tgt, CcvError> {
        let mut t = self.tgt_atom()?;
        loop {
            if self.at_atom_start() {
                let a = self.tgt_atom()?;
                t = tapp(t, a);
            } else if *self.peek() == Tok::Lambda {
                let a = self.tgt()?;
                return Ok(tapp(t, a));
            } else {
                return Ok(t);
            }
        }
    }

    fn tgt_atom(&mut self) -> Result<Tgt, CcvError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Tgt::Var(s))
            }
            Tok::LParen => {
                self.bump();
                let t = self.tgt()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => self.err("expected a target term"),
        }
    }

    fn finish(&self) -> Result<(), CcvError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.err("trailing input")
        }
    }
}

/// Parses a term or a jump.
pub fn parse_expr(src: &str) -> Result<Expr, CcvError> {
    let mut p = Parser { toks: lex(src, false)?, pos: 0 };
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_term(src: &str) -> Result<Term, CcvError> {
    let mut p = Parser { toks: lex(src, false)?, pos: 0 };
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_jump(src: &str) -> Result<Jump, CcvError> {
    let mut p = Parser { toks: lex(src, false)?, pos: 0 };
    let j = p.jump()?;
    p.finish()?;
    Ok(j)
}

pub fn parse_tgt(src: &str) -> Result<Tgt, CcvError> {
    let mut p = Parser { toks: lex(src, true)?, pos: 0 };
    let t = p.tgt()?;
    p.finish()?;
    Ok(t)
}

/// Panicking shorthand for tests and fixtures.
pub fn t(src: &str) -> Term {
    parse_term(src).unwrap_or_else(|e| panic!("{src}: {e}"))
}

pub fn j(src: &str) -> Jump {
    parse_jump(src).unwrap_or_else(|e| panic!("{src}: {e}"))
}

pub fn tg(src: &str) -> Tgt {
    parse_tgt(src).unwrap_or_else(|e| panic!("{src}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::target::term::{tlam, tvar};
    use crate::term::*;

    #[test]
    fn lambda() {
        assert_eq!(t("\\x. x"), lam("x", var("x")));
        assert_eq!(t("λx. x"), lam("x", var("x")));
        assert_eq!(t("\\x y. x"), lam("x", lam("y", var("x"))));
    }

    #[test]
    fn let_mu() {
        assert_eq!(
            t("let x = mu k.[k] z in y"),
            let_("x", mu("k", jmp("k", var("z"))), var("y"))
        );
        assert_eq!(t("mu k.[k]x"), mu("k", jmp("k", var("x"))));
    }

    #[test]
    fn application_is_left_associative() {
        assert_eq!(t("x y z"), app(app(var("x"), var("y")), var("z")));
        assert_eq!(t("x (y z)"), app(var("x"), app(var("y"), var("z"))));
        assert_eq!(t("x \\y. y y"), app(var("x"), lam("y", app(var("y"), var("y")))));
    }

    #[test]
    fn jumps() {
        assert_eq!(j("let x = w in [k] x"), jlet("x", var("w"), jmp("k", var("x"))));
        assert_eq!(
            parse_expr("[k] x").unwrap(),
            Expr::Jump(jmp("k", var("x")))
        );
        assert!(parse_term("[k] x").is_err());
    }

    #[test]
    fn errors_carry_position() {
        match parse_term("let x = \n  in y") {
            Err(CcvError::Parse { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(parse_term("x )").is_err());
        assert!(parse_term("X").is_err());
    }

    #[test]
    fn print_parse_round_trip() {
        for src in [
            "let x = mu k. [k] z in y",
            "(\\x. x x) (\\x. x x)",
            "mu k. let x = y z in [l] \\w. w",
            "x (let y = z in y) (mu k. [k] k0)",
            "(\\x. x) (mu k. [k] x) y",
        ] {
            let a = t(src);
            assert_eq!(t(&a.to_string()), a, "{src}");
        }
    }

    #[test]
    fn target_dot() {
        assert_eq!(
            tg("\\k. a . k x"),
            tlam("k", dot([tvar("a"), tapp(tvar("k"), tvar("x"))]))
        );
        assert_eq!(tg("k~ . k~ . k x").to_string(), "k~ . k~ . k x");
        let s = "\\k. (\\x. k~ . k x) y . k y";
        assert_eq!(tg(&tg(s).to_string()), tg(s));
    }
}
