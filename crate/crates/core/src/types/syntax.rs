//! Concrete syntax shared by both type languages:
//! `union := inter ('|' inter)*`, `inter := arrow ('&' arrow)*`,
//! `arrow := prim ('->' arrow)?`, `prim := ident | bot | '(' union ')'`.

use crate::error::CcvError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Ast {
    Atom(String),
    Bot,
    Arrow(Box<Ast>, Box<Ast>),
    Inter(Vec<Ast>),
    Union(Vec<Ast>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Bot,
    Arrow,
    Amp,
    Bar,
    LParen,
    RParen,
    Eof,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, CcvError> {
    let cs: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        let at = i + 1;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                out.push((Tok::LParen, at));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, at));
                i += 1;
            }
            '&' | '∩' => {
                out.push((Tok::Amp, at));
                i += 1;
            }
            '|' | '∪' => {
                out.push((Tok::Bar, at));
                i += 1;
            }
            '→' => {
                out.push((Tok::Arrow, at));
                i += 1;
            }
            '⊥' => {
                out.push((Tok::Bot, at));
                i += 1;
                while i < cs.len() && cs[i] == '⊥' {
                    i += 1;
                }
            }
            '-' if cs.get(i + 1) == Some(&'>') => {
                out.push((Tok::Arrow, at));
                i += 2;
            }
            c if c.is_alphanumeric() || c == '_' || c == '\'' => {
                let mut s = String::new();
                while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_' || cs[i] == '\'') {
                    s.push(cs[i]);
                    i += 1;
                }
                out.push((if s == "bot" { Tok::Bot } else { Tok::Ident(s) }, at));
            }
            _ => {
                return Err(CcvError::Parse { line: 1, col: at, msg: format!("unexpected `{c}` in type") })
            }
        }
    }
    out.push((Tok::Eof, cs.len() + 1));
    Ok(out)
}

struct P {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl P {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn err<T>(&self, msg: &str) -> Result<T, CcvError> {
        Err(CcvError::Parse { line: 1, col: self.toks[self.pos].1, msg: msg.to_string() })
    }

    fn union(&mut self) -> Result<Ast, CcvError> {
        let mut v = vec![self.inter()?];
        while *self.peek() == Tok::Bar {
            self.pos += 1;
            v.push(self.inter()?);
        }
        Ok(if v.len() == 1 { v.pop().unwrap() } else { Ast::Union(v) })
    }

    fn inter(&mut self) -> Result<Ast, CcvError> {
        let mut v = vec![self.arrow()?];
        while *self.peek() == Tok::Amp {
            self.pos += 1;
            v.push(self.arrow()?);
        }
        Ok(if v.len() == 1 { v.pop().unwrap() } else { Ast::Inter(v) })
    }

    fn arrow(&mut self) -> Result<Ast, CcvError> {
        let d = self.prim()?;
        if *self.peek() == Tok::Arrow {
            self.pos += 1;
            let c = self.arrow()?;
            return Ok(Ast::Arrow(Box::new(d), Box::new(c)));
        }
        Ok(d)
    }

    fn prim(&mut self) -> Result<Ast, CcvError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.pos += 1;
                Ok(Ast::Atom(s))
            }
            Tok::Bot => {
                self.pos += 1;
                Ok(Ast::Bot)
            }
            Tok::LParen => {
                self.pos += 1;
                let t = self.union()?;
                if *self.peek() != Tok::RParen {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(t)
            }
            _ => self.err("expected a type"),
        }
    }
}

pub(crate) fn parse_ast(src: &str) -> Result<Ast, CcvError> {
    let mut p = P { toks: lex(src)?, pos: 0 };
    let t = p.union()?;
    if *p.peek() != Tok::Eof {
        return p.err("trailing input after type");
    }
    Ok(t)
}

/// Members of a top-level intersection, flattening nested ones.
pub(crate) fn inter_members(a: &Ast) -> Vec<&Ast> {
    match a {
        Ast::Inter(v) => v.iter().flat_map(inter_members).collect(),
        a => vec![a],
    }
}

pub(crate) fn union_members(a: &Ast) -> Vec<&Ast> {
    match a {
        Ast::Union(v) => v.iter().flat_map(union_members).collect(),
        a => vec![a],
    }
}

pub(crate) fn type_err(msg: impl Into<String>) -> CcvError {
    CcvError::Type(msg.into())
}
