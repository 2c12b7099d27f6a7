//! Hand-rolled recursive-descent parser for the morphism term language.
//!
//! ```text
//! term   := sum
//! sum    := tensor ('+' tensor)*
//! tensor := seq ('*' seq)*
//! seq    := atom (';' atom)*
//! atom   := gen | 'id' '[' obj ']' | 'sym' '[' obj ',' obj ']'
//!         | 'zero' '[' obj ',' obj ']' | 'tr' '[' obj ']' '(' term ')'
//!         | 'S' '(' term ')' | '(' term ')'
//! gen    := ('eta'|'mu'|'m'|'u'|'d'|'dco') ('[' obj ']')?
//!         | ('f'|'g'|'h'|'k') ('[' obj ',' obj ']')?
//! obj    := objatom ('*' objatom)*
//! objatom:= 'A' | 'I' | 'S' '(' obj ')' | '(' obj ')'
//! ```
//!
//! `+`, `*` and `;` are left-associative. Free symbols `f`..`k` default to
//! signature `A -> A` when no bracket is given; generators default to the
//! base object `A`.

use crate::dsl::{GenName, ObjectExpr, Term};
use crate::error::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Semi,
    Star,
    Plus,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, Error> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let tok = match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
                continue;
            }
            ';' => Tok::Semi,
            '*' => Tok::Star,
            '+' => Tok::Plus,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            c if c.is_ascii_alphabetic() => {
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        ident.push(c);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Ident(ident), line: tline, col: tcol });
                continue;
            }
            other => {
                return Err(Error::Parse {
                    line,
                    col,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        chars.next();
        col += 1;
        out.push(Spanned { tok, line: tline, col: tcol });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn err_here(&self, msg: impl Into<String>) -> Error {
        match self.peek() {
            Some(sp) => Error::Parse { line: sp.line, col: sp.col, msg: msg.into() },
            None => Error::Parse {
                line: self.toks.last().map_or(1, |t| t.line),
                col: self.toks.last().map_or(1, |t| t.col + 1),
                msg: format!("{} (found end of input)", msg.into()),
            },
        }
    }

    fn eat(&mut self, tok: &Tok, what: &str) -> Result<(), Error> {
        match self.peek() {
            Some(sp) if sp.tok == *tok => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err_here(format!("expected {what}"))),
        }
    }

    fn next_is(&self, tok: &Tok) -> bool {
        self.peek().is_some_and(|sp| sp.tok == *tok)
    }

    fn term(&mut self) -> Result<Term, Error> {
        let mut acc = self.tensor()?;
        while self.next_is(&Tok::Plus) {
            self.pos += 1;
            acc = Term::sum(acc, self.tensor()?);
        }
        Ok(acc)
    }

    fn tensor(&mut self) -> Result<Term, Error> {
        let mut acc = self.seq()?;
        while self.next_is(&Tok::Star) {
            self.pos += 1;
            acc = Term::tensor(acc, self.seq()?);
        }
        Ok(acc)
    }

    fn seq(&mut self) -> Result<Term, Error> {
        let mut acc = self.atom()?;
        while self.next_is(&Tok::Semi) {
            self.pos += 1;
            acc = Term::seq(acc, self.atom()?);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Term, Error> {
        let Some(sp) = self.peek().cloned() else {
            return Err(self.err_here("expected a term"));
        };
        match sp.tok {
            Tok::LParen => {
                self.pos += 1;
                let inner = self.term()?;
                self.eat(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                self.ident_atom(&name)
            }
            _ => Err(self.err_here("expected a term")),
        }
    }

    fn ident_atom(&mut self, name: &str) -> Result<Term, Error> {
        match name {
            "id" => {
                self.eat(&Tok::LBracket, "`[`")?;
                let o = self.obj()?;
                self.eat(&Tok::RBracket, "`]`")?;
                Ok(Term::Id(o))
            }
            "sym" | "zero" => {
                self.eat(&Tok::LBracket, "`[`")?;
                let a = self.obj()?;
                self.eat(&Tok::Comma, "`,`")?;
                let b = self.obj()?;
                self.eat(&Tok::RBracket, "`]`")?;
                Ok(if name == "sym" {
                    Term::Sym(a, b)
                } else {
                    Term::Zero(a, b)
                })
            }
            "tr" => {
                self.eat(&Tok::LBracket, "`[`")?;
                let x = self.obj()?;
                self.eat(&Tok::RBracket, "`]`")?;
                self.eat(&Tok::LParen, "`(`")?;
                let body = self.term()?;
                self.eat(&Tok::RParen, "`)`")?;
                Ok(Term::Trace(x, Box::new(body)))
            }
            "S" => {
                self.eat(&Tok::LParen, "`(`")?;
                let body = self.term()?;
                self.eat(&Tok::RParen, "`)`")?;
                Ok(Term::SLift(Box::new(body)))
            }
            "eta" | "mu" | "m" | "u" | "d" | "dco" => {
                let gen = match name {
                    "eta" => GenName::Eta,
                    "mu" => GenName::Mu,
                    "m" => GenName::Mult,
                    "u" => GenName::Unit,
                    "d" => GenName::Deriving,
                    _ => GenName::Coderiving,
                };
                let at = if self.next_is(&Tok::LBracket) {
                    self.pos += 1;
                    let o = self.obj()?;
                    self.eat(&Tok::RBracket, "`]`")?;
                    o
                } else {
                    ObjectExpr::Base
                };
                Ok(Term::Gen { name: gen, at })
            }
            "f" | "g" | "h" | "k" => {
                let (dom, cod) = if self.next_is(&Tok::LBracket) {
                    self.pos += 1;
                    let dom = self.obj()?;
                    self.eat(&Tok::Comma, "`,`")?;
                    let cod = self.obj()?;
                    self.eat(&Tok::RBracket, "`]`")?;
                    (dom, cod)
                } else {
                    (ObjectExpr::Base, ObjectExpr::Base)
                };
                Ok(Term::Free { name: name.to_string(), dom, cod })
            }
            other => {
                // Point at the ident itself, which we already consumed.
                self.pos -= 1;
                Err(self.err_here(format!("unknown generator `{other}`")))
            }
        }
    }

    fn obj(&mut self) -> Result<ObjectExpr, Error> {
        let mut acc = self.obj_atom()?;
        while self.next_is(&Tok::Star) {
            self.pos += 1;
            acc = ObjectExpr::Tensor(Box::new(acc), Box::new(self.obj_atom()?));
        }
        Ok(acc)
    }

    fn obj_atom(&mut self) -> Result<ObjectExpr, Error> {
        let Some(sp) = self.peek().cloned() else {
            return Err(self.err_here("expected an object"));
        };
        match sp.tok {
            Tok::LParen => {
                self.pos += 1;
                let inner = self.obj()?;
                self.eat(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "A" => {
                    self.pos += 1;
                    Ok(ObjectExpr::Base)
                }
                "I" => {
                    self.pos += 1;
                    Ok(ObjectExpr::Unit)
                }
                "S" => {
                    self.pos += 1;
                    self.eat(&Tok::LParen, "`(`")?;
                    let inner = self.obj()?;
                    self.eat(&Tok::RParen, "`)`")?;
                    Ok(ObjectExpr::S(Box::new(inner)))
                }
                _ => Err(self.err_here("expected an object")),
            },
            _ => Err(self.err_here("expected an object")),
        }
    }
}

/// Parse a morphism term; errors carry 1-based line and column.
pub fn parse(src: &str) -> Result<Term, Error> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let term = p.term()?;
    if let Some(sp) = p.peek() {
        return Err(Error::Parse {
            line: sp.line,
            col: sp.col,
            msg: "trailing input after term".to_string(),
        });
    }
    Ok(term)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_token_composition() {
        let t = parse("u ; d").unwrap();
        assert_eq!(
            t,
            Term::seq(
                Term::Gen { name: GenName::Unit, at: ObjectExpr::Base },
                Term::Gen { name: GenName::Deriving, at: ObjectExpr::Base },
            )
        );
    }

    #[test]
    fn trace_of_symmetry() {
        let t = parse("tr[A](sym[A,A])").unwrap();
        assert_eq!(
            t,
            Term::Trace(
                ObjectExpr::Base,
                Box::new(Term::Sym(ObjectExpr::Base, ObjectExpr::Base)),
            )
        );
    }

    #[test]
    fn malformed_input_reports_position() {
        let err = parse("d ;;").unwrap_err();
        match err {
            Error::Parse { line, col, .. } => {
                assert_eq!(line, 1);
                assert_eq!(col, 4);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn precedence_sum_tensor_seq() {
        // ';' binds tightest, '+' loosest
        let t = parse("u ; d + eta * mu").unwrap();
        let Term::Sum(l, r) = t else { panic!("expected sum") };
        assert!(matches!(*l, Term::Seq(..)));
        assert!(matches!(*r, Term::Tensor(..)));
        // a * b ; c parses as a * (b ; c)
        let t = parse("eta * mu ; d").unwrap();
        let Term::Tensor(_, rhs) = t else { panic!("expected tensor") };
        assert!(matches!(*rhs, Term::Seq(..)));
    }

    #[test]
    fn objects_parse_with_nesting() {
        let t = parse("id[S(A * A) * I]").unwrap();
        let Term::Id(o) = t else { panic!() };
        assert_eq!(o.to_string(), "S(A * A) * I");
    }

    #[test]
    fn unknown_generator_is_rejected() {
        assert!(matches!(parse("foo ; d"), Err(Error::Parse { .. })));
    }
}
