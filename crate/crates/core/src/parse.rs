//! Reader for the instance DSL.
//!
//! ```text
//! instance := decl* ;
//! decl     := "var" ident+ ";" | "fun" ident "/" nat ";" | "const" ident ";"
//!           | "eq" term "=" term ";"
//! term     := ident | ident "(" term ("," term)* ")"
//! ```
//!
//! Whitespace is insignificant and `#` starts a comment running to the end of
//! the line. Names must be declared before they are used. Dispersion problems
//! use the same language plus `out term ;` declarations.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{ParseError, ParseErrorKind};
use crate::term::{Equation, Signature, Term, TermInstance};

/// Parses DSL text into an instance.
pub fn parse_instance(text: &str) -> Result<TermInstance, ParseError> {
    let (inst, outputs) = Parser::new(text, false).run()?;
    debug_assert!(outputs.is_empty());
    Ok(inst)
}

/// Parses DSL text that may contain `out` declarations. Returns the
/// instance (whose equations are usually empty) and the output terms.
pub(crate) fn parse_with_outputs(text: &str) -> Result<(TermInstance, Vec<Term>), ParseError> {
    Parser::new(text, true).run()
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '@'
}

const KEYWORDS: [&str; 5] = ["var", "fun", "const", "eq", "out"];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u64),
    Punct(char),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            chars.next();
            col += 1;
        } else if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
        } else if is_ident_start(c) {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if !is_ident_char(c) {
                    break;
                }
                s.push(c);
                chars.next();
                col += 1;
            }
            out.push(Token {
                tok: Tok::Ident(s),
                line: l0,
                col: c0,
            });
        } else if c.is_ascii_digit() {
            let mut v: u64 = 0;
            while let Some(&c) = chars.peek() {
                let Some(d) = c.to_digit(10) else { break };
                v = v
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(d as u64))
                    .ok_or_else(|| {
                        ParseError::new(ParseErrorKind::Syntax("number too large".into()), l0, c0)
                    })?;
                chars.next();
                col += 1;
            }
            out.push(Token {
                tok: Tok::Nat(v),
                line: l0,
                col: c0,
            });
        } else if matches!(c, ';' | '(' | ')' | ',' | '=' | '/') {
            chars.next();
            col += 1;
            out.push(Token {
                tok: Tok::Punct(c),
                line: l0,
                col: c0,
            });
        } else {
            return Err(ParseError::new(
                ParseErrorKind::Syntax(alloc::format!("unexpected character `{c}`")),
                l0,
                c0,
            ));
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<Token>,
    pos: usize,
    allow_out: bool,
    sig: Signature,
    vars: Vec<String>,
    eqs: Vec<Equation>,
    outputs: Vec<Term>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, allow_out: bool) -> Self {
        Parser {
            text,
            toks: Vec::new(),
            pos: 0,
            allow_out,
            sig: Signature::new(),
            vars: Vec::new(),
            eqs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    fn run(mut self) -> Result<(TermInstance, Vec<Term>), ParseError> {
        self.toks = lex(self.text)?;
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::Eof => break,
                Tok::Ident(kw) => {
                    self.pos += 1;
                    match kw.as_str() {
                        "var" => self.var_decl(&t)?,
                        "fun" => self.fun_decl()?,
                        "const" => self.const_decl()?,
                        "eq" => self.eq_decl()?,
                        "out" if self.allow_out => {
                            let term = self.term()?;
                            self.expect(';')?;
                            self.outputs.push(term);
                        }
                        _ => {
                            return Err(syntax(
                                &t,
                                alloc::format!("expected a declaration, found `{kw}`"),
                            ))
                        }
                    }
                }
                _ => return Err(syntax(&t, "expected a declaration".into())),
            }
        }
        let inst = TermInstance {
            signature: self.sig,
            variables: self.vars,
            equations: self.eqs,
        };
        Ok((inst, self.outputs))
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, p: char) -> Result<(), ParseError> {
        let t = self.next();
        if t.tok == Tok::Punct(p) {
            Ok(())
        } else {
            Err(syntax(
                &t,
                alloc::format!("expected `{p}`, found {}", describe(&t.tok)),
            ))
        }
    }

    fn ident(&mut self) -> Result<(String, Token), ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => Ok((s.clone(), t)),
            Tok::Ident(s) => Err(syntax(&t, alloc::format!("`{s}` is a reserved word"))),
            other => Err(syntax(
                &t,
                alloc::format!("expected an identifier, found {}", describe(other)),
            )),
        }
    }

    fn declare_name(&self, name: &str, at: &Token) -> Result<(), ParseError> {
        if self.vars.iter().any(|v| v == name) || self.sig.lookup(name).is_some() {
            return Err(ParseError::new(
                ParseErrorKind::Duplicate(name.to_string()),
                at.line,
                at.col,
            ));
        }
        Ok(())
    }

    fn var_decl(&mut self, kw: &Token) -> Result<(), ParseError> {
        let mut any = false;
        while matches!(self.peek().tok, Tok::Ident(_)) {
            let (name, t) = self.ident()?;
            self.declare_name(&name, &t)?;
            self.vars.push(name);
            any = true;
        }
        if !any {
            return Err(syntax(kw, "`var` needs at least one name".into()));
        }
        self.expect(';')
    }

    fn fun_decl(&mut self) -> Result<(), ParseError> {
        let (name, t) = self.ident()?;
        self.declare_name(&name, &t)?;
        self.expect('/')?;
        let n = self.next();
        let Tok::Nat(arity) = n.tok else {
            return Err(syntax(
                &n,
                alloc::format!("expected an arity, found {}", describe(&n.tok)),
            ));
        };
        self.expect(';')?;
        self.sig
            .add(&name, arity as usize)
            .expect("name checked above");
        Ok(())
    }

    fn const_decl(&mut self) -> Result<(), ParseError> {
        let (name, t) = self.ident()?;
        self.declare_name(&name, &t)?;
        self.expect(';')?;
        self.sig.add(&name, 0).expect("name checked above");
        Ok(())
    }

    fn eq_decl(&mut self) -> Result<(), ParseError> {
        let lhs = self.term()?;
        self.expect('=')?;
        let rhs = self.term()?;
        self.expect(';')?;
        self.eqs.push(Equation::new(lhs, rhs));
        Ok(())
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (name, t) = self.ident()?;
        let has_args = self.peek().tok == Tok::Punct('(');
        if let Some(v) = self.vars.iter().position(|v| *v == name) {
            if has_args {
                return Err(syntax(
                    self.peek(),
                    alloc::format!("variable `{name}` cannot take arguments"),
                ));
            }
            return Ok(Term::Var(v));
        }
        let Some(sym) = self.sig.lookup(&name) else {
            let kind = if has_args {
                ParseErrorKind::UndeclaredSymbol(name)
            } else {
                ParseErrorKind::UndeclaredVariable(name)
            };
            return Err(ParseError::new(kind, t.line, t.col));
        };
        let mut args = Vec::new();
        if has_args {
            self.pos += 1;
            loop {
                args.push(self.term()?);
                let sep = self.next();
                match sep.tok {
                    Tok::Punct(',') => continue,
                    Tok::Punct(')') => break,
                    ref other => {
                        return Err(syntax(
                            &sep,
                            alloc::format!("expected `,` or `)`, found {}", describe(other)),
                        ))
                    }
                }
            }
        }
        let expected = self.sig.arity(sym);
        if expected != args.len() {
            return Err(ParseError::new(
                ParseErrorKind::ArityMismatch {
                    symbol: name,
                    expected,
                    found: args.len(),
                },
                t.line,
                t.col,
            ));
        }
        Ok(Term::App(sym, args))
    }
}

fn syntax(t: &Token, msg: String) -> ParseError {
    ParseError::new(ParseErrorKind::Syntax(msg), t.line, t.col)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => alloc::format!("`{s}`"),
        Tok::Nat(n) => alloc::format!("`{n}`"),
        Tok::Punct(c) => alloc::format!("`{c}`"),
        Tok::Eof => "end of input".to_string(),
    }
}
