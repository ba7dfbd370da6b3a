//! Signatures, terms and term equation systems.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// An alphabet element. The alphabet of size `n` is always `0..n`.
pub type Elem = u32;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    /// Zero for constants.
    pub arity: usize,
}

/// A finite first-order signature; symbols keep their declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: &str, arity: usize) -> Result<SymbolId> {
        if self.lookup(name).is_some() {
            return Err(Error::Malformed(alloc::format!(
                "symbol `{name}` declared twice"
            )));
        }
        self.symbols.push(Symbol {
            name: name.to_string(),
            arity,
        });
        Ok(SymbolId(self.symbols.len() - 1))
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.symbols
            .iter()
            .position(|s| s.name == name)
            .map(SymbolId)
    }

    pub fn symbol(&self, id: SymbolId) -> &Symbol {
        &self.symbols[id.0]
    }

    pub fn arity(&self, id: SymbolId) -> usize {
        self.symbols[id.0].arity
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.symbols[id.0].name
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (SymbolId, &Symbol)> {
        self.symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (SymbolId(i), s))
    }

    pub fn arities(&self) -> Vec<usize> {
        self.symbols.iter().map(|s| s.arity).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// Index into the instance's variable list.
    Var(usize),
    App(SymbolId, Vec<Term>),
}

impl Term {
    pub fn app(sym: SymbolId, args: Vec<Term>) -> Term {
        Term::App(sym, args)
    }

    pub fn constant(sym: SymbolId) -> Term {
        Term::App(sym, Vec::new())
    }

    /// Number of application nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Calls `f` on every application symbol, outermost first.
    pub fn for_each_symbol(&self, f: &mut impl FnMut(SymbolId)) {
        if let Term::App(s, args) = self {
            f(*s);
            for a in args {
                a.for_each_symbol(f);
            }
        }
    }

    pub fn for_each_var(&self, f: &mut impl FnMut(usize)) {
        match self {
            Term::Var(v) => f(*v),
            Term::App(_, args) => {
                for a in args {
                    a.for_each_var(f);
                }
            }
        }
    }

    fn check(&self, sig: &Signature, nvars: usize) -> Result<()> {
        match self {
            Term::Var(v) if *v < nvars => Ok(()),
            Term::Var(v) => Err(Error::Malformed(alloc::format!(
                "variable index {v} out of range"
            ))),
            Term::App(s, args) => {
                if s.0 >= sig.len() {
                    return Err(Error::Malformed(alloc::format!(
                        "symbol index {} out of range",
                        s.0
                    )));
                }
                if sig.arity(*s) != args.len() {
                    return Err(Error::Malformed(alloc::format!(
                        "`{}` applied to {} argument(s), arity is {}",
                        sig.name(*s),
                        args.len(),
                        sig.arity(*s)
                    )));
                }
                args.iter().try_for_each(|a| a.check(sig, nvars))
            }
        }
    }

    pub fn display<'a>(&'a self, sig: &'a Signature, vars: &'a [String]) -> TermDisplay<'a> {
        TermDisplay {
            term: self,
            sig,
            vars,
        }
    }
}

pub struct TermDisplay<'a> {
    term: &'a Term,
    sig: &'a Signature,
    vars: &'a [String],
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Var(v) => f.write_str(&self.vars[*v]),
            Term::App(s, args) => {
                f.write_str(self.sig.name(*s))?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{}", a.display(self.sig, self.vars))?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Equation { lhs, rhs }
    }
}

/// A finite system of term equations over a signature and an ordered
/// variable list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TermInstance {
    pub signature: Signature,
    pub variables: Vec<String>,
    pub equations: Vec<Equation>,
}

impl TermInstance {
    /// Builds an instance, checking arities, indices and name uniqueness.
    pub fn new(
        signature: Signature,
        variables: Vec<String>,
        equations: Vec<Equation>,
    ) -> Result<Self> {
        let inst = TermInstance {
            signature,
            variables,
            equations,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, v) in self.variables.iter().enumerate() {
            if self.variables[..i].contains(v) {
                return Err(Error::Malformed(alloc::format!(
                    "variable `{v}` declared twice"
                )));
            }
            if self.signature.lookup(v).is_some() {
                return Err(Error::Malformed(alloc::format!(
                    "`{v}` is both a variable and a symbol"
                )));
            }
        }
        let nv = self.variables.len();
        for eq in &self.equations {
            eq.lhs.check(&self.signature, nv)?;
            eq.rhs.check(&self.signature, nv)?;
        }
        Ok(())
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }
}

/// Canonical DSL rendering: one `var` line, one line per symbol in
/// declaration order, one line per equation.
impl fmt::Display for TermInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.variables.is_empty() {
            f.write_str("var")?;
            for v in &self.variables {
                write!(f, " {v}")?;
            }
            f.write_str(";\n")?;
        }
        for (_, s) in self.signature.iter() {
            if s.arity == 0 {
                writeln!(f, "const {};", s.name)?;
            } else {
                writeln!(f, "fun {}/{};", s.name, s.arity)?;
            }
        }
        for eq in &self.equations {
            writeln!(
                f,
                "eq {} = {};",
                eq.lhs.display(&self.signature, &self.variables),
                eq.rhs.display(&self.signature, &self.variables)
            )?;
        }
        Ok(())
    }
}

/// Returns `base` if unused, otherwise `base` with the smallest numeric
/// suffix that is free.
pub(crate) fn fresh_name(base: &str, taken: &dyn Fn(&str) -> bool) -> String {
    if !taken(base) {
        return base.to_string();
    }
    let mut k = 1usize;
    loop {
        let cand = alloc::format!("{base}_{k}");
        if !taken(&cand) {
            return cand;
        }
        k += 1;
    }
}
