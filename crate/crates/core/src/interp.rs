//! Interpretations, term evaluation and exact code counting.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::compile::{self, Program};
use crate::par;
use crate::term::{Elem, Signature, SymbolId, Term, TermInstance};
use crate::{Error, Result};

/// Total operation tables for every symbol of a signature over `0..n`.
///
/// Tables are stored back to back; a `k`-ary table has `n^k` cells in
/// row-major tuple order (last argument varies fastest). The derived
/// ordering compares cell contents lexicographically once shapes agree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interpretation {
    n: u32,
    arities: Vec<usize>,
    offsets: Vec<usize>,
    entries: Vec<Elem>,
}

/// Row-major index of an argument tuple.
pub fn tuple_index(n: u32, args: &[Elem]) -> usize {
    args.iter()
        .fold(0usize, |acc, &a| acc * n as usize + a as usize)
}

impl Interpretation {
    /// All-zero tables.
    pub fn zeros(sig: &Signature, n: u32) -> Result<Self> {
        Self::from_arities(&sig.arities(), n, None)
    }

    pub(crate) fn from_arities(
        arities: &[usize],
        n: u32,
        entries: Option<Vec<Elem>>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "alphabet size must be at least 1".into(),
            ));
        }
        let (offsets, total) = compile::table_offsets(arities, n)
            .ok_or_else(|| Error::CapExceeded(alloc::format!("tables at n={n} are too large")))?;
        let entries = match entries {
            Some(e) if e.len() == total => e,
            Some(e) => {
                return Err(Error::Mismatch(alloc::format!(
                    "expected {total} table cells, got {}",
                    e.len()
                )));
            }
            None => alloc::vec![0; total],
        };
        if let Some(bad) = entries.iter().find(|&&v| v >= n) {
            return Err(Error::Mismatch(alloc::format!(
                "table value {bad} is outside 0..{n}"
            )));
        }
        Ok(Interpretation {
            n,
            arities: arities.to_vec(),
            offsets,
            entries,
        })
    }

    /// Builds an interpretation from one table per symbol, in signature order.
    pub fn new(sig: &Signature, n: u32, tables: Vec<Vec<Elem>>) -> Result<Self> {
        if tables.len() != sig.len() {
            return Err(Error::Mismatch(alloc::format!(
                "{} tables for {} symbols",
                tables.len(),
                sig.len()
            )));
        }
        for ((_, s), t) in sig.iter().zip(&tables) {
            let want = (n as usize)
                .checked_pow(s.arity as u32)
                .unwrap_or(usize::MAX);
            if t.len() != want {
                return Err(Error::Mismatch(alloc::format!(
                    "table for `{}` has {} cells, expected {want}",
                    s.name,
                    t.len()
                )));
            }
        }
        Self::from_arities(&sig.arities(), n, Some(tables.concat()))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn num_symbols(&self) -> usize {
        self.arities.len()
    }

    pub fn table(&self, sym: SymbolId) -> &[Elem] {
        let lo = self.offsets[sym.0];
        let hi = self
            .offsets
            .get(sym.0 + 1)
            .copied()
            .unwrap_or(self.entries.len());
        &self.entries[lo..hi]
    }

    pub fn table_mut(&mut self, sym: SymbolId) -> &mut [Elem] {
        let lo = self.offsets[sym.0];
        let hi = self
            .offsets
            .get(sym.0 + 1)
            .copied()
            .unwrap_or(self.entries.len());
        &mut self.entries[lo..hi]
    }

    /// All cells, symbol after symbol.
    pub fn entries(&self) -> &[Elem] {
        &self.entries
    }

    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn apply(&self, sym: SymbolId, args: &[Elem]) -> Elem {
        debug_assert_eq!(args.len(), self.arities[sym.0]);
        self.table(sym)[tuple_index(self.n, args)]
    }

    pub fn set(&mut self, sym: SymbolId, args: &[Elem], value: Elem) {
        assert!(
            value < self.n,
            "value {value} outside alphabet of size {}",
            self.n
        );
        let i = tuple_index(self.n, args);
        self.table_mut(sym)[i] = value;
    }

    /// Whether this interpretation has exactly the symbol shapes of `sig`.
    pub fn fits(&self, sig: &Signature) -> bool {
        self.arities == sig.arities()
    }

    fn check_fits(&self, sig: &Signature) -> Result<()> {
        if self.fits(sig) {
            Ok(())
        } else {
            Err(Error::Mismatch(alloc::format!(
                "interpretation arities {:?} do not match signature arities {:?}",
                self.arities,
                sig.arities()
            )))
        }
    }

    /// Transports every table along the alphabet bijection `perm`:
    /// the result maps `(perm a_1, .., perm a_k)` to `perm f(a_1, .., a_k)`.
    pub fn conjugate(&self, perm: &[Elem]) -> Interpretation {
        assert_eq!(perm.len(), self.n as usize);
        let mut out = self.clone();
        let n = self.n as usize;
        for (s, &k) in self.arities.iter().enumerate() {
            let off = self.offsets[s];
            let mut args = alloc::vec![0; k];
            for i in 0..n.pow(k as u32) {
                compile::decode(i as u64, self.n, &mut args);
                let image: Vec<Elem> = args.iter().map(|&a| perm[a as usize]).collect();
                let j = tuple_index(self.n, &image);
                out.entries[off + j] = perm[self.entries[off + i] as usize];
            }
        }
        out
    }

    /// Text form: `n=<n>` then `<name>: v0 v1 ...` per symbol.
    pub fn to_text(&self, sig: &Signature) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n={}", self.n);
        for (id, sym) in sig.iter() {
            let _ = write!(s, "{}:", sym.name);
            for v in self.table(id) {
                let _ = write!(s, " {v}");
            }
            s.push('\n');
        }
        s
    }

    /// Reads the text form. Every symbol of `sig` must appear exactly once;
    /// blank lines and `#` comments are ignored.
    pub fn parse_text(sig: &Signature, text: &str) -> Result<Self> {
        let mut n: Option<u32> = None;
        let mut tables: Vec<Option<Vec<Elem>>> = alloc::vec![None; sig.len()];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Mismatch(alloc::format!("line {}: {msg}", lineno + 1));
            if n.is_none() {
                let v = line
                    .strip_prefix("n=")
                    .and_then(|v| v.trim().parse::<u32>().ok())
                    .ok_or_else(|| bad("expected header `n=<size>`".into()))?;
                n = Some(v);
                continue;
            }
            let (name, values) = line
                .split_once(':')
                .ok_or_else(|| bad("expected `<symbol>: values`".into()))?;
            let name = name.trim();
            let id = sig
                .lookup(name)
                .ok_or_else(|| bad(alloc::format!("unknown symbol `{name}`")))?;
            if tables[id.0].is_some() {
                return Err(bad(alloc::format!("symbol `{name}` given twice")));
            }
            let vals = values
                .split_whitespace()
                .map(|v| v.parse::<Elem>())
                .collect::<core::result::Result<Vec<_>, _>>()
                .map_err(|_| bad("table values must be natural numbers".into()))?;
            tables[id.0] = Some(vals);
        }
        let n = n.ok_or_else(|| Error::Mismatch("missing `n=` header".into()))?;
        let tables = tables
            .into_iter()
            .zip(sig.iter())
            .map(|(t, (_, s))| {
                t.ok_or_else(|| Error::Mismatch(alloc::format!("no table for `{}`", s.name)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sig, n, tables)
    }
}

/// Evaluates `t` bottom-up at `assignment` (indexed like the instance's
/// variable list).
pub fn evaluate_term(t: &Term, interp: &Interpretation, assignment: &[Elem]) -> Elem {
    match t {
        Term::Var(v) => assignment[*v],
        Term::App(s, args) => {
            let vals: Vec<Elem> = args
                .iter()
                .map(|a| evaluate_term(a, interp, assignment))
                .collect();
            interp.apply(*s, &vals)
        }
    }
}

/// Size of one code `S_I(Γ)` together with its normalised exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeReport {
    pub count: BigUint,
    pub n: u32,
    pub num_vars: usize,
    /// `log_n count`; absent when `n <= 1` or the code is empty.
    pub normalized_exponent: Option<f64>,
}

impl CodeReport {
    pub fn new(count: BigUint, n: u32, num_vars: usize) -> Self {
        let normalized_exponent = if n <= 1 || count.is_zero() {
            None
        } else {
            exact_log(&count, n)
                .or_else(|| count.to_f64().map(|c| libm::log(c) / libm::log(n as f64)))
        };
        CodeReport {
            count,
            n,
            num_vars,
            normalized_exponent,
        }
    }

    /// `n^v`, the largest possible code.
    pub fn ideal(&self) -> BigUint {
        num_traits::pow(BigUint::from(self.n), self.num_vars)
    }
}

/// `k` when `count == n^k`.
fn exact_log(count: &BigUint, n: u32) -> Option<f64> {
    let base = BigUint::from(n);
    let mut p = BigUint::from(1u32);
    let mut k = 0u32;
    while &p < count {
        p *= &base;
        k += 1;
    }
    (&p == count).then_some(k as f64)
}

/// Assignment spaces this small are counted on the calling thread.
const SERIAL_LIMIT: u64 = 1 << 12;

/// Counts the assignments in `A^v` satisfying every equation of `inst`
/// under `interp`, by enumerating all of them.
pub fn count_solutions(inst: &TermInstance, interp: &Interpretation) -> Result<CodeReport> {
    interp.check_fits(&inst.signature)?;
    let n = interp.n();
    let total = compile::checked_power(n as u64, inst.num_vars())
        .ok_or_else(|| Error::CapExceeded(alloc::format!("{n}^{} assignments", inst.num_vars())))?;
    let prog = Program::new(inst, n, interp.offsets().to_vec());
    let entries = interp.entries();
    if total <= SERIAL_LIMIT {
        let count = compile::count_range(&prog, entries, 0, total);
        return Ok(CodeReport::new(count.into(), n, inst.num_vars()));
    }
    let chunks = par::split_range(total, par::CHUNKS);
    let parts = par::map_indices(chunks.len(), |i| {
        compile::count_range(&prog, entries, chunks[i].0, chunks[i].1)
    });
    let count: BigUint = parts.into_iter().fold(BigUint::zero(), |acc, c| acc + c);
    Ok(CodeReport::new(count, n, inst.num_vars()))
}

/// Same count as [`count_solutions`], found by assigning variables in order
/// and checking each equation as soon as its last variable is set. Fast when
/// later variables are defined by earlier ones, as after flattening.
pub fn count_solutions_backtrack(
    inst: &TermInstance,
    interp: &Interpretation,
) -> Result<CodeReport> {
    interp.check_fits(&inst.signature)?;
    let v = inst.num_vars();
    let mut at_level: Vec<Vec<usize>> = alloc::vec![Vec::new(); v + 1];
    for (i, eq) in inst.equations.iter().enumerate() {
        let mut last = None;
        eq.lhs.for_each_var(&mut |x| last = last.max(Some(x)));
        eq.rhs.for_each_var(&mut |x| last = last.max(Some(x)));
        at_level[last.map_or(0, |x| x + 1)].push(i);
    }
    let holds = |ids: &[usize], a: &[Elem]| {
        ids.iter().all(|&i| {
            let eq = &inst.equations[i];
            evaluate_term(&eq.lhs, interp, a) == evaluate_term(&eq.rhs, interp, a)
        })
    };
    let n = interp.n();
    let mut a = alloc::vec![0; v];
    let mut count = BigUint::zero();
    if holds(&at_level[0], &a) {
        // depth-first over levels 1..=v with an explicit stack of next values
        let mut depth = 0usize;
        let mut next = alloc::vec![0u32; v];
        if v == 0 {
            count += 1u32;
        }
        while depth < v {
            if next[depth] == n {
                next[depth] = 0;
                if depth == 0 {
                    break;
                }
                depth -= 1;
                continue;
            }
            a[depth] = next[depth];
            next[depth] += 1;
            if !holds(&at_level[depth + 1], &a) {
                continue;
            }
            if depth + 1 == v {
                count += 1u32;
            } else {
                depth += 1;
            }
        }
    }
    Ok(CodeReport::new(count, n, v))
}

/// Lists the satisfying assignments in row-major order.
pub fn solutions(inst: &TermInstance, interp: &Interpretation) -> Result<Vec<Vec<Elem>>> {
    interp.check_fits(&inst.signature)?;
    let n = interp.n();
    let total = compile::checked_power(n as u64, inst.num_vars())
        .ok_or_else(|| Error::CapExceeded(alloc::format!("{n}^{} assignments", inst.num_vars())))?;
    let prog = Program::new(inst, n, interp.offsets().to_vec());
    let mut a = alloc::vec![0; inst.num_vars()];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    for _ in 0..total {
        if prog.satisfied(interp.entries(), &a, &mut stack) {
            out.push(a.clone());
        }
        compile::increment(&mut a, n);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_instance;

    const STS: &str = "var x y; fun f/2; eq f(x,x)=x; eq f(x,y)=f(y,x); eq f(x,f(x,y))=y;";

    fn sts3(sig: &Signature) -> Interpretation {
        Interpretation::new(sig, 3, alloc::vec![alloc::vec![0, 2, 1, 2, 1, 0, 1, 0, 2]]).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        let inst = parse_instance(STS).unwrap();
        let i = sts3(&inst.signature);
        assert_eq!(evaluate_term(&Term::Var(0), &i, &[2, 0]), 2);
        let f = SymbolId(0);
        assert_eq!(i.apply(f, &[1, 2]), 0);
        let nested = &inst.equations[2].lhs;
        assert_eq!(evaluate_term(nested, &i, &[0, 1]), 1);
    }

    #[test]
    fn sts_witnesses() {
        let inst = parse_instance(STS).unwrap();
        let r = count_solutions(&inst, &sts3(&inst.signature)).unwrap();
        assert_eq!(r.count, BigUint::from(9u32));
        assert_eq!(r.normalized_exponent, Some(2.0));
        let t4 = alloc::vec![0, 0, 0, 0, 0, 1, 3, 2, 0, 3, 2, 1, 0, 2, 1, 3];
        let i4 = Interpretation::new(&inst.signature, 4, alloc::vec![t4]).unwrap();
        assert_eq!(
            count_solutions(&inst, &i4).unwrap().count,
            BigUint::from(13u32)
        );
        let sols = solutions(&inst, &i4).unwrap();
        assert_eq!(sols.len(), 13);
        for miss in [[0, 1], [0, 2], [0, 3]] {
            assert!(!sols.contains(&miss.to_vec()));
        }
    }

    #[test]
    fn backtracking_count_agrees() {
        let inst = parse_instance(STS).unwrap();
        let i = sts3(&inst.signature);
        assert_eq!(
            count_solutions_backtrack(&inst, &i).unwrap().count,
            BigUint::from(9u32)
        );
        let t4 = alloc::vec![0, 0, 0, 0, 0, 1, 3, 2, 0, 3, 2, 1, 0, 2, 1, 3];
        let i4 = Interpretation::new(&inst.signature, 4, alloc::vec![t4]).unwrap();
        assert_eq!(
            count_solutions_backtrack(&inst, &i4).unwrap().count,
            BigUint::from(13u32)
        );
        let free = parse_instance("var x y;").unwrap();
        let z = Interpretation::zeros(&free.signature, 5).unwrap();
        assert_eq!(
            count_solutions_backtrack(&free, &z).unwrap().count,
            BigUint::from(25u32)
        );
        let none = parse_instance("const c; const d; eq c = d;").unwrap();
        let mut cd = Interpretation::zeros(&none.signature, 2).unwrap();
        assert_eq!(
            count_solutions_backtrack(&none, &cd).unwrap().count,
            BigUint::from(1u32)
        );
        cd.set(SymbolId(1), &[], 1);
        assert!(count_solutions_backtrack(&none, &cd)
            .unwrap()
            .count
            .is_zero());
    }

    #[test]
    fn no_equations_counts_everything() {
        let inst = parse_instance("var x y;").unwrap();
        let i = Interpretation::zeros(&inst.signature, 5).unwrap();
        assert_eq!(
            count_solutions(&inst, &i).unwrap().count,
            BigUint::from(25u32)
        );
    }

    #[test]
    fn empty_code_has_no_exponent() {
        let inst = parse_instance("var x; const c; const d; eq c = d;").unwrap();
        let mut i = Interpretation::zeros(&inst.signature, 2).unwrap();
        i.set(SymbolId(1), &[], 1);
        let r = count_solutions(&inst, &i).unwrap();
        assert!(r.count.is_zero());
        assert_eq!(r.normalized_exponent, None);
        let one = Interpretation::zeros(&inst.signature, 1).unwrap();
        assert_eq!(
            count_solutions(&inst, &one).unwrap().normalized_exponent,
            None
        );
    }

    #[test]
    fn trivial_variable_equation() {
        let inst = parse_instance("var x; eq x = x;").unwrap();
        let i = Interpretation::zeros(&inst.signature, 4).unwrap();
        assert_eq!(
            count_solutions(&inst, &i).unwrap().count,
            BigUint::from(4u32)
        );
    }

    #[test]
    fn mismatched_interpretation_rejected() {
        let inst = parse_instance(STS).unwrap();
        let other = parse_instance("fun g/1;").unwrap();
        let i = Interpretation::zeros(&other.signature, 2).unwrap();
        assert!(matches!(
            count_solutions(&inst, &i),
            Err(Error::Mismatch(_))
        ));
    }

    #[test]
    fn text_format_roundtrip_and_errors() {
        let inst = parse_instance("const c; fun f/2;").unwrap();
        let mut i = Interpretation::zeros(&inst.signature, 2).unwrap();
        i.set(SymbolId(0), &[], 1);
        i.set(SymbolId(1), &[1, 0], 1);
        let text = i.to_text(&inst.signature);
        assert_eq!(text, "n=2\nc: 1\nf: 0 0 1 0\n");
        assert_eq!(
            Interpretation::parse_text(&inst.signature, &text).unwrap(),
            i
        );
        assert!(Interpretation::parse_text(&inst.signature, "n=2\nc: 1\n").is_err());
        assert!(Interpretation::parse_text(&inst.signature, "n=2\nc: 2\nf: 0 0 0 0\n").is_err());
        assert!(Interpretation::parse_text(&inst.signature, "n=2\nc: 1\nf: 0 0 0\n").is_err());
    }

    #[test]
    fn conjugation_relabels_tables() {
        let inst = parse_instance(STS).unwrap();
        let i = sts3(&inst.signature);
        let perm = [1, 2, 0];
        let c = i.conjugate(&perm);
        for a in 0..3 {
            for b in 0..3 {
                let lhs = c.apply(SymbolId(0), &[perm[a], perm[b]]);
                assert_eq!(
                    lhs,
                    perm[i.apply(SymbolId(0), &[a as Elem, b as Elem]) as usize]
                );
            }
        }
    }
}
