//! Equations compiled to postfix code over a flat table store.
//!
//! Every symbol table lives at an offset inside one `entries` slice, so a
//! single integer (the entry id) names one cell of one table. Search code
//! mutates entries in place and relies on the evaluators below reporting
//! exactly which cells an evaluation looked at.

use alloc::vec::Vec;

use crate::term::{Elem, Term, TermInstance};

/// Marks a table cell that has not been decided yet.
pub(crate) const UNSET: Elem = Elem::MAX;

#[derive(Clone, Copy, Debug)]
pub(crate) enum Op {
    Var(u32),
    App { sym: u32, arity: u32 },
}

#[derive(Clone, Debug)]
pub(crate) struct Program {
    pub n: u32,
    pub offsets: Vec<usize>,
    eqs: Vec<(Vec<Op>, Vec<Op>)>,
    pub num_vars: usize,
}

/// Outcome of evaluating an equation system against partially filled tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Partial {
    Sat,
    Viol,
    /// Evaluation needed this undecided cell.
    Blocked(u32),
}

fn emit(t: &Term, out: &mut Vec<Op>) {
    match t {
        Term::Var(v) => out.push(Op::Var(*v as u32)),
        Term::App(s, args) => {
            for a in args {
                emit(a, out);
            }
            out.push(Op::App {
                sym: s.0 as u32,
                arity: args.len() as u32,
            });
        }
    }
}

/// Table offsets for a list of arities at alphabet size `n`; `None` when a
/// table would not fit in memory.
pub(crate) fn table_offsets(arities: &[usize], n: u32) -> Option<(Vec<usize>, usize)> {
    let mut offsets = Vec::with_capacity(arities.len());
    let mut total = 0usize;
    for &k in arities {
        offsets.push(total);
        let size = (n as usize).checked_pow(k as u32)?;
        total = total.checked_add(size)?;
    }
    if total > (1 << 31) {
        return None;
    }
    Some((offsets, total))
}

impl Program {
    pub fn new(inst: &TermInstance, n: u32, offsets: Vec<usize>) -> Program {
        let eqs = inst
            .equations
            .iter()
            .map(|eq| {
                let (mut l, mut r) = (Vec::new(), Vec::new());
                emit(&eq.lhs, &mut l);
                emit(&eq.rhs, &mut r);
                (l, r)
            })
            .collect();
        Program {
            n,
            offsets,
            eqs,
            num_vars: inst.num_vars(),
        }
    }

    /// Largest number of table reads a single assignment can make.
    pub fn max_reads(&self) -> usize {
        self.eqs
            .iter()
            .map(|(l, r)| {
                l.iter()
                    .chain(r)
                    .filter(|o| matches!(o, Op::App { .. }))
                    .count()
            })
            .sum()
    }

    #[inline]
    fn cell(&self, sym: u32, args: &[Elem]) -> usize {
        let mut idx = 0usize;
        for &a in args {
            idx = idx * self.n as usize + a as usize;
        }
        self.offsets[sym as usize] + idx
    }

    #[inline]
    fn run(&self, ops: &[Op], entries: &[Elem], a: &[Elem], stack: &mut Vec<Elem>) -> Elem {
        if let [Op::Var(v)] = ops {
            return a[*v as usize];
        }
        stack.clear();
        for op in ops {
            match *op {
                Op::Var(v) => stack.push(a[v as usize]),
                Op::App { sym, arity } => {
                    let base = stack.len() - arity as usize;
                    let e = self.cell(sym, &stack[base..]);
                    stack.truncate(base);
                    stack.push(entries[e]);
                }
            }
        }
        stack[0]
    }

    #[inline]
    fn run_tracking(
        &self,
        ops: &[Op],
        entries: &[Elem],
        a: &[Elem],
        stack: &mut Vec<Elem>,
        reads: &mut Vec<u32>,
    ) -> Elem {
        stack.clear();
        for op in ops {
            match *op {
                Op::Var(v) => stack.push(a[v as usize]),
                Op::App { sym, arity } => {
                    let base = stack.len() - arity as usize;
                    let e = self.cell(sym, &stack[base..]);
                    reads.push(e as u32);
                    stack.truncate(base);
                    stack.push(entries[e]);
                }
            }
        }
        stack[0]
    }

    #[inline]
    fn run_partial(
        &self,
        ops: &[Op],
        entries: &[Elem],
        a: &[Elem],
        stack: &mut Vec<Elem>,
    ) -> Result<Elem, u32> {
        stack.clear();
        for op in ops {
            match *op {
                Op::Var(v) => stack.push(a[v as usize]),
                Op::App { sym, arity } => {
                    let base = stack.len() - arity as usize;
                    let e = self.cell(sym, &stack[base..]);
                    let val = entries[e];
                    if val == UNSET {
                        return Err(e as u32);
                    }
                    stack.truncate(base);
                    stack.push(val);
                }
            }
        }
        Ok(stack[0])
    }

    /// Whether assignment `a` satisfies every equation. Stops at the first
    /// violated equation.
    #[inline]
    pub fn satisfied(&self, entries: &[Elem], a: &[Elem], stack: &mut Vec<Elem>) -> bool {
        self.eqs
            .iter()
            .all(|(l, r)| self.run(l, entries, a, stack) == self.run(r, entries, a, stack))
    }

    /// Like [`Program::satisfied`] but appends every cell read to `reads`.
    /// The outcome depends on no cell outside `reads`.
    pub fn satisfied_tracking(
        &self,
        entries: &[Elem],
        a: &[Elem],
        stack: &mut Vec<Elem>,
        reads: &mut Vec<u32>,
    ) -> bool {
        self.eqs.iter().all(|(l, r)| {
            self.run_tracking(l, entries, a, stack, reads)
                == self.run_tracking(r, entries, a, stack, reads)
        })
    }

    /// Evaluates against tables that may contain [`UNSET`] cells. A decided
    /// violation wins over a blocked equation.
    pub fn partial(&self, entries: &[Elem], a: &[Elem], stack: &mut Vec<Elem>) -> Partial {
        let mut blocked = None;
        for (l, r) in &self.eqs {
            let lv = self.run_partial(l, entries, a, stack);
            let rv = match lv {
                Ok(_) => self.run_partial(r, entries, a, stack),
                Err(e) => Err(e),
            };
            match (lv, rv) {
                (Ok(x), Ok(y)) if x != y => return Partial::Viol,
                (Ok(_), Ok(_)) => {}
                (Err(e), _) | (_, Err(e)) => {
                    blocked.get_or_insert(e);
                }
            }
        }
        match blocked {
            Some(e) => Partial::Blocked(e),
            None => Partial::Sat,
        }
    }
}

/// Decodes assignment index `idx` (row-major, last variable fastest).
pub(crate) fn decode(mut idx: u64, n: u32, out: &mut [Elem]) {
    for slot in out.iter_mut().rev() {
        *slot = (idx % n as u64) as Elem;
        idx /= n as u64;
    }
}

/// Advances an odometer; returns `false` after the last tuple.
#[inline]
pub(crate) fn increment(digits: &mut [Elem], n: u32) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < n {
            return true;
        }
        *d = 0;
    }
    false
}

/// `n^k` as `u64`, `None` on overflow.
pub(crate) fn checked_power(n: u64, k: usize) -> Option<u64> {
    n.checked_pow(u32::try_from(k).ok()?)
}

/// Counts satisfying assignments with indices in `lo..hi`.
pub(crate) fn count_range(prog: &Program, entries: &[Elem], lo: u64, hi: u64) -> u64 {
    if lo >= hi {
        return 0;
    }
    let mut a = alloc::vec![0; prog.num_vars];
    decode(lo, prog.n, &mut a);
    let mut stack = Vec::with_capacity(8);
    let mut count = 0;
    for _ in lo..hi {
        if prog.satisfied(entries, &a, &mut stack) {
            count += 1;
        }
        increment(&mut a, prog.n);
    }
    count
}
