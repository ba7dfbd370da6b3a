//! Lower bounds and exact values of the maximum code size by searching
//! over interpretations.

mod bnb;
pub mod dispersion;
pub mod ilp;
mod local;
pub mod sols;

use alloc::vec::Vec;

use crate::compile::{self, Program};
use crate::interp::{count_solutions, Interpretation};
use crate::term::{Elem, Term, TermInstance};
use crate::{bits, maskdfs, par, Error, Result};

pub use dispersion::{dispersion_max, encode_dispersion, DispersionProblem};
pub use ilp::{build_ilp, export_ilp, IlpModel};
pub use sols::{rsols_decoders, sdos_universal_check, sols_partial_max};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    BranchBound,
    Local,
}

/// How to search. `budget` means: the largest interpretation space an
/// exhaustive run may enumerate, the node limit of branch-and-bound, or the
/// number of moves per restart of local search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub mode: Mode,
    pub budget: u64,
    pub seed: u64,
    pub restarts: u32,
    /// Stop as soon as a code of this size is found.
    pub target: Option<u64>,
    /// Consecutive non-improving moves local search accepts.
    pub max_sideways: u32,
}

impl SearchConfig {
    pub fn exhaustive() -> Self {
        SearchConfig {
            mode: Mode::Exhaustive,
            budget: 1 << 40,
            seed: 0,
            restarts: 1,
            target: None,
            max_sideways: 0,
        }
    }

    pub fn branch_bound() -> Self {
        SearchConfig {
            mode: Mode::BranchBound,
            budget: 50_000_000,
            ..Self::exhaustive()
        }
    }

    pub fn local(seed: u64) -> Self {
        SearchConfig {
            mode: Mode::Local,
            budget: 200_000,
            seed,
            restarts: 16,
            target: None,
            max_sideways: 2_000,
        }
    }

    pub fn with_target(mut self, target: u64) -> Self {
        self.target = Some(target);
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub best_count: u64,
    pub witness: Interpretation,
    /// The count is the proven maximum.
    pub certified: bool,
    /// Interpretations scored, nodes visited or moves tried.
    pub evaluations: u64,
}

/// Number of interpretations of `arities` over `0..n`, saturating.
pub fn interpretation_space(arities: &[usize], n: u32) -> u128 {
    let mut space: u128 = 1;
    for &k in arities {
        let cells = (n as u128).saturating_pow(k as u32);
        let cells = u32::try_from(cells).unwrap_or(u32::MAX);
        space = space.saturating_mul((n as u128).saturating_pow(cells));
    }
    space
}

fn check_budget(arities: &[usize], n: u32, budget: u64) -> Result<u64> {
    let space = interpretation_space(arities, n);
    if space > budget as u128 {
        return Err(Error::BudgetExceeded {
            space: if space == u128::MAX {
                "more than 2^127 interpretations".into()
            } else {
                alloc::format!("{space} interpretations")
            },
            budget,
        });
    }
    Ok(space as u64)
}

pub(crate) fn assignments(num_vars: usize, n: u32) -> Result<u64> {
    compile::checked_power(n as u64, num_vars)
        .filter(|&a| a <= 1 << 32)
        .ok_or_else(|| Error::CapExceeded(alloc::format!("{n}^{num_vars} assignments")))
}

/// Outcome of a scan over every table vector in lexicographic order.
pub(crate) struct Scan {
    pub best: u64,
    pub entries: Vec<Elem>,
    pub hit_target: bool,
    pub evaluations: u64,
}

/// Scores every entry vector of length `cells` over `0..n` and returns the
/// lexicographically first best one. Work is cut into fixed chunks so the
/// result does not depend on the number of threads.
pub(crate) fn scan_all<F>(cells: usize, n: u32, space: u64, target: Option<u64>, score: F) -> Scan
where
    F: Fn(&[Elem]) -> u64 + Sync + Send,
{
    let chunks = par::split_range(space, par::CHUNKS);
    let parts = par::map_indices(chunks.len(), |i| {
        let (lo, hi) = chunks[i];
        let mut e = alloc::vec![0; cells];
        compile::decode(lo, n, &mut e);
        let mut best: Option<(u64, Vec<Elem>)> = None;
        let mut evals = 0u64;
        for _ in lo..hi {
            let s = score(&e);
            evals += 1;
            if best.as_ref().is_none_or(|(b, _)| s > *b) {
                best = Some((s, e.clone()));
                if target.is_some_and(|t| s >= t) {
                    return (best, evals, true);
                }
            }
            compile::increment(&mut e, n);
        }
        (best, evals, false)
    });
    let mut out = Scan {
        best: 0,
        entries: alloc::vec![0; cells],
        hit_target: false,
        evaluations: 0,
    };
    let mut have = false;
    for (best, evals, hit) in parts {
        out.evaluations += evals;
        if out.hit_target {
            continue;
        }
        if let Some((b, e)) = best {
            if !have || b > out.best {
                out.best = b;
                out.entries = e;
                out.hit_target = hit;
                have = true;
            }
        }
    }
    out
}

/// Finds a large code for `inst` on `0..n` (the maximum, in the certified
/// modes). The witness is recounted independently before it is returned.
pub fn search_max(inst: &TermInstance, n: u32, cfg: &SearchConfig) -> Result<SearchResult> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "alphabet size must be at least 1".into(),
        ));
    }
    let total = assignments(inst.num_vars(), n)?;
    let mut result = match cfg.mode {
        Mode::Exhaustive => exhaustive(inst, n, total, cfg)?,
        Mode::BranchBound => bnb::branch_bound(inst, n, total, cfg)?,
        Mode::Local => local::local_search(inst, n, total, cfg)?,
    };
    let recount = count_solutions(inst, &result.witness)?;
    if recount.count != result.best_count.into() {
        return Err(Error::Internal(alloc::format!(
            "witness recounts to {}, search reported {}",
            recount.count,
            result.best_count
        )));
    }
    if result.best_count == total {
        result.certified = true;
    }
    Ok(result)
}

fn exhaustive(inst: &TermInstance, n: u32, total: u64, cfg: &SearchConfig) -> Result<SearchResult> {
    let arities = inst.signature.arities();
    let space = check_budget(&arities, n, cfg.budget)?;
    let witness = Interpretation::zeros(&inst.signature, n)?;
    let cells = witness.entries().len();
    if total <= MASK_LIMIT {
        if let Some(units) = flat_units(inst, &witness, n, total) {
            let (start, masks) = units;
            let problem = maskdfs::Problem {
                words: bits::words_for(total as usize),
                masks,
            };
            let sol = problem.solve(&start, cfg.target);
            let witness = Interpretation::from_arities(&arities, n, Some(sol.choice))?;
            return Ok(SearchResult {
                best_count: sol.best,
                witness,
                certified: !sol.hit_target,
                evaluations: sol.nodes,
            });
        }
    }
    let prog = Program::new(inst, n, witness.offsets().to_vec());
    let scan = scan_all(cells, n, space, cfg.target, |e| {
        compile::count_range(&prog, e, 0, total)
    });
    Ok(SearchResult {
        best_count: scan.best,
        witness: Interpretation::from_arities(&arities, n, Some(scan.entries))?,
        certified: !scan.hit_target,
        evaluations: scan.evaluations,
    })
}

/// Largest assignment space kept as bitsets by the flat fast path.
const MASK_LIMIT: u64 = 1 << 22;

type Units = (Vec<u64>, Vec<Vec<Vec<u64>>>);

/// When every equation is `x = y`, `g(vars) = x` or `x = g(vars)`, each
/// table cell independently decides which assignments survive. Returns the
/// starting set and, per cell, the surviving set for each value.
fn flat_units(inst: &TermInstance, shape: &Interpretation, n: u32, total: u64) -> Option<Units> {
    enum Shape<'a> {
        Vars(usize, usize),
        App(usize, &'a [Term], usize),
    }
    fn flat_app(t: &Term) -> Option<(usize, &[Term])> {
        match t {
            Term::App(s, args) if args.iter().all(|a| matches!(a, Term::Var(_))) => {
                Some((s.0, args.as_slice()))
            }
            _ => None,
        }
    }
    let mut shapes = Vec::new();
    for eq in &inst.equations {
        let sh = match (&eq.lhs, &eq.rhs) {
            (Term::Var(a), Term::Var(b)) => Shape::Vars(*a, *b),
            (Term::Var(x), t) | (t, Term::Var(x)) => {
                let (s, args) = flat_app(t)?;
                Shape::App(s, args, *x)
            }
            _ => return None,
        };
        shapes.push(sh);
    }
    let total = total as usize;
    let mut start = bits::full(total);
    let cells = shape.entries().len();
    let mut masks: Vec<Vec<Vec<u64>>> = alloc::vec![Vec::new(); cells];
    let mut a = alloc::vec![0; inst.num_vars()];
    let mut args = Vec::new();
    for idx in 0..total {
        for sh in &shapes {
            match *sh {
                Shape::Vars(x, y) => {
                    if a[x] != a[y] {
                        bits::clear(&mut start, idx);
                    }
                }
                Shape::App(s, targs, rhs) => {
                    args.clear();
                    args.extend(targs.iter().map(|t| match t {
                        Term::Var(v) => a[*v],
                        Term::App(..) => unreachable!(),
                    }));
                    let cell = shape.offsets()[s] + crate::interp::tuple_index(n, &args);
                    let unit = &mut masks[cell];
                    if unit.is_empty() {
                        *unit = alloc::vec![bits::full(total); n as usize];
                    }
                    for (c, m) in unit.iter_mut().enumerate() {
                        if c as Elem != a[rhs] {
                            bits::clear(m, idx);
                        }
                    }
                }
            }
        }
        compile::increment(&mut a, n);
    }
    for unit in masks.iter_mut().filter(|u| u.is_empty()) {
        *unit = alloc::vec![bits::full(total); n as usize];
    }
    Some((start, masks))
}

/// Number of table cells across `arities` at size `n`.
pub(crate) fn total_cells(arities: &[usize], n: u32) -> Result<usize> {
    compile::table_offsets(arities, n)
        .map(|(_, t)| t)
        .ok_or_else(|| Error::CapExceeded(alloc::format!("tables at n={n} are too large")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_instance;

    const STS: &str = "var x y; fun f/2; eq f(x,x)=x; eq f(x,y)=f(y,x); eq f(x,f(x,y))=y;";

    #[test]
    fn sts_exhaustive() {
        let inst = parse_instance(STS).unwrap();
        let r2 = search_max(&inst, 2, &SearchConfig::exhaustive()).unwrap();
        assert_eq!((r2.best_count, r2.certified, r2.evaluations), (3, true, 16));
        let r3 = search_max(&inst, 3, &SearchConfig::exhaustive()).unwrap();
        assert_eq!((r3.best_count, r3.certified), (9, true));
    }

    #[test]
    fn lexicographically_first_witness() {
        let inst = parse_instance(STS).unwrap();
        let r = search_max(&inst, 2, &SearchConfig::exhaustive()).unwrap();
        // scan every table and keep the first maximiser
        let mut first = None;
        for code in 0..16u32 {
            let t: Vec<Elem> = (0..4).map(|i| code >> (3 - i) & 1).collect();
            let i = Interpretation::new(&inst.signature, 2, alloc::vec![t]).unwrap();
            let c = count_solutions(&inst, &i).unwrap().count;
            if c == 3u32.into() && first.is_none() {
                first = Some(i);
            }
        }
        assert_eq!(Some(r.witness), first);
    }

    #[test]
    fn budget_is_an_error() {
        let inst = parse_instance(STS).unwrap();
        let cfg = SearchConfig::exhaustive().with_budget(1000);
        assert!(matches!(
            search_max(&inst, 3, &cfg),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn flat_path_agrees_with_scan() {
        let inst =
            parse_instance("var x y z; fun f/2; fun g/2; eq f(x,y) = z; eq g(y,z) = x; eq x = x;")
                .unwrap();
        let fast = search_max(&inst, 2, &SearchConfig::exhaustive()).unwrap();
        let shape = Interpretation::zeros(&inst.signature, 2).unwrap();
        let prog = Program::new(&inst, 2, shape.offsets().to_vec());
        let slow = scan_all(8, 2, 256, None, |e| compile::count_range(&prog, e, 0, 8));
        assert_eq!(fast.best_count, slow.best);
        assert_eq!(fast.witness.entries(), &slow.entries[..]);
    }

    #[test]
    fn target_stops_uncertified() {
        let inst = parse_instance("var x y z; fun f/2; eq f(x,y) = z; eq f(y,x) = z;").unwrap();
        let r = search_max(&inst, 3, &SearchConfig::exhaustive().with_target(3)).unwrap();
        assert!(r.best_count >= 3);
    }

    #[test]
    fn modes_agree_on_small_instance() {
        let inst = parse_instance(STS).unwrap();
        let bb = search_max(&inst, 3, &SearchConfig::branch_bound()).unwrap();
        assert_eq!((bb.best_count, bb.certified), (9, true));
        let loc = search_max(&inst, 3, &SearchConfig::local(7)).unwrap();
        assert_eq!(loc.best_count, 9);
    }
}
