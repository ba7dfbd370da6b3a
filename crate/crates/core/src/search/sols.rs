//! Searches specific to the self-orthogonal Latin square instances.
//!
//! For the standard formulation the code of `(f, h1..h4)` is determined by
//! `f` and a cell set `C` on which `f` is a partial Latin square with an
//! injective superposition map; decoders can always be filled in afterwards.
//! So the search runs over `f` alone, scoring each table by a maximum
//! independent set in a conflict graph on the `n^2` cells.

use alloc::vec::Vec;

use rand::Rng;

use super::local::{climb, restart_rng, Scorer};
use super::{check_budget, scan_all, Mode, SearchConfig, SearchResult};
use crate::casestudies::{SDOS1_SOURCE, SOLS_SOURCE};
use crate::interp::{count_solutions, Interpretation};
use crate::parse::parse_instance;
use crate::term::{Elem, SymbolId, TermInstance};
use crate::{par, Error, Result};

/// Largest order whose `n^2` cells fit one machine word.
const MAX_ORDER: u32 = 8;

pub(crate) fn sols_instance() -> TermInstance {
    parse_instance(SOLS_SOURCE).expect("bundled source parses")
}

/// Cell-conflict masks of table `f` (row-major, `n x n`): two cells clash
/// when they break row or column injectivity or share a superposition pair.
fn conflicts(f: &[Elem], n: usize) -> Vec<u64> {
    let cells = n * n;
    let mut adj = alloc::vec![0u64; cells];
    let pair = |c: usize| (f[c], f[(c % n) * n + c / n]);
    for a in 0..cells {
        for b in a + 1..cells {
            let (xa, ya) = (a / n, a % n);
            let (xb, yb) = (b / n, b % n);
            let same_value = f[a] == f[b];
            let clash = (ya == yb && same_value) || (xa == xb && same_value) || pair(a) == pair(b);
            if clash {
                adj[a] |= 1 << b;
                adj[b] |= 1 << a;
            }
        }
    }
    adj
}

/// Maximum independent set, returned as a bitmask. Ties go to the set
/// found first when lower cells are tried in before out.
fn max_independent(adj: &[u64]) -> u64 {
    fn go(adj: &[u64], cand: u64, chosen: u64, best: &mut (u32, u64)) {
        if cand == 0 {
            if chosen.count_ones() > best.0 {
                *best = (chosen.count_ones(), chosen);
            }
            return;
        }
        if chosen.count_ones() + cand.count_ones() <= best.0 {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        let bit = 1u64 << v;
        go(adj, cand & !bit & !adj[v], chosen | bit, best);
        if adj[v] & cand != 0 {
            go(adj, cand & !bit, chosen, best);
        }
    }
    let full = if adj.len() == 64 {
        u64::MAX
    } else {
        (1u64 << adj.len()) - 1
    };
    let mut best = (0, 0);
    go(adj, full, 0, &mut best);
    best.1
}

/// Size of the largest admissible cell set for table `f` of order `n`.
pub(crate) fn partial_score(f: &[Elem], n: u32) -> u64 {
    max_independent(&conflicts(f, n as usize)).count_ones() as u64
}

/// Decoders realising every cell of `set` for table `f`; unused inputs map
/// to 0.
fn decoders(inst: &TermInstance, f: &[Elem], set: u64, n: u32) -> Result<Interpretation> {
    let nn = n as usize;
    let mut interp = Interpretation::zeros(&inst.signature, n)?;
    interp.table_mut(SymbolId(0)).copy_from_slice(f);
    for c in 0..nn * nn {
        if set >> c & 1 == 0 {
            continue;
        }
        let (x, y) = ((c / nn) as Elem, (c % nn) as Elem);
        let u = f[c];
        let v = f[(c % nn) * nn + c / nn];
        interp.set(SymbolId(1), &[u, y], x);
        interp.set(SymbolId(2), &[x, u], y);
        interp.set(SymbolId(3), &[u, v], x);
        interp.set(SymbolId(4), &[u, v], y);
    }
    Ok(interp)
}

struct MisScorer {
    n: usize,
    current: u64,
}

impl MisScorer {
    fn eval(&self, f: &[Elem]) -> u64 {
        max_independent(&conflicts(f, self.n)).count_ones() as u64
    }
}

impl Scorer for MisScorer {
    fn score(&self) -> u64 {
        self.current
    }

    fn delta(&mut self, entries: &mut [Elem], cell: usize, v: Elem) -> i64 {
        let old = entries[cell];
        entries[cell] = v;
        let s = self.eval(entries);
        entries[cell] = old;
        s as i64 - self.current as i64
    }

    fn commit(&mut self, entries: &mut [Elem], cell: usize, v: Elem) {
        entries[cell] = v;
        self.current = self.eval(entries);
    }

    fn hint(&self, _rng: &mut rand_chacha::ChaCha8Rng) -> Option<usize> {
        None
    }
}

/// Maximum code of the standard SOLS instance, searched over `f` tables.
/// The witness carries decoders and is recounted on the full instance.
pub fn sols_partial_max(n: u32, cfg: &SearchConfig) -> Result<SearchResult> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::InvalidArgument(alloc::format!(
            "order must be in 1..={MAX_ORDER}"
        )));
    }
    let inst = sols_instance();
    let nn = n as usize;
    let (f, evaluations, certified) = match cfg.mode {
        Mode::Exhaustive => {
            let space = check_budget(&[2], n, cfg.budget)?;
            let scan = scan_all(nn * nn, n, space, cfg.target, |f| {
                max_independent(&conflicts(f, nn)).count_ones() as u64
            });
            (scan.entries, scan.evaluations, !scan.hit_target)
        }
        Mode::Local => {
            let parts = par::map_indices(cfg.restarts.max(1) as usize, |r| {
                let mut rng = restart_rng(cfg.seed, r as u32);
                let mut f: Vec<Elem> = (0..nn * nn).map(|_| rng.random_range(0..n)).collect();
                let mut s = MisScorer { n: nn, current: 0 };
                s.current = s.eval(&f);
                climb(&mut s, &mut f, n, &mut rng, cfg)
            });
            let mut best: Option<(u64, Vec<Elem>)> = None;
            let mut moves = 0;
            for (b, e, m) in parts {
                moves += m;
                if best.as_ref().is_none_or(|(bb, _)| b > *bb) {
                    best = Some((b, e));
                }
            }
            (best.expect("at least one restart").1, moves, false)
        }
        Mode::BranchBound => {
            return Err(Error::InvalidArgument(
                "SOLS search supports exhaustive and local modes".into(),
            ));
        }
    };
    let set = max_independent(&conflicts(&f, nn));
    let witness = decoders(&inst, &f, set, n)?;
    let count = count_solutions(&inst, &witness)?.count;
    let best_count = u64::try_from(&count).map_err(|_| Error::Internal("count overflow".into()))?;
    // stray decoder defaults can only add cells, never exceed the optimum
    if best_count < set.count_ones() as u64 || (certified && best_count != set.count_ones() as u64)
    {
        return Err(Error::Internal(alloc::format!(
            "decoders realise {best_count} cells, expected {}",
            set.count_ones()
        )));
    }
    Ok(SearchResult {
        best_count,
        witness,
        certified,
        evaluations,
    })
}

/// Checks that a one-symbol binary table is a Latin square.
pub fn check_quasigroup(f: &Interpretation) -> Result<()> {
    if f.arities() != [2] {
        return Err(Error::InvalidArgument(
            "expected a single binary symbol".into(),
        ));
    }
    let n = f.n() as usize;
    let t = f.table(SymbolId(0));
    for i in 0..n {
        let mut row = alloc::vec![false; n];
        let mut col = alloc::vec![false; n];
        for j in 0..n {
            let (r, c) = (t[i * n + j] as usize, t[j * n + i] as usize);
            if core::mem::replace(&mut row[r], true) {
                return Err(Error::NotQuasigroup(alloc::format!("row {i} repeats {r}")));
            }
            if core::mem::replace(&mut col[c], true) {
                return Err(Error::NotQuasigroup(alloc::format!(
                    "column {i} repeats {c}"
                )));
            }
        }
    }
    Ok(())
}

/// Division operations for `h1, h2` and a lexicographically first section of
/// the superposition image for `h3, h4`. Returns the full interpretation
/// and `r`, the image size, recounted on the instance.
pub fn rsols_decoders(f: &Interpretation) -> Result<(Interpretation, u64)> {
    check_quasigroup(f)?;
    let n = f.n();
    let nn = n as usize;
    let t = f.table(SymbolId(0)).to_vec();
    let inst = sols_instance();
    let mut interp = Interpretation::zeros(&inst.signature, n)?;
    interp.table_mut(SymbolId(0)).copy_from_slice(&t);
    let mut seen = alloc::vec![false; nn * nn];
    let mut r = 0u64;
    for x in 0..n {
        for y in 0..n {
            let u = t[x as usize * nn + y as usize];
            let v = t[y as usize * nn + x as usize];
            interp.set(SymbolId(1), &[u, y], x);
            interp.set(SymbolId(2), &[x, u], y);
            let key = u as usize * nn + v as usize;
            if !core::mem::replace(&mut seen[key], true) {
                interp.set(SymbolId(3), &[u, v], x);
                interp.set(SymbolId(4), &[u, v], y);
                r += 1;
            }
        }
    }
    let count = count_solutions(&inst, &interp)?.count;
    if count != r.into() {
        return Err(Error::Internal(alloc::format!(
            "decoders realise {count} pairs, image has {r}"
        )));
    }
    Ok((interp, r))
}

/// Whether some single table satisfies the self-decoding identities at
/// every pair, by enumerating all tables.
pub fn sdos_universal_check(n: u32, budget: u64) -> Result<bool> {
    let inst = parse_instance(SDOS1_SOURCE).expect("bundled source parses");
    let ideal = (n as u64).pow(2);
    let cfg = SearchConfig::exhaustive()
        .with_budget(budget)
        .with_target(ideal);
    let r = super::search_max(&inst, n, &cfg)?;
    Ok(r.best_count == ideal)
}
