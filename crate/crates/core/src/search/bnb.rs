//! Depth-first branch-and-bound over partially filled tables.
//!
//! A node fixes some table cells and leaves the rest at `UNSET`. Every
//! assignment is then satisfied, violated, or blocked on an undecided cell;
//! satisfied plus blocked bounds every completion. The next cell fixed is the
//! one blocking the most assignments.

use alloc::vec::Vec;

use super::{total_cells, SearchConfig, SearchResult};
use crate::compile::{self, Partial, Program, UNSET};
use crate::interp::Interpretation;
use crate::term::{Elem, TermInstance};
use crate::{par, Error, Result};

/// Largest assignment space branch-and-bound keeps explicit lists for.
const MAX_ASSIGNMENTS: u64 = 1 << 24;

struct Node {
    sat: u64,
    /// Assignments still blocked, with the cell each is waiting on.
    blocked: Vec<(u32, u32)>,
}

struct Bnb<'a> {
    prog: &'a Program,
    entries: Vec<Elem>,
    tally: Vec<u32>,
    best: i64,
    best_entries: Vec<Elem>,
    nodes: u64,
    budget: u64,
    target: Option<u64>,
    stopped: bool,
    hit: bool,
    a: Vec<Elem>,
    stack: Vec<Elem>,
}

impl Bnb<'_> {
    /// Re-evaluates the still-blocked assignments after one cell was fixed.
    fn refine(&mut self, parent: &Node, cell: u32) -> Node {
        let mut node = Node {
            sat: parent.sat,
            blocked: Vec::with_capacity(parent.blocked.len()),
        };
        for &(idx, waiting) in &parent.blocked {
            if waiting != cell {
                node.blocked.push((idx, waiting));
                continue;
            }
            compile::decode(idx as u64, self.prog.n, &mut self.a);
            match self.prog.partial(&self.entries, &self.a, &mut self.stack) {
                Partial::Sat => node.sat += 1,
                Partial::Viol => {}
                Partial::Blocked(e) => node.blocked.push((idx, e)),
            }
        }
        node
    }

    fn leaf(&mut self, count: u64) {
        if count as i64 > self.best {
            self.best = count as i64;
            self.best_entries = self
                .entries
                .iter()
                .map(|&v| if v == UNSET { 0 } else { v })
                .collect();
            if self.target.is_some_and(|t| count >= t) {
                self.hit = true;
                self.stopped = true;
            }
        }
    }

    fn branch_cell(&mut self, node: &Node) -> u32 {
        for &(_, e) in &node.blocked {
            self.tally[e as usize] += 1;
        }
        let mut pick = u32::MAX;
        let mut most = 0;
        for &(_, e) in &node.blocked {
            let t = self.tally[e as usize];
            if t > most || (t == most && e < pick) {
                most = t;
                pick = e;
            }
        }
        for &(_, e) in &node.blocked {
            self.tally[e as usize] = 0;
        }
        pick
    }

    fn go(&mut self, node: Node) {
        if self.stopped {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.stopped = true;
            return;
        }
        if (node.sat + node.blocked.len() as u64) as i64 <= self.best {
            return;
        }
        if node.blocked.is_empty() {
            self.leaf(node.sat);
            return;
        }
        let cell = self.branch_cell(&node);
        for v in 0..self.prog.n {
            self.entries[cell as usize] = v;
            let child = self.refine(&node, cell);
            self.go(child);
            if self.stopped {
                break;
            }
        }
        self.entries[cell as usize] = UNSET;
    }
}

pub(crate) fn branch_bound(
    inst: &TermInstance,
    n: u32,
    total: u64,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    if total > MAX_ASSIGNMENTS {
        return Err(Error::CapExceeded(alloc::format!(
            "{total} assignments exceed the branch-and-bound limit {MAX_ASSIGNMENTS}"
        )));
    }
    let arities = inst.signature.arities();
    let cells = total_cells(&arities, n)?;
    let shape = Interpretation::from_arities(&arities, n, None)?;
    let prog = Program::new(inst, n, shape.offsets().to_vec());
    let fresh = |entries: Vec<Elem>, budget: u64| Bnb {
        prog: &prog,
        entries,
        tally: alloc::vec![0; cells],
        best: -1,
        best_entries: alloc::vec![0; cells],
        nodes: 0,
        budget,
        target: cfg.target,
        stopped: false,
        hit: false,
        a: alloc::vec![0; inst.num_vars()],
        stack: Vec::new(),
    };

    // root: every assignment waits on something or is already decided
    let mut root_search = fresh(alloc::vec![UNSET; cells], cfg.budget);
    let mut root = Node {
        sat: 0,
        blocked: Vec::new(),
    };
    for idx in 0..total {
        compile::decode(idx, n, &mut root_search.a);
        match prog.partial(&root_search.entries, &root_search.a, &mut root_search.stack) {
            Partial::Sat => root.sat += 1,
            Partial::Viol => {}
            Partial::Blocked(e) => root.blocked.push((idx as u32, e)),
        }
    }
    if root.blocked.is_empty() {
        root_search.leaf(root.sat);
        return finish(
            &prog,
            &arities,
            n,
            root_search.best,
            root_search.best_entries,
            1,
            true,
        );
    }

    // split on the first branching cell; each value is an independent subtree
    let cell = root_search.branch_cell(&root);
    let per_branch = (cfg.budget / n as u64).max(1);
    let parts = par::map_indices(n as usize, |v| {
        let mut entries = alloc::vec![UNSET; cells];
        entries[cell as usize] = v as Elem;
        let mut s = fresh(entries, per_branch);
        let child = s.refine(&root, cell);
        s.go(child);
        (s.best, s.best_entries, s.nodes, s.stopped && !s.hit, s.hit)
    });
    let mut best = -1i64;
    let mut best_entries = alloc::vec![0; cells];
    let mut nodes = 1;
    let mut complete = true;
    let mut hit = false;
    for (b, e, k, out_of_budget, h) in parts {
        nodes += k;
        complete &= !out_of_budget;
        if hit {
            continue;
        }
        if b > best {
            best = b;
            best_entries = e;
            hit = h;
        }
    }
    finish(
        &prog,
        &arities,
        n,
        best,
        best_entries,
        nodes,
        complete && !hit,
    )
}

fn finish(
    prog: &Program,
    arities: &[usize],
    n: u32,
    best: i64,
    entries: Vec<Elem>,
    nodes: u64,
    certified: bool,
) -> Result<SearchResult> {
    // no leaf reached within budget: report the all-zero tables honestly
    let best_count = if best < 0 {
        let total = compile::checked_power(n as u64, prog.num_vars).unwrap_or(0);
        compile::count_range(prog, &entries, 0, total)
    } else {
        best as u64
    };
    Ok(SearchResult {
        best_count,
        witness: Interpretation::from_arities(arities, n, Some(entries))?,
        certified,
        evaluations: nodes,
    })
}
