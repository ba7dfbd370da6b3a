//! Guessing games on dependency graphs.
//!
//! Every non-source vertex guesses its own value from the values of its
//! in-neighbours. A configuration wins when every guess is right. In the
//! labelled game configurations assign values to labels, so vertices that
//! share a label share a value.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::depgraph::{c5_graph, DepDigraph, LabelledDepGraph};
use crate::interp::tuple_index;
use crate::term::Elem;
use crate::{bits, compile, maskdfs, par, Error, Result};

/// Default cap on the number of strategies the brute force may visit.
pub const DEFAULT_BUDGET: u64 = 1 << 40;

/// Largest configuration space the brute force keeps as bitsets.
const MAX_CONFIGS: u64 = 1 << 24;

/// The view of a graph a guessing game needs.
pub trait GameGraph: Sync {
    fn num_vertices(&self) -> usize;
    /// Number of coordinates of a configuration.
    fn num_coords(&self) -> usize;
    /// Coordinate holding the value of vertex `v`.
    fn coord(&self, v: usize) -> usize;
    fn is_source(&self, v: usize) -> bool;
    /// Sorted in-neighbours of `v`.
    fn in_neighbours(&self, v: usize) -> &[usize];
}

impl GameGraph for DepDigraph {
    fn num_vertices(&self) -> usize {
        self.names.len()
    }
    fn num_coords(&self) -> usize {
        self.names.len()
    }
    fn coord(&self, v: usize) -> usize {
        v
    }
    fn is_source(&self, v: usize) -> bool {
        DepDigraph::is_source(self, v)
    }
    fn in_neighbours(&self, v: usize) -> &[usize] {
        DepDigraph::in_neighbours(self, v)
    }
}

impl GameGraph for LabelledDepGraph {
    fn num_vertices(&self) -> usize {
        self.label_of.len()
    }
    fn num_coords(&self) -> usize {
        self.labels.len()
    }
    fn coord(&self, v: usize) -> usize {
        self.label_of[v]
    }
    fn is_source(&self, v: usize) -> bool {
        LabelledDepGraph::is_source(self, v)
    }
    fn in_neighbours(&self, v: usize) -> &[usize] {
        LabelledDepGraph::in_neighbours(self, v)
    }
}

/// One local function per non-source vertex, indexed row-major over the
/// values of its sorted in-neighbours.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Strategy {
    pub n: u32,
    pub tables: Vec<Option<Vec<Elem>>>,
}

impl Strategy {
    /// Tabulates `rule(v, in-neighbour values)` for every non-source vertex.
    pub fn from_fn<G: GameGraph>(
        g: &G,
        n: u32,
        mut rule: impl FnMut(usize, &[Elem]) -> Elem,
    ) -> Result<Self> {
        let mut tables = Vec::with_capacity(g.num_vertices());
        for v in 0..g.num_vertices() {
            if g.is_source(v) {
                tables.push(None);
                continue;
            }
            let d = g.in_neighbours(v).len();
            let size = compile::checked_power(n as u64, d)
                .filter(|&s| s <= 1 << 31)
                .ok_or_else(|| Error::CapExceeded(alloc::format!("table of {n}^{d} cells")))?;
            let mut args = alloc::vec![0; d];
            let mut t = Vec::with_capacity(size as usize);
            for i in 0..size {
                compile::decode(i, n, &mut args);
                let val = rule(v, &args);
                if val >= n {
                    return Err(Error::InvalidArgument(alloc::format!(
                        "rule value {val} outside 0..{n}"
                    )));
                }
                t.push(val);
            }
            tables.push(Some(t));
        }
        Ok(Strategy { n, tables })
    }

    /// Every vertex guesses `value`.
    pub fn constant<G: GameGraph>(g: &G, n: u32, value: Elem) -> Result<Self> {
        Self::from_fn(g, n, |_, _| value)
    }

    pub fn check<G: GameGraph>(&self, g: &G) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument(
                "alphabet size must be at least 1".into(),
            ));
        }
        if self.tables.len() != g.num_vertices() {
            return Err(Error::Mismatch(alloc::format!(
                "strategy has {} vertices, graph has {}",
                self.tables.len(),
                g.num_vertices()
            )));
        }
        for (v, t) in self.tables.iter().enumerate() {
            match (g.is_source(v), t) {
                (true, None) => {}
                (true, Some(_)) => {
                    return Err(Error::Mismatch(alloc::format!(
                        "source vertex {v} has a table"
                    )))
                }
                (false, None) => {
                    return Err(Error::Mismatch(alloc::format!("vertex {v} has no table")))
                }
                (false, Some(t)) => {
                    let want = (self.n as u64).checked_pow(g.in_neighbours(v).len() as u32);
                    if want != Some(t.len() as u64) {
                        return Err(Error::Mismatch(alloc::format!(
                            "table of vertex {v} has the wrong size"
                        )));
                    }
                    if t.iter().any(|&x| x >= self.n) {
                        return Err(Error::Mismatch(alloc::format!(
                            "table of vertex {v} leaves the alphabet"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Text form: `n=<n>` then `<vertex>: values` for non-source vertices.
    pub fn to_text(&self, names: &[String]) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n={}", self.n);
        for (v, t) in self.tables.iter().enumerate() {
            if let Some(t) = t {
                let _ = write!(s, "{}:", names[v]);
                for x in t {
                    let _ = write!(s, " {x}");
                }
                s.push('\n');
            }
        }
        s
    }
}

impl Strategy {
    /// Reads the text form keyed by `names`. Every non-source vertex needs
    /// exactly one line; blank lines and `#` comments are ignored.
    pub fn parse_text<G: GameGraph>(g: &G, names: &[String], text: &str) -> Result<Self> {
        let mut n: Option<u32> = None;
        let mut tables: Vec<Option<Vec<Elem>>> = alloc::vec![None; g.num_vertices()];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Mismatch(alloc::format!("line {}: {msg}", lineno + 1));
            let Some(size) = n else {
                let v = line
                    .strip_prefix("n=")
                    .and_then(|v| v.trim().parse::<u32>().ok())
                    .ok_or_else(|| bad("expected header `n=<size>`".into()))?;
                n = Some(v);
                continue;
            };
            let (name, values) = line
                .split_once(':')
                .ok_or_else(|| bad("expected `<vertex>: values`".into()))?;
            let name = name.trim();
            let v = names
                .iter()
                .position(|x| x == name)
                .filter(|&v| !g.is_source(v))
                .ok_or_else(|| bad(alloc::format!("`{name}` is not a guessing vertex")))?;
            if tables[v].is_some() {
                return Err(bad(alloc::format!("vertex `{name}` given twice")));
            }
            let vals = values
                .split_whitespace()
                .map(|x| x.parse::<Elem>().ok().filter(|&x| x < size))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| bad(alloc::format!("values must lie in 0..{size}")))?;
            tables[v] = Some(vals);
        }
        let n = n.ok_or_else(|| Error::Mismatch("missing `n=` header".into()))?;
        if let Some(v) = (0..g.num_vertices()).find(|&v| !g.is_source(v) && tables[v].is_none()) {
            return Err(Error::Mismatch(alloc::format!(
                "no table for `{}`",
                names[v]
            )));
        }
        let s = Strategy { n, tables };
        s.check(g)?;
        Ok(s)
    }
}

/// Vertex names usable in strategy files.
pub fn vertex_names_labelled(g: &LabelledDepGraph) -> Vec<String> {
    (0..g.num_vertices())
        .map(|v| {
            if g.is_source(v) {
                g.labels[v].clone()
            } else {
                alloc::format!("e{}", v - g.labels.len() + 1)
            }
        })
        .collect()
}

/// Exact count and optional witness of a guessing game.
#[derive(Clone, Debug, PartialEq)]
pub struct GuessingResult {
    pub w: u64,
    pub n: u32,
    /// `log_n w` for `n >= 2` and `w > 0`.
    pub gn: Option<f64>,
    pub strategy: Option<Strategy>,
}

impl GuessingResult {
    fn new(w: u64, n: u32, strategy: Option<Strategy>) -> Self {
        let gn = (n >= 2 && w > 0).then(|| libm::log(w as f64) / libm::log(n as f64));
        GuessingResult { w, n, gn, strategy }
    }
}

fn wins<G: GameGraph>(g: &G, s: &Strategy, config: &[Elem], args: &mut Vec<Elem>) -> bool {
    (0..g.num_vertices()).all(|v| match &s.tables[v] {
        None => true,
        Some(t) => {
            args.clear();
            args.extend(g.in_neighbours(v).iter().map(|&u| config[g.coord(u)]));
            t[tuple_index(s.n, args)] == config[g.coord(v)]
        }
    })
}

/// Counts winning configurations by enumerating all of them.
pub fn count_winning<G: GameGraph>(g: &G, s: &Strategy) -> Result<u64> {
    s.check(g)?;
    let n = s.n;
    let coords = g.num_coords();
    let total = compile::checked_power(n as u64, coords)
        .ok_or_else(|| Error::CapExceeded(alloc::format!("{n}^{coords} configurations")))?;
    let chunks = par::split_range(total, par::CHUNKS);
    let parts = par::map_indices(chunks.len(), |i| {
        let (lo, hi) = chunks[i];
        let mut a = alloc::vec![0; coords];
        compile::decode(lo, n, &mut a);
        let mut args = Vec::new();
        let mut c = 0u64;
        for _ in lo..hi {
            if wins(g, s, &a, &mut args) {
                c += 1;
            }
            compile::increment(&mut a, n);
        }
        c
    });
    Ok(parts.into_iter().sum())
}

/// [`count_winning`] for the labelled game.
pub fn count_winning_labelled(g: &LabelledDepGraph, s: &Strategy) -> Result<u64> {
    count_winning(g, s)
}

/// Number of strategies, saturating at `u128::MAX`.
pub fn strategy_space<G: GameGraph>(g: &G, n: u32) -> u128 {
    let mut space: u128 = 1;
    for v in (0..g.num_vertices()).filter(|&v| !g.is_source(v)) {
        let cells = (n as u128).saturating_pow(g.in_neighbours(v).len() as u32);
        let cells = u32::try_from(cells).unwrap_or(u32::MAX);
        space = space.saturating_mul((n as u128).saturating_pow(cells));
    }
    space
}

/// Exact maximum number of winning configurations over all strategies,
/// with the lexicographically first optimal strategy (vertices ascending,
/// table cells in row-major order).
pub fn max_winning_exhaustive<G: GameGraph>(g: &G, n: u32, budget: u64) -> Result<GuessingResult> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "alphabet size must be at least 1".into(),
        ));
    }
    let space = strategy_space(g, n);
    if space > budget as u128 {
        return Err(Error::BudgetExceeded {
            space: alloc::format!("{space} strategies"),
            budget,
        });
    }
    let coords = g.num_coords();
    let configs = compile::checked_power(n as u64, coords)
        .filter(|&c| c <= MAX_CONFIGS)
        .ok_or_else(|| Error::CapExceeded(alloc::format!("{n}^{coords} configurations")))?;
    let words = bits::words_for(configs as usize);
    let mut masks = Vec::new();
    let mut owners = Vec::new();
    let mut a = alloc::vec![0; coords];
    for v in (0..g.num_vertices()).filter(|&v| !g.is_source(v)) {
        let nb = g.in_neighbours(v);
        let cells = (n as usize).pow(nb.len() as u32);
        let mut unit = alloc::vec![alloc::vec![bits::full(configs as usize); n as usize]; cells];
        let mut args = Vec::with_capacity(nb.len());
        a.iter_mut().for_each(|x| *x = 0);
        for ci in 0..configs as usize {
            args.clear();
            args.extend(nb.iter().map(|&u| a[g.coord(u)]));
            let cell = tuple_index(n, &args);
            let own = a[g.coord(v)];
            for (c, m) in unit[cell].iter_mut().enumerate() {
                if c as Elem != own {
                    bits::clear(m, ci);
                }
            }
            compile::increment(&mut a, n);
        }
        owners.push((v, cells));
        masks.extend(unit);
    }
    let problem = maskdfs::Problem { words, masks };
    let sol = problem.solve(&bits::full(configs as usize), None);
    let mut tables: Vec<Option<Vec<Elem>>> = alloc::vec![None; g.num_vertices()];
    let mut pos = 0;
    for (v, cells) in owners {
        tables[v] = Some(sol.choice[pos..pos + cells].to_vec());
        pos += cells;
    }
    let strategy = Strategy { n, tables };
    let w = count_winning(g, &strategy)?;
    if w != sol.best {
        return Err(Error::Internal(alloc::format!(
            "witness scores {w}, search reported {}",
            sol.best
        )));
    }
    Ok(GuessingResult::new(w, n, Some(strategy)))
}

/// Componentwise product on the alphabet `0..n1*n2`, element `(u, v)`
/// encoded as `u*n2 + v`.
pub fn product_strategy<G: GameGraph>(g: &G, s1: &Strategy, s2: &Strategy) -> Result<Strategy> {
    s1.check(g)?;
    s2.check(g)?;
    let (n1, n2) = (s1.n, s2.n);
    let n = n1
        .checked_mul(n2)
        .ok_or_else(|| Error::CapExceeded("product alphabet too large".into()))?;
    let mut left = Vec::new();
    let mut right = Vec::new();
    Strategy::from_fn(g, n, |v, args| {
        left.clear();
        right.clear();
        left.extend(args.iter().map(|&e| e / n2));
        right.extend(args.iter().map(|&e| e % n2));
        let t1 = s1.tables[v].as_ref().expect("non-source");
        let t2 = s2.tables[v].as_ref().expect("non-source");
        t1[tuple_index(n1, &left)] * n2 + t2[tuple_index(n2, &right)]
    })
}

/// Cyclic order of a bidirected cycle without sources, starting at 0.
fn cycle_order(g: &DepDigraph) -> Option<Vec<usize>> {
    let k = g.num_vertices();
    if k < 3 || !g.sources.is_empty() || g.edges.len() != 2 * k {
        return None;
    }
    if (0..k).any(|v| g.in_neighbours(v).len() != 2) {
        return None;
    }
    let mut order = alloc::vec![0usize];
    let mut prev = usize::MAX;
    let mut cur = 0;
    for _ in 1..k {
        let next = *g.in_neighbours(cur).iter().find(|&&u| u != prev)?;
        prev = cur;
        cur = next;
        if order.contains(&cur) {
            return None;
        }
        order.push(cur);
    }
    g.in_neighbours(cur).contains(&0).then_some(order)
}

/// Pair strategy on a bidirected cycle: alphabet `0..m*m`, element `(U, V)`
/// encoded as `U*m + V`; vertex `i` guesses `U_i = V_{i-1}` and
/// `V_i = U_{i+1}`. On a cycle of length `L` exactly `m^L` configurations win.
pub fn cycle_pair_strategy(g: &DepDigraph, m: u32) -> Result<Strategy> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let order = cycle_order(g)
        .ok_or_else(|| Error::InvalidArgument("graph is not a bidirected cycle".into()))?;
    let k = order.len();
    let mut pos = alloc::vec![0; k];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let n = m
        .checked_mul(m)
        .ok_or_else(|| Error::CapExceeded("alphabet too large".into()))?;
    Strategy::from_fn(g, n, |v, args| {
        let nb = g.in_neighbours(v);
        let i = pos[v];
        let prev = order[(i + k - 1) % k];
        let val = |u: usize| args[nb.iter().position(|&w| w == u).expect("neighbour")];
        let next = order[(i + 1) % k];
        let u_new = val(prev) % m;
        let v_new = val(next) / m;
        u_new * m + v_new
    })
}

/// The pair strategy on the standard 5-cycle, alphabet size `m*m`.
pub fn c5_strategy(m: u32) -> Result<Strategy> {
    cycle_pair_strategy(&c5_graph(), m)
}
