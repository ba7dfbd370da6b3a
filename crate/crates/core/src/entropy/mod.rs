//! Shannon upper bounds on the code exponent.
//!
//! A polymatroid `h` on the ground set of labels models normalised joint
//! entropies: `h(empty) = 0`, `h` is monotone and submodular, every singleton
//! has `h <= 1`, and each equation forces `h(U + v) = h(U)` where `U` are
//! the labels of its arguments and `v` its defined label. The maximum of
//! `h(all labels)` bounds `log_n S_n` from above.

pub mod simplex;

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;

use num_traits::Zero;

use crate::depgraph::{build_labelled_depgraph, DepDigraph, LabelledDepGraph};
use crate::guessing::GameGraph;
use crate::normalize::{diversify, normalise};
use crate::term::TermInstance;
use crate::{Error, Result};
pub use simplex::{rat, Constraint, LinearProgram, LpOutcome, Rat, Rel};

/// Default cap on the ground-set size.
pub const DEFAULT_CAP: usize = 12;

/// A named constraint of the polymatroid LP.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedConstraint {
    pub name: String,
    pub constraint: Constraint,
}

/// LP over `h(S)` for every subset `S` of the labels; variable index is the
/// subset's bitmask (bit `i` for label `i`).
#[derive(Clone, Debug, PartialEq)]
pub struct PolymatroidLP {
    pub labels: Vec<String>,
    /// Functional dependencies `(U, v)`, deduplicated, in first-seen order.
    pub dependencies: Vec<(u32, usize)>,
    pub constraints: Vec<NamedConstraint>,
}

impl PolymatroidLP {
    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn num_vars(&self) -> usize {
        1 << self.labels.len()
    }

    fn full(&self) -> usize {
        self.num_vars() - 1
    }

    pub fn var_name(&self, mask: usize) -> String {
        let l = self.labels.len().max(1);
        let mut s = String::from("h_");
        for i in (0..l).rev() {
            s.push(if mask >> i & 1 == 1 { '1' } else { '0' });
        }
        s
    }

    pub fn to_linear_program(&self) -> LinearProgram {
        LinearProgram {
            num_vars: self.num_vars(),
            objective: alloc::vec![(self.full(), rat(1))],
            constraints: self
                .constraints
                .iter()
                .map(|c| c.constraint.clone())
                .collect(),
        }
    }

    /// FNV-1a hash of the ground-set size and the dependency list.
    pub fn graph_hash(&self) -> u64 {
        let mut text = alloc::format!("L={};", self.labels.len());
        let mut deps = self.dependencies.clone();
        deps.sort_unstable();
        for (u, v) in deps {
            let _ = write!(text, "{u:x}>{v};");
        }
        fnv1a(text.as_bytes())
    }

    /// CPLEX LP text: maximise `h` of the full set.
    pub fn to_cplex(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "\\ polymatroid bound over labels: {}",
            self.labels.join(" ")
        );
        let _ = writeln!(s, "Maximize\n obj: {}", self.var_name(self.full()));
        s.push_str("Subject To\n");
        for c in &self.constraints {
            let _ = write!(s, " {}:", c.name);
            for (k, (j, v)) in c.constraint.coeffs.iter().enumerate() {
                let neg = *v < Rat::zero();
                let mag = if neg { -v } else { v.clone() };
                let coef = if mag == rat(1) {
                    String::new()
                } else {
                    alloc::format!("{mag} ")
                };
                let var = self.var_name(*j);
                let _ = match (k, neg) {
                    (0, false) => write!(s, " {coef}{var}"),
                    (0, true) => write!(s, " -{coef}{var}"),
                    (_, false) => write!(s, " + {coef}{var}"),
                    (_, true) => write!(s, " - {coef}{var}"),
                };
            }
            let rel = match c.constraint.rel {
                Rel::Le => "<=",
                Rel::Ge => ">=",
                Rel::Eq => "=",
            };
            let _ = writeln!(s, " {rel} {}", c.constraint.rhs);
        }
        s.push_str("End\n");
        s
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn row(coeffs: &[(usize, i64)], rel: Rel, rhs: i64) -> Constraint {
    let mut merged: Vec<(usize, Rat)> = Vec::new();
    for &(j, v) in coeffs {
        match merged.iter_mut().find(|(k, _)| *k == j) {
            Some((_, c)) => *c += rat(v),
            None => merged.push((j, rat(v))),
        }
    }
    merged.retain(|(_, c)| !c.is_zero());
    Constraint {
        coeffs: merged,
        rel,
        rhs: rat(rhs),
    }
}

/// Builds the LP on `labels` with the given functional dependencies.
pub fn polymatroid_lp(
    labels: Vec<String>,
    deps: &[(u32, usize)],
    cap: usize,
) -> Result<PolymatroidLP> {
    let l = labels.len();
    if l > cap || l > 24 {
        return Err(Error::CapExceeded(alloc::format!(
            "{l} labels, cap is {cap}"
        )));
    }
    let full = (1usize << l) - 1;
    let mut cs = Vec::new();
    let mut push = |name: String, c: Constraint| {
        cs.push(NamedConstraint {
            name,
            constraint: c,
        })
    };
    push("empty".into(), row(&[(0, 1)], Rel::Eq, 0));
    for i in 0..l {
        push(
            alloc::format!("mono_{i}"),
            row(&[(full, 1), (full & !(1 << i), -1)], Rel::Ge, 0),
        );
    }
    for s in 0..=full {
        for i in 0..l {
            for j in i + 1..l {
                if s >> i & 1 == 1 || s >> j & 1 == 1 {
                    continue;
                }
                let (si, sj, sij) = (s | 1 << i, s | 1 << j, s | 1 << i | 1 << j);
                push(
                    alloc::format!("sub_{s}_{i}_{j}"),
                    row(&[(si, 1), (sj, 1), (sij, -1), (s, -1)], Rel::Ge, 0),
                );
            }
        }
    }
    for i in 0..l {
        push(alloc::format!("norm_{i}"), row(&[(1 << i, 1)], Rel::Le, 1));
    }
    let mut dependencies: Vec<(u32, usize)> = Vec::new();
    for &(u, v) in deps {
        if u >> v & 1 == 1 || dependencies.contains(&(u, v)) {
            continue;
        }
        dependencies.push((u, v));
    }
    for (k, &(u, v)) in dependencies.iter().enumerate() {
        let u = u as usize;
        push(
            alloc::format!("fd_{k}"),
            row(&[(u | 1 << v, 1), (u, -1)], Rel::Eq, 0),
        );
    }
    Ok(PolymatroidLP {
        labels,
        dependencies,
        constraints: cs,
    })
}

/// One dependency per non-source vertex: the labels of its in-neighbours
/// determine its own label.
pub fn build_lp<G: GameGraph>(g: &G, labels: Vec<String>, cap: usize) -> Result<PolymatroidLP> {
    if labels.len() != g.num_coords() {
        return Err(Error::Mismatch(
            "one label name per coordinate is required".into(),
        ));
    }
    if labels.len() > 31 {
        return Err(Error::CapExceeded(alloc::format!(
            "{} labels, cap is {cap}",
            labels.len()
        )));
    }
    let deps: Vec<(u32, usize)> = (0..g.num_vertices())
        .filter(|&v| !g.is_source(v))
        .map(|v| {
            let u = g
                .in_neighbours(v)
                .iter()
                .fold(0u32, |m, &w| m | 1 << g.coord(w));
            (u, g.coord(v))
        })
        .collect();
    polymatroid_lp(labels, &deps, cap)
}

pub fn build_lp_digraph(g: &DepDigraph, cap: usize) -> Result<PolymatroidLP> {
    build_lp(g, g.names.clone(), cap)
}

pub fn build_lp_labelled(g: &LabelledDepGraph, cap: usize) -> Result<PolymatroidLP> {
    build_lp(g, g.labels.clone(), cap)
}

/// Exact optimum with its verified primal solution.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub optimum: Rat,
    /// `h(S)` indexed by subset mask.
    pub primal: Vec<Rat>,
    pub graph_hash: u64,
    pub labels: Vec<String>,
}

impl BoundReport {
    /// `key: value` lines with exact fractions.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "optimum: {}", self.optimum);
        let _ = writeln!(s, "labels: {}", self.labels.join(" "));
        let _ = writeln!(s, "graph_hash: {:016x}", self.graph_hash);
        let l = self.labels.len();
        for (mask, v) in self.primal.iter().enumerate() {
            let name: Vec<&str> = (0..l)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| self.labels[i].as_str())
                .collect();
            let _ = writeln!(s, "h({}): {v}", name.join(","));
        }
        s
    }
}

/// Solves the LP and checks every constraint at the returned point.
pub fn solve_lp(lp: &PolymatroidLP) -> Result<BoundReport> {
    let prog = lp.to_linear_program();
    match simplex::solve(&prog) {
        LpOutcome::Optimal { value, x } => {
            if let Some(bad) = lp.constraints.iter().find(|c| !c.constraint.holds_at(&x)) {
                return Err(Error::Internal(alloc::format!(
                    "certificate violates `{}`",
                    bad.name
                )));
            }
            if x[lp.full()] != value {
                return Err(Error::Internal(
                    "objective does not match the certificate".into(),
                ));
            }
            Ok(BoundReport {
                optimum: value,
                primal: x,
                graph_hash: lp.graph_hash(),
                labels: lp.labels.clone(),
            })
        }
        other => Err(Error::Internal(alloc::format!(
            "polymatroid LP reported {other:?}"
        ))),
    }
}

/// Whether `report` satisfies every constraint of `lp` exactly.
pub fn verify_certificate(lp: &PolymatroidLP, report: &BoundReport) -> bool {
    report.primal.len() == lp.num_vars()
        && lp
            .constraints
            .iter()
            .all(|c| c.constraint.holds_at(&report.primal))
        && report.primal[lp.full()] == report.optimum
}

/// Normal form, diversification, labelled dependency graph, LP.
pub fn bound_instance(inst: &TermInstance, cap: usize) -> Result<BoundReport> {
    let (nf, _) = normalise(inst);
    let div = diversify(&nf);
    let g = build_labelled_depgraph(&div.nf);
    solve_lp(&build_lp_labelled(&g, cap)?)
}

/// The same chain through the unlabelled dependency digraph.
pub fn bound_instance_unlabelled(inst: &TermInstance, cap: usize) -> Result<BoundReport> {
    let (nf, _) = normalise(inst);
    let g = crate::depgraph::build_dep_digraph(&diversify(&nf).nf);
    solve_lp(&build_lp_digraph(&g, cap)?)
}

/// Renders a rational as `p/q` (or `p`).
pub fn fraction(r: &Rat) -> String {
    r.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depgraph::c5_graph;
    use crate::parse::parse_instance;

    fn half(n: i64) -> Rat {
        rat(n) / rat(2)
    }

    #[test]
    fn c5_lp_is_five_halves() {
        let lp = build_lp_digraph(&c5_graph(), DEFAULT_CAP).unwrap();
        assert_eq!(lp.num_vars(), 32);
        assert_eq!(lp.dependencies.len(), 5);
        let r = solve_lp(&lp).unwrap();
        assert_eq!(r.optimum, half(5));
        assert!(verify_certificate(&lp, &r));
    }

    #[test]
    fn edgeless_sources() {
        let g = DepDigraph::from_edges(
            alloc::vec!["a".into(), "b".into(), "c".into()],
            &[],
            alloc::vec![0, 1, 2],
        );
        let lp = build_lp_digraph(&g, DEFAULT_CAP).unwrap();
        assert!(lp.dependencies.is_empty());
        assert_eq!(solve_lp(&lp).unwrap().optimum, rat(3));
    }

    #[test]
    fn dropping_a_dependency_never_lowers() {
        let lp = build_lp_digraph(&c5_graph(), DEFAULT_CAP).unwrap();
        let mut deps = lp.dependencies.clone();
        deps.pop();
        let weaker = polymatroid_lp(lp.labels.clone(), &deps, DEFAULT_CAP).unwrap();
        assert!(solve_lp(&weaker).unwrap().optimum >= half(5));
    }

    #[test]
    fn network_and_sts_bounds() {
        let net = parse_instance("var x y z; fun f/2; fun h1/2; fun h2/2; eq z = f(x,y); eq h1(x,z) = y; eq h2(y,z) = x;")
            .unwrap();
        assert_eq!(bound_instance(&net, DEFAULT_CAP).unwrap().optimum, rat(2));
        let sts =
            parse_instance("var x y; fun f/2; eq f(x,x)=x; eq f(x,y)=f(y,x); eq f(x,f(x,y))=y;")
                .unwrap();
        assert!(bound_instance(&sts, DEFAULT_CAP).unwrap().optimum <= rat(2));
    }

    #[test]
    fn cap_is_enforced() {
        let names: Vec<String> = (0..5).map(|i| alloc::format!("v{i}")).collect();
        assert!(matches!(
            polymatroid_lp(names, &[], 4),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn cplex_text_shape() {
        let g = DepDigraph::from_edges(
            alloc::vec!["a".into(), "b".into()],
            &[(0, 1)],
            alloc::vec![0],
        );
        let lp = build_lp_digraph(&g, DEFAULT_CAP).unwrap();
        let text = lp.to_cplex();
        assert!(text.starts_with("\\ polymatroid"));
        assert!(text.contains("Maximize\n obj: h_11\n"));
        assert!(text.contains(" fd_0: h_11 - h_01 = 0\n"));
        assert!(text.contains(" norm_1: h_10 <= 1\n"));
        assert!(text.ends_with("End\n"));
    }

    #[test]
    fn hash_ignores_dependency_order() {
        let a = polymatroid_lp(alloc::vec!["p".into(), "q".into()], &[(1, 1), (2, 0)], 12).unwrap();
        let b = polymatroid_lp(alloc::vec!["p".into(), "q".into()], &[(2, 0), (1, 1)], 12).unwrap();
        assert_eq!(a.graph_hash(), b.graph_hash());
    }
}
