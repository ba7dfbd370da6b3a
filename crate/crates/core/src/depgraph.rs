//! Dependency digraphs of flat instances, labelled and unlabelled.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::normalize::NormalFormInstance;

/// Vertices are the variables of a flat instance; `u -> v` whenever `u` is
/// an argument of an equation defining `v`. Parallel edges are merged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepDigraph {
    pub names: Vec<String>,
    /// Sorted, duplicate-free edge list.
    pub edges: Vec<(usize, usize)>,
    /// Variables defined by no equation, ascending.
    pub sources: Vec<usize>,
    in_nbrs: Vec<Vec<usize>>,
}

impl DepDigraph {
    /// Builds a digraph from an explicit edge list. Sources are the given
    /// vertices; every other vertex is constrained by its in-neighbours.
    pub fn from_edges(names: Vec<String>, edges: &[(usize, usize)], sources: Vec<usize>) -> Self {
        let k = names.len();
        let set: BTreeSet<(usize, usize)> = edges.iter().copied().collect();
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut in_nbrs = alloc::vec![Vec::new(); k];
        for &(u, v) in &edges {
            in_nbrs[v].push(u);
        }
        for l in &mut in_nbrs {
            l.sort_unstable();
        }
        let mut sources = sources;
        sources.sort_unstable();
        sources.dedup();
        DepDigraph {
            names,
            edges,
            sources,
            in_nbrs,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    /// In-neighbours of `v`, ascending.
    pub fn in_neighbours(&self, v: usize) -> &[usize] {
        &self.in_nbrs[v]
    }

    pub fn is_source(&self, v: usize) -> bool {
        self.sources.binary_search(&v).is_ok()
    }

    /// `src<TAB>dst<TAB>label` rows; the label is the target's name.
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        for &(u, v) in &self.edges {
            let _ = writeln!(s, "{}\t{}\t{}", self.names[u], self.names[v], self.names[v]);
        }
        s
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n");
        for (i, name) in self.names.iter().enumerate() {
            let shape = if self.is_source(i) { "box" } else { "ellipse" };
            let _ = writeln!(s, "  v{i} [label=\"{}\", shape={shape}];", escape(name));
        }
        for &(u, v) in &self.edges {
            let _ = writeln!(s, "  v{u} -> v{v};");
        }
        s.push_str("}\n");
        s
    }
}

/// One vertex per variable (all of them sources) followed by one vertex per
/// equation. Equation vertices carry the label of their right-hand side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledDepGraph {
    /// Label names, one per variable.
    pub labels: Vec<String>,
    /// `label_of[v]` for every vertex.
    pub label_of: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    in_nbrs: Vec<Vec<usize>>,
}

impl LabelledDepGraph {
    pub fn num_vertices(&self) -> usize {
        self.label_of.len()
    }

    pub fn num_labels(&self) -> usize {
        self.labels.len()
    }

    pub fn num_variable_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn is_source(&self, v: usize) -> bool {
        v < self.labels.len()
    }

    pub fn in_neighbours(&self, v: usize) -> &[usize] {
        &self.in_nbrs[v]
    }

    pub fn equation_vertices(&self) -> core::ops::Range<usize> {
        self.labels.len()..self.label_of.len()
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        for &(u, v) in &self.edges {
            let _ = writeln!(s, "v{u}\tv{v}\t{}", self.labels[self.label_of[v]]);
        }
        s
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n");
        for v in 0..self.num_vertices() {
            let label = escape(&self.labels[self.label_of[v]]);
            if self.is_source(v) {
                let _ = writeln!(s, "  v{v} [label=\"{label}\", shape=box];");
            } else {
                let e = v - self.labels.len() + 1;
                let _ = writeln!(s, "  v{v} [label=\"e{e}: {label}\", shape=ellipse];");
            }
        }
        for &(u, v) in &self.edges {
            let _ = writeln!(s, "  v{u} -> v{v};");
        }
        s.push_str("}\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// The dependency digraph of a flat instance. Equalities are ignored.
pub fn build_dep_digraph(nf: &NormalFormInstance) -> DepDigraph {
    let edges: Vec<(usize, usize)> = nf
        .equations
        .iter()
        .flat_map(|e| e.args().iter().map(move |&a| (a, e.rhs())))
        .collect();
    DepDigraph::from_edges(nf.variables.clone(), &edges, nf.sources.clone())
}

/// The labelled dependency graph of a flat instance. Equalities are ignored.
pub fn build_labelled_depgraph(nf: &NormalFormInstance) -> LabelledDepGraph {
    let k = nf.num_vars();
    let mut label_of: Vec<usize> = (0..k).collect();
    let mut in_nbrs = alloc::vec![Vec::new(); k];
    let mut edges = Vec::new();
    for (i, e) in nf.equations.iter().enumerate() {
        let v = k + i;
        label_of.push(e.rhs());
        let mut args: Vec<usize> = e.args().to_vec();
        args.sort_unstable();
        args.dedup();
        edges.extend(args.iter().map(|&a| (a, v)));
        in_nbrs.push(args);
    }
    LabelledDepGraph {
        labels: nf.variables.clone(),
        label_of,
        edges,
        in_nbrs,
    }
}

/// Merges each equation vertex into the variable vertex of its label.
/// For functional instances this recovers [`build_dep_digraph`].
pub fn collapse_labelled(g: &LabelledDepGraph, sources: Vec<usize>) -> DepDigraph {
    let edges: Vec<(usize, usize)> = g.edges.iter().map(|&(u, v)| (u, g.label_of[v])).collect();
    DepDigraph::from_edges(g.labels.clone(), &edges, sources)
}

/// The bidirected 5-cycle `X0 - X1 - X2 - X3 - X4 - X0` without sources.
pub fn c5_graph() -> DepDigraph {
    let names = (0..5).map(|i| alloc::format!("X{i}")).collect();
    let edges: Vec<(usize, usize)> = (0..5)
        .flat_map(|i| [(i, (i + 1) % 5), ((i + 1) % 5, i)])
        .collect();
    DepDigraph::from_edges(names, &edges, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::{diversify, is_fnf, normalise};
    use crate::parse::parse_instance;

    const C5: &str =
        "var x y z; fun f/2; eq f(f(z,x),y)=x; eq f(x,f(y,z))=y; eq f(f(y,z),f(z,x))=z;";
    const SDOS: &str = "var x y; fun f/2; eq f(f(x,y),y)=x; eq f(x,f(y,x))=y; \
                        eq f(f(x,y),f(y,x))=x; eq f(f(y,x),f(x,y))=y;";

    #[test]
    fn c5_is_bidirected_cycle() {
        let (nf, _) = normalise(&parse_instance(C5).unwrap());
        let g = build_dep_digraph(&diversify(&nf).nf);
        assert_eq!(g.edges.len(), 10);
        for &(u, v) in &g.edges {
            assert!(g.edges.contains(&(v, u)));
        }
        for v in 0..5 {
            assert_eq!(g.in_neighbours(v).len(), 2);
        }
        assert!(g.sources.is_empty());
        let name = |s: &str| g.names.iter().position(|n| n == s).unwrap();
        // x - y - beta - z - alpha - x
        for (a, b) in [
            ("x", "y"),
            ("y", "z3"),
            ("z3", "z"),
            ("z", "z1"),
            ("z1", "x"),
        ] {
            assert!(g.edges.contains(&(name(a), name(b))));
        }
    }

    #[test]
    fn constants_only_edgeless() {
        let (nf, _) =
            normalise(&parse_instance("var x y; const c; const d; eq c = x; eq d = y;").unwrap());
        let g = build_dep_digraph(&nf);
        assert!(g.edges.is_empty());
        assert!(g.sources.is_empty());
        let dot = g.to_dot();
        assert!(dot.contains("v1 [label=\"y\""));
        assert!(!dot.contains("->"));
        let lg = build_labelled_depgraph(&nf);
        for v in lg.equation_vertices() {
            assert!(lg.in_neighbours(v).is_empty());
        }
    }

    #[test]
    fn sdos_labelled_shares_labels() {
        let (nf, _) = normalise(&parse_instance(SDOS).unwrap());
        let g = build_labelled_depgraph(&diversify(&nf).nf);
        assert_eq!(g.num_variable_vertices(), 4);
        assert_eq!(g.num_vertices(), 10);
        for label in [0, 1] {
            let eqv = g
                .equation_vertices()
                .filter(|&v| g.label_of[v] == label)
                .count();
            assert_eq!(eqv, 2);
        }
        let dot = g.to_dot();
        assert_eq!(dot.matches("[label=").count(), 10);
    }

    #[test]
    fn fnf_collapse_recovers_digraph() {
        let (nf, _) = normalise(&parse_instance(C5).unwrap());
        assert!(is_fnf(&nf));
        let lg = build_labelled_depgraph(&nf);
        assert_eq!(
            collapse_labelled(&lg, nf.sources.clone()),
            build_dep_digraph(&nf)
        );
    }

    #[test]
    fn empty_labelled() {
        let (nf, _) = normalise(&parse_instance("var a b;").unwrap());
        let lg = build_labelled_depgraph(&nf);
        assert_eq!(lg.num_vertices(), 2);
        assert!((0..2).all(|v| lg.is_source(v)));
    }

    #[test]
    fn self_loop_kept() {
        let (nf, _) = normalise(&parse_instance("var x; fun f/2; eq f(x,x)=x;").unwrap());
        let g = build_dep_digraph(&nf);
        assert_eq!(g.edges, [(0, 0)]);
        assert_eq!(g.to_tsv(), "x\tx\tx\n");
    }
}
