//! Reduction of arbitrary term equations to flat, collision-free systems,
//! plus functional completion, diversification and the block embedding that
//! transports diversified interpretations back to the original signature.
//!
//! Every stage preserves the number of solutions for each interpretation of
//! the original signature.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::{self, Write as _};

use crate::interp::{tuple_index, Interpretation};
use crate::term::{fresh_name, Elem, Equation, Signature, SymbolId, Term, TermInstance};
use crate::{compile, Error, Result};

/// Where a normal-form variable comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    /// A variable of the input instance.
    Original,
    /// Stands for this (rendered) subterm of the input.
    Subterm(String),
    /// A copy of another variable introduced by functional completion.
    Copy(usize),
}

/// A depth-one equation `f(x_a, .., x_b) = x_j` or `c = x_j`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FlatEq {
    Fun {
        sym: SymbolId,
        args: Vec<usize>,
        rhs: usize,
    },
    Const {
        sym: SymbolId,
        rhs: usize,
    },
}

impl FlatEq {
    pub fn sym(&self) -> SymbolId {
        match self {
            FlatEq::Fun { sym, .. } | FlatEq::Const { sym, .. } => *sym,
        }
    }

    pub fn args(&self) -> &[usize] {
        match self {
            FlatEq::Fun { args, .. } => args,
            FlatEq::Const { .. } => &[],
        }
    }

    pub fn rhs(&self) -> usize {
        match self {
            FlatEq::Fun { rhs, .. } | FlatEq::Const { rhs, .. } => *rhs,
        }
    }

    pub fn is_const(&self) -> bool {
        matches!(self, FlatEq::Const { .. })
    }

    fn new(sym: SymbolId, args: Vec<usize>, rhs: usize) -> FlatEq {
        if args.is_empty() {
            FlatEq::Const { sym, rhs }
        } else {
            FlatEq::Fun { sym, args, rhs }
        }
    }

    fn mapped(&self, map: &[usize]) -> FlatEq {
        FlatEq::new(
            self.sym(),
            self.args().iter().map(|&a| map[a]).collect(),
            map[self.rhs()],
        )
    }
}

/// A flat instance. `equalities` is empty except between pipeline stages
/// (after flattening and after functional completion).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalFormInstance {
    pub signature: Signature,
    pub variables: Vec<String>,
    pub origins: Vec<Origin>,
    pub equations: Vec<FlatEq>,
    pub equalities: Vec<(usize, usize)>,
    /// Variables that are not the right-hand side of any equation, ascending.
    pub sources: Vec<usize>,
    /// No two equations share a symbol and argument tuple.
    pub term_dag: bool,
}

impl NormalFormInstance {
    pub fn new(
        signature: Signature,
        variables: Vec<String>,
        origins: Vec<Origin>,
        equations: Vec<FlatEq>,
        equalities: Vec<(usize, usize)>,
    ) -> Self {
        let mut defined = alloc::vec![false; variables.len()];
        for e in &equations {
            defined[e.rhs()] = true;
        }
        let sources = (0..variables.len()).filter(|&v| !defined[v]).collect();
        let term_dag = collision_groups(&equations).is_empty();
        NormalFormInstance {
            signature,
            variables,
            origins,
            equations,
            equalities,
            sources,
            term_dag,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    /// Number of equations defining each variable.
    pub fn definition_counts(&self) -> Vec<usize> {
        let mut c = alloc::vec![0; self.num_vars()];
        for e in &self.equations {
            c[e.rhs()] += 1;
        }
        c
    }

    /// The same system as a term instance; equalities become `x = y`.
    pub fn to_instance(&self) -> TermInstance {
        let mut equations: Vec<Equation> = self
            .equations
            .iter()
            .map(|e| {
                let args = e.args().iter().map(|&a| Term::Var(a)).collect();
                Equation::new(Term::App(e.sym(), args), Term::Var(e.rhs()))
            })
            .collect();
        equations.extend(
            self.equalities
                .iter()
                .map(|&(a, b)| Equation::new(Term::Var(a), Term::Var(b))),
        );
        TermInstance {
            signature: self.signature.clone(),
            variables: self.variables.clone(),
            equations,
        }
    }

    /// `variable<TAB>origin` rows.
    pub fn provenance_tsv(&self) -> String {
        let mut s = String::from("variable\torigin\n");
        for (name, o) in self.variables.iter().zip(&self.origins) {
            let _ = match o {
                Origin::Original => writeln!(s, "{name}\toriginal"),
                Origin::Subterm(t) => writeln!(s, "{name}\tsubterm {t}"),
                Origin::Copy(v) => writeln!(s, "{name}\tcopy {}", self.variables[*v]),
            };
        }
        s
    }

    fn taken(&self) -> impl Fn(&str) -> bool + '_ {
        move |name: &str| {
            self.variables.iter().any(|v| v == name) || self.signature.lookup(name).is_some()
        }
    }
}

impl fmt::Display for NormalFormInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_instance())
    }
}

/// Groups of equation indices sharing symbol and argument tuple but not
/// all the same right-hand side.
fn collision_groups(eqs: &[FlatEq]) -> Vec<Vec<usize>> {
    let mut by_key: BTreeMap<(SymbolId, &[usize]), Vec<usize>> = BTreeMap::new();
    for (i, e) in eqs.iter().enumerate() {
        by_key.entry((e.sym(), e.args())).or_default().push(i);
    }
    by_key
        .into_values()
        .filter(|g| g.iter().any(|&i| eqs[i].rhs() != eqs[g[0]].rhs()))
        .collect()
}

/// Maps variable indices before a step to indices after it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientMap {
    pub map: Vec<usize>,
}

impl QuotientMap {
    pub fn identity(k: usize) -> Self {
        QuotientMap {
            map: (0..k).collect(),
        }
    }

    pub fn apply(&self, v: usize) -> usize {
        self.map[v]
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &QuotientMap) -> QuotientMap {
        QuotientMap {
            map: self.map.iter().map(|&v| next.map[v]).collect(),
        }
    }

    /// Number of distinct targets.
    pub fn num_targets(&self) -> usize {
        self.map.iter().max().map_or(0, |m| m + 1)
    }
}

/// Introduces one variable per distinct non-variable subterm together with
/// its defining equation, and turns every input equation `s = t` into an
/// equality between the variables standing for `s` and `t`.
pub fn flatten(inst: &TermInstance) -> NormalFormInstance {
    struct St<'a> {
        inst: &'a TermInstance,
        vars: Vec<String>,
        origins: Vec<Origin>,
        eqs: Vec<FlatEq>,
        memo: BTreeMap<(SymbolId, Vec<usize>), usize>,
        next_aux: usize,
    }
    impl St<'_> {
        fn go(&mut self, t: &Term) -> usize {
            match t {
                Term::Var(v) => *v,
                Term::App(s, args) => {
                    let ids: Vec<usize> = args.iter().map(|a| self.go(a)).collect();
                    if let Some(&z) = self.memo.get(&(*s, ids.clone())) {
                        return z;
                    }
                    self.next_aux += 1;
                    let sig = &self.inst.signature;
                    let vars = &self.vars;
                    let name = fresh_name(&alloc::format!("z{}", self.next_aux), &|n: &str| {
                        vars.iter().any(|v| v == n) || sig.lookup(n).is_some()
                    });
                    let z = self.vars.len();
                    self.vars.push(name);
                    let shown = t.display(sig, &self.inst.variables).to_string();
                    self.origins.push(Origin::Subterm(shown));
                    self.eqs.push(FlatEq::new(*s, ids.clone(), z));
                    self.memo.insert((*s, ids), z);
                    z
                }
            }
        }
    }
    let mut st = St {
        inst,
        vars: inst.variables.clone(),
        origins: alloc::vec![Origin::Original; inst.num_vars()],
        eqs: Vec::new(),
        memo: BTreeMap::new(),
        next_aux: 0,
    };
    let mut equalities = Vec::new();
    for eq in &inst.equations {
        let l = st.go(&eq.lhs);
        let r = st.go(&eq.rhs);
        if l != r {
            equalities.push((l, r));
        }
    }
    NormalFormInstance::new(
        inst.signature.clone(),
        st.vars,
        st.origins,
        st.eqs,
        equalities,
    )
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

/// Merges variables along `pairs`, keeps one representative per class and
/// rewrites the equations. Exact duplicates are dropped.
fn merge(nf: &NormalFormInstance, pairs: &[(usize, usize)]) -> (NormalFormInstance, QuotientMap) {
    let k = nf.num_vars();
    let mut parent: Vec<usize> = (0..k).collect();
    for &(a, b) in pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    // representative: lowest original variable of the class, else lowest index
    let mut rep: Vec<Option<usize>> = alloc::vec![None; k];
    for v in 0..k {
        let r = find(&mut parent, v);
        let better = match rep[r] {
            None => true,
            Some(cur) => nf.origins[v] == Origin::Original && nf.origins[cur] != Origin::Original,
        };
        if better {
            rep[r] = Some(v);
        }
    }
    let keep: Vec<usize> = (0..k)
        .filter(|&v| rep[find(&mut parent, v)] == Some(v))
        .collect();
    let mut new_index = alloc::vec![usize::MAX; k];
    for (i, &v) in keep.iter().enumerate() {
        new_index[v] = i;
    }
    let map: Vec<usize> = (0..k)
        .map(|v| {
            let r = find(&mut parent, v);
            new_index[rep[r].unwrap()]
        })
        .collect();
    let remap_origin = |o: &Origin| match o {
        Origin::Copy(v) => Origin::Copy(map[*v]),
        other => other.clone(),
    };
    let mut eqs: Vec<FlatEq> = Vec::new();
    for e in &nf.equations {
        let m = e.mapped(&map);
        if !eqs.contains(&m) {
            eqs.push(m);
        }
    }
    let out = NormalFormInstance::new(
        nf.signature.clone(),
        keep.iter().map(|&v| nf.variables[v].clone()).collect(),
        keep.iter().map(|&v| remap_origin(&nf.origins[v])).collect(),
        eqs,
        Vec::new(),
    );
    (out, QuotientMap { map })
}

/// Quotients by the recorded equalities (and any extra pairs).
pub fn quotient_equalities(
    nf: &NormalFormInstance,
    extra: &[(usize, usize)],
) -> (NormalFormInstance, QuotientMap) {
    let mut pairs = nf.equalities.clone();
    pairs.extend_from_slice(extra);
    merge(nf, &pairs)
}

/// Repeatedly identifies right-hand sides of equations that share a symbol
/// and argument tuple until none remain.
pub fn eliminate_collisions(nf: &NormalFormInstance) -> (NormalFormInstance, QuotientMap) {
    let mut cur = nf.clone();
    if !cur.equalities.is_empty() {
        let (q, m) = quotient_equalities(&cur, &[]);
        return eliminate_collisions(&q).then_map(m);
    }
    let mut total = QuotientMap::identity(cur.num_vars());
    loop {
        let groups = collision_groups(&cur.equations);
        if groups.is_empty() {
            return (cur, total);
        }
        let pairs: Vec<(usize, usize)> = groups
            .iter()
            .flat_map(|g| {
                g.iter()
                    .map(|&i| (cur.equations[g[0]].rhs(), cur.equations[i].rhs()))
            })
            .collect();
        let (next, m) = merge(&cur, &pairs);
        debug_assert!(next.num_vars() < cur.num_vars());
        total = total.then(&m);
        cur = next;
    }
}

trait ThenMap {
    fn then_map(self, first: QuotientMap) -> Self;
}

impl ThenMap for (NormalFormInstance, QuotientMap) {
    fn then_map(self, first: QuotientMap) -> Self {
        (self.0, first.then(&self.1))
    }
}

/// Flattening, quotienting and collision closure. The map sends the
/// variables of the flattened instance (inputs first, then one per subterm)
/// to the normal-form variables.
pub fn normalise(inst: &TermInstance) -> (NormalFormInstance, QuotientMap) {
    let flat = flatten(inst);
    let (q, m1) = quotient_equalities(&flat, &[]);
    let (nf, m2) = eliminate_collisions(&q);
    (nf, m1.then(&m2))
}

/// Every defined variable has exactly one defining equation.
pub fn is_fnf(nf: &NormalFormInstance) -> bool {
    nf.definition_counts().iter().all(|&c| c <= 1)
}

/// Keeps the first defining equation of each variable and points every
/// further one at a fresh copy, recorded as an equality with the original.
pub fn functional_completion(nf: &NormalFormInstance) -> NormalFormInstance {
    let mut vars = nf.variables.clone();
    let mut origins = nf.origins.clone();
    let mut equalities = nf.equalities.clone();
    let mut seen = alloc::vec![0usize; nf.num_vars()];
    let mut eqs = Vec::with_capacity(nf.equations.len());
    for e in &nf.equations {
        let j = e.rhs();
        seen[j] += 1;
        if seen[j] == 1 {
            eqs.push(e.clone());
            continue;
        }
        let base = alloc::format!("{}_{}", nf.variables[j], seen[j] - 1);
        let name = fresh_name(&base, &|n: &str| {
            vars.iter().any(|v| v == n) || nf.signature.lookup(n).is_some()
        });
        let copy = vars.len();
        vars.push(name);
        origins.push(Origin::Copy(j));
        equalities.push((copy, j));
        eqs.push(FlatEq::new(e.sym(), e.args().to_vec(), copy));
    }
    NormalFormInstance::new(nf.signature.clone(), vars, origins, eqs, equalities)
}

/// A flat instance in which every non-constant symbol occurs in exactly one
/// equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiversifiedInstance {
    pub nf: NormalFormInstance,
    /// Signature of the instance before diversification.
    pub original: Signature,
    /// For each symbol of `nf.signature`: the original symbol and, for
    /// fresh symbols, the index of the equation it was made for.
    pub back: Vec<(SymbolId, Option<usize>)>,
}

/// Replaces the symbol of the `l`-th non-constant equation (1-based) by a
/// fresh symbol named `<orig>@<l>`. Constants are kept.
pub fn diversify(nf: &NormalFormInstance) -> DiversifiedInstance {
    let mut sig = Signature::new();
    let mut back = Vec::new();
    let mut const_map = BTreeMap::new();
    for (id, s) in nf.signature.iter() {
        if s.arity == 0 {
            let new = sig.add(&s.name, 0).expect("names are unique");
            const_map.insert(id, new);
            back.push((id, None));
        }
    }
    let taken = nf.taken();
    let mut eqs = Vec::with_capacity(nf.equations.len());
    let mut ell = 0;
    for (i, e) in nf.equations.iter().enumerate() {
        match e {
            FlatEq::Const { sym, rhs } => eqs.push(FlatEq::Const {
                sym: const_map[sym],
                rhs: *rhs,
            }),
            FlatEq::Fun { sym, args, rhs } => {
                ell += 1;
                let base = alloc::format!("{}@{ell}", nf.signature.name(*sym));
                let name = fresh_name(&base, &|n: &str| taken(n) || sig.lookup(n).is_some());
                let new = sig.add(&name, args.len()).expect("fresh name");
                back.push((*sym, Some(i)));
                eqs.push(FlatEq::Fun {
                    sym: new,
                    args: args.clone(),
                    rhs: *rhs,
                });
            }
        }
    }
    DiversifiedInstance {
        nf: NormalFormInstance::new(
            sig,
            nf.variables.clone(),
            nf.origins.clone(),
            eqs,
            nf.equalities.clone(),
        ),
        original: nf.signature.clone(),
        back,
    }
}

/// Builds an interpretation of the original signature on `0..n` from an
/// interpretation of the diversified signature on `0..m`: variable `i` owns
/// the block `i*m .. i*m+m-1` and each equation is simulated on the product
/// of its argument blocks. Cells outside every block are 0.
pub fn block_embed(
    div_interp: &Interpretation,
    div: &DiversifiedInstance,
    n: u32,
) -> Result<Interpretation> {
    let nf = &div.nf;
    let k = nf.num_vars() as u32;
    let m = div_interp.n();
    if !div_interp.fits(&nf.signature) {
        return Err(Error::Mismatch(
            "interpretation is not over the diversified signature".into(),
        ));
    }
    if !nf.term_dag {
        return Err(Error::NotTermDag(
            "two equations share a symbol and argument tuple".into(),
        ));
    }
    if !nf.equalities.is_empty() {
        return Err(Error::InvalidArgument(
            "block embedding needs an instance without equalities".into(),
        ));
    }
    if n < k || (k as u64) * (m as u64) > n as u64 {
        return Err(Error::InvalidArgument(alloc::format!(
            "target size {n} cannot hold {k} blocks of size {m}"
        )));
    }
    let mut out = Interpretation::zeros(&div.original, n)?;
    for (new_sym, e) in nf.equations.iter().map(|e| (e.sym(), e)) {
        let orig = div.back[new_sym.0].0;
        let args = e.args();
        let mut local = alloc::vec![0 as Elem; args.len()];
        let cells = (m as u64).pow(args.len() as u32);
        for idx in 0..cells {
            compile::decode(idx, m, &mut local);
            let global: Vec<Elem> = args
                .iter()
                .zip(&local)
                .map(|(&a, &u)| a as Elem * m + u)
                .collect();
            let value = e.rhs() as Elem * m + div_interp.table(new_sym)[tuple_index(m, &local)];
            out.set(orig, &global, value);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::count_solutions;
    use crate::parse::parse_instance;

    const C5: &str =
        "var x y z; fun f/2; eq f(f(z,x),y)=x; eq f(x,f(y,z))=y; eq f(f(y,z),f(z,x))=z;";
    const SDOS: &str = "var x y; fun f/2; eq f(f(x,y),y)=x; eq f(x,f(y,x))=y; \
                        eq f(f(x,y),f(y,x))=x; eq f(f(y,x),f(x,y))=y;";

    fn show(nf: &NormalFormInstance) -> Vec<String> {
        nf.to_instance()
            .to_string()
            .lines()
            .filter(|l| l.starts_with("eq"))
            .map(String::from)
            .collect()
    }

    #[test]
    fn c5_normal_form() {
        let (nf, _) = normalise(&parse_instance(C5).unwrap());
        assert_eq!(nf.variables, ["x", "y", "z", "z1", "z3"]);
        assert_eq!(
            show(&nf),
            [
                "eq f(z,x) = z1;",
                "eq f(z1,y) = x;",
                "eq f(y,z) = z3;",
                "eq f(x,z3) = y;",
                "eq f(z3,z1) = z;"
            ]
        );
        assert!(nf.term_dag && is_fnf(&nf) && nf.sources.is_empty());
        assert_eq!(nf.origins[3], Origin::Subterm("f(z,x)".into()));
    }

    #[test]
    fn flatten_sts_first_equation() {
        let inst = parse_instance("var x; fun f/2; eq f(x,x)=x;").unwrap();
        let flat = flatten(&inst);
        assert_eq!(show(&flat), ["eq f(x,x) = z1;", "eq z1 = x;"]);
        let (q, map) = quotient_equalities(&flat, &[]);
        assert_eq!(show(&q), ["eq f(x,x) = x;"]);
        assert_eq!(map.map, [0, 0]);
    }

    #[test]
    fn variable_equalities() {
        let flat = flatten(&parse_instance("var x y; eq x = y;").unwrap());
        assert!(flat.equations.is_empty());
        assert_eq!(flat.equalities, [(0, 1)]);
        let flat = flatten(&parse_instance("var x y w; eq x = y; eq y = w;").unwrap());
        let (q, map) = quotient_equalities(&flat, &[]);
        assert_eq!(q.variables, ["x"]);
        assert_eq!(map.map, [0, 0, 0]);
        let plain = flatten(&parse_instance("var x y; fun g/1; eq g(x) = y;").unwrap());
        let (q2, m2) = quotient_equalities(&plain, &[]);
        assert_eq!(m2.map.len(), 3);
        assert_eq!(show(&q2), ["eq g(x) = y;"]);
    }

    #[test]
    fn collisions_single_and_cascading() {
        let inst = parse_instance("var x y u w; fun f/2; eq f(x,y)=u; eq f(x,y)=w;").unwrap();
        let (nf, map) = normalise(&inst);
        assert_eq!(show(&nf), ["eq f(x,y) = u;"]);
        assert_eq!(nf.variables, ["x", "y", "u"]);
        assert_eq!(map.apply(3), 2);

        let inst = parse_instance(
            "var x a b p q; fun f/1; fun g/1; eq f(x)=a; eq f(x)=b; eq g(a)=p; eq g(b)=q;",
        )
        .unwrap();
        let (q0, m0) = quotient_equalities(&flatten(&inst), &[]);
        let (nf, m1) = eliminate_collisions(&q0);
        let map = m0.then(&m1);
        assert_eq!(show(&nf), ["eq f(x) = a;", "eq g(a) = p;"]);
        assert_eq!(map.apply(2), map.apply(1));
        assert_eq!(map.apply(4), map.apply(3));
        assert!(nf.term_dag);
    }

    #[test]
    fn collision_free_untouched() {
        let (nf, _) = normalise(&parse_instance(C5).unwrap());
        let (again, map) = eliminate_collisions(&nf);
        assert_eq!(again, nf);
        assert_eq!(map, QuotientMap::identity(nf.num_vars()));
    }

    #[test]
    fn sdos_not_functional() {
        let (nf, _) = normalise(&parse_instance(SDOS).unwrap());
        assert_eq!(nf.num_vars(), 4);
        assert_eq!(nf.equations.len(), 6);
        assert!(!is_fnf(&nf));
        assert!(nf.sources.is_empty());
        let done = functional_completion(&nf);
        assert_eq!(done.equations.len(), 6);
        assert_eq!(done.equalities.len(), 2);
        let core = NormalFormInstance::new(
            done.signature.clone(),
            done.variables.clone(),
            done.origins.clone(),
            done.equations.clone(),
            Vec::new(),
        );
        assert!(is_fnf(&core));
    }

    #[test]
    fn completion_single_split() {
        let inst = parse_instance("var x y; fun f/1; fun g/1; eq f(x)=y; eq g(x)=y;").unwrap();
        let (nf, _) = normalise(&inst);
        let done = functional_completion(&nf);
        assert_eq!(
            show(&done),
            ["eq f(x) = y;", "eq g(x) = y_1;", "eq y_1 = y;"]
        );
        assert_eq!(functional_completion(&functional_completion(&nf)), done);
        let (c5, _) = normalise(&parse_instance(C5).unwrap());
        assert_eq!(functional_completion(&c5), c5);
    }

    #[test]
    fn empty_is_fnf() {
        let (nf, _) = normalise(&parse_instance("var x;").unwrap());
        assert!(is_fnf(&nf) && nf.term_dag);
        assert_eq!(nf.sources, [0]);
    }

    #[test]
    fn diversify_c5_and_sdos() {
        let (nf, _) = normalise(&parse_instance(C5).unwrap());
        let div = diversify(&nf);
        let names: Vec<&str> = div
            .nf
            .signature
            .iter()
            .map(|(_, s)| s.name.as_str())
            .collect();
        assert_eq!(names, ["f@1", "f@2", "f@3", "f@4", "f@5"]);
        assert_eq!(show(&div.nf)[0], "eq f@1(z,x) = z1;");
        assert!(div.back.iter().all(|b| b.0 == SymbolId(0)));
        let (sd, _) = normalise(&parse_instance(SDOS).unwrap());
        assert_eq!(diversify(&sd).nf.signature.len(), 6);
        let re = parse_instance(&div.nf.to_string()).unwrap();
        assert_eq!(re, div.nf.to_instance());
    }

    #[test]
    fn constants_survive_diversification() {
        let inst = parse_instance("var x y; const c; fun g/1; eq g(c) = x; eq c = y;").unwrap();
        let (nf, _) = normalise(&inst);
        assert_eq!(show(&nf), ["eq c = y;", "eq g(y) = x;"]);
        let div = diversify(&nf);
        assert_eq!(show(&div.nf), ["eq c = y;", "eq g@1(y) = x;"]);
    }

    #[test]
    fn block_embedding_c5() {
        let inst = parse_instance(C5).unwrap();
        let (nf, _) = normalise(&inst);
        let div = diversify(&nf);
        let sig = &div.nf.signature;
        // identity-ish tables on m=2: each f@l copies its first argument
        let tables: Vec<Vec<Elem>> = (0..5).map(|_| alloc::vec![0, 0, 1, 1]).collect();
        let small = Interpretation::new(sig, 2, tables).unwrap();
        let w = count_solutions(&div.nf.to_instance(), &small)
            .unwrap()
            .count;
        let big = block_embed(&small, &div, 10).unwrap();
        let embedded = count_solutions(&nf.to_instance(), &big).unwrap().count;
        assert!(embedded >= w);
        assert!(block_embed(&small, &div, 4).is_err());
    }

    #[test]
    fn block_embedding_trivial() {
        let inst = parse_instance("var x y; fun g/1; eq g(x) = y;").unwrap();
        let (nf, _) = normalise(&inst);
        let div = diversify(&nf);
        let small =
            Interpretation::new(&div.nf.signature, 3, alloc::vec![alloc::vec![2, 0, 1]]).unwrap();
        let big = block_embed(&small, &div, 6).unwrap();
        // blocks {0,1,2} for x and {3,4,5} for y
        assert_eq!(big.table(SymbolId(0)), &[5, 3, 4, 0, 0, 0]);
    }
}
