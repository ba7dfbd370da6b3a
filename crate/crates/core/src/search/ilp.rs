//! 0-1 integer programme whose optimum is the maximum code size.
//!
//! Binaries: `X[f,cell,v]` (table cell takes value v), `V[a,t,v]` (subterm
//! t evaluates to v at assignment a) and `S[a]` (assignment a satisfies
//! every equation). Value indicators are pinned by exactly-one rows plus
//! implication rows `V[a,t,v] >= X[f,args,v] + sum(arg indicators) - k`;
//! satisfaction needs both sides of each equation to agree.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::compile;
use crate::interp::{evaluate_term, tuple_index, Interpretation};
use crate::term::{Elem, Term, TermInstance};
use crate::{Error, Result};

/// Default limit on rows plus columns.
pub const DEFAULT_ILP_CAP: usize = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IlpVar {
    X { sym: usize, cell: usize, val: Elem },
    V { a: usize, sub: usize, val: Elem },
    S { a: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IlpRow {
    pub name: String,
    pub coeffs: Vec<(usize, i64)>,
    pub sense: Sense,
    pub rhs: i64,
}

impl IlpRow {
    pub fn holds(&self, x: &[bool]) -> bool {
        let lhs: i64 = self
            .coeffs
            .iter()
            .map(|&(j, c)| if x[j] { c } else { 0 })
            .sum();
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
            Sense::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IlpModel {
    pub vars: Vec<IlpVar>,
    pub rows: Vec<IlpRow>,
    /// Objective columns (all with coefficient 1).
    pub objective: Vec<usize>,
    /// Constant added to the objective for trivially satisfied assignments.
    pub constant: u64,
    n: u32,
    subterms: Vec<Term>,
    offsets: Vec<usize>,
    x_base: Vec<usize>,
    v_base: Vec<Vec<Option<usize>>>,
    s_col: Vec<Option<usize>>,
}

/// Indicator of "term `t` has value `v` at this assignment": a fixed truth
/// value for variables, a column for applications.
#[derive(Clone, Copy)]
enum Ind {
    Const(bool),
    Col(usize),
}

impl IlpModel {
    fn var_name(&self, j: usize) -> String {
        match self.vars[j] {
            IlpVar::X { sym, cell, val } => alloc::format!("x{sym}_{cell}_{val}"),
            IlpVar::V { a, sub, val } => alloc::format!("v{a}_{sub}_{val}"),
            IlpVar::S { a } => alloc::format!("s{a}"),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn objective_at(&self, x: &[bool]) -> u64 {
        self.constant + self.objective.iter().filter(|&&j| x[j]).count() as u64
    }

    pub fn feasible(&self, x: &[bool]) -> bool {
        self.rows.iter().all(|r| r.holds(x))
    }

    /// The 0-1 point encoding `interp`, with `S[a]` set for exactly the
    /// satisfying assignments.
    pub fn point_of(&self, inst: &TermInstance, interp: &Interpretation) -> Vec<bool> {
        let mut x = alloc::vec![false; self.vars.len()];
        for (j, var) in self.vars.iter().enumerate() {
            if let IlpVar::X { cell, val, sym } = *var {
                x[j] = interp.entries()[self.offsets[sym] + cell] == val;
            }
        }
        let mut a = alloc::vec![0; inst.num_vars()];
        for (ai, cols) in self.v_base.iter().enumerate() {
            for (t, base) in cols.iter().enumerate() {
                if let Some(b) = base {
                    x[b + evaluate_term(&self.subterms[t], interp, &a) as usize] = true;
                }
            }
            if let Some(s) = self.s_col[ai] {
                x[s] = inst.equations.iter().all(|eq| {
                    evaluate_term(&eq.lhs, interp, &a) == evaluate_term(&eq.rhs, interp, &a)
                });
            }
            compile::increment(&mut a, self.n);
        }
        x
    }

    /// CPLEX LP text with every column binary.
    pub fn to_cplex(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "\\ term coding 0-1 model, n={}, constant={}",
            self.n, self.constant
        );
        out.push_str("Maximize\n obj:");
        if self.objective.is_empty() {
            out.push_str(" 0");
        }
        for (k, &j) in self.objective.iter().enumerate() {
            let _ = write!(
                out,
                "{}{}",
                if k == 0 { " " } else { " + " },
                self.var_name(j)
            );
        }
        out.push_str("\nSubject To\n");
        for row in &self.rows {
            let _ = write!(out, " {}:", row.name);
            for (k, &(j, c)) in row.coeffs.iter().enumerate() {
                let op = match (k, c < 0) {
                    (0, false) => " ",
                    (0, true) => " -",
                    (_, false) => " + ",
                    (_, true) => " - ",
                };
                let mag = c.unsigned_abs();
                let coef = if mag == 1 {
                    String::new()
                } else {
                    alloc::format!("{mag} ")
                };
                let _ = write!(out, "{op}{coef}{}", self.var_name(j));
            }
            let sense = match row.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, " {sense} {}", row.rhs);
        }
        out.push_str("Binary\n");
        for j in 0..self.vars.len() {
            let _ = writeln!(out, " {}", self.var_name(j));
        }
        out.push_str("End\n");
        out
    }
}

fn collect_subterms(t: &Term, out: &mut Vec<Term>) {
    if let Term::App(_, args) = t {
        for a in args {
            collect_subterms(a, out);
        }
        if !out.contains(t) {
            out.push(t.clone());
        }
    }
}

/// Builds the model. With `target`, adds `sum S >= target + 1` so that
/// infeasibility certifies `S_n <= target`.
pub fn build_ilp(inst: &TermInstance, n: u32, target: Option<u64>, cap: usize) -> Result<IlpModel> {
    let arities = inst.signature.arities();
    let shape = Interpretation::from_arities(&arities, n, None)?;
    let total = super::assignments(inst.num_vars(), n)? as usize;
    let mut subterms = Vec::new();
    for eq in &inst.equations {
        collect_subterms(&eq.lhs, &mut subterms);
        collect_subterms(&eq.rhs, &mut subterms);
    }
    let nn = n as usize;
    // rough size check before allocating anything large
    let per_assignment: usize = subterms
        .iter()
        .map(|t| match t {
            Term::App(_, args) => nn.saturating_pow(args.len() as u32 + 1) + nn + 1,
            Term::Var(_) => 0,
        })
        .sum::<usize>()
        + nn * inst.equations.len()
        + 1;
    let estimate = total
        .saturating_mul(per_assignment)
        .saturating_add(shape.entries().len() * (nn + 1));
    if estimate > cap {
        return Err(Error::CapExceeded(alloc::format!(
            "model has about {estimate} rows and columns, cap {cap}"
        )));
    }

    let mut m = IlpModel {
        vars: Vec::new(),
        rows: Vec::new(),
        objective: Vec::new(),
        constant: 0,
        n,
        subterms,
        offsets: shape.offsets().to_vec(),
        x_base: Vec::new(),
        v_base: Vec::new(),
        s_col: Vec::new(),
    };
    for (sym, &k) in arities.iter().enumerate() {
        m.x_base.push(m.vars.len());
        for cell in 0..nn.pow(k as u32) {
            for val in 0..n {
                m.vars.push(IlpVar::X { sym, cell, val });
            }
            let base = m.vars.len() - nn;
            m.rows.push(IlpRow {
                name: alloc::format!("one_x{sym}_{cell}"),
                coeffs: (base..base + nn).map(|j| (j, 1)).collect(),
                sense: Sense::Eq,
                rhs: 1,
            });
        }
    }

    let mut a = alloc::vec![0; inst.num_vars()];
    for ai in 0..total {
        let mut bases: Vec<Option<usize>> = alloc::vec![None; m.subterms.len()];
        for (t, term) in m.subterms.clone().iter().enumerate() {
            let Term::App(sym, args) = term else {
                unreachable!()
            };
            let base = m.vars.len();
            for val in 0..n {
                m.vars.push(IlpVar::V { a: ai, sub: t, val });
            }
            bases[t] = Some(base);
            m.rows.push(IlpRow {
                name: alloc::format!("one_v{ai}_{t}"),
                coeffs: (base..base + nn).map(|j| (j, 1)).collect(),
                sense: Sense::Eq,
                rhs: 1,
            });
            let k = args.len();
            let mut tuple = alloc::vec![0; k];
            loop {
                let mut coeffs = Vec::new();
                let mut needed = 0i64;
                let mut dead = false;
                for (i, arg) in args.iter().enumerate() {
                    match indicator(arg, tuple[i], &a, &m.subterms, &bases) {
                        Ind::Const(true) => {}
                        Ind::Const(false) => dead = true,
                        Ind::Col(j) => {
                            coeffs.push((j, -1));
                            needed += 1;
                        }
                    }
                }
                if !dead {
                    let cell = tuple_index(n, &tuple);
                    for val in 0..n {
                        let x = m.x_base[sym.0] + cell * nn + val as usize;
                        let mut row = alloc::vec![(base + val as usize, 1), (x, -1)];
                        row.extend(coeffs.iter().copied());
                        m.rows.push(IlpRow {
                            name: alloc::format!("link_{ai}_{t}_{cell}_{val}"),
                            coeffs: row,
                            sense: Sense::Ge,
                            rhs: -needed,
                        });
                    }
                }
                if !compile::increment(&mut tuple, n) {
                    break;
                }
            }
        }

        // satisfaction: S <= [lhs = v] - [rhs = v] + 1 for every side value
        let mut rows = Vec::new();
        let mut impossible = false;
        for (e, eq) in inst.equations.iter().enumerate() {
            for val in 0..n {
                let l = indicator(&eq.lhs, val, &a, &m.subterms, &bases);
                let r = indicator(&eq.rhs, val, &a, &m.subterms, &bases);
                let mut coeffs = Vec::new();
                let mut rhs = 1i64;
                match l {
                    Ind::Const(true) => rhs -= 1,
                    Ind::Const(false) => {}
                    Ind::Col(j) => coeffs.push((j, 1)),
                }
                match r {
                    Ind::Const(true) => rhs += 1,
                    Ind::Const(false) => {}
                    Ind::Col(j) => coeffs.push((j, -1)),
                }
                if coeffs.is_empty() {
                    if rhs < 1 {
                        impossible = true;
                    }
                    continue;
                }
                rows.push((alloc::format!("agree_{ai}_{e}_{val}"), coeffs, rhs));
            }
        }
        if impossible {
            m.s_col.push(None);
        } else if rows.is_empty() {
            m.s_col.push(None);
            m.constant += 1;
        } else {
            let s = m.vars.len();
            m.vars.push(IlpVar::S { a: ai });
            m.objective.push(s);
            m.s_col.push(Some(s));
            for (name, mut coeffs, rhs) in rows {
                coeffs.insert(0, (s, 1));
                m.rows.push(IlpRow {
                    name,
                    coeffs,
                    sense: Sense::Le,
                    rhs,
                });
            }
        }
        m.v_base.push(bases);
        compile::increment(&mut a, n);
    }

    if let Some(t) = target {
        m.rows.push(IlpRow {
            name: "target".into(),
            coeffs: m.objective.iter().map(|&j| (j, 1)).collect(),
            sense: Sense::Ge,
            rhs: t as i64 + 1 - m.constant as i64,
        });
    }
    Ok(m)
}

fn indicator(t: &Term, val: Elem, a: &[Elem], subterms: &[Term], bases: &[Option<usize>]) -> Ind {
    match t {
        Term::Var(v) => Ind::Const(a[*v] == val),
        Term::App(..) => {
            let k = subterms
                .iter()
                .position(|s| s == t)
                .expect("subterm collected");
            Ind::Col(bases[k].expect("subterm columns precede their users") + val as usize)
        }
    }
}

/// CPLEX LP text of [`build_ilp`] under the default cap.
pub fn export_ilp(inst: &TermInstance, n: u32, target: Option<u64>) -> Result<String> {
    Ok(build_ilp(inst, n, target, DEFAULT_ILP_CAP)?.to_cplex())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_instance;

    const STS: &str = "var x y; fun f/2; eq f(x,x)=x; eq f(x,y)=f(y,x); eq f(x,f(x,y))=y;";

    #[test]
    fn witness_point_is_feasible_with_its_count() {
        let inst = parse_instance(STS).unwrap();
        let f = Interpretation::new(
            &inst.signature,
            4,
            alloc::vec![alloc::vec![0, 0, 0, 0, 0, 1, 3, 2, 0, 3, 2, 1, 0, 2, 1, 3]],
        )
        .unwrap();
        let m = build_ilp(&inst, 4, None, DEFAULT_ILP_CAP).unwrap();
        let x = m.point_of(&inst, &f);
        assert!(m.feasible(&x));
        assert_eq!(m.objective_at(&x), 13);
        // claiming one more satisfied assignment breaks a row
        let mut cheat = x.clone();
        let s = m
            .s_col
            .iter()
            .enumerate()
            .find(|(i, c)| c.is_some_and(|c| !x[c]) && *i < 16)
            .unwrap();
        cheat[s.1.unwrap()] = true;
        assert!(!m.feasible(&cheat));
        // the target row rules out the witness at target 13
        let capped = build_ilp(&inst, 4, Some(13), DEFAULT_ILP_CAP).unwrap();
        assert!(!capped.feasible(&capped.point_of(&inst, &f)));
    }

    #[test]
    fn every_table_scores_its_count_at_n2() {
        let inst = parse_instance(STS).unwrap();
        let m = build_ilp(&inst, 2, None, DEFAULT_ILP_CAP).unwrap();
        for code in 0..16u32 {
            let t: Vec<Elem> = (0..4).map(|i| code >> i & 1).collect();
            let f = Interpretation::new(&inst.signature, 2, alloc::vec![t]).unwrap();
            let x = m.point_of(&inst, &f);
            assert!(m.feasible(&x));
            let c = crate::count_solutions(&inst, &f).unwrap().count;
            assert_eq!(c, m.objective_at(&x).into());
        }
    }

    #[test]
    fn empty_instance_is_a_constant() {
        let inst = parse_instance("var x y;").unwrap();
        let m = build_ilp(&inst, 3, None, DEFAULT_ILP_CAP).unwrap();
        assert_eq!((m.constant, m.objective.len()), (9, 0));
        assert!(m.to_cplex().contains("obj: 0"));
    }

    #[test]
    fn cplex_text_shape() {
        let inst = parse_instance(STS).unwrap();
        let text = export_ilp(&inst, 2, Some(3)).unwrap();
        assert!(text.starts_with("\\ term coding"));
        for part in [
            "Maximize\n obj: s",
            "Subject To\n one_x0_0: x0_0_0 + x0_0_1 = 1",
            "target:",
            "Binary\n",
            "End\n",
        ] {
            assert!(text.contains(part), "{part}");
        }
    }

    #[test]
    fn size_cap() {
        let inst = parse_instance(STS).unwrap();
        assert!(matches!(
            build_ilp(&inst, 4, None, 100),
            Err(Error::CapExceeded(_))
        ));
    }
}
