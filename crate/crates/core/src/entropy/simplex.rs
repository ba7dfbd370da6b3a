//! Dense two-phase simplex over exact rationals with Bland's rule.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    /// Sparse `(variable, coefficient)` pairs.
    pub coeffs: Vec<(usize, Rat)>,
    pub rel: Rel,
    pub rhs: Rat,
}

impl Constraint {
    pub fn lhs_at(&self, x: &[Rat]) -> Rat {
        self.coeffs
            .iter()
            .fold(Rat::zero(), |acc, (j, c)| acc + c * &x[*j])
    }

    pub fn holds_at(&self, x: &[Rat]) -> bool {
        let l = self.lhs_at(x);
        match self.rel {
            Rel::Le => l <= self.rhs,
            Rel::Ge => l >= self.rhs,
            Rel::Eq => l == self.rhs,
        }
    }
}

/// Maximise `objective . x` subject to `constraints` and `x >= 0`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<(usize, Rat)>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Rat, x: Vec<Rat> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rat>>,
    /// Objective row in `z - c.x = value` form; last entry is the value.
    z: Vec<Rat>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        if !p.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
        }
        let prow = core::mem::take(&mut self.rows[r]);
        let nz: Vec<usize> = (0..=self.cols).filter(|&j| !prow[j].is_zero()).collect();
        let eliminate = |row: &mut Vec<Rat>| {
            let f = row[c].clone();
            if f.is_zero() {
                return;
            }
            for &j in &nz {
                let d = &f * &prow[j];
                row[j] -= d;
            }
        };
        for row in self.rows.iter_mut() {
            if !row.is_empty() {
                eliminate(row);
            }
        }
        eliminate(&mut self.z);
        self.rows[r] = prow;
        self.basis[r] = c;
    }

    /// Runs Bland's rule on the current objective row over columns with
    /// `allowed[j]`. Returns `false` if unbounded.
    fn optimise(&mut self, allowed: &[bool]) -> bool {
        loop {
            let Some(c) = (0..self.cols).find(|&j| allowed[j] && self.z[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rat)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[self.cols] / &row[c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                None => return false,
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }
}

/// Solves `lp` exactly.
pub fn solve(lp: &LinearProgram) -> LpOutcome {
    let nv = lp.num_vars;
    // every row as `a.x <= b`
    let mut le: Vec<(Vec<(usize, Rat)>, Rat)> = Vec::new();
    for c in &lp.constraints {
        let neg = || (c.coeffs.iter().map(|(j, v)| (*j, -v)).collect(), -&c.rhs);
        match c.rel {
            Rel::Le => le.push((c.coeffs.clone(), c.rhs.clone())),
            Rel::Ge => le.push(neg()),
            Rel::Eq => {
                le.push((c.coeffs.clone(), c.rhs.clone()));
                le.push(neg());
            }
        }
    }
    let m = le.len();
    let flipped: Vec<usize> = (0..m).filter(|&i| le[i].1.is_negative()).collect();
    let art0 = nv + m;
    let cols = art0 + flipped.len();
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art_of_row = alloc::vec![None; m];
    for (k, &i) in flipped.iter().enumerate() {
        art_of_row[i] = Some(art0 + k);
    }
    for (i, (coeffs, b)) in le.iter().enumerate() {
        let mut row = alloc::vec![Rat::zero(); cols + 1];
        let sign = if art_of_row[i].is_some() {
            -Rat::one()
        } else {
            Rat::one()
        };
        for (j, v) in coeffs {
            row[*j] += &sign * v;
        }
        row[nv + i] = sign.clone();
        row[cols] = &sign * b;
        match art_of_row[i] {
            Some(a) => {
                row[a] = Rat::one();
                basis.push(a);
            }
            None => basis.push(nv + i),
        }
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        z: alloc::vec![Rat::zero(); cols + 1],
        basis,
        cols,
    };

    if !flipped.is_empty() {
        // phase 1: maximise -sum(artificials)
        for a in art0..cols {
            t.z[a] = Rat::one();
        }
        for (row, art) in t.rows.iter().zip(&art_of_row) {
            if art.is_some() {
                for (z, d) in t.z.iter_mut().zip(row) {
                    if !d.is_zero() {
                        *z -= d;
                    }
                }
            }
        }
        let all = alloc::vec![true; cols];
        t.optimise(&all);
        if !t.z[cols].is_zero() {
            return LpOutcome::Infeasible;
        }
        // drive artificials out of the basis; drop rows that are redundant
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= art0 {
                match (0..art0).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut cost = alloc::vec![Rat::zero(); cols];
    for (j, v) in &lp.objective {
        cost[*j] += v;
    }
    t.z = alloc::vec![Rat::zero(); cols + 1];
    for (z, c) in t.z.iter_mut().zip(&cost) {
        *z = -c;
    }
    for i in 0..t.rows.len() {
        let cb = cost[t.basis[i]].clone();
        if !cb.is_zero() {
            for j in 0..=cols {
                let d = &cb * &t.rows[i][j];
                t.z[j] += d;
            }
        }
    }
    let allowed: Vec<bool> = (0..cols).map(|j| j < art0).collect();
    if !t.optimise(&allowed) {
        return LpOutcome::Unbounded;
    }
    let mut x = alloc::vec![Rat::zero(); nv];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < nv {
            x[b] = t.rows[i][cols].clone();
        }
    }
    LpOutcome::Optimal {
        value: t.z[cols].clone(),
        x,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(coeffs: &[(usize, i64)], rel: Rel, rhs: i64) -> Constraint {
        Constraint {
            coeffs: coeffs.iter().map(|&(j, v)| (j, rat(v))).collect(),
            rel,
            rhs: rat(rhs),
        }
    }

    fn optimum(lp: &LinearProgram) -> Rat {
        match solve(lp) {
            LpOutcome::Optimal { value, x } => {
                assert!(lp.constraints.iter().all(|k| k.holds_at(&x)));
                let obj = lp
                    .objective
                    .iter()
                    .fold(Rat::zero(), |a, (j, v)| a + v * &x[*j]);
                assert_eq!(obj, value);
                value
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36
        let lp = LinearProgram {
            num_vars: 2,
            objective: alloc::vec![(0, rat(3)), (1, rat(5))],
            constraints: alloc::vec![
                c(&[(0, 1)], Rel::Le, 4),
                c(&[(1, 2)], Rel::Le, 12),
                c(&[(0, 3), (1, 2)], Rel::Le, 18)
            ],
        };
        assert_eq!(optimum(&lp), rat(36));
    }

    #[test]
    fn fractional_optimum_and_equalities() {
        // max x + y, 2x + y <= 2, x + 2y <= 2 -> 4/3
        let lp = LinearProgram {
            num_vars: 2,
            objective: alloc::vec![(0, rat(1)), (1, rat(1))],
            constraints: alloc::vec![
                c(&[(0, 2), (1, 1)], Rel::Le, 2),
                c(&[(0, 1), (1, 2)], Rel::Le, 2)
            ],
        };
        assert_eq!(optimum(&lp), rat(4) / rat(3));
        // max x, x + y = 3, y >= 1 -> 2 (needs phase 1)
        let lp = LinearProgram {
            num_vars: 2,
            objective: alloc::vec![(0, rat(1))],
            constraints: alloc::vec![c(&[(0, 1), (1, 1)], Rel::Eq, 3), c(&[(1, 1)], Rel::Ge, 1)],
        };
        assert_eq!(optimum(&lp), rat(2));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let lp = LinearProgram {
            num_vars: 1,
            objective: alloc::vec![(0, rat(1))],
            constraints: alloc::vec![c(&[(0, 1)], Rel::Ge, 2), c(&[(0, 1)], Rel::Le, 1)],
        };
        assert_eq!(solve(&lp), LpOutcome::Infeasible);
        let lp = LinearProgram {
            num_vars: 2,
            objective: alloc::vec![(0, rat(1))],
            constraints: alloc::vec![c(&[(0, 1), (1, -1)], Rel::Le, 1)],
        };
        assert_eq!(solve(&lp), LpOutcome::Unbounded);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example; Bland's rule must terminate. Optimum 1/20.
        let q = |n: i64, d: i64| rat(n) / rat(d);
        let lp = LinearProgram {
            num_vars: 4,
            objective: alloc::vec![(0, q(3, 4)), (1, rat(-150)), (2, q(1, 50)), (3, rat(-6))],
            constraints: alloc::vec![
                Constraint {
                    coeffs: alloc::vec![(0, q(1, 4)), (1, rat(-60)), (2, q(-1, 25)), (3, rat(9))],
                    rel: Rel::Le,
                    rhs: rat(0)
                },
                Constraint {
                    coeffs: alloc::vec![(0, q(1, 2)), (1, rat(-90)), (2, q(-1, 50)), (3, rat(3))],
                    rel: Rel::Le,
                    rhs: rat(0)
                },
                c(&[(2, 1)], Rel::Le, 1),
            ],
        };
        assert_eq!(optimum(&lp), q(1, 20));
    }
}
