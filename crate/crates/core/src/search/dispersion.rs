//! Image maximisation for term-defined maps and its reduction to term coding.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use super::local::{climb, restart_rng, Scorer};
use super::{check_budget, scan_all, total_cells, Mode, SearchConfig, SearchResult};
use crate::compile;
use crate::interp::{evaluate_term, tuple_index, Interpretation};
use crate::parse::parse_with_outputs;
use crate::term::{fresh_name, Elem, Equation, Signature, Term, TermInstance};
use crate::{bits, par, Error, Result};

/// Output terms `t_1..t_s` over input variables `x_1..x_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DispersionProblem {
    pub signature: Signature,
    pub inputs: Vec<String>,
    pub outputs: Vec<Term>,
}

impl DispersionProblem {
    /// Parses DSL text whose `out t;` lines list the output terms. Any `eq`
    /// lines are rejected.
    pub fn parse(text: &str) -> Result<Self> {
        let (inst, outputs) = parse_with_outputs(text)?;
        if !inst.equations.is_empty() {
            return Err(Error::Malformed(
                "a dispersion problem takes `out` lines, not equations".into(),
            ));
        }
        Ok(DispersionProblem {
            signature: inst.signature,
            inputs: inst.variables,
            outputs,
        })
    }

    /// The output tuple of input `x`.
    pub fn image_of(&self, interp: &Interpretation, x: &[Elem]) -> Vec<Elem> {
        self.outputs
            .iter()
            .map(|t| evaluate_term(t, interp, x))
            .collect()
    }
}

/// `|Im T|`: distinct output tuples over all inputs.
pub fn image_size(prob: &DispersionProblem, interp: &Interpretation) -> Result<u64> {
    let n = interp.n();
    let k = prob.inputs.len();
    let s = prob.outputs.len();
    let inputs = compile::checked_power(n as u64, k).ok_or_else(|| cap(n, k))?;
    let outputs = compile::checked_power(n as u64, s)
        .filter(|&o| o <= 1 << 32)
        .ok_or_else(|| cap(n, s))?;
    let mut seen = bits::zeroed(outputs as usize);
    let mut x = alloc::vec![0; k];
    for _ in 0..inputs {
        let y = prob.image_of(interp, &x);
        bits::set(&mut seen, tuple_index(n, &y));
        compile::increment(&mut x, n);
    }
    Ok(bits::count(&seen))
}

fn cap(n: u32, k: usize) -> Error {
    Error::CapExceeded(alloc::format!("{n}^{k} tuples"))
}

/// Scores one interpretation by rebuilding the image bitset.
struct ImageScorer<'a> {
    prob: &'a DispersionProblem,
    arities: &'a [usize],
    n: u32,
    current: u64,
}

impl ImageScorer<'_> {
    fn eval(&self, entries: &[Elem]) -> u64 {
        let interp = Interpretation::from_arities(self.arities, self.n, Some(entries.to_vec()))
            .expect("entries keep their shape");
        image_size(self.prob, &interp).unwrap_or(0)
    }
}

impl Scorer for ImageScorer<'_> {
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

/// `Disp_n`: the largest image over interpretations (exhaustive), or the
/// largest found (local).
pub fn dispersion_max(
    prob: &DispersionProblem,
    n: u32,
    cfg: &SearchConfig,
) -> Result<SearchResult> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "alphabet size must be at least 1".into(),
        ));
    }
    let arities = prob.signature.arities();
    let cells = total_cells(&arities, n)?;
    compile::checked_power(n as u64, prob.inputs.len()).ok_or_else(|| cap(n, prob.inputs.len()))?;
    let result = match cfg.mode {
        Mode::Exhaustive => {
            let space = check_budget(&arities, n, cfg.budget)?;
            let score = |e: &[Elem]| {
                let interp = Interpretation::from_arities(&arities, n, Some(e.to_vec())).expect("shape");
                image_size(prob, &interp).unwrap_or(0)
            };
            let scan = scan_all(cells, n, space, cfg.target, score);
            SearchResult {
                best_count: scan.best,
                witness: Interpretation::from_arities(&arities, n, Some(scan.entries))?,
                certified: !scan.hit_target,
                evaluations: scan.evaluations,
            }
        }
        Mode::Local => {
            let parts = par::map_indices(cfg.restarts.max(1) as usize, |r| {
                let mut rng = restart_rng(cfg.seed, r as u32);
                let mut entries: Vec<Elem> = (0..cells).map(|_| rng.random_range(0..n)).collect();
                let mut s = ImageScorer {
                    prob,
                    arities: &arities,
                    n,
                    current: 0,
                };
                s.current = s.eval(&entries);
                climb(&mut s, &mut entries, n, &mut rng, cfg)
            });
            let mut best: Option<(u64, Vec<Elem>)> = None;
            let mut moves = 0;
            for (b, e, m) in parts {
                moves += m;
                if best.as_ref().is_none_or(|(bb, _)| b > *bb) {
                    best = Some((b, e));
                }
            }
            let (best_count, entries) = best.expect("at least one restart");
            SearchResult {
                best_count,
                witness: Interpretation::from_arities(&arities, n, Some(entries))?,
                certified: false,
                evaluations: moves,
            }
        }
        Mode::BranchBound => {
            return Err(Error::InvalidArgument(
                "dispersion supports exhaustive and local modes; run branch-bound on the encoded instance".into(),
            ))
        }
    };
    let recount = image_size(prob, &result.witness)?;
    if recount != result.best_count {
        return Err(Error::Internal(alloc::format!(
            "witness image is {recount}, search reported {}",
            result.best_count
        )));
    }
    Ok(result)
}

/// The term coding instance whose maximum code equals `Disp_n`: fresh
/// variables `y_i = t_i(x)` and fresh decoders `h_j(y) = x_j`.
pub fn encode_dispersion(prob: &DispersionProblem) -> Result<TermInstance> {
    let mut sig = prob.signature.clone();
    let mut vars = prob.inputs.clone();
    let k = prob.inputs.len();
    let s = prob.outputs.len();
    let mut ys = Vec::with_capacity(s);
    for i in 1..=s {
        let name = fresh_name(&alloc::format!("y{i}"), &|c| vars.iter().any(|v| v == c));
        ys.push(vars.len());
        vars.push(name);
    }
    let mut equations = Vec::new();
    for (i, t) in prob.outputs.iter().enumerate() {
        equations.push(Equation::new(Term::Var(ys[i]), t.clone()));
    }
    for j in 0..k {
        let name = fresh_name(&alloc::format!("h{}", j + 1), &|c| sig.lookup(c).is_some());
        let h = sig.add(&name, s)?;
        let args = ys.iter().map(|&y| Term::Var(y)).collect();
        equations.push(Equation::new(Term::app(h, args), Term::Var(j)));
    }
    TermInstance::new(sig, vars, equations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::search_max;

    const RELAY: &str =
        "var x1 x2 y1 y2; fun f/2; out f(x1,y1); out f(x1,y2); out f(x2,y1); out f(x2,y2);";

    #[test]
    fn relay_small_values() {
        let p = DispersionProblem::parse(RELAY).unwrap();
        let r = dispersion_max(&p, 2, &SearchConfig::exhaustive()).unwrap();
        assert_eq!((r.best_count, r.certified), (10, true));
        let r1 = dispersion_max(&p, 1, &SearchConfig::exhaustive()).unwrap();
        assert_eq!(r1.best_count, 1);
    }

    #[test]
    fn encoding_shape_and_identity_map() {
        let p = DispersionProblem::parse(RELAY).unwrap();
        let inst = encode_dispersion(&p).unwrap();
        assert_eq!(inst.num_vars(), 8);
        let names: Vec<&str> = inst
            .signature
            .iter()
            .map(|(_, s)| s.name.as_str())
            .collect();
        assert_eq!(names, ["f", "h1", "h2", "h3", "h4"]);
        assert!(inst.signature.iter().skip(1).all(|(_, s)| s.arity == 4));

        let id = DispersionProblem::parse("var x1; fun g/1; out x1;").unwrap();
        let enc = encode_dispersion(&id).unwrap();
        for n in 1..=3 {
            let r = search_max(&enc, n, &SearchConfig::exhaustive()).unwrap();
            assert_eq!(r.best_count, n as u64);
            assert_eq!(
                dispersion_max(&id, n, &SearchConfig::exhaustive())
                    .unwrap()
                    .best_count,
                n as u64
            );
        }
    }

    #[test]
    fn branch_bound_mode_is_rejected() {
        let p = DispersionProblem::parse(RELAY).unwrap();
        assert!(dispersion_max(&p, 2, &SearchConfig::branch_bound()).is_err());
    }

    #[test]
    fn equations_are_rejected() {
        assert!(DispersionProblem::parse("var x; fun f/1; eq f(x) = x;").is_err());
    }
}
