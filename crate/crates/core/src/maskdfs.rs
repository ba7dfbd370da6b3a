//! Exact maximisation of `popcount(AND of one chosen mask per unit)`.
//!
//! Both the guessing-game brute force and exhaustive search over flat
//! instances reduce to this: each unit is one table cell, each option one
//! value for it, and the mask of an option is the set of configurations that
//! survive that choice. Options are tried in ascending order and only strict
//! improvements are kept, so the returned choice vector is the
//! lexicographically first optimum.

use alloc::vec::Vec;

use crate::bits;
use crate::par;

pub(crate) struct Problem {
    pub words: usize,
    /// `masks[u][o]` is the configuration set kept by option `o` of unit `u`.
    pub masks: Vec<Vec<Vec<u64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Solution {
    pub best: u64,
    pub choice: Vec<u32>,
    pub nodes: u64,
    /// Stopped early because `target` was reached.
    pub hit_target: bool,
}

struct Dfs<'a> {
    p: &'a Problem,
    /// Units that actually constrain something, in order.
    live: &'a [usize],
    best: i64,
    best_choice: Vec<u32>,
    cur: Vec<u32>,
    stack: Vec<Vec<u64>>,
    nodes: u64,
    target: Option<u64>,
    hit: bool,
}

impl Dfs<'_> {
    fn go(&mut self, depth: usize) {
        if self.hit {
            return;
        }
        self.nodes += 1;
        if depth == self.live.len() {
            let c = bits::count(&self.stack[depth]) as i64;
            if c > self.best {
                self.best = c;
                self.best_choice.clone_from(&self.cur);
                if self.target.is_some_and(|t| c as u64 >= t) {
                    self.hit = true;
                }
            }
            return;
        }
        let u = self.live[depth];
        for (o, mask) in self.p.masks[u].iter().enumerate() {
            let (lo, hi) = self.stack.split_at_mut(depth + 1);
            bits::and_into(&mut hi[0], &lo[depth], mask);
            if (bits::count(&hi[0]) as i64) <= self.best {
                continue;
            }
            self.cur[u] = o as u32;
            self.go(depth + 1);
            self.cur[u] = 0;
            if self.hit {
                return;
            }
        }
    }
}

impl Problem {
    /// Units whose options do not all keep the same set. The rest are fixed
    /// to option 0 and folded into the starting set.
    fn live_units(&self) -> Vec<usize> {
        (0..self.masks.len())
            .filter(|&u| self.masks[u].windows(2).any(|w| w[0] != w[1]))
            .collect()
    }

    /// Finds the lexicographically first optimal choice. `start` is the set
    /// of configurations admissible before any choice is made.
    pub fn solve(&self, start: &[u64], target: Option<u64>) -> Solution {
        let live = self.live_units();
        let units = self.masks.len();
        let mut base = start.to_vec();
        for (u, opts) in self.masks.iter().enumerate() {
            if !live.contains(&u) {
                if let Some(m) = opts.first() {
                    base.iter_mut().zip(m).for_each(|(b, x)| *b &= x);
                }
            }
        }
        let run = |first: Option<(usize, usize)>| -> (i64, Vec<u32>, u64, bool) {
            let mut stack = alloc::vec![alloc::vec![0u64; self.words]; live.len() + 1];
            stack[0].copy_from_slice(&base);
            let mut dfs = Dfs {
                p: self,
                live: &live,
                best: -1,
                best_choice: alloc::vec![0; units],
                cur: alloc::vec![0; units],
                stack,
                nodes: 0,
                target,
                hit: false,
            };
            match first {
                None => dfs.go(0),
                Some((u, o)) => {
                    let (lo, hi) = dfs.stack.split_at_mut(1);
                    bits::and_into(&mut hi[0], &lo[0], &self.masks[u][o]);
                    dfs.cur[u] = o as u32;
                    dfs.nodes += 1;
                    dfs.go(1);
                }
            }
            (dfs.best, dfs.best_choice, dfs.nodes, dfs.hit)
        };
        let parts: Vec<(i64, Vec<u32>, u64, bool)> = match live.first() {
            None => alloc::vec![run(None)],
            Some(&u0) => par::map_indices(self.masks[u0].len(), |o| run(Some((u0, o)))),
        };
        let mut out = Solution {
            best: 0,
            choice: alloc::vec![0; units],
            nodes: 0,
            hit_target: false,
        };
        let mut best = -1i64;
        for (b, choice, nodes, hit) in parts {
            out.nodes += nodes;
            if out.hit_target {
                continue;
            }
            if b > best {
                best = b;
                out.choice = choice;
                out.hit_target = hit;
            }
        }
        out.best = best.max(0) as u64;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(p: &Problem, start: &[u64]) -> (u64, Vec<u32>) {
        let units = p.masks.len();
        let mut choice = alloc::vec![0u32; units];
        let mut best = (0u64, choice.clone());
        let mut first = true;
        loop {
            let mut acc = start.to_vec();
            for (u, &o) in choice.iter().enumerate() {
                for (a, m) in acc.iter_mut().zip(&p.masks[u][o as usize]) {
                    *a &= m;
                }
            }
            let c = bits::count(&acc);
            if first || c > best.0 {
                best = (c, choice.clone());
                first = false;
            }
            let mut u = units;
            loop {
                if u == 0 {
                    return best;
                }
                u -= 1;
                choice[u] += 1;
                if (choice[u] as usize) < p.masks[u].len() {
                    break;
                }
                choice[u] = 0;
            }
        }
    }

    #[test]
    fn matches_brute_force_on_small_problems() {
        let mut seed = 0x2545_f491_4f6c_dd1du64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for _ in 0..40 {
            let units = 1 + (next() % 6) as usize;
            let masks = (0..units)
                .map(|_| {
                    (0..1 + next() % 3)
                        .map(|_| alloc::vec![next() & 0xffff])
                        .collect()
                })
                .collect();
            let p = Problem { words: 1, masks };
            let start = [0xffffu64];
            let sol = p.solve(&start, None);
            let (b, c) = brute(&p, &start);
            assert_eq!(sol.best, b);
            assert_eq!(sol.choice, c);
        }
    }

    #[test]
    fn target_stops_early() {
        let p = Problem {
            words: 1,
            masks: alloc::vec![alloc::vec![alloc::vec![0b0011], alloc::vec![0b1111]]],
        };
        let s = p.solve(&[0b1111], Some(2));
        assert!(s.hit_target);
        assert_eq!((s.best, s.choice.clone()), (2, alloc::vec![0]));
        assert_eq!(p.solve(&[0b1111], None).best, 4);
    }
}
