//! Depth-first search for avoiding colorings.
//!
//! Colorings are enumerated as restricted growth strings (a new color may be
//! used only if all smaller colors already appear), which enumerates
//! colorings exactly once up to color permutation. A branch dies as soon as
//! some witness structure is irrevocably satisfied under the partial
//! assignment: a fully assigned monochromatic structure, or, in the
//! approximate engines, a candidate all of whose slots already see some
//! common color among their assigned neighbors.

use rayon::prelude::*;

use crate::error::Result;
use crate::search::Search;

/// Monochromatic-structure instance: candidates are element-index sets.
pub struct MonoProblem {
    pub n_elements: usize,
    pub candidates: Vec<Vec<usize>>,
}

/// Near-structure instance: per candidate, per span slot, the indices of the
/// domain elements within distance one of that slot.
pub struct ApproxProblem {
    pub n_elements: usize,
    pub candidates: Vec<Vec<Vec<usize>>>,
}

struct MonoState<'a> {
    problem: &'a MonoProblem,
    incidence: Vec<Vec<usize>>,
    sizes: Vec<usize>,
    cand_color: Vec<u32>,
    cand_count: Vec<usize>,
    cand_mismatch: Vec<u32>, // number of off-color members
    max_used: u32,
}

impl<'a> MonoState<'a> {
    fn new(problem: &'a MonoProblem) -> Self {
        let mut incidence = vec![Vec::new(); problem.n_elements];
        for (ci, cand) in problem.candidates.iter().enumerate() {
            for &e in cand {
                incidence[e].push(ci);
            }
        }
        MonoState {
            sizes: problem.candidates.iter().map(Vec::len).collect(),
            incidence,
            cand_color: vec![0; problem.candidates.len()],
            cand_count: vec![0; problem.candidates.len()],
            cand_mismatch: vec![0; problem.candidates.len()],
            max_used: 0,
            problem,
        }
    }

    /// Returns false when the assignment completes a monochromatic candidate.
    fn assign(&mut self, e: usize, col: u32) -> bool {
        let mut ok = true;
        for idx in 0..self.incidence[e].len() {
            let ci = self.incidence[e][idx];
            if self.cand_color[ci] == 0 {
                self.cand_color[ci] = col;
            } else if self.cand_color[ci] != col {
                self.cand_mismatch[ci] += 1;
            }
            self.cand_count[ci] += 1;
            if self.cand_mismatch[ci] == 0 && self.cand_count[ci] == self.sizes[ci] {
                ok = false;
            }
        }
        ok
    }

    fn unassign(&mut self, e: usize, col: u32) {
        for idx in 0..self.incidence[e].len() {
            let ci = self.incidence[e][idx];
            self.cand_count[ci] -= 1;
            if self.cand_color[ci] != col {
                self.cand_mismatch[ci] -= 1;
            } else if self.cand_count[ci] == 0 {
                self.cand_color[ci] = 0;
            } else {
                // the first-assigned member may not have been this element;
                // color slots are only reset when the count returns to zero,
                // which is correct because equal colors are interchangeable
            }
        }
    }

    fn dfs(&mut self, search: &Search, e: usize, r: u32) -> Result<bool> {
        search.charge(1)?;
        if e == self.problem.n_elements {
            return Ok(true);
        }
        let cap = (self.max_used + 1).min(r);
        for col in 1..=cap {
            let ok = self.assign(e, col);
            let prev_max = self.max_used;
            self.max_used = self.max_used.max(col);
            if ok && self.dfs(search, e + 1, r)? {
                self.unassign(e, col);
                self.max_used = prev_max;
                return Ok(true);
            }
            self.unassign(e, col);
            self.max_used = prev_max;
        }
        Ok(false)
    }

    fn replay(&mut self, prefix: &[u32]) -> bool {
        for (e, &col) in prefix.iter().enumerate() {
            self.max_used = self.max_used.max(col);
            if !self.assign(e, col) {
                return false;
            }
        }
        true
    }
}

/// Is there an `r`-coloring with no fully monochromatic candidate?
pub fn exists_avoiding_mono(search: &Search, problem: &MonoProblem, r: u32) -> Result<bool> {
    if search.jobs > 1 && problem.n_elements > 4 {
        let prefixes = rgs_prefixes(problem.n_elements.min(6), r);
        return prefixes
            .par_iter()
            .map(|prefix| {
                let mut state = MonoState::new(problem);
                if !state.replay(prefix) {
                    return Ok(false);
                }
                state.dfs(search, prefix.len(), r)
            })
            .try_reduce(|| false, |a, b| Ok(a || b));
    }
    MonoState::new(problem).dfs(search, 0, r)
}

/// All restricted growth strings of the given length (branch points for the
/// parallel split).
fn rgs_prefixes(len: usize, r: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(len: usize, r: u32, max_used: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for col in 1..=(max_used + 1).min(r) {
            cur.push(col);
            rec(len, r, max_used.max(col), cur, out);
            cur.pop();
        }
    }
    rec(len, r, 0, &mut cur, &mut out);
    out
}

struct ApproxState<'a> {
    problem: &'a ApproxProblem,
    // element -> (candidate, slot) incidences
    incidence: Vec<Vec<(usize, usize)>>,
    // candidate -> slot -> color -> count of assigned ball members
    slot_count: Vec<Vec<Vec<u32>>>,
    // candidate -> color -> number of slots with a hit
    hits: Vec<Vec<usize>>,
    slots_of: Vec<usize>,
    max_used: u32,
    r: u32,
}

impl<'a> ApproxState<'a> {
    fn new(problem: &'a ApproxProblem, r: u32) -> Self {
        let mut incidence = vec![Vec::new(); problem.n_elements];
        for (ci, cand) in problem.candidates.iter().enumerate() {
            for (si, ball) in cand.iter().enumerate() {
                for &e in ball {
                    incidence[e].push((ci, si));
                }
            }
        }
        ApproxState {
            incidence,
            slot_count: problem
                .candidates
                .iter()
                .map(|cand| cand.iter().map(|_| vec![0u32; r as usize + 1]).collect())
                .collect(),
            hits: problem
                .candidates
                .iter()
                .map(|_| vec![0usize; r as usize + 1])
                .collect(),
            slots_of: problem.candidates.iter().map(Vec::len).collect(),
            max_used: 0,
            r,
            problem,
        }
    }

    /// Returns false when some candidate becomes satisfied: a color that now
    /// hits every slot.
    fn assign(&mut self, e: usize, col: u32) -> bool {
        let mut ok = true;
        for idx in 0..self.incidence[e].len() {
            let (ci, si) = self.incidence[e][idx];
            self.slot_count[ci][si][col as usize] += 1;
            if self.slot_count[ci][si][col as usize] == 1 {
                self.hits[ci][col as usize] += 1;
                if self.hits[ci][col as usize] == self.slots_of[ci] && self.slots_of[ci] > 0 {
                    ok = false;
                }
            }
        }
        ok
    }

    fn unassign(&mut self, e: usize, col: u32) {
        for idx in 0..self.incidence[e].len() {
            let (ci, si) = self.incidence[e][idx];
            self.slot_count[ci][si][col as usize] -= 1;
            if self.slot_count[ci][si][col as usize] == 0 {
                self.hits[ci][col as usize] -= 1;
            }
        }
    }

    fn dfs(&mut self, search: &Search, e: usize) -> Result<bool> {
        search.charge(1)?;
        if e == self.problem.n_elements {
            return Ok(true);
        }
        let cap = (self.max_used + 1).min(self.r);
        for col in 1..=cap {
            let ok = self.assign(e, col);
            let prev_max = self.max_used;
            self.max_used = self.max_used.max(col);
            if ok && self.dfs(search, e + 1)? {
                self.unassign(e, col);
                self.max_used = prev_max;
                return Ok(true);
            }
            self.unassign(e, col);
            self.max_used = prev_max;
        }
        Ok(false)
    }
}

/// Is there an `r`-coloring under which no candidate is approximately
/// monochromatic?
pub fn exists_avoiding_approx(search: &Search, problem: &ApproxProblem, r: u32) -> Result<bool> {
    // a candidate with no slots at all is satisfied by any coloring
    if problem.candidates.iter().any(|c| c.is_empty()) {
        return Ok(false);
    }
    ApproxState::new(problem, r).dfs(search, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mono_engine_pigeonhole() {
        // three elements, candidates = all pairs: with two colors some pair
        // is monochromatic iff two elements share a color; an avoiding
        // 3-coloring exists only when r >= 3
        let problem = MonoProblem {
            n_elements: 3,
            candidates: vec![vec![0, 1], vec![0, 2], vec![1, 2]],
        };
        let search = Search::default();
        assert!(!exists_avoiding_mono(&search, &problem, 2).unwrap());
        assert!(exists_avoiding_mono(&search, &problem, 3).unwrap());
    }

    #[test]
    fn mono_engine_counts_rgs_only() {
        // without candidates every assignment avoids; the engine must find it
        let problem = MonoProblem { n_elements: 4, candidates: vec![] };
        assert!(exists_avoiding_mono(&Search::default(), &problem, 2).unwrap());
    }

    #[test]
    fn approx_engine_slots() {
        // one candidate with two slots; slot balls {0} and {1}: satisfied iff
        // elements 0 and 1 share a color; avoiding needs 2 colors
        let problem = ApproxProblem {
            n_elements: 2,
            candidates: vec![vec![vec![0], vec![1]]],
        };
        let search = Search::default();
        assert!(!exists_avoiding_approx(&search, &problem, 1).unwrap());
        assert!(exists_avoiding_approx(&search, &problem, 2).unwrap());
    }

    /// Naive reference: enumerate every coloring outright.
    fn naive_avoiding_mono(problem: &MonoProblem, r: u32) -> bool {
        let n = problem.n_elements;
        let mut colors = vec![1u32; n];
        loop {
            let avoided = problem.candidates.iter().all(|cand| {
                cand.iter().any(|&e| colors[e] != colors[cand[0]])
            });
            if avoided {
                return true;
            }
            let mut i = 0;
            loop {
                if i == n {
                    return false;
                }
                if colors[i] < r {
                    colors[i] += 1;
                    break;
                }
                colors[i] = 1;
                i += 1;
            }
        }
    }

    fn naive_avoiding_approx(problem: &ApproxProblem, r: u32) -> bool {
        let n = problem.n_elements;
        let mut colors = vec![1u32; n];
        loop {
            let avoided = !problem.candidates.iter().any(|cand| {
                (1..=r).any(|col| {
                    cand.iter().all(|ball| ball.iter().any(|&e| colors[e] == col))
                })
            });
            if avoided {
                return true;
            }
            let mut i = 0;
            loop {
                if i == n {
                    return false;
                }
                if colors[i] < r {
                    colors[i] += 1;
                    break;
                }
                colors[i] = 1;
                i += 1;
            }
        }
    }

    #[test]
    fn mono_engine_matches_naive_enumeration() {
        // pseudo-random small instances
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for trial in 0..40 {
            let n = 3 + (next() % 5) as usize;
            let n_cands = (next() % 6) as usize;
            let candidates: Vec<Vec<usize>> = (0..n_cands)
                .map(|_| {
                    let size = 1 + (next() % 3) as usize;
                    let mut c: Vec<usize> = (0..size).map(|_| (next() % n as u64) as usize).collect();
                    c.sort_unstable();
                    c.dedup();
                    c
                })
                .collect();
            let problem = MonoProblem { n_elements: n, candidates };
            for r in 1..=3 {
                let fast = exists_avoiding_mono(&Search::default(), &problem, r).unwrap();
                let slow = naive_avoiding_mono(&problem, r);
                assert_eq!(fast, slow, "trial {trial}, r={r}");
            }
        }
    }

    #[test]
    fn approx_engine_matches_naive_enumeration() {
        let mut state = 0xdeadbeefcafef00du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for trial in 0..40 {
            let n = 3 + (next() % 4) as usize;
            let n_cands = 1 + (next() % 3) as usize;
            let candidates: Vec<Vec<Vec<usize>>> = (0..n_cands)
                .map(|_| {
                    let slots = 1 + (next() % 3) as usize;
                    (0..slots)
                        .map(|_| {
                            let size = 1 + (next() % 3) as usize;
                            let mut b: Vec<usize> =
                                (0..size).map(|_| (next() % n as u64) as usize).collect();
                            b.sort_unstable();
                            b.dedup();
                            b
                        })
                        .collect()
                })
                .collect();
            let problem = ApproxProblem { n_elements: n, candidates };
            for r in 1..=3 {
                let fast = exists_avoiding_approx(&Search::default(), &problem, r).unwrap();
                let slow = naive_avoiding_approx(&problem, r);
                assert_eq!(fast, slow, "trial {trial}, r={r}");
            }
        }
    }

    #[test]
    fn parallel_mono_agrees() {
        let problem = MonoProblem {
            n_elements: 6,
            candidates: vec![vec![0, 1, 2], vec![2, 3, 4], vec![1, 3, 5]],
        };
        for r in 1..=3 {
            let seq = exists_avoiding_mono(&Search::default(), &problem, r).unwrap();
            let par = exists_avoiding_mono(&Search::default().with_jobs(4), &problem, r).unwrap();
            assert_eq!(seq, par, "r={r}");
        }
    }
}
