//! Exhaustive ground truth: exact least thresholds at tiny parameters, plus
//! the no-Ramsey-degree construction for the signed sphere at `k = 1`.
//!
//! `holds_at` decides whether *every* `r`-coloring of the relevant domain at
//! size `n` admits the required witness, by a depth-first search for an
//! avoiding coloring. Colorings are enumerated up to color permutation
//! (first occurrences of colors are forced to appear in increasing order),
//! and a branch is pruned as soon as some witness structure is irrevocably
//! satisfied. Block subsequence structure depends only on the index pattern
//! of the base sequence, so the singleton base is a faithful representative
//! for the Milliken–Taylor domains.

mod degree;
mod sweep;

pub use degree::{all_colors_witness, degree_coloring, verify_no_ramsey_degree};

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::blocks::{block_func_seqs, span, SetBlockSeq, SpanMode};
use crate::error::{Error, Result};
use crate::func::enumerate_sphere;
use crate::oracle::Element;
use crate::search::Search;
use sweep::{exists_avoiding_approx, exists_avoiding_mono, ApproxProblem, MonoProblem};

/// Which least-threshold family a query asks about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QueryKind {
    /// Milliken–Taylor: monochromatic `Block^d(t)`, `t` of length `m`.
    Mt,
    /// Positive sphere: monochromatic span of a length-`m` block sequence.
    G,
    /// Signed sphere: approximately monochromatic signed span.
    GPm,
    /// Monochromatic `Block^d_k(F)`, `F` of length `m`.
    Mg,
    /// Approximately monochromatic `Block^d_{±k}(F)`.
    MgPm,
}

impl QueryKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "MT" => Some(QueryKind::Mt),
            "G" => Some(QueryKind::G),
            "G_PM" => Some(QueryKind::GPm),
            "MG" => Some(QueryKind::Mg),
            "MG_PM" => Some(QueryKind::MgPm),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            QueryKind::Mt => "MT",
            QueryKind::G => "G",
            QueryKind::GPm => "G_PM",
            QueryKind::Mg => "MG",
            QueryKind::MgPm => "MG_PM",
        }
    }

    fn uses_k(&self) -> bool {
        !matches!(self, QueryKind::Mt)
    }

    fn uses_d(&self) -> bool {
        matches!(self, QueryKind::Mt | QueryKind::Mg | QueryKind::MgPm)
    }
}

/// An exact-threshold query. `k` is ignored for `MT`, `d` for `G`/`G_PM`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactQuery {
    pub kind: QueryKind,
    pub k: u32,
    pub d: usize,
    pub m: usize,
    pub r: u32,
    /// Search ceiling for [`exact_number`].
    pub n_max: usize,
}

impl ExactQuery {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.r == 0 {
            return Err(Error::InvalidInput("m and r must be positive".into()));
        }
        if self.kind.uses_k() && self.k == 0 {
            return Err(Error::InvalidInput("k must be positive".into()));
        }
        if self.kind.uses_d() && (self.d == 0 || self.d > self.m) {
            return Err(Error::InvalidInput("need 1 <= d <= m".into()));
        }
        Ok(())
    }
}

/// Canonical regression-file key: kind plus its applicable parameters.
pub fn query_string(q: &ExactQuery) -> String {
    let mut parts = Vec::new();
    if q.kind.uses_k() {
        parts.push(format!("k={}", q.k));
    }
    if q.kind.uses_d() {
        parts.push(format!("d={}", q.d));
    }
    parts.push(format!("m={}", q.m));
    parts.push(format!("r={}", q.r));
    format!("{}:{}", q.kind.name(), parts.join(","))
}

/// Parse a regression-file key back into a query.
pub fn parse_query_string(key: &str, n_max: usize) -> Result<ExactQuery> {
    let (kind_str, rest) = key
        .split_once(':')
        .ok_or_else(|| Error::InvalidInput(format!("malformed query key {key}")))?;
    let kind = QueryKind::parse(kind_str)
        .ok_or_else(|| Error::InvalidInput(format!("unknown kind in key {key}")))?;
    let mut q = ExactQuery { kind, k: 1, d: 1, m: 0, r: 0, n_max };
    for part in rest.split(',') {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("malformed parameter {part}")))?;
        let value: usize = value
            .parse()
            .map_err(|e| Error::InvalidInput(format!("bad value in {part}: {e}")))?;
        match name {
            "k" => q.k = value as u32,
            "d" => q.d = value,
            "m" => q.m = value,
            "r" => q.r = value as u32,
            other => return Err(Error::InvalidInput(format!("unknown parameter {other}"))),
        }
    }
    q.validate()?;
    Ok(q)
}

/// Does every `r`-coloring of the domain at size `n` admit the witness the
/// query kind asks for?
pub fn holds_at(search: &Search, q: &ExactQuery, n: usize) -> Result<bool> {
    q.validate()?;
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    match q.kind {
        QueryKind::Mt => {
            let base = SetBlockSeq::singletons(n);
            let elements = if q.d <= n { base.block_subseqs(q.d)? } else { Vec::new() };
            let index: HashMap<String, usize> = elements
                .iter()
                .enumerate()
                .map(|(i, e)| (Element::SetSeq(e.clone()).canonical_key(), i))
                .collect();
            let mut candidates = Vec::new();
            if q.m <= n {
                for t in base.block_subseqs(q.m)? {
                    search.charge(1)?;
                    let mut ids = Vec::new();
                    for u in t.block_subseqs(q.d)? {
                        let key = Element::SetSeq(u).canonical_key();
                        ids.push(*index.get(&key).ok_or_else(|| {
                            Error::Internal("block subsequence escaped the domain".into())
                        })?);
                    }
                    ids.sort_unstable();
                    ids.dedup();
                    candidates.push(ids);
                }
            }
            let problem = MonoProblem { n_elements: elements.len(), candidates };
            Ok(!exists_avoiding_mono(search, &problem, q.r)?)
        }
        QueryKind::G | QueryKind::Mg => {
            let pool = enumerate_sphere(n, q.k, false);
            let d = if q.kind == QueryKind::G { 1 } else { q.d };
            let (elements, index): (Vec<Element>, HashMap<String, usize>) = if q.kind == QueryKind::G {
                let els: Vec<Element> = pool.iter().cloned().map(Element::Func).collect();
                let idx = els
                    .iter()
                    .enumerate()
                    .map(|(i, e)| (e.canonical_key(), i))
                    .collect();
                (els, idx)
            } else {
                let els: Vec<Element> = block_func_seqs(&pool, d)
                    .into_iter()
                    .map(Element::FuncSeq)
                    .collect();
                let idx = els
                    .iter()
                    .enumerate()
                    .map(|(i, e)| (e.canonical_key(), i))
                    .collect();
                (els, idx)
            };
            let mut candidates = Vec::new();
            for f in block_func_seqs(&pool, q.m) {
                search.charge(1)?;
                let sp = span(&f, SpanMode::PosStrict)?;
                let mut ids = Vec::new();
                if q.kind == QueryKind::G {
                    for g in sp {
                        ids.push(index[&g.canonical_key()]);
                    }
                } else {
                    for seq in block_func_seqs(&sp, d) {
                        ids.push(index[&Element::FuncSeq(seq).canonical_key()]);
                    }
                }
                ids.sort_unstable();
                ids.dedup();
                if !ids.is_empty() {
                    candidates.push(ids);
                }
            }
            let problem = MonoProblem { n_elements: elements.len(), candidates };
            Ok(!exists_avoiding_mono(search, &problem, q.r)?)
        }
        QueryKind::GPm => {
            let pool = enumerate_sphere(n, q.k, true);
            let mut candidates = Vec::new();
            for f in block_func_seqs(&pool, q.m) {
                search.charge(1)?;
                let mut slots = Vec::new();
                for g in span(&f, SpanMode::SignedStrict)? {
                    let ball: Vec<usize> = pool
                        .iter()
                        .enumerate()
                        .filter(|(_, h)| g.sup_metric(h).map(|d| d <= 1).unwrap_or(false))
                        .map(|(i, _)| i)
                        .collect();
                    slots.push(ball);
                }
                candidates.push(slots);
            }
            let problem = ApproxProblem { n_elements: pool.len(), candidates };
            Ok(!exists_avoiding_approx(search, &problem, q.r)?)
        }
        QueryKind::MgPm => {
            let pool = enumerate_sphere(n, q.k, true);
            let elements = block_func_seqs(&pool, q.d);
            let seq_metric = |a: &crate::blocks::FuncBlockSeq, b: &crate::blocks::FuncBlockSeq| -> Result<u32> {
                let mut worst = 0;
                for (x, y) in a.funcs().iter().zip(b.funcs()) {
                    worst = worst.max(x.sup_metric(y)?);
                }
                Ok(worst)
            };
            let mut candidates = Vec::new();
            for f in block_func_seqs(&pool, q.m) {
                search.charge(1)?;
                let sp = span(&f, SpanMode::SignedStrict)?;
                let mut slots = Vec::new();
                for seq in block_func_seqs(&sp, q.d) {
                    let mut ball = Vec::new();
                    for (i, other) in elements.iter().enumerate() {
                        if seq_metric(&seq, other)? <= 1 {
                            ball.push(i);
                        }
                    }
                    slots.push(ball);
                }
                candidates.push(slots);
            }
            let problem = ApproxProblem { n_elements: elements.len(), candidates };
            Ok(!exists_avoiding_approx(search, &problem, q.r)?)
        }
    }
}

/// The least `n ≤ n_max` at which the property holds. Rather than assuming
/// upward closure silently, the step to `n+1` is re-verified before the
/// value is reported.
pub fn exact_number(search: &Search, q: &ExactQuery) -> Result<Option<u64>> {
    q.validate()?;
    for n in 1..=q.n_max {
        if holds_at(search, q, n)? {
            if !holds_at(search, q, n + 1)? {
                return Err(Error::Internal(format!(
                    "property holds at n={n} but not at n={}; closure violated",
                    n + 1
                )));
            }
            return Ok(Some(n as u64));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RegressionEntry {
    pub value: u64,
    pub n_max: usize,
}

pub type RegressionFile = BTreeMap<String, RegressionEntry>;

pub fn load_regression(path: &Path) -> Result<RegressionFile> {
    let data = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&data)?)
}

pub fn save_regression(path: &Path, file: &RegressionFile) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(file)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(kind: QueryKind, k: u32, d: usize, m: usize, r: u32) -> ExactQuery {
        ExactQuery { kind, k, d, m, r, n_max: 8 }
    }

    #[test]
    fn mt_single_set_threshold() {
        let search = Search::default();
        for r in 1..=4 {
            assert!(holds_at(&search, &q(QueryKind::Mt, 1, 1, 1, r), 1).unwrap());
            assert_eq!(exact_number(&search, &q(QueryKind::Mt, 1, 1, 1, r)).unwrap(), Some(1));
        }
    }

    #[test]
    fn mt_pair_small_cases() {
        let search = Search::default();
        // n=2: color {0}:1 {1}:2 {0,1}:1 avoids, so the property fails
        assert!(!holds_at(&search, &q(QueryKind::Mt, 1, 1, 2, 2), 2).unwrap());
        assert!(!holds_at(&search, &q(QueryKind::Mt, 1, 1, 2, 2), 3).unwrap());
    }

    #[test]
    fn g_kind_matches_mt_at_k1() {
        let search = Search::default();
        for m in 1..=2usize {
            for r in 1..=2u32 {
                for n in 1..=4usize {
                    let a = holds_at(&search, &q(QueryKind::Mt, 1, 1, m, r), n).unwrap();
                    let b = holds_at(&search, &q(QueryKind::G, 1, 1, m, r), n).unwrap();
                    assert_eq!(a, b, "MT vs G mismatch at m={m}, r={r}, n={n}");
                }
            }
        }
    }

    #[test]
    fn g_length_one_is_always_one() {
        let search = Search::default();
        for k in 1..=2 {
            for r in 1..=3 {
                assert_eq!(exact_number(&search, &q(QueryKind::G, k, 1, 1, r)).unwrap(), Some(1));
            }
        }
    }

    #[test]
    fn r1_thresholds_are_capacity() {
        // with one color everything is monochromatic: MT(d,m,1) = m
        let search = Search::default();
        for (d, m) in [(1usize, 1usize), (1, 2), (1, 3), (2, 2), (2, 3)] {
            let query = q(QueryKind::Mt, 1, d, m, 1);
            assert_eq!(exact_number(&search, &query).unwrap(), Some(m as u64));
        }
        // G_PM with one color needs only capacity for a block sequence
        for m in 1..=2usize {
            let query = q(QueryKind::GPm, 1, 1, m, 1);
            assert_eq!(exact_number(&search, &query).unwrap(), Some(m as u64));
        }
    }

    #[test]
    fn mg_two_dimensional_pairs_are_trivial() {
        // Block^2 of a length-2 block sequence is the single pair (f_0, f_1),
        // so any coloring is monochromatic on it
        let search = Search::default();
        assert_eq!(exact_number(&search, &q(QueryKind::Mg, 1, 2, 2, 2)).unwrap(), Some(2));
    }

    #[test]
    fn query_strings() {
        assert_eq!(query_string(&q(QueryKind::Mt, 1, 1, 2, 2)), "MT:d=1,m=2,r=2");
        assert_eq!(query_string(&q(QueryKind::G, 2, 1, 1, 3)), "G:k=2,m=1,r=3");
        assert_eq!(query_string(&q(QueryKind::MgPm, 1, 2, 2, 2)), "MG_PM:k=1,d=2,m=2,r=2");
    }

    #[test]
    fn holds_at_is_monotone_in_n_on_computed_range() {
        let search = Search::default();
        for (kind, k, m, r) in [
            (QueryKind::Mt, 1u32, 2usize, 2u32),
            (QueryKind::G, 1, 2, 2),
            (QueryKind::GPm, 1, 1, 2),
        ] {
            let query = ExactQuery { kind, k, d: 1, m, r, n_max: 6 };
            let mut seen_true = false;
            for n in 1..=6usize {
                let v = holds_at(&search, &query, n).unwrap();
                assert!(!(seen_true && !v), "property lost when growing n to {n}");
                seen_true |= v;
            }
        }
    }

    #[test]
    fn budget_exhaustion_surfaces() {
        let tight = Search::with_budget(1);
        assert!(matches!(
            holds_at(&tight, &q(QueryKind::Mt, 1, 1, 2, 2), 4),
            Err(Error::BudgetExceeded)
        ));
    }
}
