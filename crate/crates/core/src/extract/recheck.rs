//! Independent witness re-verification.
//!
//! These checks use only the value-level predicates (spans, supports, the
//! metric, `s`-representability); none of the extraction machinery. Signed
//! clauses are checked *existentially*: for each span element the verifier
//! searches all of `X_{±k}(s)` for a near element of the claimed color,
//! rather than trusting the pipeline's constructed witness.

use crate::blocks::{
    block_func_seqs, displacement_at_most_one, is_block, is_s_skipped, represent_over, span,
    FuncBlockSeq, SetBlockSeq, SpanMode,
};
use crate::error::Result;
use crate::func::enumerate_sphere;
use crate::oracle::{Color, Coloring, Element};
use crate::search::Search;
use crate::types::map_onto;

/// A claim to re-verify, as emitted by the extraction pipelines.
#[derive(Debug)]
pub enum WitnessClaim<'a> {
    /// `span(F)_k` is monochromatic with the stated color.
    Positive { n: usize, k: u32, m: usize, funcs: &'a FuncBlockSeq, color: Color },
    /// `F` is `s`-skipped and every element of the signed span has a
    /// same-colored element of `X_{±k}(s)` within `ρ∞ ≤ 1` and displacement
    /// at most one.
    Signed { n: usize, k: u32, m: usize, sets: &'a SetBlockSeq, funcs: &'a FuncBlockSeq, color: Color },
    /// `Block^d_k(F)` is monochromatic.
    MultidimPositive { n: usize, k: u32, d: usize, m: usize, funcs: &'a FuncBlockSeq, color: Color },
    /// Componentwise signed clause for `Block^d_{±k}(F)`.
    MultidimSigned {
        n: usize,
        k: u32,
        d: usize,
        m: usize,
        sets: &'a SetBlockSeq,
        funcs: &'a FuncBlockSeq,
        color: Color,
    },
}

fn check_shape(funcs: &FuncBlockSeq, n: usize, k: u32, m: usize, signed: bool) -> Result<bool> {
    if funcs.len() != m || funcs.ambient() != n || funcs.k() != k {
        return Ok(false);
    }
    if !is_block(funcs.funcs()) {
        return Ok(false);
    }
    for f in funcs.funcs() {
        if !f.attains_bound() {
            return Ok(false);
        }
        if signed && !f.signed() {
            return Ok(false);
        }
        if !signed && f.values().iter().any(|&v| v < 0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Re-verify a claim against the oracle. `Ok(true)` means every clause holds.
pub fn recheck(search: &Search, claim: &WitnessClaim<'_>, c: &dyn Coloring) -> Result<bool> {
    match *claim {
        WitnessClaim::Positive { n, k, m, funcs, color } => {
            if !check_shape(funcs, n, k, m, false)? {
                return Ok(false);
            }
            for g in span(funcs, SpanMode::PosStrict)? {
                search.charge(1)?;
                if c.color(&Element::Func(g))? != color {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        WitnessClaim::Signed { n, k, m, sets, funcs, color } => {
            if !check_shape(funcs, n, k, m, true)? {
                return Ok(false);
            }
            for f in funcs.funcs() {
                if represent_over(f, sets).is_err() {
                    return Ok(false);
                }
            }
            if !is_s_skipped(funcs, sets)? {
                return Ok(false);
            }
            let nearby = signed_base_elements(sets, k)?;
            for f in span(funcs, SpanMode::SignedStrict)? {
                search.charge(1)?;
                let mut found = false;
                for cand in &nearby {
                    if f.sup_metric(cand)? <= 1
                        && displacement_at_most_one(&f, cand, sets)?
                        && c.color(&Element::Func(cand.clone()))? == color
                    {
                        found = true;
                        break;
                    }
                }
                if !found {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        WitnessClaim::MultidimPositive { n, k, d, m, funcs, color } => {
            if !check_shape(funcs, n, k, m, false)? {
                return Ok(false);
            }
            let pool = span(funcs, SpanMode::PosStrict)?;
            for seq in block_func_seqs(&pool, d) {
                search.charge(1)?;
                if c.color(&Element::FuncSeq(seq))? != color {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        WitnessClaim::MultidimSigned { n, k, d, m, sets, funcs, color } => {
            if !check_shape(funcs, n, k, m, true)? {
                return Ok(false);
            }
            if !is_s_skipped(funcs, sets)? {
                return Ok(false);
            }
            let nearby = signed_base_elements(sets, k)?;
            let pool = span(funcs, SpanMode::SignedStrict)?;
            for seq in block_func_seqs(&pool, d) {
                search.charge(nearby.len() as u64)?;
                // componentwise near sequence of the claimed color
                if !find_near_seq(&seq, &nearby, sets, c, color, 0, &mut Vec::new())? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Depth-first search for a block sequence `H'` with `c(H') = color`,
/// componentwise `ρ∞ ≤ 1` and displacement at most one.
fn find_near_seq(
    seq: &FuncBlockSeq,
    nearby: &[crate::func::FiniteFunction],
    sets: &SetBlockSeq,
    c: &dyn Coloring,
    color: Color,
    idx: usize,
    acc: &mut Vec<crate::func::FiniteFunction>,
) -> Result<bool> {
    if idx == seq.len() {
        let cand = FuncBlockSeq::new(acc.clone())?;
        return Ok(c.color(&Element::FuncSeq(cand))? == color);
    }
    let target = seq.get(idx);
    for cand in nearby {
        if target.sup_metric(cand).map_or(true, |d| d > 1) {
            continue;
        }
        if !displacement_at_most_one(target, cand, sets)? {
            continue;
        }
        if let Some(prev) = acc.last() {
            if prev.max_support().unwrap() >= cand.min_support().unwrap_or(0) {
                continue;
            }
        }
        acc.push(cand.clone());
        if find_near_seq(seq, nearby, sets, c, color, idx + 1, acc)? {
            acc.pop();
            return Ok(true);
        }
        acc.pop();
    }
    Ok(false)
}

/// All of `X_{±k}(s)` as functions on the ambient domain.
fn signed_base_elements(sets: &SetBlockSeq, k: u32) -> Result<Vec<crate::func::FiniteFunction>> {
    enumerate_sphere(sets.len(), k, true)
        .iter()
        .map(|g| map_onto(g, sets))
        .collect()
}
