//! Exhaustive finite Milliken–Taylor search: find a block subsequence `t` of
//! `s` of length `m` whose set `Block^d(t)` is monochromatic.

use rayon::prelude::*;

use crate::blocks::SetBlockSeq;
use crate::error::{Error, Result};
use crate::extract::{ExtractionReport, Witness};
use crate::oracle::{Coloring, Domain, Element};
use crate::search::Search;

/// Returns the lexicographically first `t ∈ Block^m(s)` with `Block^d(t)`
/// monochromatic under `c`, or absence when no such `t` exists (the base
/// sequence is shorter than the true threshold for this coloring).
pub fn mt_search(
    search: &Search,
    s: &SetBlockSeq,
    d: usize,
    m: usize,
    c: &dyn Coloring,
) -> Result<ExtractionReport> {
    if d == 0 || m == 0 || d > m {
        return Err(Error::InvalidInput(format!("need 1 <= d <= m, got d={d}, m={m}")));
    }
    match c.domain() {
        Domain::SetBlockSeqs { s: cs, d: cd } if cs == s && *cd == d => {}
        other => {
            return Err(Error::DomainMismatch {
                expected: format!("Block^{d}(s) for the given s"),
                got: other.to_string(),
            })
        }
    }
    let start = search.examined();
    if m > s.len() {
        return Ok(ExtractionReport::absent(search.examined() - start));
    }
    let candidates = s.block_subseqs(m)?;

    let check = |t: &SetBlockSeq| -> Result<Option<u32>> {
        search.charge(1)?;
        let mut color = None;
        for u in t.block_subseqs(d)? {
            let col = c.color(&Element::SetSeq(u))?;
            match color {
                None => color = Some(col),
                Some(c0) if c0 != col => return Ok(None),
                _ => {}
            }
        }
        Ok(color)
    };

    let hit: Option<(usize, u32)> = if search.jobs > 1 {
        candidates
            .par_iter()
            .enumerate()
            .map(|(i, t)| check(t).map(|c| c.map(|col| (i, col))))
            .try_reduce(
                || None,
                |a, b| {
                    Ok(match (a, b) {
                        (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
                        (x, None) => x,
                        (None, y) => y,
                    })
                },
            )?
    } else {
        let mut found = None;
        for (i, t) in candidates.iter().enumerate() {
            if let Some(col) = check(t)? {
                found = Some((i, col));
                break;
            }
        }
        found
    };

    Ok(match hit {
        Some((i, color)) => ExtractionReport::found(
            Witness { sets: Some(candidates[i].clone()), funcs: None, color: Some(color) },
            search.examined() - start,
        ),
        None => ExtractionReport::absent(search.examined() - start),
    })
}
