//! The no-Ramsey-degree construction on the signed sphere at `k = 1`:
//! coloring by the number of value jumps, every long enough block sequence
//! spans all colors, witnessed constructively by alternating partial sums.

use crate::blocks::{span, FuncBlockSeq, SpanMode};
use crate::error::{Error, Result};
use crate::func::{enumerate_sphere, FiniteFunction};
use crate::oracle::Color;
use crate::search::Search;
use crate::types::type_of;

/// `c(f) = (|tp(f)| mod K) + 1`: the color counts the jumps between the two
/// nonzero values of `f`.
pub fn degree_coloring(f: &FiniteFunction, big_k: u32) -> Result<Color> {
    if big_k == 0 {
        return Err(Error::InvalidInput("K must be positive".into()));
    }
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    if f.max_magnitude() != 1 {
        return Err(Error::ParameterMismatch("degree coloring lives on the k=1 sphere".into()));
    }
    let (tp, _) = type_of(f)?;
    Ok((tp.len() as u32 % big_k) + 1)
}

fn scale_by_sign(f: &FiniteFunction, sign: i32) -> FiniteFunction {
    if sign < 0 {
        f.negate()
    } else {
        f.as_signed()
    }
}

/// The witnesses `h_0..h_{K-1}`: normalized pair sums
/// `g_i = f_{2i}(min supp f_{2i})·f_{2i} + f_{2i+1}(max supp f_{2i+1})·f_{2i+1}`
/// followed by the alternating partial sums
/// `h_i = Σ_{j<i} (-1)^j g_j + (-1)^i Σ_{j>=i} g_j`. Each `h_i` lies in the
/// signed span of `F` and `|tp(h_i)| = |tp(h_0)| + i`, so the colors are
/// pairwise distinct.
pub fn all_colors_witness(f: &FuncBlockSeq, big_k: u32) -> Result<Vec<FiniteFunction>> {
    if f.len() != 2 * big_k as usize {
        return Err(Error::LengthMismatch(f.len(), 2 * big_k as usize));
    }
    let mut gs = Vec::with_capacity(big_k as usize);
    for i in 0..big_k as usize {
        let a = f.get(2 * i);
        let b = f.get(2 * i + 1);
        let sa = a.value(a.min_support().ok_or(Error::ZeroFunction)?);
        let sb = b.value(b.max_support().ok_or(Error::ZeroFunction)?);
        let g = scale_by_sign(a, sa).add_disjoint(&scale_by_sign(b, sb))?;
        gs.push(g);
    }
    let mut out = Vec::with_capacity(big_k as usize);
    for i in 0..big_k as usize {
        let mut h = FiniteFunction::zero(f.ambient(), f.k(), true);
        for (j, g) in gs.iter().enumerate() {
            let sign = if j < i {
                if j % 2 == 0 { 1 } else { -1 }
            } else if i % 2 == 0 {
                1
            } else {
                -1
            };
            h = h.add_disjoint(&scale_by_sign(g, sign))?;
        }
        out.push(h);
    }
    Ok(out)
}

/// True iff every length-`2K` block sequence in `X_{±1}(n)` spans all `K`
/// colors of the jump coloring.
pub fn verify_no_ramsey_degree(search: &Search, n: usize, big_k: u32) -> Result<bool> {
    if n < 2 * big_k as usize {
        return Err(Error::InvalidInput(format!(
            "need n >= 2K, got n={n}, K={big_k}"
        )));
    }
    let pool = enumerate_sphere(n, 1, true);
    for f in crate::blocks::block_func_seqs(&pool, 2 * big_k as usize) {
        search.charge(1)?;
        let mut seen = vec![false; big_k as usize + 1];
        for g in span(&f, SpanMode::SignedStrict)? {
            seen[degree_coloring(&g, big_k)? as usize] = true;
        }
        if !(1..=big_k as usize).all(|c| seen[c]) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::span_contains;

    fn f(values: &[i32]) -> FiniteFunction {
        FiniteFunction::new(values.to_vec(), 1, true).unwrap()
    }

    #[test]
    fn degree_coloring_examples() {
        assert_eq!(degree_coloring(&f(&[1, 1, 1, 1]), 2).unwrap(), 2);
        assert_eq!(degree_coloring(&f(&[1, 1, -1, -1]), 2).unwrap(), 1);
        for big_k in 1..=3 {
            assert_eq!(degree_coloring(&f(&[1, 0, 0, 0]), big_k).unwrap(), (1 % big_k) + 1);
        }
        assert!(degree_coloring(&FiniteFunction::zero(2, 1, true), 2).is_err());
    }

    #[test]
    fn witness_example_k2() {
        let seq = FuncBlockSeq::new(vec![
            f(&[1, 0, 0, 0]),
            f(&[0, 1, 0, 0]),
            f(&[0, 0, 1, 0]),
            f(&[0, 0, 0, 1]),
        ])
        .unwrap();
        let hs = all_colors_witness(&seq, 2).unwrap();
        assert_eq!(hs[0].values(), &[1, 1, 1, 1]);
        assert_eq!(hs[1].values(), &[1, 1, -1, -1]);
        assert_eq!(type_of(&hs[0]).unwrap().0.len(), 1);
        assert_eq!(type_of(&hs[1]).unwrap().0.len(), 2);
    }

    #[test]
    fn witness_normalization_and_membership() {
        // g_i takes value 1 at both ends of its support; h_i stays in the span
        let pool = enumerate_sphere(4, 1, true);
        for seq in crate::blocks::block_func_seqs(&pool, 4) {
            let hs = all_colors_witness(&seq, 2).unwrap();
            let base = type_of(&hs[0]).unwrap().0.len();
            for (i, h) in hs.iter().enumerate() {
                assert_eq!(type_of(h).unwrap().0.len(), base + i);
                assert!(span_contains(&seq, SpanMode::SignedStrict, h).unwrap());
            }
            let colors: std::collections::BTreeSet<Color> =
                hs.iter().map(|h| degree_coloring(h, 2).unwrap()).collect();
            assert_eq!(colors.len(), 2);
        }
    }

    #[test]
    fn no_ramsey_degree_tiny() {
        let search = Search::default();
        assert!(verify_no_ramsey_degree(&search, 2, 1).unwrap());
        assert!(verify_no_ramsey_degree(&search, 4, 2).unwrap());
        assert!(verify_no_ramsey_degree(&search, 1, 1).is_err());
    }
}
