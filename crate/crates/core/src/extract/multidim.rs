//! Multidimensional pipelines: colorings of length-`d` block sequences.
//!
//! The positive case inducts on `d`: an iterated end-stabilization makes the
//! coloring of `(d+1)`-sequences depend only on the first `d` entries over a
//! constructed carrier, the prefix coloring obtained by appending the last
//! carrier entry recurses at dimension `d`, and the witness is mapped back.
//! The signed case mirrors the one-dimensional signed reduction with a
//! componentwise `Q` map and componentwise approximate witnesses.

use std::sync::Arc;

use crate::blocks::{
    block_func_seqs, is_s_skipped, span, FuncBlockSeq, SetBlockSeq, SpanMode,
};
use crate::error::{Error, Result};
use crate::extract::canon::{canonize, CanonKind};
use crate::extract::positive::{extract_positive, q_embed};
use crate::extract::signed::{approximate_witness, extract_signed, signed_carrier};
use crate::extract::{ExtractionReport, Outcome, Witness};
use crate::func::FiniteFunction;
use crate::oracle::{Color, ColorInterner, Coloring, DerivedColoring, Domain, Element};
use crate::search::Search;

fn concat_seq(prefix: &FuncBlockSeq, last: &FiniteFunction) -> Result<FuncBlockSeq> {
    let mut funcs = prefix.funcs().to_vec();
    funcs.push(last.clone());
    FuncBlockSeq::new(funcs)
}

/// All length-`d` block sequences with entries in the positive span of `f`.
fn block_seqs_in_span(f: &FuncBlockSeq, d: usize, signed: bool) -> Result<Vec<FuncBlockSeq>> {
    let mode = if signed { SpanMode::SignedStrict } else { SpanMode::PosStrict };
    Ok(block_func_seqs(&span(f, mode)?, d))
}

/// One stabilization step: find a block sequence inside the span of `avail`
/// such that appending any of its span elements after any fixed
/// `dd`-sequence over `prefix` does not change the color.
fn stab_step(
    search: &Search,
    k: u32,
    dd: usize,
    c: &Arc<dyn Coloring>,
    prefix: &FuncBlockSeq,
    avail: &FuncBlockSeq,
    target: usize,
) -> Result<Option<FuncBlockSeq>> {
    let heads = Arc::new(block_seqs_in_span(prefix, dd, false)?);
    let avail = Arc::new(avail.clone());
    let c_inner = c.clone();
    let heads_inner = heads.clone();
    let avail_inner = avail.clone();
    let interner = Arc::new(ColorInterner::new());
    let interner_inner = interner.clone();
    let induced: Arc<dyn Coloring> = Arc::new(DerivedColoring::new(
        Domain::PosSphere { n: avail.len(), k },
        c.num_colors().saturating_mul(heads.len() as u64),
        move |e| match e {
            Element::Func(g) => {
                let f = q_embed(&avail_inner, g)?;
                let mut vec = Vec::with_capacity(heads_inner.len());
                for h in heads_inner.iter() {
                    vec.push(c_inner.color(&Element::FuncSeq(concat_seq(h, &f)?))?);
                }
                Ok(interner_inner.intern(vec))
            }
            _ => Err(Error::InvalidInput("expected a function".into())),
        },
    ));
    let rep = extract_positive(search, avail.len(), k, target, induced)?;
    Ok(match rep.outcome {
        Outcome::Witness(w) => {
            let inner = w.funcs.unwrap();
            let funcs: Result<Vec<FiniteFunction>> =
                inner.funcs().iter().map(|g| q_embed(&avail, g)).collect();
            Some(FuncBlockSeq::new(funcs?)?)
        }
        Outcome::Absent => None,
    })
}

/// Iterated stabilization: build a length-`ell` carrier over which the
/// coloring of `(dd+1)`-sequences depends only on the first `dd` entries.
fn canon_d(
    search: &Search,
    n: usize,
    k: u32,
    dd: usize,
    ell: usize,
    c: &Arc<dyn Coloring>,
) -> Result<Option<FuncBlockSeq>> {
    if ell <= dd {
        return Err(Error::InvalidInput(format!("need ell > dd, got ell={ell}, dd={dd}")));
    }
    if ell > n {
        return Ok(None);
    }
    let single = |i: usize| FiniteFunction::indicator(&[i], n, k as i32, k, false);
    let mut prefix = FuncBlockSeq::new((0..dd).map(single).collect::<Result<_>>()?)?;
    // the first entry of the initial pool is never consumed; only its tail is
    let mut pool: Vec<FiniteFunction> = (dd.saturating_sub(1)..n).map(single).collect::<Result<_>>()?;
    for _p in 1..=(ell - dd) {
        if pool.len() < 2 {
            return Ok(None);
        }
        let avail = FuncBlockSeq::new(pool[1..].to_vec())?;
        let mut step = None;
        for target in (1..=avail.len()).rev() {
            search.charge(1)?;
            if let Some(found) = stab_step(search, k, dd, c, &prefix, &avail, target)? {
                step = Some(found);
                break;
            }
        }
        let found = match step {
            Some(f) => f,
            None => return Ok(None),
        };
        prefix = concat_seq(&prefix, found.get(0))?;
        pool = found.funcs().to_vec();
    }
    Ok(Some(prefix))
}

/// Extract a length-`m` block sequence `F` with `Block^d_k(F)` monochromatic.
pub fn extract_multidim_positive(
    search: &Search,
    n: usize,
    k: u32,
    d: usize,
    m: usize,
    c: Arc<dyn Coloring>,
) -> Result<ExtractionReport> {
    let expected = Domain::PosBlockSeqs { n, k, d };
    if *c.domain() != expected {
        return Err(Error::DomainMismatch { expected: expected.to_string(), got: c.domain().to_string() });
    }
    if d == 0 || d > m || m > n {
        return Err(Error::InvalidInput(format!("need 1 <= d <= m <= n, got d={d}, m={m}, n={n}")));
    }
    let start = search.examined();

    if d == 1 {
        let c_inner = c.clone();
        let adapted: Arc<dyn Coloring> = Arc::new(DerivedColoring::new(
            Domain::PosSphere { n, k },
            c.num_colors(),
            move |e| match e {
                Element::Func(f) => {
                    c_inner.color(&Element::FuncSeq(FuncBlockSeq::new(vec![f.clone()])?))
                }
                _ => Err(Error::InvalidInput("expected a function".into())),
            },
        ));
        let rep = extract_positive(search, n, k, m, adapted)?;
        return Ok(match rep.outcome {
            Outcome::Witness(w) => ExtractionReport::found(
                Witness { sets: None, funcs: w.funcs, color: w.color },
                search.examined() - start,
            ),
            Outcome::Absent => ExtractionReport::absent(search.examined() - start),
        });
    }

    for big_m in (std::cmp::max(m - 1, d)..=n.saturating_sub(1)).rev() {
        let carrier = match canon_d(search, n, k, d - 1, big_m + 1, &c)? {
            Some(g) => g,
            None => continue,
        };
        let prefix = Arc::new(FuncBlockSeq::new(carrier.funcs()[..big_m].to_vec())?);
        let last = carrier.get(big_m).clone();
        let c_inner = c.clone();
        let prefix_inner = prefix.clone();
        let last_inner = last.clone();
        let induced: Arc<dyn Coloring> = Arc::new(DerivedColoring::new(
            Domain::PosBlockSeqs { n: big_m, k, d: d - 1 },
            c.num_colors(),
            move |e| match e {
                Element::FuncSeq(hs) => {
                    let mapped: Result<Vec<FiniteFunction>> =
                        hs.funcs().iter().map(|h| q_embed(&prefix_inner, h)).collect();
                    let seq = concat_seq(&FuncBlockSeq::new(mapped?)?, &last_inner)?;
                    c_inner.color(&Element::FuncSeq(seq))
                }
                _ => Err(Error::InvalidInput("expected a block sequence".into())),
            },
        ));
        let inner = extract_multidim_positive(search, big_m, k, d - 1, m - 1, induced)?;
        if let Outcome::Witness(w) = inner.outcome {
            let inner_funcs = w.funcs.unwrap();
            let mapped: Result<Vec<FiniteFunction>> =
                inner_funcs.funcs().iter().map(|g| q_embed(&prefix, g)).collect();
            let funcs = concat_seq(&FuncBlockSeq::new(mapped?)?, &last)?;
            let color = w.color.unwrap();
            for seq in block_seqs_in_span(&funcs, d, false)? {
                search.charge(1)?;
                if c.color(&Element::FuncSeq(seq))? != color {
                    return Err(Error::Internal(
                        "multidimensional witness failed exhaustive verification".into(),
                    ));
                }
            }
            return Ok(ExtractionReport::found(
                Witness { sets: None, funcs: Some(funcs), color: Some(color) },
                search.examined() - start,
            ));
        }
    }
    Ok(ExtractionReport::absent(search.examined() - start))
}

/// Brute-force counterpart: scan every length-`m` block sequence for a
/// monochromatic `Block^d_k`.
pub fn direct_search_multidim_positive(
    search: &Search,
    n: usize,
    k: u32,
    d: usize,
    m: usize,
    c: Arc<dyn Coloring>,
) -> Result<ExtractionReport> {
    let expected = Domain::PosBlockSeqs { n, k, d };
    if *c.domain() != expected {
        return Err(Error::DomainMismatch { expected: expected.to_string(), got: c.domain().to_string() });
    }
    let start = search.examined();
    let pool = crate::func::enumerate_sphere(n, k, false);
    for cand in block_func_seqs(&pool, m) {
        search.charge(1)?;
        let mut color: Option<Color> = None;
        let mut mono = true;
        for seq in block_seqs_in_span(&cand, d, false)? {
            let col = c.color(&Element::FuncSeq(seq))?;
            match color {
                None => color = Some(col),
                Some(c0) if c0 != col => {
                    mono = false;
                    break;
                }
                _ => {}
            }
        }
        if mono {
            if let Some(color) = color {
                return Ok(ExtractionReport::found(
                    Witness { sets: None, funcs: Some(cand), color: Some(color) },
                    search.examined() - start,
                ));
            }
        }
    }
    Ok(ExtractionReport::absent(search.examined() - start))
}

/// Extract `(s, F)` with `Block^d_{±k}(F)` approximately monochromatic.
pub fn extract_multidim_signed(
    search: &Search,
    n: usize,
    k: u32,
    d: usize,
    m: usize,
    c: Arc<dyn Coloring>,
) -> Result<ExtractionReport> {
    let expected = Domain::SignedBlockSeqs { n, k, d };
    if *c.domain() != expected {
        return Err(Error::DomainMismatch { expected: expected.to_string(), got: c.domain().to_string() });
    }
    if d == 0 || d > m || m > n {
        return Err(Error::InvalidInput(format!("need 1 <= d <= m <= n, got d={d}, m={m}, n={n}")));
    }
    let start = search.examined();

    if d == 1 {
        let c_inner = c.clone();
        let adapted: Arc<dyn Coloring> = Arc::new(DerivedColoring::new(
            Domain::SignedSphere { n, k },
            c.num_colors(),
            move |e| match e {
                Element::Func(f) => {
                    c_inner.color(&Element::FuncSeq(FuncBlockSeq::new(vec![f.clone()])?))
                }
                _ => Err(Error::InvalidInput("expected a function".into())),
            },
        ));
        let rep = extract_signed(search, n, k, m, adapted)?;
        return Ok(match rep.outcome {
            Outcome::Witness(w) => ExtractionReport::found(w, search.examined() - start),
            Outcome::Absent => ExtractionReport::absent(search.examined() - start),
        });
    }

    let cap = n / (2 * k as usize);
    for big_m in (m..=cap).rev() {
        let canon = canonize(
            search,
            n,
            2 * k as usize * big_m,
            CanonKind::SignedBlocks { k, d },
            c.clone(),
        )?;
        let s = match canon.outcome {
            Outcome::Witness(w) => w.sets.unwrap(),
            Outcome::Absent => continue,
        };
        let carrier = Arc::new(signed_carrier(&s, k, big_m)?);
        let c_inner = c.clone();
        let carrier_inner = carrier.clone();
        let induced: Arc<dyn Coloring> = Arc::new(DerivedColoring::new(
            Domain::PosBlockSeqs { n: big_m, k, d },
            c.num_colors(),
            move |e| match e {
                Element::FuncSeq(hs) => {
                    let mapped: Result<Vec<FiniteFunction>> =
                        hs.funcs().iter().map(|h| q_embed(&carrier_inner, h)).collect();
                    c_inner.color(&Element::FuncSeq(FuncBlockSeq::new(mapped?)?))
                }
                _ => Err(Error::InvalidInput("expected a block sequence".into())),
            },
        ));
        let inner = extract_multidim_positive(search, big_m, k, d, m, induced)?;
        if let Outcome::Witness(w) = inner.outcome {
            let inner_funcs = w.funcs.unwrap();
            let mapped: Result<Vec<FiniteFunction>> =
                inner_funcs.funcs().iter().map(|g| q_embed(&carrier, g)).collect();
            let funcs = FuncBlockSeq::new(mapped?)?;
            let color = w.color.unwrap();
            verify_multidim_signed_witness(search, c.as_ref(), &s, &carrier, &funcs, k, d, color)?;
            return Ok(ExtractionReport::found(
                Witness { sets: Some(s), funcs: Some(funcs), color: Some(color) },
                search.examined() - start,
            ));
        }
    }
    Ok(ExtractionReport::absent(search.examined() - start))
}

#[allow(clippy::too_many_arguments)]
fn verify_multidim_signed_witness(
    search: &Search,
    c: &dyn Coloring,
    s: &SetBlockSeq,
    carrier: &FuncBlockSeq,
    funcs: &FuncBlockSeq,
    k: u32,
    d: usize,
    color: u32,
) -> Result<()> {
    if !is_s_skipped(funcs, s)? {
        return Err(Error::Internal("signed multidimensional witness is not s-skipped".into()));
    }
    for seq in block_seqs_in_span(funcs, d, true)? {
        search.charge(1)?;
        let mut primed = Vec::with_capacity(d);
        for h in seq.funcs() {
            let (hp, _) = approximate_witness(h, funcs, carrier, s, k)?;
            primed.push(hp);
        }
        let primed = FuncBlockSeq::new(primed)
            .map_err(|_| Error::Internal("componentwise witnesses do not form a block sequence".into()))?;
        if c.color(&Element::FuncSeq(primed.clone()))? != color {
            return Err(Error::Internal("approximate witness sequence has the wrong color".into()));
        }
        for (a, b) in seq.funcs().iter().zip(primed.funcs()) {
            if a.sup_metric(b)? > 1 {
                return Err(Error::Internal("approximate witness sequence is metrically too far".into()));
            }
            if !crate::blocks::displacement_at_most_one(a, b, s)? {
                return Err(Error::Internal("approximate witness sequence displaced too far".into()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{BuiltinFamily, ColoringOracle};

    #[test]
    fn d1_delegates_to_positive() {
        let (n, k, m) = (4usize, 1u32, 2usize);
        let c: Arc<dyn Coloring> = Arc::new(
            ColoringOracle::builtin(Domain::PosBlockSeqs { n, k, d: 1 }, 2, BuiltinFamily::ParityOfSum)
                .unwrap(),
        );
        let rep = extract_multidim_positive(&Search::default(), n, k, 1, m, c).unwrap();
        let c1: Arc<dyn Coloring> = Arc::new(
            ColoringOracle::builtin(Domain::PosSphere { n, k }, 2, BuiltinFamily::ParityOfSum).unwrap(),
        );
        let direct = extract_positive(&Search::default(), n, k, m, c1).unwrap();
        assert_eq!(rep.is_witness(), direct.is_witness());
        if let (Some(a), Some(b)) = (rep.witness(), direct.witness()) {
            assert_eq!(a.funcs, b.funcs);
        }
    }

    #[test]
    fn constant_two_dimensional() {
        let (n, k, d, m) = (4usize, 1u32, 2usize, 2usize);
        let c: Arc<dyn Coloring> = Arc::new(
            ColoringOracle::builtin(Domain::PosBlockSeqs { n, k, d }, 2, BuiltinFamily::Constant).unwrap(),
        );
        let rep = extract_multidim_positive(&Search::default(), n, k, d, m, c).unwrap();
        let w = rep.witness().expect("constant coloring extracts");
        assert_eq!(w.funcs.as_ref().unwrap().len(), m);
    }

    #[test]
    fn two_dimensional_matches_direct_on_deterministic_family() {
        let (n, k, d, m) = (5usize, 1u32, 2usize, 2usize);
        for family in [BuiltinFamily::Constant, BuiltinFamily::ParityOfSum] {
            let c: Arc<dyn Coloring> = Arc::new(
                ColoringOracle::builtin(Domain::PosBlockSeqs { n, k, d }, 2, family).unwrap(),
            );
            let rep = extract_multidim_positive(&Search::default(), n, k, d, m, c.clone()).unwrap();
            if rep.is_witness() {
                let direct = direct_search_multidim_positive(&Search::default(), n, k, d, m, c).unwrap();
                assert!(direct.is_witness());
            }
        }
    }

    #[test]
    fn signed_d1_agrees_with_extract_signed() {
        let (n, k, m) = (4usize, 1u32, 2usize);
        let c: Arc<dyn Coloring> = Arc::new(
            ColoringOracle::builtin(Domain::SignedBlockSeqs { n, k, d: 1 }, 3, BuiltinFamily::ByType)
                .unwrap(),
        );
        let rep = extract_multidim_signed(&Search::default(), n, k, 1, m, c).unwrap();
        let c1: Arc<dyn Coloring> = Arc::new(
            ColoringOracle::builtin(Domain::SignedSphere { n, k }, 3, BuiltinFamily::ByType).unwrap(),
        );
        let direct = extract_signed(&Search::default(), n, k, m, c1).unwrap();
        assert_eq!(rep.is_witness(), direct.is_witness());
        if let (Some(a), Some(b)) = (rep.witness(), direct.witness()) {
            assert_eq!(a.funcs, b.funcs);
            assert_eq!(a.color, b.color);
        }
    }

    #[test]
    fn signed_two_dimensional_constant() {
        // the inner positive stage needs a carrier of length 3, so the
        // signed base must have 2kM = 6 singleton blocks
        let (n, k, d, m) = (6usize, 1u32, 2usize, 2usize);
        let c: Arc<dyn Coloring> = Arc::new(
            ColoringOracle::builtin(Domain::SignedBlockSeqs { n, k, d }, 2, BuiltinFamily::Constant)
                .unwrap(),
        );
        let rep = extract_multidim_signed(&Search::default(), n, k, d, m, c).unwrap();
        assert!(rep.is_witness());
    }
}
