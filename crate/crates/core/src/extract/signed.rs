//! The signed reduction: alternating pyramids `q(δ,ℓ,s)`, the skipped
//! carrier sequence, approximate witnesses (sign flips become index shifts),
//! and the extraction of approximately monochromatic signed spans.

use std::sync::Arc;

use crate::blocks::{
    displacement_at_most_one, is_s_skipped, span, FuncBlockSeq, SetBlockSeq, SpanMode,
};
use crate::error::{Error, Result};
use crate::extract::canon::{canonize, CanonKind};
use crate::extract::positive::{extract_positive, q_embed};
use crate::extract::{ExtractionReport, Outcome, Witness};
use crate::func::FiniteFunction;
use crate::oracle::{Coloring, DerivedColoring, Domain, Element};
use crate::search::Search;

/// The alternating pyramid `q(δ,ℓ,s) = Σ_j (-1)^j (δ-|j|) χ_{s_{ℓ+j}}`;
/// the constant zero function for `δ ≤ 0`.
pub fn q_delta(delta: i32, ell: usize, s: &SetBlockSeq) -> Result<FiniteFunction> {
    let n = s.ambient();
    if delta <= 0 {
        return Ok(FiniteFunction::zero(n, 1, true));
    }
    let radius = (delta - 1) as usize;
    if ell < radius || ell + radius >= s.len() {
        return Err(Error::IndexOutOfRange { index: ell, len: s.len() });
    }
    let mut f = FiniteFunction::zero(n, delta as u32, true);
    for j in -(delta - 1)..=(delta - 1) {
        let sign = if j.rem_euclid(2) == 0 { 1 } else { -1 };
        let height = sign * (delta - j.abs());
        let block = s.set((ell as i32 + j) as usize);
        f = f.add_disjoint(&FiniteFunction::indicator(block, n, height, delta as u32, true)?)?;
    }
    Ok(f)
}

/// The carrier `G = (q(k, 2ki+k-1, s))_i` over a base of length `2kM`;
/// an `s`-skipped block sequence whose entries attain magnitude `k`.
pub fn signed_carrier(s: &SetBlockSeq, k: u32, big_m: usize) -> Result<FuncBlockSeq> {
    if s.len() != 2 * k as usize * big_m {
        return Err(Error::LengthMismatch(s.len(), 2 * k as usize * big_m));
    }
    let funcs: Result<Vec<FiniteFunction>> = (0..big_m)
        .map(|i| q_delta(k as i32, 2 * k as usize * i + k as usize - 1, s))
        .collect();
    let g = FuncBlockSeq::new(funcs?)?;
    debug_assert!(is_s_skipped(&g, s)?);
    Ok(g)
}

fn carrier_center(k: u32, i: usize) -> usize {
    2 * k as usize * i + k as usize - 1
}

/// Read the pyramid `σ·q(δ, ℓ_i, s)` out of the carrier region `i` of a
/// coordinate vector. Returns `None` for an all-zero region,
/// `Some((δ, σ))` when the region matches exactly, and an error otherwise.
fn read_region(coords: &FiniteFunction, k: u32, i: usize) -> Result<Option<(u32, i32)>> {
    let center = carrier_center(k, i);
    let lo = 2 * k as usize * i;
    let hi = lo + 2 * k as usize - 2;
    let all_zero = (lo..=hi).all(|p| coords.value(p) == 0);
    if all_zero {
        return Ok(None);
    }
    let peak = coords.value(center);
    if peak == 0 {
        return Err(Error::Decomposition(format!("region {i} nonzero but has no peak")));
    }
    let delta = peak.unsigned_abs();
    let sigma = peak.signum();
    for p in lo..=hi {
        let off = p as i64 - center as i64;
        let expect = if off.unsigned_abs() < delta as u64 {
            let sign = if off.rem_euclid(2) == 0 { 1 } else { -1 };
            sigma * sign * (delta as i32 - off.unsigned_abs() as i32)
        } else {
            0
        };
        if coords.value(p) != expect {
            return Err(Error::Decomposition(format!(
                "region {i} does not match a pyramid of height {delta}"
            )));
        }
    }
    Ok(Some((delta, sigma)))
}

/// Per-entry decomposition of a block sequence in `⟨G⟩_k`: for each entry,
/// the carrier indices it uses and the tetris exponent applied there.
fn decompose_over_carrier(
    f: &FuncBlockSeq,
    s: &SetBlockSeq,
    k: u32,
    big_m: usize,
) -> Result<Vec<Vec<(usize, u32)>>> {
    let mut out = Vec::with_capacity(f.len());
    for (j, entry) in f.funcs().iter().enumerate() {
        let coords = crate::blocks::represent_over(entry, s)?;
        let mut used = Vec::new();
        for i in 0..big_m {
            match read_region(&coords, k, i)? {
                None => {}
                Some((delta, sigma)) => {
                    if sigma < 0 {
                        return Err(Error::Decomposition(format!(
                            "entry {j} has a negative pyramid; not in the positive span"
                        )));
                    }
                    if delta > k {
                        return Err(Error::Decomposition(format!(
                            "entry {j} exceeds height k in region {i}"
                        )));
                    }
                    used.push((i, k - delta));
                }
            }
        }
        if used.is_empty() || used.iter().map(|&(_, e)| e).min() != Some(0) {
            return Err(Error::Decomposition(format!(
                "entry {j} is not a strict span element of the carrier"
            )));
        }
        out.push(used);
    }
    Ok(out)
}

/// The constructive approximate witness of the signed reduction.
///
/// For `f` in the signed span of `F` (a block sequence in `⟨G⟩_k`, `G` the
/// carrier over `s`) this produces `f' ∈ X_{±k}(s)` and `f'' ∈ ⟨F⟩_k` with:
/// same type, `ρ∞(f,f') ≤ 1`, `(f,f')` of `s`-displacement at most one, and
/// `supp(f) = supp(f'')`. Negative summands are replaced by the pyramid
/// shifted one base index to the right; positive summands stay put.
pub fn approximate_witness(
    f: &FiniteFunction,
    big_f: &FuncBlockSeq,
    g: &FuncBlockSeq,
    s: &SetBlockSeq,
    k: u32,
) -> Result<(FiniteFunction, FiniteFunction)> {
    let big_m = g.len();
    if s.len() != 2 * k as usize * big_m {
        return Err(Error::LengthMismatch(s.len(), 2 * k as usize * big_m));
    }
    for (i, gi) in g.funcs().iter().enumerate() {
        if *gi != q_delta(k as i32, carrier_center(k, i), s)? {
            return Err(Error::InvalidInput(format!("carrier entry {i} is not q(k, 2ki+k-1, s)")));
        }
    }
    let entry_regions = decompose_over_carrier(big_f, s, k, big_m)?;

    // read f region by region; deduce, per F-entry, the outer exponent and sign
    let coords = crate::blocks::represent_over(f, s)?;
    let mut shifted_terms: Vec<FiniteFunction> = Vec::new();
    let mut straight_terms: Vec<FiniteFunction> = Vec::new();
    let mut outer_eps_min: Option<u32> = None;
    let mut reconstruction = FiniteFunction::zero(f.len(), k, true);
    let mut used_regions = vec![false; big_m];

    for (j, regions) in entry_regions.iter().enumerate() {
        let mut sign: Option<i32> = None;
        let mut outer: Option<u32> = None;
        for &(i, eps_i) in regions {
            used_regions[i] = true;
            match read_region(&coords, k, i)? {
                None => {}
                Some((delta, sigma)) => {
                    // delta = k - eps_i - outer
                    if k < delta + eps_i {
                        return Err(Error::Decomposition(format!(
                            "region {i} is taller than entry {j} allows"
                        )));
                    }
                    let this_outer = k - delta - eps_i;
                    match (sign, outer) {
                        (None, None) => {
                            sign = Some(sigma);
                            outer = Some(this_outer);
                        }
                        (Some(sg), Some(oe)) => {
                            if sg != sigma || oe != this_outer {
                                return Err(Error::Decomposition(format!(
                                    "inconsistent sign or exponent across regions of entry {j}"
                                )));
                            }
                        }
                        _ => unreachable!(),
                    }
                }
            }
        }
        let (sign, outer) = match (sign, outer) {
            (Some(sg), Some(oe)) => (sg, oe),
            // entry j unused by f
            _ => continue,
        };
        // erased regions must be consistent: height would be <= 0
        for &(i, eps_i) in regions {
            if read_region(&coords, k, i)?.is_none() && k > eps_i + outer {
                return Err(Error::Decomposition(format!(
                    "region {i} of entry {j} should be visible but is zero"
                )));
            }
        }
        outer_eps_min = Some(outer_eps_min.map_or(outer, |m| m.min(outer)));
        for &(i, eps_i) in regions {
            let height = k as i32 - eps_i as i32 - outer as i32;
            if height <= 0 {
                continue;
            }
            let center = carrier_center(k, i);
            let base = q_delta(height, center, s)?.with_bound(k)?;
            let signed_term = if sign < 0 { base.negate().with_bound(k)? } else { base.clone() };
            reconstruction = reconstruction.add_disjoint(&signed_term)?;
            straight_terms.push(base);
            let shift = if sign < 0 { 1 } else { 0 };
            shifted_terms.push(q_delta(height, center + shift, s)?.with_bound(k)?);
        }
    }

    if straight_terms.is_empty() {
        return Err(Error::Decomposition("f uses no entry of F".into()));
    }
    if outer_eps_min != Some(0) {
        return Err(Error::Decomposition("outer exponents never reach zero".into()));
    }
    // anything outside the used regions must vanish
    for (i, &used) in used_regions.iter().enumerate() {
        if !used && read_region(&coords, k, i)?.is_some() {
            return Err(Error::Decomposition(format!("region {i} is outside every entry of F")));
        }
    }
    if reconstruction != *f {
        return Err(Error::Decomposition("reconstruction mismatch".into()));
    }

    let mut f_prime = FiniteFunction::zero(f.len(), k, true);
    for t in &shifted_terms {
        f_prime = f_prime.add_disjoint(t)?;
    }
    let mut f_dprime = FiniteFunction::zero(f.len(), k, true);
    for t in &straight_terms {
        f_dprime = f_dprime.add_disjoint(t)?;
    }
    Ok((f_prime, f_dprime))
}

/// Extract `(s, F)` such that `F` is `s`-skipped and the signed span of `F`
/// is approximately monochromatic: every element is within `ρ∞` distance one
/// (and `s`-displacement one) of a fixed-color element of `X_{±k}(s)`.
pub fn extract_signed(
    search: &Search,
    n: usize,
    k: u32,
    m: usize,
    c: Arc<dyn Coloring>,
) -> Result<ExtractionReport> {
    let expected = Domain::SignedSphere { n, k };
    if *c.domain() != expected {
        return Err(Error::DomainMismatch { expected: expected.to_string(), got: c.domain().to_string() });
    }
    if m == 0 || m > n {
        return Err(Error::InvalidInput(format!("need 1 <= m <= n, got m={m}, n={n}")));
    }
    let start = search.examined();
    let cap = n / (2 * k as usize);
    for big_m in (m..=cap).rev() {
        let canon = canonize(search, n, 2 * k as usize * big_m, CanonKind::Signed { k }, c.clone())?;
        let s = match canon.outcome {
            Outcome::Witness(w) => w.sets.unwrap(),
            Outcome::Absent => continue,
        };
        let carrier = Arc::new(signed_carrier(&s, k, big_m)?);
        let c_inner = c.clone();
        let carrier_inner = carrier.clone();
        let induced: Arc<dyn Coloring> = Arc::new(DerivedColoring::new(
            Domain::PosSphere { n: big_m, k },
            c.num_colors(),
            move |e| match e {
                Element::Func(g) => c_inner.color(&Element::Func(q_embed(&carrier_inner, g)?)),
                _ => Err(Error::InvalidInput("expected a function".into())),
            },
        ));
        let inner = extract_positive(search, big_m, k, m, induced)?;
        if let Outcome::Witness(w) = inner.outcome {
            let hs = w.funcs.unwrap();
            let funcs: Result<Vec<FiniteFunction>> =
                hs.funcs().iter().map(|h| q_embed(&carrier, h)).collect();
            let funcs = FuncBlockSeq::new(funcs?)?;
            let color = w.color.unwrap();
            verify_signed_witness(search, c.as_ref(), &s, &carrier, &funcs, k, color)?;
            return Ok(ExtractionReport::found(
                Witness { sets: Some(s), funcs: Some(funcs), color: Some(color) },
                search.examined() - start,
            ));
        }
    }
    Ok(ExtractionReport::absent(search.examined() - start))
}

/// Constructive verification of the approximate-monochromaticity clause:
/// the witness sequence must be `s`-skipped and every signed span element
/// must have its approximate witness colored `i₀` within the stated metric
/// and displacement slack.
fn verify_signed_witness(
    search: &Search,
    c: &dyn Coloring,
    s: &SetBlockSeq,
    carrier: &FuncBlockSeq,
    funcs: &FuncBlockSeq,
    k: u32,
    color: u32,
) -> Result<()> {
    if !is_s_skipped(funcs, s)? {
        return Err(Error::Internal("signed witness is not s-skipped".into()));
    }
    for f in span(funcs, SpanMode::SignedStrict)? {
        search.charge(1)?;
        let (fp, _fpp) = approximate_witness(&f, funcs, carrier, s, k)?;
        if c.color(&Element::Func(fp.clone()))? != color {
            return Err(Error::Internal("approximate witness has the wrong color".into()));
        }
        if f.sup_metric(&fp)? > 1 {
            return Err(Error::Internal("approximate witness is metrically too far".into()));
        }
        if !displacement_at_most_one(&f, &fp, s)? {
            return Err(Error::Internal("approximate witness is displaced too far".into()));
        }
    }
    Ok(())
}
