//! Block sequences of sets and of functions, their nonempty unions and
//! length-`d` block subsequences, span enumeration, and the `s`-relative
//! support machinery (displacement, skipped blocks).
//!
//! All enumerations are in a fixed lexicographic order so that every search
//! in the crate is deterministic. Nonempty unions are ordered by the bitmask
//! of the index subset producing them, and block subsequences by the tuple of
//! those masks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func::FiniteFunction;

/// A block sequence of nonempty finite subsets of `{0..ambient-1}`:
/// `max s_i < min s_{i+1}` for consecutive entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetBlockSeq {
    sets: Vec<Vec<usize>>,
    ambient: usize,
}

impl Serialize for SetBlockSeq {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.sets.serialize(s)
    }
}

impl SetBlockSeq {
    pub fn new(sets: Vec<Vec<usize>>, ambient: usize) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::Empty);
        }
        for (i, set) in sets.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::Empty);
            }
            if !set.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidInput(format!("set {i} is not sorted/deduplicated")));
            }
            if *set.last().unwrap() >= ambient {
                return Err(Error::IndexOutOfRange { index: *set.last().unwrap(), len: ambient });
            }
            if i + 1 < sets.len() && set.last().unwrap() >= &sets[i + 1][0] {
                return Err(Error::NotBlock(format!("sets {i} and {} overlap or interleave", i + 1)));
            }
        }
        Ok(SetBlockSeq { sets, ambient })
    }

    /// The sequence of singletons `({0}, {1}, ..., {n-1})`.
    pub fn singletons(n: usize) -> Self {
        SetBlockSeq { sets: (0..n).map(|i| vec![i]).collect(), ambient: n }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn set(&self, i: usize) -> &[usize] {
        &self.sets[i]
    }

    /// Initial segment of length `d`.
    pub fn prefix(&self, d: usize) -> Result<Self> {
        if d == 0 || d > self.len() {
            return Err(Error::IndexOutOfRange { index: d, len: self.len() });
        }
        Ok(SetBlockSeq { sets: self.sets[..d].to_vec(), ambient: self.ambient })
    }

    /// The union of the entries selected by a nonempty index mask.
    fn union_of_mask(&self, mask: u64) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, set) in self.sets.iter().enumerate() {
            if mask & (1 << i) != 0 {
                out.extend_from_slice(set);
            }
        }
        out
    }

    /// All `2^m - 1` nonempty unions, ordered by index-subset mask.
    pub fn nonempty_unions(&self) -> Vec<Vec<usize>> {
        let m = self.len();
        assert!(m < 64, "set block sequence too long for mask enumeration");
        (1..(1u64 << m)).map(|mask| self.union_of_mask(mask)).collect()
    }

    /// Every length-`d` block sequence with entries in `NU(self)`,
    /// lexicographically ordered by mask tuples.
    pub fn block_subseqs(&self, d: usize) -> Result<Vec<SetBlockSeq>> {
        if d == 0 || d > self.len() {
            return Err(Error::InvalidInput(format!(
                "block subsequence length {d} invalid for base of length {}",
                self.len()
            )));
        }
        let m = self.len();
        let mut out = Vec::new();
        let mut stack: Vec<u64> = Vec::with_capacity(d);
        // masks must be ordered: all bits of the next mask above all bits of
        // the previous one (that is exactly blockness of the unions)
        fn rec(s: &SetBlockSeq, m: usize, d: usize, lo_bit: u32, stack: &mut Vec<u64>, out: &mut Vec<SetBlockSeq>) {
            if stack.len() == d {
                let sets = stack.iter().map(|&mask| s.union_of_mask(mask)).collect();
                out.push(SetBlockSeq { sets, ambient: s.ambient });
                return;
            }
            let remaining = d - stack.len();
            for mask in 1..(1u64 << m) {
                if (mask & ((1u64 << lo_bit) - 1)) != 0 {
                    continue;
                }
                let hi = 63 - mask.leading_zeros();
                // need `remaining - 1` further base indices above hi
                if (hi as usize) + remaining > m {
                    continue;
                }
                stack.push(mask);
                rec(s, m, d, hi + 1, stack, out);
                stack.pop();
            }
        }
        rec(self, m, d, 0, &mut stack, &mut out);
        Ok(out)
    }

    pub fn from_json_sets(sets: Vec<Vec<usize>>, ambient: usize) -> Result<Self> {
        SetBlockSeq::new(sets, ambient)
    }
}

/// A block sequence of functions: nonempty supports, strictly separated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FuncBlockSeq {
    funcs: Vec<FiniteFunction>,
}

impl FuncBlockSeq {
    pub fn new(funcs: Vec<FiniteFunction>) -> Result<Self> {
        if funcs.is_empty() {
            return Err(Error::Empty);
        }
        let (n, k, signed) = (funcs[0].len(), funcs[0].k(), funcs[0].signed());
        for f in &funcs {
            if f.len() != n {
                return Err(Error::LengthMismatch(f.len(), n));
            }
            if f.k() != k || f.signed() != signed {
                return Err(Error::ParameterMismatch("mixed k or signedness in block sequence".into()));
            }
        }
        if !is_block(&funcs) {
            return Err(Error::NotBlock("supports are not strictly separated".into()));
        }
        Ok(FuncBlockSeq { funcs })
    }

    pub fn len(&self) -> usize {
        self.funcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.funcs.is_empty()
    }

    pub fn funcs(&self) -> &[FiniteFunction] {
        &self.funcs
    }

    pub fn get(&self, i: usize) -> &FiniteFunction {
        &self.funcs[i]
    }

    pub fn ambient(&self) -> usize {
        self.funcs[0].len()
    }

    pub fn k(&self) -> u32 {
        self.funcs[0].k()
    }

    pub fn canonical_key(&self) -> String {
        self.funcs
            .iter()
            .map(|f| f.canonical_key())
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// True iff every function has nonempty support and consecutive supports are
/// strictly separated (`max supp(f_i) < min supp(f_{i+1})`).
pub fn is_block(funcs: &[FiniteFunction]) -> bool {
    let mut prev_max: Option<usize> = None;
    for f in funcs {
        let (lo, hi) = match (f.min_support(), f.max_support()) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => return false,
        };
        if let Some(p) = prev_max {
            if lo <= p {
                return false;
            }
        }
        prev_max = Some(hi);
    }
    true
}

/// Which sums a span enumeration forms over a block sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpanMode {
    /// `⟨F⟩_k`: positive summands, `min ε_i = 0`.
    PosStrict,
    /// `⟨F⟩_[k]`: positive summands, arbitrary `ε_i ∈ {0..k-1}`.
    PosAll,
    /// `⟨F⟩_{±k}`: independently signed summands, `min ε_i = 0`.
    SignedStrict,
    /// `⟨F⟩_[±k]`: independently signed summands, arbitrary `ε_i`.
    SignedAll,
}

impl SpanMode {
    pub fn strict(self) -> bool {
        matches!(self, SpanMode::PosStrict | SpanMode::SignedStrict)
    }

    pub fn signed(self) -> bool {
        matches!(self, SpanMode::SignedStrict | SpanMode::SignedAll)
    }
}

/// All sums `Σ ± T^{ε_i}(f_{j_i})` over nonempty subsequences, deduplicated
/// and sorted by value. Strict modes require `min ε_i = 0` and every entry of
/// `f` to attain magnitude `k`.
pub fn span(f: &FuncBlockSeq, mode: SpanMode) -> Result<Vec<FiniteFunction>> {
    let mut out = std::collections::BTreeSet::new();
    for_each_span_element(f, mode, |g| {
        out.insert(g.clone());
        Ok(())
    })?;
    Ok(out.into_iter().collect())
}

/// Visit every span element (with repetitions from different sum shapes).
pub fn for_each_span_element<V>(f: &FuncBlockSeq, mode: SpanMode, mut visit: V) -> Result<()>
where
    V: FnMut(&FiniteFunction) -> Result<()>,
{
    let k = f.k();
    if mode.strict() {
        for g in f.funcs() {
            if !g.attains_bound() {
                return Err(Error::InvalidInput(
                    "strict span requires every entry to attain magnitude k".into(),
                ));
            }
        }
    }
    let signed_out = mode.signed() || f.funcs[0].signed();
    // depth-first over (index subset, ε-tuple, sign-tuple) in lexicographic order
    #[allow(clippy::too_many_arguments)]
    fn rec<V: FnMut(&FiniteFunction) -> Result<()>>(
        f: &FuncBlockSeq,
        mode: SpanMode,
        signed_out: bool,
        from: usize,
        acc: &FiniteFunction,
        used: usize,
        min_eps_zero: bool,
        visit: &mut V,
    ) -> Result<()> {
        if used > 0 && (!mode.strict() || min_eps_zero) {
            visit(acc)?;
        }
        for j in from..f.len() {
            for eps in 0..f.k() {
                let term = f.get(j).tetris_pow(eps);
                let signs: &[i32] = if mode.signed() { &[1, -1] } else { &[1] };
                for &sign in signs {
                    let t = if sign < 0 { term.negate() } else if signed_out { term.as_signed() } else { term.clone() };
                    let acc2 = acc.add_disjoint(&t)?;
                    rec(f, mode, signed_out, j + 1, &acc2, used + 1, min_eps_zero || eps == 0, visit)?;
                }
            }
        }
        Ok(())
    }
    let zero = FiniteFunction::zero(f.ambient(), k, signed_out);
    rec(f, mode, signed_out, 0, &zero, 0, false, &mut visit)
}

/// Membership test that decomposes `g` over `f` without materializing the span.
pub fn span_contains(f: &FuncBlockSeq, mode: SpanMode, g: &FiniteFunction) -> Result<bool> {
    if g.len() != f.ambient() {
        return Err(Error::LengthMismatch(g.len(), f.ambient()));
    }
    if mode.strict() {
        for h in f.funcs() {
            if !h.attains_bound() {
                return Err(Error::InvalidInput(
                    "strict span requires every entry to attain magnitude k".into(),
                ));
            }
        }
    }
    let k = f.k();
    // every position outside the union of supports must vanish
    let mut covered = vec![false; g.len()];
    for h in f.funcs() {
        for i in h.support() {
            covered[i] = true;
        }
    }
    for (i, &c) in covered.iter().enumerate() {
        if !c && g.value(i) != 0 {
            return Ok(false);
        }
    }
    let mut used = 0usize;
    let mut min_eps: Option<u32> = None;
    for h in f.funcs() {
        let sup = h.support();
        let all_zero = sup.iter().all(|&i| g.value(i) == 0);
        if all_zero {
            continue;
        }
        // must equal ± T^eps(h) on supp(h) for some eps
        let mut matched = false;
        'eps: for eps in 0..k {
            let t = h.tetris_pow(eps);
            for &sign in if mode.signed() { &[1i32, -1][..] } else { &[1i32][..] } {
                if sup.iter().all(|&i| g.value(i) == sign * t.value(i)) {
                    used += 1;
                    min_eps = Some(min_eps.map_or(eps, |m| m.min(eps)));
                    matched = true;
                    break 'eps;
                }
            }
        }
        if !matched {
            return Ok(false);
        }
    }
    if used == 0 {
        return Ok(false);
    }
    if mode.strict() && min_eps != Some(0) {
        return Ok(false);
    }
    Ok(true)
}

/// The coordinates of `f` over `s`: the unique `g` with `f = map(g, s)`,
/// returned as a function on `{0..len(s)-1}`. Errors if `f` is not constant
/// on every block or has support outside the union of the blocks.
pub fn represent_over(f: &FiniteFunction, s: &SetBlockSeq) -> Result<FiniteFunction> {
    if f.len() != s.ambient() {
        return Err(Error::LengthMismatch(f.len(), s.ambient()));
    }
    let mut covered = vec![false; f.len()];
    let mut coords = Vec::with_capacity(s.len());
    for set in s.sets() {
        let v = f.value(set[0]);
        for &i in set {
            covered[i] = true;
            if f.value(i) != v {
                return Err(Error::NotRepresentable(format!(
                    "value not constant on block containing index {i}"
                )));
            }
        }
        coords.push(v);
    }
    for (i, &c) in covered.iter().enumerate() {
        if !c && f.value(i) != 0 {
            return Err(Error::NotRepresentable(format!(
                "support at index {i} outside the block sequence"
            )));
        }
    }
    FiniteFunction::new(coords, f.k(), true)
}

/// `supp_s(f)`: the support of the unique coordinate function of `f` over `s`.
pub fn s_support(f: &FiniteFunction, s: &SetBlockSeq) -> Result<Vec<usize>> {
    Ok(represent_over(f, s)?.support())
}

fn s_bounds(f: &FiniteFunction, s: &SetBlockSeq) -> Result<(usize, usize)> {
    let sup = s_support(f, s)?;
    match (sup.first(), sup.last()) {
        (Some(&lo), Some(&hi)) => Ok((lo, hi)),
        _ => Err(Error::Empty),
    }
}

/// The ordered pair `(f, f')` is of `s`-displacement at most one:
/// `min supp_s(f) ≤ min supp_s(f') ≤ min supp_s(f) + 1` and likewise for max.
pub fn displacement_at_most_one(f: &FiniteFunction, f2: &FiniteFunction, s: &SetBlockSeq) -> Result<bool> {
    let (lo_a, hi_a) = s_bounds(f, s)?;
    let (lo_b, hi_b) = s_bounds(f2, s)?;
    Ok(lo_a <= lo_b && lo_b <= lo_a + 1 && hi_a <= hi_b && hi_b <= hi_a + 1)
}

/// Pairwise displacement for equal-length sequences.
pub fn displacement_at_most_one_seq(a: &FuncBlockSeq, b: &FuncBlockSeq, s: &SetBlockSeq) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    for (f, g) in a.funcs().iter().zip(b.funcs()) {
        if !displacement_at_most_one(f, g, s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `s`-skipped block: consecutive `s`-supports leave a gap of at least one
/// `s`-index (`max supp_s(f_i) + 2 ≤ min supp_s(f_{i+1})`).
pub fn is_s_skipped(f: &FuncBlockSeq, s: &SetBlockSeq) -> Result<bool> {
    let mut prev_hi: Option<usize> = None;
    for g in f.funcs() {
        let (lo, hi) = s_bounds(g, s)?;
        if let Some(p) = prev_hi {
            if lo < p + 2 {
                return Ok(false);
            }
        }
        prev_hi = Some(hi);
    }
    Ok(true)
}

/// All length-`m` block sequences of functions drawn from `pool`, in
/// lexicographic order of the concatenated value vectors. The pool must be
/// sorted; entries with empty support are skipped.
pub fn block_func_seqs(pool: &[FiniteFunction], m: usize) -> Vec<FuncBlockSeq> {
    let mut out = Vec::new();
    let mut acc: Vec<FiniteFunction> = Vec::with_capacity(m);
    fn rec(pool: &[FiniteFunction], m: usize, lo: usize, acc: &mut Vec<FiniteFunction>, out: &mut Vec<FuncBlockSeq>) {
        if acc.len() == m {
            out.push(FuncBlockSeq { funcs: acc.clone() });
            return;
        }
        for f in pool {
            match f.min_support() {
                Some(fmin) if fmin >= lo => {
                    let hi = f.max_support().unwrap();
                    acc.push(f.clone());
                    rec(pool, m, hi + 1, acc, out);
                    acc.pop();
                }
                _ => {}
            }
        }
    }
    rec(pool, m, 0, &mut acc, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::{enumerate_sphere, FiniteFunction};
    use crate::types::{enumerate_types, map_onto};

    fn sbs(sets: &[&[usize]], ambient: usize) -> SetBlockSeq {
        SetBlockSeq::new(sets.iter().map(|s| s.to_vec()).collect(), ambient).unwrap()
    }

    fn f(values: &[i32], k: u32, signed: bool) -> FiniteFunction {
        FiniteFunction::new(values.to_vec(), k, signed).unwrap()
    }

    #[test]
    fn nonempty_unions_examples() {
        let s = sbs(&[&[0], &[2]], 3);
        assert_eq!(s.nonempty_unions(), vec![vec![0], vec![2], vec![0, 2]]);
        let single = sbs(&[&[1, 3]], 4);
        assert_eq!(single.nonempty_unions(), vec![vec![1, 3]]);
        let three = sbs(&[&[0], &[1], &[2]], 3);
        assert_eq!(three.nonempty_unions().len(), 7);
        for m in 1..=6 {
            let s = SetBlockSeq::singletons(m);
            assert_eq!(s.nonempty_unions().len(), (1 << m) - 1);
        }
    }

    #[test]
    fn block_subseqs_examples() {
        let s = sbs(&[&[0], &[1]], 2);
        let d1 = s.block_subseqs(1).unwrap();
        assert_eq!(
            d1,
            vec![sbs(&[&[0]], 2), sbs(&[&[1]], 2), sbs(&[&[0, 1]], 2)]
        );
        let d2 = s.block_subseqs(2).unwrap();
        assert_eq!(d2, vec![sbs(&[&[0], &[1]], 2)]);
        // brute-force cross-check of the d=2 case over NU pairs
        let nu = s.nonempty_unions();
        let mut brute = Vec::new();
        for a in &nu {
            for b in &nu {
                if a.last().unwrap() < &b[0] {
                    brute.push((a.clone(), b.clone()));
                }
            }
        }
        assert_eq!(brute.len(), d2.len());
        // identity subsequence present at full length
        let s3 = sbs(&[&[0, 1], &[3], &[5, 6]], 7);
        assert!(s3.block_subseqs(3).unwrap().contains(&s3));
        assert!(s3.block_subseqs(4).is_err());
    }

    #[test]
    fn block_subseq_counts_match_closed_form() {
        // |Block^d(m)| = Σ_u C(m,u)·C(u-1,d-1): pick the used base indices,
        // then split them into d consecutive nonempty groups
        fn binom(n: usize, k: usize) -> usize {
            if k > n {
                return 0;
            }
            (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
        }
        for m in 1..=6usize {
            let s = SetBlockSeq::singletons(m);
            for d in 1..=m {
                let expect: usize = (d..=m).map(|u| binom(m, u) * binom(u - 1, d - 1)).sum();
                assert_eq!(s.block_subseqs(d).unwrap().len(), expect, "m={m}, d={d}");
            }
        }
    }

    #[test]
    fn is_block_examples() {
        assert!(is_block(&[f(&[2, 0, 0], 2, false), f(&[0, 0, 2], 2, false)]));
        assert!(!is_block(&[f(&[2, 0, 1], 2, false), f(&[0, 2, 0], 2, false)]));
        assert!(is_block(&[f(&[0, 2, 0], 2, false)]));
        assert!(!is_block(&[FiniteFunction::zero(3, 2, false)]));
    }

    fn two_char_seq() -> FuncBlockSeq {
        FuncBlockSeq::new(vec![f(&[2, 0], 2, false), f(&[0, 2], 2, false)]).unwrap()
    }

    #[test]
    fn span_pos_strict_example() {
        let sp = span(&two_char_seq(), SpanMode::PosStrict).unwrap();
        let expect: Vec<FiniteFunction> = [
            [2, 0], [0, 2], [2, 2], [2, 1], [1, 2],
        ]
        .iter()
        .map(|v| f(&v[..], 2, false))
        .collect();
        assert_eq!(sp.len(), 5);
        for e in &expect {
            assert!(sp.contains(e));
        }
    }

    #[test]
    fn span_pos_all_example() {
        let sp = span(&two_char_seq(), SpanMode::PosAll).unwrap();
        assert_eq!(sp.len(), 8);
        for v in [[1, 0], [0, 1], [1, 1]] {
            assert!(sp.contains(&f(&v[..], 2, false)));
        }
    }

    #[test]
    fn span_signed_strict_example() {
        let sp = span(&two_char_seq(), SpanMode::SignedStrict).unwrap();
        assert_eq!(sp.len(), 16);
        // brute-force recount: subsets x eps x signs
        let mut brute = std::collections::BTreeSet::new();
        let fs = two_char_seq();
        for mask in 1u32..4 {
            let idx: Vec<usize> = (0..2).filter(|i| mask & (1 << i) != 0).collect();
            let mut eps = vec![0u32; idx.len()];
            loop {
                if eps.contains(&0) {
                    let mut signs = vec![1i32; idx.len()];
                    loop {
                        let mut acc = FiniteFunction::zero(2, 2, true);
                        for (p, &j) in idx.iter().enumerate() {
                            let t = fs.get(j).tetris_pow(eps[p]).as_signed();
                            let t = if signs[p] < 0 { t.negate() } else { t };
                            acc = acc.add_disjoint(&t).unwrap();
                        }
                        brute.insert(acc);
                        let mut p = 0;
                        loop {
                            if p == signs.len() {
                                break;
                            }
                            if signs[p] == 1 {
                                signs[p] = -1;
                                break;
                            }
                            signs[p] = 1;
                            p += 1;
                        }
                        if p == signs.len() {
                            break;
                        }
                    }
                }
                let mut p = 0;
                loop {
                    if p == eps.len() {
                        break;
                    }
                    if eps[p] < 1 {
                        eps[p] += 1;
                        break;
                    }
                    eps[p] = 0;
                    p += 1;
                }
                if p == eps.len() {
                    break;
                }
            }
        }
        assert_eq!(brute.len(), 16);
        for e in &sp {
            assert!(brute.contains(e));
        }
    }

    #[test]
    fn span_inclusions_and_sphere_membership() {
        for n in 2..=4usize {
            for k in 1..=2u32 {
                let pool = enumerate_sphere(n, k, false);
                for fs in block_func_seqs(&pool, 2) {
                    let strict = span(&fs, SpanMode::PosStrict).unwrap();
                    let all = span(&fs, SpanMode::PosAll).unwrap();
                    let signed = span(&fs, SpanMode::SignedStrict).unwrap();
                    for e in &strict {
                        assert!(all.contains(e));
                        assert!(signed.contains(&e.as_signed()));
                        assert!(e.attains_bound(), "strict span stays in the sphere");
                        assert!(span_contains(&fs, SpanMode::PosStrict, e).unwrap());
                    }
                    for e in &all {
                        assert!(span_contains(&fs, SpanMode::PosAll, e).unwrap());
                        if !strict.contains(e) {
                            assert!(!span_contains(&fs, SpanMode::PosStrict, e).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sphere_of_block_seq_equals_mapped_types() {
        // X_k(s) = span of (k·χ_{s_i}) equals { map(φ, t) } over types φ and
        // block subsequences t of s of matching length
        for m in 1..=4usize {
            for k in 1..=2u32 {
                let s = SetBlockSeq::singletons(m);
                let carriers: Vec<FiniteFunction> = (0..m)
                    .map(|i| FiniteFunction::indicator(&[i], m, k as i32, k, false).unwrap())
                    .collect();
                let fs = FuncBlockSeq::new(carriers).unwrap();
                let lhs: std::collections::BTreeSet<_> =
                    span(&fs, SpanMode::PosStrict).unwrap().into_iter().collect();
                let mut rhs = std::collections::BTreeSet::new();
                for d in 1..=m {
                    for phi in enumerate_types(k, d, false) {
                        for t in s.block_subseqs(d).unwrap() {
                            let g = FiniteFunction::new(phi.word().to_vec(), k, false).unwrap();
                            rhs.insert(map_onto(&g, &t).unwrap());
                        }
                    }
                }
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn s_support_examples() {
        let s = sbs(&[&[0], &[1], &[2]], 3);
        let g = f(&[0, 2, 0], 2, true);
        assert_eq!(s_support(&g, &s).unwrap(), vec![1]);
        let h = f(&[1, 0, -1], 1, true);
        assert_eq!(s_support(&h, &s).unwrap(), vec![0, 2]);
        let split = sbs(&[&[0, 1]], 2);
        assert!(s_support(&f(&[2, 0], 2, false), &split).is_err());
    }

    #[test]
    fn displacement_examples() {
        let s = sbs(&[&[0], &[1], &[2], &[3]], 4);
        let a = f(&[1, 0, 0, 0], 1, true);
        assert!(displacement_at_most_one(&a, &a, &s).unwrap());
        let c = f(&[0, 0, 1, 0], 1, true);
        assert!(!displacement_at_most_one(&a, &c, &s).unwrap());
        let b = f(&[0, 1, 0, 0], 1, true);
        assert!(displacement_at_most_one(&a, &b, &s).unwrap());
        assert!(!displacement_at_most_one(&b, &a, &s).unwrap(), "displacement is one-sided");
    }

    #[test]
    fn displacement_seq_is_pairwise() {
        let s = sbs(&[&[0], &[1], &[2], &[3]], 4);
        let a = FuncBlockSeq::new(vec![f(&[1, 0, 0, 0], 1, true), f(&[0, 0, 1, 0], 1, true)]).unwrap();
        let b = FuncBlockSeq::new(vec![f(&[0, 1, 0, 0], 1, true), f(&[0, 0, 0, 1], 1, true)]).unwrap();
        assert!(displacement_at_most_one_seq(&a, &b, &s).unwrap());
        assert!(!displacement_at_most_one_seq(&b, &a, &s).unwrap());
        let short = FuncBlockSeq::new(vec![f(&[1, 0, 0, 0], 1, true)]).unwrap();
        assert!(displacement_at_most_one_seq(&a, &short, &s).is_err());
    }

    #[test]
    fn skipped_examples() {
        let s = sbs(&[&[0], &[1], &[2]], 3);
        let gap = FuncBlockSeq::new(vec![f(&[1, 0, 0], 1, true), f(&[0, 0, 1], 1, true)]).unwrap();
        assert!(is_s_skipped(&gap, &s).unwrap());
        let adjacent = FuncBlockSeq::new(vec![f(&[1, 0, 0], 1, true), f(&[0, 1, 0], 1, true)]).unwrap();
        assert!(!is_s_skipped(&adjacent, &s).unwrap());
        let single = FuncBlockSeq::new(vec![f(&[0, 1, 0], 1, true)]).unwrap();
        assert!(is_s_skipped(&single, &s).unwrap());
    }

    #[test]
    fn serde_set_block_seq() {
        let s = sbs(&[&[0, 1], &[3]], 4);
        assert_eq!(serde_json::to_string(&s).unwrap(), "[[0,1],[3]]");
    }
}
