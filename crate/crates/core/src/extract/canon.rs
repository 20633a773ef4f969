//! Type canonicalization and insensitivity.
//!
//! `canonize` finds a set block sequence `s` over which the given coloring
//! depends only on the type: first through the Milliken–Taylor route (color
//! length-`m` block sequences by the vector of pattern colors, search at
//! target length `2m-1`, truncate to `m`), then, when the ambient `n` is too
//! short for that detour, by a direct scan of `Block^m(n)` against the
//! canonicity predicate. Either way the returned `s` is verified
//! exhaustively before it is returned.

use std::collections::HashMap;
use std::sync::Arc;

use crate::blocks::{block_func_seqs, FuncBlockSeq, SetBlockSeq, SpanMode};
use crate::error::{Error, Result};
use crate::extract::mt::mt_search;
use crate::extract::{ExtractionReport, Witness};
use crate::func::{enumerate_sphere, FiniteFunction};
use crate::oracle::{Color, ColorInterner, Coloring, DerivedColoring, Domain, Element};
use crate::search::Search;
use crate::types::{enumerate_types, map_onto, type_of, GType};

/// Which canonicalization variant to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CanonKind {
    /// Colorings of `X_k(n)`; patterns are types over `k`.
    Pos { k: u32 },
    /// Colorings of `X_{±k}(n)`; patterns are signed types.
    Signed { k: u32 },
    /// Colorings of `Block^d_{±k}(n)`; patterns are length-`d` sequences of
    /// signed types with total length at most `m`.
    SignedBlocks { k: u32, d: usize },
}

impl CanonKind {
    fn k(&self) -> u32 {
        match *self {
            CanonKind::Pos { k } | CanonKind::Signed { k } | CanonKind::SignedBlocks { k, .. } => k,
        }
    }

    fn expected_domain(&self, n: usize) -> Domain {
        match *self {
            CanonKind::Pos { k } => Domain::PosSphere { n, k },
            CanonKind::Signed { k } => Domain::SignedSphere { n, k },
            CanonKind::SignedBlocks { k, d } => Domain::SignedBlockSeqs { n, k, d },
        }
    }
}

/// A pattern together with its instantiation over a block sequence prefix.
enum Pattern {
    Type(GType),
    TypeSeq(Vec<GType>),
}

impl Pattern {
    fn total_len(&self) -> usize {
        match self {
            Pattern::Type(t) => t.len(),
            Pattern::TypeSeq(ts) => ts.iter().map(GType::len).sum(),
        }
    }

    /// `map(φ, t|d)` for single types; `bl(φ̄, t)` (componentwise map over
    /// consecutive chunks) for type sequences.
    fn instantiate(&self, t: &SetBlockSeq) -> Result<Element> {
        match self {
            Pattern::Type(phi) => {
                let prefix = t.prefix(phi.len())?;
                Ok(Element::Func(map_onto(&phi.as_function(), &prefix)?))
            }
            Pattern::TypeSeq(phis) => {
                let mut funcs = Vec::with_capacity(phis.len());
                let mut offset = 0usize;
                for phi in phis {
                    let chunk = SetBlockSeq::new(
                        t.sets()[offset..offset + phi.len()].to_vec(),
                        t.ambient(),
                    )?;
                    funcs.push(map_onto(&phi.as_function(), &chunk)?);
                    offset += phi.len();
                }
                Ok(Element::FuncSeq(FuncBlockSeq::new(funcs)?))
            }
        }
    }
}

fn patterns(kind: CanonKind, m: usize) -> Vec<Pattern> {
    match kind {
        CanonKind::Pos { k } => (1..=m)
            .flat_map(|d| enumerate_types(k, d, false))
            .map(Pattern::Type)
            .collect(),
        CanonKind::Signed { k } => (1..=m)
            .flat_map(|d| enumerate_types(k, d, true))
            .map(Pattern::Type)
            .collect(),
        CanonKind::SignedBlocks { k, d } => {
            let mut out = Vec::new();
            let mut acc: Vec<GType> = Vec::with_capacity(d);
            fn rec(k: u32, d: usize, budget: usize, acc: &mut Vec<GType>, out: &mut Vec<Pattern>) {
                if acc.len() == d {
                    out.push(Pattern::TypeSeq(acc.clone()));
                    return;
                }
                let remaining = d - acc.len();
                for len in 1..=budget.saturating_sub(remaining - 1) {
                    for phi in enumerate_types(k, len, true) {
                        acc.push(phi);
                        rec(k, d, budget - len, acc, out);
                        acc.pop();
                    }
                }
            }
            if m >= d {
                rec(k, d, m, &mut acc, &mut out);
            }
            out
        }
    }
}

/// Does `c` depend only on the type over `s`? Checked exhaustively on
/// `X_k(s)` / `X_{±k}(s)` / `Block^d_{±k}(s)`.
fn is_canonical(search: &Search, kind: CanonKind, s: &SetBlockSeq, c: &dyn Coloring) -> Result<bool> {
    let k = kind.k();
    let m = s.len();
    let mut by_type: HashMap<String, Color> = HashMap::new();
    match kind {
        CanonKind::Pos { .. } | CanonKind::Signed { .. } => {
            let signed = matches!(kind, CanonKind::Signed { .. });
            for g in enumerate_sphere(m, k, signed) {
                search.charge(1)?;
                let f = map_onto(&g, s)?;
                let col = c.color(&Element::Func(f))?;
                let key = type_of(&g)?.0.canonical_key();
                if let Some(&prev) = by_type.get(&key) {
                    if prev != col {
                        return Ok(false);
                    }
                } else {
                    by_type.insert(key, col);
                }
            }
        }
        CanonKind::SignedBlocks { d, .. } => {
            let pool = enumerate_sphere(m, k, true);
            for seq in block_func_seqs(&pool, d) {
                search.charge(1)?;
                let mapped: Vec<FiniteFunction> = seq
                    .funcs()
                    .iter()
                    .map(|g| map_onto(g, s))
                    .collect::<Result<_>>()?;
                let col = c.color(&Element::FuncSeq(FuncBlockSeq::new(mapped)?))?;
                let key = seq
                    .funcs()
                    .iter()
                    .map(|g| Ok(type_of(g)?.0.canonical_key()))
                    .collect::<Result<Vec<_>>>()?
                    .join("|");
                if let Some(&prev) = by_type.get(&key) {
                    if prev != col {
                        return Ok(false);
                    }
                } else {
                    by_type.insert(key, col);
                }
            }
        }
    }
    Ok(true)
}

/// Find `s ∈ Block^m(n)` over which `c` is type-canonical.
pub fn canonize(
    search: &Search,
    n: usize,
    m: usize,
    kind: CanonKind,
    c: Arc<dyn Coloring>,
) -> Result<ExtractionReport> {
    if m == 0 {
        return Err(Error::InvalidInput("target length must be positive".into()));
    }
    let expected = kind.expected_domain(n);
    if *c.domain() != expected {
        return Err(Error::DomainMismatch { expected: expected.to_string(), got: c.domain().to_string() });
    }
    let start = search.examined();
    let base = SetBlockSeq::singletons(n);

    // Milliken–Taylor route: color Block^m(n) by the vector of pattern colors,
    // search at length 2m-1, keep the first m entries of the witness.
    if 2 * m - 1 <= n {
        let pats = Arc::new(patterns(kind, m));
        let interner = Arc::new(ColorInterner::new());
        let c_inner = c.clone();
        let pats_inner = pats.clone();
        let interner_inner = interner.clone();
        let derived = DerivedColoring::new(
            Domain::SetBlockSeqs { s: base.clone(), d: m },
            c.num_colors().saturating_pow(pats.len().min(u32::MAX as usize) as u32),
            move |e| {
                let t = match e {
                    Element::SetSeq(t) => t,
                    _ => return Err(Error::InvalidInput("expected a set block sequence".into())),
                };
                let mut vec = Vec::with_capacity(pats_inner.len());
                for p in pats_inner.iter() {
                    debug_assert!(p.total_len() <= t.len());
                    vec.push(c_inner.color(&p.instantiate(t)?)?);
                }
                Ok(interner_inner.intern(vec))
            },
        );
        let rep = mt_search(search, &base, m, 2 * m - 1, &derived)?;
        if let Some(w) = rep.witness() {
            let s = w.sets.as_ref().unwrap().prefix(m)?;
            if !is_canonical(search, kind, &s, c.as_ref())? {
                return Err(Error::Internal(
                    "Milliken–Taylor canonicalization produced a non-canonical base".into(),
                ));
            }
            return Ok(ExtractionReport::found(
                Witness { sets: Some(s), funcs: None, color: None },
                search.examined() - start,
            ));
        }
    }

    // Direct route: scan Block^m(n) for the first base satisfying the
    // canonicity predicate outright.
    if m <= n {
        for s in base.block_subseqs(m)? {
            search.charge(1)?;
            if is_canonical(search, kind, &s, c.as_ref())? {
                return Ok(ExtractionReport::found(
                    Witness { sets: Some(s), funcs: None, color: None },
                    search.examined() - start,
                ));
            }
        }
    }
    Ok(ExtractionReport::absent(search.examined() - start))
}

/// Canonicalize a coloring of `X_k(n)` with respect to types.
pub fn canonize_types(
    search: &Search,
    n: usize,
    k: u32,
    m: usize,
    c: Arc<dyn Coloring>,
) -> Result<ExtractionReport> {
    canonize(search, n, m, CanonKind::Pos { k }, c)
}

/// The pyramid block sequence over a base of length `m(2k-1)`:
/// `f_i = Σ_q (k-|q|)·χ_{s_{j_i+q}}` with `j_i = i(2k-1)+k-1`. Every iterate
/// `T^ε(f_i)` takes the value 1 at both endpoints of its support.
pub fn pyramid_sequence(s: &SetBlockSeq, k: u32, m: usize) -> Result<FuncBlockSeq> {
    let width = 2 * k as usize - 1;
    if s.len() != m * width {
        return Err(Error::LengthMismatch(s.len(), m * width));
    }
    let n = s.ambient();
    let mut funcs = Vec::with_capacity(m);
    for i in 0..m {
        let center = i * width + k as usize - 1;
        let mut f = FiniteFunction::zero(n, k, false);
        for q in -(k as i32 - 1)..=(k as i32 - 1) {
            let height = k as i32 - q.abs();
            let block = s.set((center as i32 + q) as usize);
            f = f.add_disjoint(&FiniteFunction::indicator(block, n, height, k, false)?)?;
        }
        funcs.push(f);
    }
    FuncBlockSeq::new(funcs)
}

/// Is `c` insensitive over `F`: do `f` and `f + T^(k-1)(f')` share a color
/// for every disjointly supported pair in the positive span?
pub fn is_insensitive(search: &Search, c: &dyn Coloring, f: &FuncBlockSeq) -> Result<bool> {
    let k = f.k();
    let span = crate::blocks::span(f, SpanMode::PosStrict)?;
    for a in &span {
        let ca = c.color(&Element::Func(a.clone()))?;
        for b in &span {
            let shifted = b.tetris_pow(k - 1);
            let disjoint = a
                .support()
                .iter()
                .all(|&i| shifted.value(i) == 0 && b.value(i) == 0)
                && b.support().iter().all(|&i| a.value(i) == 0);
            if !disjoint {
                continue;
            }
            search.charge(1)?;
            let sum = a.add_disjoint(&shifted)?;
            if c.color(&Element::Func(sum))? != ca {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Produce a length-`m` block sequence over which `c` is insensitive:
/// canonicalize at length `m(2k-1)` and take pyramids. At `k = 1`
/// insensitivity is union-invariance, so the search degenerates to a direct
/// Milliken–Taylor run on the sets themselves.
pub fn make_insensitive(
    search: &Search,
    n: usize,
    k: u32,
    m: usize,
    c: Arc<dyn Coloring>,
) -> Result<ExtractionReport> {
    let expected = Domain::PosSphere { n, k };
    if *c.domain() != expected {
        return Err(Error::DomainMismatch { expected: expected.to_string(), got: c.domain().to_string() });
    }
    let start = search.examined();

    let s = if k == 1 {
        let base = SetBlockSeq::singletons(n);
        let c_inner = c.clone();
        let derived = DerivedColoring::new(
            Domain::SetBlockSeqs { s: base.clone(), d: 1 },
            c.num_colors(),
            move |e| {
                let t = match e {
                    Element::SetSeq(t) => t,
                    _ => return Err(Error::InvalidInput("expected a set block sequence".into())),
                };
                c_inner.color(&Element::Func(FiniteFunction::indicator(t.set(0), n, 1, 1, false)?))
            },
        );
        if m > n {
            return Ok(ExtractionReport::absent(search.examined() - start));
        }
        match mt_search(search, &base, 1, m, &derived)?.outcome {
            crate::extract::Outcome::Witness(w) => w.sets.unwrap(),
            crate::extract::Outcome::Absent => {
                return Ok(ExtractionReport::absent(search.examined() - start))
            }
        }
    } else {
        let target = m * (2 * k as usize - 1);
        if target > n {
            return Ok(ExtractionReport::absent(search.examined() - start));
        }
        match canonize(search, n, target, CanonKind::Pos { k }, c.clone())?.outcome {
            crate::extract::Outcome::Witness(w) => w.sets.unwrap(),
            crate::extract::Outcome::Absent => {
                return Ok(ExtractionReport::absent(search.examined() - start))
            }
        }
    };

    let funcs = if k == 1 {
        let fs: Result<Vec<FiniteFunction>> = s
            .sets()
            .iter()
            .map(|set| FiniteFunction::indicator(set, n, 1, 1, false))
            .collect();
        FuncBlockSeq::new(fs?)?
    } else {
        pyramid_sequence(&s, k, m)?
    };

    if !is_insensitive(search, c.as_ref(), &funcs)? {
        return Err(Error::Internal("canonical base yielded a sensitive pyramid sequence".into()));
    }
    Ok(ExtractionReport::found(
        Witness { sets: Some(s), funcs: Some(funcs), color: None },
        search.examined() - start,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{BuiltinFamily, ColoringOracle};

    fn arc_builtin(domain: Domain, r: u32, family: BuiltinFamily) -> Arc<dyn Coloring> {
        Arc::new(ColoringOracle::builtin(domain, r, family).unwrap())
    }

    #[test]
    fn pyramid_examples() {
        // k=2, m=1 over three singleton blocks
        let s = SetBlockSeq::singletons(3);
        let f = pyramid_sequence(&s, 2, 1).unwrap();
        assert_eq!(f.get(0).values(), &[1, 2, 1]);

        // k=1 degenerates to characteristic functions
        let s3 = SetBlockSeq::new(vec![vec![0], vec![2], vec![4]], 5).unwrap();
        let f = pyramid_sequence(&s3, 1, 3).unwrap();
        assert_eq!(f.get(0).support(), vec![0]);
        assert_eq!(f.get(1).support(), vec![2]);
        assert_eq!(f.get(2).support(), vec![4]);

        // k=2, m=2: pyramids centered at base indices 1 and 4, and the
        // endpoint property of every tetris iterate
        let s6 = SetBlockSeq::singletons(6);
        let f = pyramid_sequence(&s6, 2, 2).unwrap();
        assert_eq!(f.get(0).values(), &[1, 2, 1, 0, 0, 0]);
        assert_eq!(f.get(1).values(), &[0, 0, 0, 1, 2, 1]);
        for g in f.funcs() {
            assert!(g.attains_bound());
            for eps in 0..2 {
                let t = g.tetris_pow(eps);
                let lo = t.min_support().unwrap();
                let hi = t.max_support().unwrap();
                assert_eq!(t.value(lo), 1);
                assert_eq!(t.value(hi), 1);
            }
        }

        assert!(pyramid_sequence(&s3, 2, 2).is_err());
    }

    #[test]
    fn insensitivity_examples() {
        let dom = Domain::PosSphere { n: 2, k: 2 };
        let constant = arc_builtin(dom.clone(), 2, BuiltinFamily::Constant);
        let f = FuncBlockSeq::new(vec![
            FiniteFunction::indicator(&[0], 2, 2, 2, false).unwrap(),
            FiniteFunction::indicator(&[1], 2, 2, 2, false).unwrap(),
        ])
        .unwrap();
        let search = Search::default();
        assert!(is_insensitive(&search, constant.as_ref(), &f).unwrap());

        // c(g) = 1 if g(1)=0 else 2 is sensitive: f=[2,0], f'=[0,2] give
        // c([2,0]) = 1 but c([2,1]) = 2
        let sensitive = DerivedColoring::new(dom, 2, |e| match e {
            Element::Func(g) => Ok(if g.value(1) == 0 { 1 } else { 2 }),
            _ => Err(Error::InvalidInput("func expected".into())),
        });
        assert!(!is_insensitive(&search, &sensitive, &f).unwrap());

        // single entry: no disjoint pairs in the span, vacuously insensitive
        let single = FuncBlockSeq::new(vec![FiniteFunction::indicator(&[0], 2, 2, 2, false).unwrap()]).unwrap();
        assert!(is_insensitive(&search, &sensitive, &single).unwrap());
    }

    #[test]
    fn make_insensitive_constant_succeeds_at_minimal_capacity() {
        // constant coloring: n = m(2k-1) suffices
        let (k, m) = (2u32, 1usize);
        let n = m * (2 * k as usize - 1);
        let c = arc_builtin(Domain::PosSphere { n, k }, 2, BuiltinFamily::Constant);
        let rep = make_insensitive(&Search::default(), n, k, m, c).unwrap();
        let w = rep.witness().expect("constant coloring must succeed at capacity");
        assert_eq!(w.funcs.as_ref().unwrap().len(), m);
        assert_eq!(w.funcs.as_ref().unwrap().get(0).values(), &[1, 2, 1]);
    }

    #[test]
    fn make_insensitive_type_determined_coloring() {
        let (n, k, m) = (6usize, 2u32, 2usize);
        let c = arc_builtin(Domain::PosSphere { n, k }, 3, BuiltinFamily::ByType);
        let rep = make_insensitive(&Search::default(), n, k, m, c).unwrap();
        assert!(rep.is_witness());
    }

    #[test]
    fn make_insensitive_absent_matches_exhaustive_refutation() {
        // adversarial coloring at small n: color by the minimum of the
        // support, which splits every type class over every base
        let (n, k, m) = (4usize, 2u32, 1usize);
        let dom = Domain::PosSphere { n, k };
        let c: Arc<dyn Coloring> = Arc::new(DerivedColoring::new(dom, n as u64, |e| match e {
            Element::Func(g) => Ok(g.min_support().unwrap() as Color + 1),
            _ => Err(Error::InvalidInput("func expected".into())),
        }));
        let rep = make_insensitive(&Search::default(), n, k, m, c.clone()).unwrap();
        let target = m * (2 * k as usize - 1);
        // independent refutation: no canonical base of the target length
        let mut any = false;
        for s in SetBlockSeq::singletons(n).block_subseqs(target).unwrap() {
            if is_canonical(&Search::default(), CanonKind::Pos { k }, &s, c.as_ref()).unwrap() {
                any = true;
            }
        }
        assert_eq!(rep.is_witness(), any);
        assert!(!any, "scaled characteristic functions of one type get different colors");
    }

    #[test]
    fn canonize_k1_parity_of_min_support() {
        // k=1, n=4, m=2, c(f) = parity of min supp(f): compare against brute force
        let (n, k, m) = (4usize, 1u32, 2usize);
        let dom = Domain::PosSphere { n, k };
        let c: Arc<dyn Coloring> = Arc::new(DerivedColoring::new(dom, 2, |e| match e {
            Element::Func(g) => Ok((g.min_support().unwrap() % 2) as Color + 1),
            _ => Err(Error::InvalidInput("func expected".into())),
        }));
        let search = Search::default();
        let rep = canonize_types(&search, n, k, m, c.clone()).unwrap();
        // brute force: first s in Block^2(4) with all of X_1(s) monochromatic
        // (all elements of X_1(s) share the single type (1))
        let mut expect = None;
        for s in SetBlockSeq::singletons(n).block_subseqs(m).unwrap() {
            if is_canonical(&Search::default(), CanonKind::Pos { k }, &s, c.as_ref()).unwrap() {
                expect = Some(s);
                break;
            }
        }
        // min supp of every union drawn from s is min of its first block, so
        // a canonical s exists iff all NU(s) share min-support parity:
        // s = ({0},{2}) works and is not reachable by the 2m-1 route (n < 3)…
        // n=4 allows the MT route (2m-1=3 ≤ 4) as well; either way the
        // witness must satisfy the predicate and match determinism
        let w = rep.witness().expect("a canonical pair exists");
        assert!(is_canonical(&Search::default(), CanonKind::Pos { k }, w.sets.as_ref().unwrap(), c.as_ref()).unwrap());
        assert!(expect.is_some());
    }

    #[test]
    fn canonize_signed_by_type_is_immediate() {
        let (n, k, m) = (4usize, 1u32, 2usize);
        let c = arc_builtin(Domain::SignedSphere { n, k }, 3, BuiltinFamily::ByType);
        let rep = canonize(&Search::default(), n, m, CanonKind::Signed { k }, c).unwrap();
        let w = rep.witness().unwrap();
        // type-determined colorings accept the lexicographically first base
        assert_eq!(w.sets.as_ref().unwrap().sets(), &[vec![0], vec![1]]);
    }
}
