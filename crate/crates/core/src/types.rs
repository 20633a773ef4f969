//! The type / block-support decomposition: every nonzero function factors
//! uniquely as `map(tp(f), bsupp(f))` where the type is an adjacent-distinct,
//! zero-free value word and the block support is a set block sequence.
//!
//! Grouping is by maximal runs of equal value *in support order*: equal
//! values at non-adjacent indices merge into one block when no other value
//! intervenes among the support positions. That is the only grouping that
//! makes the decomposition unique.

use serde::{Deserialize, Serialize};

use crate::blocks::SetBlockSeq;
use crate::error::{Error, Result};
use crate::func::FiniteFunction;

/// A type: a nonempty word with no zeros and no equal adjacent entries,
/// attaining magnitude `k`. Equality, ordering and hashing use the word only.
#[derive(Clone, Debug)]
pub struct GType {
    word: Vec<i32>,
    k: u32,
    signed: bool,
}

impl PartialEq for GType {
    fn eq(&self, other: &Self) -> bool {
        self.word == other.word
    }
}

impl Eq for GType {}

impl PartialOrd for GType {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GType {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.word.cmp(&other.word)
    }
}

impl std::hash::Hash for GType {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.word.hash(state);
    }
}

impl GType {
    pub fn new(word: Vec<i32>, k: u32, signed: bool) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::Empty);
        }
        if k == 0 {
            return Err(Error::ParameterMismatch("k must be positive".into()));
        }
        let mut attains = false;
        for (i, &v) in word.iter().enumerate() {
            if v == 0 {
                return Err(Error::InvalidInput("type word must have full support".into()));
            }
            let ok = if signed { v.unsigned_abs() <= k } else { v > 0 && (v as u32) <= k };
            if !ok {
                return Err(Error::ValueOutOfRange { value: v, k, signed });
            }
            if v.unsigned_abs() == k {
                attains = true;
            }
            if i + 1 < word.len() && word[i + 1] == v {
                return Err(Error::InvalidInput("adjacent entries of a type must differ".into()));
            }
        }
        if !attains {
            return Err(Error::InvalidInput(format!("type word must attain magnitude k={k}")));
        }
        Ok(GType { word, k, signed })
    }

    /// Length of the type, `|φ|`.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn word(&self) -> &[i32] {
        &self.word
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn signed(&self) -> bool {
        self.signed
    }

    pub fn as_function(&self) -> FiniteFunction {
        FiniteFunction::new(self.word.clone(), self.k, self.signed).expect("valid type word")
    }

    pub fn canonical_key(&self) -> String {
        self.word
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Serialize, Deserialize)]
struct GTypeRepr {
    word: Vec<i32>,
    k: u32,
    signed: bool,
}

impl Serialize for GType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GTypeRepr { word: self.word.clone(), k: self.k, signed: self.signed }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GTypeRepr::deserialize(d)?;
        GType::new(repr.word, repr.k, repr.signed).map_err(serde::de::Error::custom)
    }
}

/// `map(g, s) = Σ g(i)·χ_{s_i}`: spread each coordinate constantly over the
/// corresponding block. The output lives on `{0..ambient(s)-1}`.
pub fn map_onto(g: &FiniteFunction, s: &SetBlockSeq) -> Result<FiniteFunction> {
    if g.len() != s.len() {
        return Err(Error::LengthMismatch(g.len(), s.len()));
    }
    let mut values = vec![0i32; s.ambient()];
    for (i, set) in s.sets().iter().enumerate() {
        for &j in set {
            values[j] = g.value(i);
        }
    }
    FiniteFunction::new(values, g.k(), g.signed())
}

/// The unique decomposition `f = map(tp(f), bsupp(f))`.
///
/// The returned type's bound is the magnitude `f` actually attains, so the
/// decomposition is defined for every nonzero element of the ball.
pub fn type_of(f: &FiniteFunction) -> Result<(GType, SetBlockSeq)> {
    let support = f.support();
    if support.is_empty() {
        return Err(Error::ZeroFunction);
    }
    let mut word: Vec<i32> = Vec::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for &i in &support {
        let v = f.value(i);
        if word.last() == Some(&v) {
            blocks.last_mut().unwrap().push(i);
        } else {
            word.push(v);
            blocks.push(vec![i]);
        }
    }
    let attained = f.max_magnitude();
    let tp = GType::new(word, attained, f.signed())?;
    let bsupp = SetBlockSeq::new(blocks, f.len())?;
    Ok((tp, bsupp))
}

/// Componentwise types of a block sequence.
pub fn type_of_seq(funcs: &[FiniteFunction]) -> Result<Vec<GType>> {
    funcs.iter().map(|f| Ok(type_of(f)?.0)).collect()
}

/// All types of exactly length `d` over `k`, in lexicographic word order.
pub fn enumerate_types(k: u32, d: usize, signed: bool) -> Vec<GType> {
    let mut alphabet: Vec<i32> = if signed {
        (-(k as i32)..=k as i32).filter(|&v| v != 0).collect()
    } else {
        (1..=k as i32).collect()
    };
    alphabet.sort_unstable();
    let mut out = Vec::new();
    let mut word: Vec<i32> = Vec::with_capacity(d);
    fn rec(alphabet: &[i32], k: u32, d: usize, signed: bool, word: &mut Vec<i32>, out: &mut Vec<GType>) {
        if word.len() == d {
            if word.iter().any(|v| v.unsigned_abs() == k) {
                out.push(GType { word: word.clone(), k, signed });
            }
            return;
        }
        for &v in alphabet {
            if word.last() == Some(&v) {
                continue;
            }
            word.push(v);
            rec(alphabet, k, d, signed, word, out);
            word.pop();
        }
    }
    rec(&alphabet, k, d, signed, &mut word, &mut out);
    out
}

/// The stated count bounds: `d(k-1)^{d-1}` unsigned, `2d(2k-1)^{d-1}` signed
/// (with `0^0 = 1`).
pub fn type_count_bound(k: u32, d: usize, signed: bool) -> u128 {
    let base: u128 = if signed { (2 * k - 1) as u128 } else { (k - 1) as u128 };
    let pw = if d == 1 { 1 } else { base.pow((d - 1) as u32) };
    let lead = if signed { 2 * d as u128 } else { d as u128 };
    lead * pw
}
