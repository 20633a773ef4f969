//! Discretized sphere elements: integer-valued functions on `{0..n-1}`
//! together with the tetris operation, supports, the supremum metric and
//! disjoint sums.
//!
//! A [`FiniteFunction`] carries an alphabet bound `k` and a signedness flag.
//! Unsigned functions take values in `{0..k}`, signed ones in `{-k..k}`.
//! Membership in the sphere `X_k(n)` (respectively `X_{±k}(n)`) is the
//! derived predicate "attains magnitude `k`", not a separate type: the
//! constructions move elements freely between the sphere and the ball.

use std::cmp::Ordering;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A function `{0..n-1} -> {-k..k}` (signed) or `{0..n-1} -> {0..k}` (unsigned).
///
/// Equality, ordering and hashing look at the value vector only; `k` and
/// `signed` are context metadata. Two functions with identical values are the
/// same point of the discretized ball regardless of the bound they were
/// constructed under, and the canonical key used for serialization and memo
/// tables is just `"v0,v1,...,v(n-1)"`.
#[derive(Clone)]
pub struct FiniteFunction {
    values: Vec<i32>,
    k: u32,
    signed: bool,
}

impl PartialEq for FiniteFunction {
    fn eq(&self, other: &Self) -> bool {
        self.values == other.values
    }
}

impl Eq for FiniteFunction {}

impl PartialOrd for FiniteFunction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FiniteFunction {
    fn cmp(&self, other: &Self) -> Ordering {
        self.values.cmp(&other.values)
    }
}

impl std::hash::Hash for FiniteFunction {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.values.hash(state);
    }
}

impl fmt::Debug for FiniteFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "f{:?} (k={}, {})",
            self.values,
            self.k,
            if self.signed { "signed" } else { "unsigned" }
        )
    }
}

impl FiniteFunction {
    pub fn new(values: Vec<i32>, k: u32, signed: bool) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        if k == 0 {
            return Err(Error::ParameterMismatch("k must be positive".into()));
        }
        for &v in &values {
            let ok = if signed {
                v.unsigned_abs() <= k
            } else {
                v >= 0 && (v as u32) <= k
            };
            if !ok {
                return Err(Error::ValueOutOfRange { value: v, k, signed });
            }
        }
        Ok(FiniteFunction { values, k, signed })
    }

    pub fn zero(n: usize, k: u32, signed: bool) -> Self {
        FiniteFunction { values: vec![0; n], k, signed }
    }

    /// The scaled characteristic function `scale * χ_A` on `{0..n-1}`.
    pub fn indicator(set: &[usize], n: usize, scale: i32, k: u32, signed: bool) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::Empty);
        }
        let mut values = vec![0i32; n];
        for &i in set {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            values[i] = scale;
        }
        FiniteFunction::new(values, k, signed)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn signed(&self) -> bool {
        self.signed
    }

    pub fn values(&self) -> &[i32] {
        &self.values
    }

    pub fn value(&self, i: usize) -> i32 {
        self.values[i]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    pub fn max_magnitude(&self) -> u32 {
        self.values.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0)
    }

    /// Membership in the sphere: the function attains magnitude `k`.
    pub fn attains_bound(&self) -> bool {
        self.max_magnitude() == self.k
    }

    /// `f ∈ X_k(n)`: unsigned and attains `k`.
    pub fn in_positive_sphere(&self) -> bool {
        !self.signed && self.attains_bound()
    }

    /// `f ∈ X_{±k}(n)`: signed and attains magnitude `k`.
    pub fn in_signed_sphere(&self) -> bool {
        self.signed && self.attains_bound()
    }

    /// Re-contextualize under a different alphabet bound (checked).
    pub fn with_bound(&self, k: u32) -> Result<Self> {
        FiniteFunction::new(self.values.clone(), k, self.signed)
    }

    /// The same values viewed as a signed function.
    pub fn as_signed(&self) -> Self {
        FiniteFunction { values: self.values.clone(), k: self.k, signed: true }
    }

    /// Negation; the result is always signed.
    pub fn negate(&self) -> Self {
        FiniteFunction {
            values: self.values.iter().map(|v| -v).collect(),
            k: self.k,
            signed: true,
        }
    }

    /// The tetris operation: pointwise magnitude decrement toward zero.
    pub fn tetris(&self) -> Self {
        let values = self
            .values
            .iter()
            .map(|&v| match v.cmp(&0) {
                Ordering::Greater => v - 1,
                Ordering::Equal => 0,
                Ordering::Less => v + 1,
            })
            .collect();
        FiniteFunction { values, k: self.k, signed: self.signed }
    }

    /// `e`-fold composition of [`tetris`](Self::tetris); `e = 0` is the identity.
    pub fn tetris_pow(&self, e: u32) -> Self {
        let values = self
            .values
            .iter()
            .map(|&v| {
                let mag = v.unsigned_abs().saturating_sub(e);
                if v < 0 {
                    -(mag as i32)
                } else {
                    mag as i32
                }
            })
            .collect();
        FiniteFunction { values, k: self.k, signed: self.signed }
    }

    /// Indices with nonzero value, in increasing order.
    pub fn support(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn min_support(&self) -> Option<usize> {
        self.values.iter().position(|&v| v != 0)
    }

    pub fn max_support(&self) -> Option<usize> {
        self.values.iter().rposition(|&v| v != 0)
    }

    /// The supremum metric `ρ∞(f,g) = max_i |f(i)-g(i)|`.
    pub fn sup_metric(&self, other: &Self) -> Result<u32> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.abs_diff(*b))
            .max()
            .unwrap_or(0))
    }

    /// Pointwise sum of disjointly supported functions with matching parameters.
    pub fn add_disjoint(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch(self.len(), other.len()));
        }
        if self.k != other.k || self.signed != other.signed {
            return Err(Error::ParameterMismatch(format!(
                "(k={}, signed={}) vs (k={}, signed={})",
                self.k, self.signed, other.k, other.signed
            )));
        }
        let mut values = Vec::with_capacity(self.len());
        for (i, (&a, &b)) in self.values.iter().zip(&other.values).enumerate() {
            if a != 0 && b != 0 {
                return Err(Error::OverlappingSupports(i));
            }
            values.push(a + b);
        }
        Ok(FiniteFunction { values, k: self.k, signed: self.signed })
    }

    /// Canonical encoding `"v0,v1,...,v(n-1)"`; memoization and table keys.
    pub fn canonical_key(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 3);
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&v.to_string());
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct FuncRepr {
    n: usize,
    k: u32,
    signed: bool,
    values: Vec<i32>,
}

impl Serialize for FiniteFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        FuncRepr {
            n: self.len(),
            k: self.k,
            signed: self.signed,
            values: self.values.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FiniteFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = FuncRepr::deserialize(deserializer)?;
        if repr.values.len() != repr.n {
            return Err(D::Error::custom(format!(
                "declared n={} but {} values given",
                repr.n,
                repr.values.len()
            )));
        }
        FiniteFunction::new(repr.values, repr.k, repr.signed)
            .map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// All elements of the ball `X_[k](n)` / `X_[±k](n)` in value-lexicographic order.
pub fn enumerate_ball(n: usize, k: u32, signed: bool) -> Vec<FiniteFunction> {
    let lo = if signed { -(k as i32) } else { 0 };
    let hi = k as i32;
    let mut out = Vec::new();
    let mut cur = vec![lo; n];
    loop {
        out.push(FiniteFunction { values: cur.clone(), k, signed });
        // odometer
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < hi {
                cur[i] += 1;
                for v in cur.iter_mut().skip(i + 1) {
                    *v = lo;
                }
                break;
            }
        }
    }
}

/// All elements of the sphere `X_k(n)` / `X_{±k}(n)` in value-lexicographic order.
pub fn enumerate_sphere(n: usize, k: u32, signed: bool) -> Vec<FiniteFunction> {
    enumerate_ball(n, k, signed)
        .into_iter()
        .filter(|f| f.attains_bound())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(values: &[i32], k: u32, signed: bool) -> FiniteFunction {
        FiniteFunction::new(values.to_vec(), k, signed).unwrap()
    }

    #[test]
    fn tetris_examples() {
        assert_eq!(f(&[2, 0, 1], 2, false).tetris(), f(&[1, 0, 0], 2, false));
        assert_eq!(f(&[-2, 1, 0], 2, true).tetris(), f(&[-1, 0, 0], 2, true));
        let z = FiniteFunction::zero(4, 2, true);
        assert_eq!(z.tetris(), z);
    }

    #[test]
    fn tetris_pow_examples() {
        assert_eq!(f(&[2, 0, 1], 2, false).tetris_pow(2), f(&[0, 0, 0], 2, false));
        let g = f(&[1, -2, 1], 2, true);
        assert_eq!(g.tetris_pow(0), g);
        assert_eq!(f(&[1, 2, 1], 2, false).tetris_pow(1), f(&[0, 1, 0], 2, false));
    }

    #[test]
    fn tetris_pow_magnitude_formula_exhaustive() {
        // |T^e(f)(i)| = max(0, |f(i)| - e) with the sign kept while nonzero
        for signed in [false, true] {
            for n in 1..=5usize {
                for k in 1..=3u32 {
                    for g in enumerate_ball(n, k, signed) {
                        for e in 0..=k + 1 {
                            let t = g.tetris_pow(e);
                            for i in 0..n {
                                let expect_mag = g.value(i).unsigned_abs().saturating_sub(e);
                                assert_eq!(t.value(i).unsigned_abs(), expect_mag);
                                if expect_mag > 0 {
                                    assert_eq!(t.value(i).signum(), g.value(i).signum());
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tetris_pow_is_iterated_tetris() {
        for g in enumerate_ball(4, 3, true) {
            let mut it = g.clone();
            for e in 0..=4u32 {
                assert_eq!(g.tetris_pow(e), it);
                it = it.tetris();
            }
        }
    }

    #[test]
    fn support_examples() {
        assert_eq!(f(&[0, 2, 0, 1], 2, false).support(), vec![1, 3]);
        assert!(FiniteFunction::zero(3, 1, false).support().is_empty());
        assert_eq!(f(&[-1, 0, 1], 1, true).support(), vec![0, 2]);
        // support shrinks under tetris
        for g in enumerate_ball(4, 2, true) {
            let t = g.tetris();
            let sup: Vec<usize> = g.support();
            assert!(t.support().iter().all(|i| sup.contains(i)));
        }
    }

    #[test]
    fn sup_metric_examples() {
        let a = f(&[1, -1], 1, true);
        assert_eq!(a.sup_metric(&a).unwrap(), 0);
        assert_eq!(a.sup_metric(&f(&[0, 0], 1, true)).unwrap(), 1);
        assert_eq!(
            f(&[-1, 2, -1], 2, true).sup_metric(&f(&[0, 1, 0], 2, true)).unwrap(),
            1
        );
        assert!(a.sup_metric(&f(&[0], 1, true)).is_err());
    }

    #[test]
    fn sup_metric_axioms_exhaustive() {
        let all = enumerate_ball(3, 2, true);
        for a in &all {
            for b in &all {
                let d = a.sup_metric(b).unwrap();
                assert_eq!(d, b.sup_metric(a).unwrap());
                assert_eq!(d == 0, a == b);
                for c in &all {
                    assert!(a.sup_metric(c).unwrap() <= d + b.sup_metric(c).unwrap());
                }
            }
        }
    }

    #[test]
    fn add_disjoint_examples() {
        assert_eq!(
            f(&[2, 0, 0], 2, false).add_disjoint(&f(&[0, 0, 1], 2, false)).unwrap(),
            f(&[2, 0, 1], 2, false)
        );
        let g = f(&[1, 0], 1, false);
        assert_eq!(g.add_disjoint(&FiniteFunction::zero(2, 1, false)).unwrap(), g);
        assert_eq!(
            f(&[1, 0, 0, 0], 2, true).add_disjoint(&f(&[0, -2, 0, 1], 2, true)).unwrap(),
            f(&[1, -2, 0, 1], 2, true)
        );
        assert!(f(&[1, 0], 1, false).add_disjoint(&f(&[1, 0], 1, false)).is_err());
        assert!(f(&[1, 0], 1, false).add_disjoint(&f(&[0, 1], 2, false)).is_err());
    }

    #[test]
    fn tetris_commutes_with_add_disjoint() {
        for a in enumerate_ball(4, 2, true) {
            for b in enumerate_ball(4, 2, true) {
                if let Ok(sum) = a.add_disjoint(&b) {
                    assert_eq!(sum.tetris(), a.tetris().add_disjoint(&b.tetris()).unwrap());
                }
            }
        }
    }

    #[test]
    fn indicator_examples() {
        assert_eq!(FiniteFunction::indicator(&[1], 3, 2, 2, false).unwrap(), f(&[0, 2, 0], 2, false));
        assert_eq!(
            FiniteFunction::indicator(&[0, 2], 3, 1, 2, false).unwrap(),
            f(&[1, 0, 1], 2, false)
        );
        assert_eq!(FiniteFunction::indicator(&[0], 1, -1, 1, true).unwrap(), f(&[-1], 1, true));
        assert!(FiniteFunction::indicator(&[], 3, 1, 1, false).is_err());
        assert!(FiniteFunction::indicator(&[3], 3, 1, 1, false).is_err());
    }

    #[test]
    fn sphere_membership() {
        assert!(f(&[2, 1], 2, false).in_positive_sphere());
        assert!(!f(&[1, 1], 2, false).in_positive_sphere());
        assert!(f(&[-2, 0], 2, true).in_signed_sphere());
        assert!(!f(&[-1, 1], 2, true).in_signed_sphere());
        assert_eq!(enumerate_sphere(2, 2, false).len(), 9 - 4);
        assert_eq!(enumerate_sphere(2, 1, true).len(), 9 - 1);
    }

    #[test]
    fn serde_roundtrip() {
        let g = f(&[0, -2, 1], 2, true);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"n":3,"k":2,"signed":true,"values":[0,-2,1]}"#);
        let back: FiniteFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<FiniteFunction>(r#"{"n":2,"k":1,"signed":false,"values":[0,1,0]}"#).is_err());
    }

    #[test]
    fn canonical_key_format() {
        assert_eq!(f(&[0, -2, 1], 2, true).canonical_key(), "0,-2,1");
    }
}
