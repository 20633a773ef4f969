//! Coloring oracles: total deterministic maps from a finite domain to colors
//! `{1..r}`.
//!
//! The public [`ColoringOracle`] is serializable (a stored table or a named
//! built-in family). Derived colorings built during extraction implement the
//! same [`Coloring`] trait with a lazily filled memo table keyed by canonical
//! element encodings, so repeated evaluation has predictable cost.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::blocks::{block_func_seqs, FuncBlockSeq, SetBlockSeq};
use crate::error::{Error, Result};
use crate::func::{enumerate_sphere, FiniteFunction};
use crate::types::type_of;

pub type Color = u32;

/// The finite domain an oracle colors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domain {
    /// `X_k(n)`
    PosSphere { n: usize, k: u32 },
    /// `X_{±k}(n)`
    SignedSphere { n: usize, k: u32 },
    /// `Block^d_k(n)`: length-`d` block sequences in `X_k(n)`
    PosBlockSeqs { n: usize, k: u32, d: usize },
    /// `Block^d_{±k}(n)`
    SignedBlockSeqs { n: usize, k: u32, d: usize },
    /// `Block^d(s)`: length-`d` block subsequences of a set block sequence
    SetBlockSeqs { s: SetBlockSeq, d: usize },
}

impl std::fmt::Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Domain::PosSphere { n, k } => write!(f, "X_{k}({n})"),
            Domain::SignedSphere { n, k } => write!(f, "X_pm{k}({n})"),
            Domain::PosBlockSeqs { n, k, d } => write!(f, "Block^{d}_{k}({n})"),
            Domain::SignedBlockSeqs { n, k, d } => write!(f, "Block^{d}_pm{k}({n})"),
            Domain::SetBlockSeqs { s, d } => write!(f, "Block^{d}(|s|={})", s.len()),
        }
    }
}

impl Domain {
    /// Materialize the domain in canonical order. Intended for desk-scale
    /// parameters; the count is exponential in `n`.
    pub fn elements(&self) -> Result<Vec<Element>> {
        match self {
            Domain::PosSphere { n, k } => Ok(enumerate_sphere(*n, *k, false)
                .into_iter()
                .map(Element::Func)
                .collect()),
            Domain::SignedSphere { n, k } => Ok(enumerate_sphere(*n, *k, true)
                .into_iter()
                .map(Element::Func)
                .collect()),
            Domain::PosBlockSeqs { n, k, d } => {
                let pool = enumerate_sphere(*n, *k, false);
                Ok(block_func_seqs(&pool, *d).into_iter().map(Element::FuncSeq).collect())
            }
            Domain::SignedBlockSeqs { n, k, d } => {
                let pool = enumerate_sphere(*n, *k, true);
                Ok(block_func_seqs(&pool, *d).into_iter().map(Element::FuncSeq).collect())
            }
            Domain::SetBlockSeqs { s, d } => {
                Ok(s.block_subseqs(*d)?.into_iter().map(Element::SetSeq).collect())
            }
        }
    }
}

/// An element of some oracle domain.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Element {
    Func(FiniteFunction),
    FuncSeq(FuncBlockSeq),
    SetSeq(SetBlockSeq),
}

impl Element {
    /// Canonical key: values joined by `,`; sequence components joined by
    /// `|` (functions) or `;` (sets).
    pub fn canonical_key(&self) -> String {
        match self {
            Element::Func(f) => f.canonical_key(),
            Element::FuncSeq(fs) => fs.canonical_key(),
            Element::SetSeq(s) => s
                .sets()
                .iter()
                .map(|set| set.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
                .collect::<Vec<_>>()
                .join(";"),
        }
    }
}

/// A total deterministic coloring of a finite domain.
pub trait Coloring: Send + Sync {
    fn domain(&self) -> &Domain;
    fn num_colors(&self) -> u64;
    fn color(&self, e: &Element) -> Result<Color>;
}

/// Built-in oracle families addressable by string id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinFamily {
    /// Everything gets color 1.
    Constant,
    /// Color determined by the type (componentwise for sequences).
    ByType,
    /// Color 1 if the value at the minimum of the support is positive, else 2.
    ByMinSuppSign,
    /// `(Σ |values| mod r) + 1`; for set sequences, total size of the union.
    ParityOfSum,
}

impl BuiltinFamily {
    pub fn from_id(id: &str) -> Option<Self> {
        match id {
            "constant" => Some(BuiltinFamily::Constant),
            "by-type" => Some(BuiltinFamily::ByType),
            "by-min-supp-sign" => Some(BuiltinFamily::ByMinSuppSign),
            "parity-of-sum" => Some(BuiltinFamily::ParityOfSum),
            _ => None,
        }
    }
}

fn deterministic_hash(s: &str) -> u64 {
    // FNV-1a; stable across runs and platforms
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

fn builtin_color(family: BuiltinFamily, r: u32, e: &Element) -> Result<Color> {
    match family {
        BuiltinFamily::Constant => Ok(1),
        BuiltinFamily::ByType => {
            let key = match e {
                Element::Func(f) => type_of(f)?.0.canonical_key(),
                Element::FuncSeq(fs) => fs
                    .funcs()
                    .iter()
                    .map(|f| Ok(type_of(f)?.0.canonical_key()))
                    .collect::<Result<Vec<_>>>()?
                    .join("|"),
                Element::SetSeq(_) => {
                    return Err(Error::InvalidInput(
                        "by-type oracle is not defined on set block sequences".into(),
                    ))
                }
            };
            Ok((deterministic_hash(&key) % r as u64) as u32 + 1)
        }
        BuiltinFamily::ByMinSuppSign => {
            let f = match e {
                Element::Func(f) => f,
                Element::FuncSeq(fs) => fs.get(0),
                Element::SetSeq(_) => {
                    return Err(Error::InvalidInput(
                        "by-min-supp-sign oracle is not defined on set block sequences".into(),
                    ))
                }
            };
            let lo = f.min_support().ok_or(Error::ZeroFunction)?;
            Ok(if f.value(lo) > 0 { 1 } else { 2.min(r) })
        }
        BuiltinFamily::ParityOfSum => {
            let total: u64 = match e {
                Element::Func(f) => f.values().iter().map(|v| v.unsigned_abs() as u64).sum(),
                Element::FuncSeq(fs) => fs
                    .funcs()
                    .iter()
                    .flat_map(|f| f.values())
                    .map(|v| v.unsigned_abs() as u64)
                    .sum(),
                Element::SetSeq(s) => s.sets().iter().map(|set| set.len() as u64).sum(),
            };
            Ok((total % r as u64) as u32 + 1)
        }
    }
}

/// The serializable oracle: a stored table or a named family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColoringOracle {
    #[serde(with = "domain_serde")]
    pub domain: Domain,
    pub r: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub table: Option<HashMap<String, Color>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub builtin: Option<BuiltinFamily>,
}

impl ColoringOracle {
    pub fn table(domain: Domain, r: u32, table: HashMap<String, Color>) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidInput("r must be at least 1".into()));
        }
        for (key, &color) in &table {
            if color == 0 || color > r {
                return Err(Error::ColorOutOfRange(color, r as u64));
            }
            let _ = key;
        }
        Ok(ColoringOracle { domain, r, table: Some(table), builtin: None })
    }

    pub fn builtin(domain: Domain, r: u32, family: BuiltinFamily) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidInput("r must be at least 1".into()));
        }
        Ok(ColoringOracle { domain, r, table: None, builtin: Some(family) })
    }
}

impl Coloring for ColoringOracle {
    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn num_colors(&self) -> u64 {
        self.r as u64
    }

    fn color(&self, e: &Element) -> Result<Color> {
        if let Some(table) = &self.table {
            let key = e.canonical_key();
            return table
                .get(&key)
                .copied()
                .ok_or(Error::MissingTableEntry(key));
        }
        match self.builtin {
            Some(family) => builtin_color(family, self.r, e),
            None => Err(Error::InvalidInput("oracle has neither table nor builtin family".into())),
        }
    }
}

type EvalFn = dyn Fn(&Element) -> Result<Color> + Send + Sync;

/// A derived coloring: closure plus memo table. Used for the intermediate
/// colorings the extraction pipelines build (they are reused heavily).
pub struct DerivedColoring {
    domain: Domain,
    r: u64,
    eval: Box<EvalFn>,
    memo: Mutex<HashMap<String, Color>>,
}

impl DerivedColoring {
    pub fn new<F>(domain: Domain, r: u64, eval: F) -> Self
    where
        F: Fn(&Element) -> Result<Color> + Send + Sync + 'static,
    {
        DerivedColoring { domain, r, eval: Box::new(eval), memo: Mutex::new(HashMap::new()) }
    }
}

impl Coloring for DerivedColoring {
    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn num_colors(&self) -> u64 {
        self.r
    }

    fn color(&self, e: &Element) -> Result<Color> {
        let key = e.canonical_key();
        if let Some(&c) = self.memo.lock().unwrap().get(&key) {
            return Ok(c);
        }
        let c = (self.eval)(e)?;
        self.memo.lock().unwrap().insert(key, c);
        Ok(c)
    }
}

/// Interns arbitrary derived values (e.g. color vectors over pattern sets)
/// into dense colors, so Milliken–Taylor searches only ever compare colors.
pub struct ColorInterner {
    map: Mutex<HashMap<Vec<Color>, Color>>,
}

impl ColorInterner {
    pub fn new() -> Self {
        ColorInterner { map: Mutex::new(HashMap::new()) }
    }

    pub fn intern(&self, v: Vec<Color>) -> Color {
        let mut map = self.map.lock().unwrap();
        let next = map.len() as Color + 1;
        *map.entry(v).or_insert(next)
    }
}

impl Default for ColorInterner {
    fn default() -> Self {
        Self::new()
    }
}

mod domain_serde {
    use super::*;
    use serde::de::Error as _;

    #[derive(Serialize, Deserialize)]
    struct DomainRepr {
        kind: String,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        n: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        k: Option<u32>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        d: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        s: Option<Vec<Vec<usize>>>,
    }

    pub fn serialize<S: serde::Serializer>(domain: &Domain, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match domain {
            Domain::PosSphere { n, k } => DomainRepr { kind: "X".into(), n: Some(*n), k: Some(*k), d: None, s: None },
            Domain::SignedSphere { n, k } => DomainRepr { kind: "X_pm".into(), n: Some(*n), k: Some(*k), d: None, s: None },
            Domain::PosBlockSeqs { n, k, d } => DomainRepr { kind: "Block".into(), n: Some(*n), k: Some(*k), d: Some(*d), s: None },
            Domain::SignedBlockSeqs { n, k, d } => DomainRepr { kind: "Block_pm".into(), n: Some(*n), k: Some(*k), d: Some(*d), s: None },
            Domain::SetBlockSeqs { s, d } => DomainRepr {
                kind: "Block_sets".into(),
                n: Some(s.ambient()),
                k: None,
                d: Some(*d),
                s: Some(s.sets().to_vec()),
            },
        };
        repr.serialize(ser)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Domain, D::Error> {
        let repr = DomainRepr::deserialize(de)?;
        let need = |o: Option<usize>, what: &str| o.ok_or_else(|| D::Error::custom(format!("domain missing {what}")));
        let need_k = |o: Option<u32>| o.ok_or_else(|| D::Error::custom("domain missing k"));
        match repr.kind.as_str() {
            "X" => Ok(Domain::PosSphere { n: need(repr.n, "n")?, k: need_k(repr.k)? }),
            "X_pm" => Ok(Domain::SignedSphere { n: need(repr.n, "n")?, k: need_k(repr.k)? }),
            "Block" => Ok(Domain::PosBlockSeqs { n: need(repr.n, "n")?, k: need_k(repr.k)?, d: need(repr.d, "d")? }),
            "Block_pm" => Ok(Domain::SignedBlockSeqs { n: need(repr.n, "n")?, k: need_k(repr.k)?, d: need(repr.d, "d")? }),
            "Block_sets" => {
                let sets = repr.s.ok_or_else(|| D::Error::custom("domain missing s"))?;
                let n = need(repr.n, "n")?;
                let s = SetBlockSeq::new(sets, n).map_err(D::Error::custom)?;
                Ok(Domain::SetBlockSeqs { s, d: need(repr.d, "d")? })
            }
            other => Err(D::Error::custom(format!("unknown domain kind {other}"))),
        }
    }
}
