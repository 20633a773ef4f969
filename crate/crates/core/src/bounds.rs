//! Big-integer evaluation of the upper-bound recursions: the Grzegorczyk
//! growth functions, the pattern-count sums `alpha`/`beta`/`gamma`, and the
//! threshold recursions for the positive, signed and multidimensional
//! extraction theorems.
//!
//! The Milliken–Taylor numbers have no closed formula, so every bound is
//! parameterized by an [`MtStrategy`]: exact tiny computation through the
//! verifier, a user-supplied table, or an uninterpreted symbolic leaf.
//! Arithmetic that would exceed the digit guard degrades to a symbolic
//! expression instead of a number.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::Search;
use crate::verifier::{exact_number, ExactQuery, QueryKind};

pub type BigNat = BigUint;

/// Abort threshold for exact arithmetic, in decimal digits.
#[derive(Clone, Copy, Debug)]
pub struct DigitGuard {
    pub max_digits: usize,
}

impl Default for DigitGuard {
    fn default() -> Self {
        DigitGuard { max_digits: 1_000_000 }
    }
}

impl DigitGuard {
    fn max_bits(&self) -> u64 {
        // log2(10) ≈ 3.3219
        (self.max_digits as u64).saturating_mul(33220) / 10000
    }

    fn admit(&self, v: &BigNat) -> Result<()> {
        if v.bits() > self.max_bits() {
            Err(Error::TooLarge(self.max_digits))
        } else {
            Ok(())
        }
    }
}

/// Expression trees over the uninterpreted Milliken–Taylor function. The
/// `alpha`/`beta`/`gamma` nodes carry the pattern-count sums whose upper
/// limits may themselves be symbolic; the `h` node carries the stabilization
/// recursion (its iteration count may be symbolic too).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Lit(BigNat),
    Mt(Box<Expr>, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Alpha(Box<Expr>, Box<Expr>),
    Beta(Box<Expr>, Box<Expr>),
    Gamma(Box<Expr>, Box<Expr>, Box<Expr>),
    /// `h(d, ell, r, k, x)`
    H(Box<Expr>, Box<Expr>, Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn lit<T: Into<BigNat>>(v: T) -> Expr {
        Expr::Lit(v.into())
    }

    fn op_name(&self) -> &'static str {
        match self {
            Expr::Lit(_) => "lit",
            Expr::Mt(..) => "MT",
            Expr::Pow(..) => "pow",
            Expr::Mul(..) => "mul",
            Expr::Add(..) => "add",
            Expr::Sub(..) => "sub",
            Expr::Alpha(..) => "alpha",
            Expr::Beta(..) => "beta",
            Expr::Gamma(..) => "gamma",
            Expr::H(..) => "h",
        }
    }

    fn args(&self) -> Vec<&Expr> {
        match self {
            Expr::Lit(_) => vec![],
            Expr::Mt(a, b, c) | Expr::Gamma(a, b, c) => vec![a, b, c],
            Expr::Pow(a, b) | Expr::Mul(a, b) | Expr::Add(a, b) | Expr::Sub(a, b)
            | Expr::Alpha(a, b) | Expr::Beta(a, b) => vec![a, b],
            Expr::H(a, b, c, d, e) => vec![a, b, c, d, e],
        }
    }

    /// Evaluate with a concrete Milliken–Taylor interpretation.
    pub fn eval_with<F>(&self, mt: &F, guard: DigitGuard) -> Result<BigNat>
    where
        F: Fn(&BigNat, &BigNat, &BigNat) -> Result<BigNat>,
    {
        let v = match self {
            Expr::Lit(v) => v.clone(),
            Expr::Mt(d, m, r) => mt(
                &d.eval_with(mt, guard)?,
                &m.eval_with(mt, guard)?,
                &r.eval_with(mt, guard)?,
            )?,
            Expr::Pow(a, b) => {
                let base = a.eval_with(mt, guard)?;
                let exp = b.eval_with(mt, guard)?;
                checked_pow(&base, &exp, guard)?
            }
            Expr::Mul(a, b) => a.eval_with(mt, guard)? * b.eval_with(mt, guard)?,
            Expr::Add(a, b) => a.eval_with(mt, guard)? + b.eval_with(mt, guard)?,
            Expr::Sub(a, b) => {
                let x = a.eval_with(mt, guard)?;
                let y = b.eval_with(mt, guard)?;
                if y > x {
                    return Err(Error::InvalidInput("negative intermediate value".into()));
                }
                x - y
            }
            Expr::Alpha(k, m) => {
                alpha_num(expect_u64(&k.eval_with(mt, guard)?)? as u32, &m.eval_with(mt, guard)?, guard)?
            }
            Expr::Beta(k, m) => {
                beta_num(expect_u64(&k.eval_with(mt, guard)?)? as u32, &m.eval_with(mt, guard)?, guard)?
            }
            Expr::Gamma(k, d, m) => gamma_num(
                expect_u64(&k.eval_with(mt, guard)?)? as u32,
                expect_u64(&d.eval_with(mt, guard)?)?,
                &m.eval_with(mt, guard)?,
                guard,
            )?,
            Expr::H(d, ell, r, k, x) => {
                let d = d.eval_with(mt, guard)?;
                let ell = ell.eval_with(mt, guard)?;
                let r = r.eval_with(mt, guard)?;
                let k = expect_u64(&k.eval_with(mt, guard)?)? as u32;
                let x = expect_u64(&x.eval_with(mt, guard)?)?;
                let colors = {
                    let de = expect_u64(&d)?;
                    let le = expect_u64(&ell)?;
                    let exp = checked_pow(&BigNat::from(k + 1), &BigNat::from(de.saturating_mul(le)), guard)?;
                    checked_pow(&r, &exp, guard)?
                };
                let mut acc = BigNat::zero();
                for _ in 0..x {
                    let m = &acc + 1u32;
                    let g = eval_bound_g(k, &m, &colors, mt, guard)?;
                    acc = g;
                }
                acc
            }
        };
        guard.admit(&v)?;
        Ok(v)
    }

    /// A certified lower bound using only `MT(d,m,r) ≥ max(m,1)`.
    pub fn lower_bound(&self) -> BigNat {
        match self {
            Expr::Lit(v) => v.clone(),
            Expr::Mt(_, m, _) => std::cmp::max(m.lower_bound(), BigNat::one()),
            Expr::Pow(a, b) => {
                let (la, lb) = (a.lower_bound(), b.lower_bound());
                if lb.is_zero() {
                    // the exponent may genuinely be zero; anything^0 = 1
                    BigNat::one().min(la.max(BigNat::one()))
                } else if la >= BigNat::one() {
                    la
                } else {
                    BigNat::zero()
                }
            }
            Expr::Mul(a, b) => a.lower_bound() * b.lower_bound(),
            Expr::Add(a, b) => a.lower_bound() + b.lower_bound(),
            Expr::Sub(a, b) => match b.as_ref() {
                Expr::Lit(v) => {
                    let la = a.lower_bound();
                    if *v > la {
                        BigNat::zero()
                    } else {
                        la - v
                    }
                }
                _ => BigNat::zero(),
            },
            Expr::Alpha(..) => BigNat::one(),
            Expr::Beta(..) => BigNat::from(2u32),
            Expr::Gamma(..) => BigNat::one(),
            Expr::H(..) => BigNat::zero(),
        }
    }
}

fn eval_bound_g<F>(k: u32, m: &BigNat, r: &BigNat, mt: &F, guard: DigitGuard) -> Result<BigNat>
where
    F: Fn(&BigNat, &BigNat, &BigNat) -> Result<BigNat>,
{
    if k <= 1 {
        return mt(&BigNat::one(), m, r);
    }
    let inner = eval_bound_g(k - 1, m, r, mt, guard)?;
    let p = inner * (2u32 * k - 1);
    let a = alpha_num(k, &p, guard)?;
    let ra = checked_pow(r, &a, guard)?;
    mt(&p, &(&p * 2u32 - 1u32), &ra)
}

impl Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(2))?;
        map.serialize_entry("op", self.op_name())?;
        match self {
            Expr::Lit(v) => map.serialize_entry("args", &[v.to_string()])?,
            other => map.serialize_entry("args", &other.args())?,
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            op: String,
            args: Vec<serde_json::Value>,
        }
        let repr = Repr::deserialize(d)?;
        let parse_args = |n: usize| -> std::result::Result<Vec<Expr>, D::Error> {
            if repr.args.len() != n {
                return Err(D::Error::custom(format!(
                    "op {} expects {} args, got {}",
                    repr.op,
                    n,
                    repr.args.len()
                )));
            }
            repr.args
                .iter()
                .map(|v| serde_json::from_value::<Expr>(v.clone()).map_err(D::Error::custom))
                .collect()
        };
        let boxed = |mut v: Vec<Expr>| -> (Box<Expr>, Box<Expr>) {
            let b = v.pop().unwrap();
            let a = v.pop().unwrap();
            (Box::new(a), Box::new(b))
        };
        match repr.op.as_str() {
            "lit" => {
                if repr.args.len() != 1 {
                    return Err(D::Error::custom("lit expects one argument"));
                }
                let s = repr.args[0]
                    .as_str()
                    .ok_or_else(|| D::Error::custom("lit argument must be a decimal string"))?;
                let v = s
                    .parse::<BigUint>()
                    .map_err(|e| D::Error::custom(format!("bad literal: {e}")))?;
                Ok(Expr::Lit(v))
            }
            "MT" => {
                let mut v = parse_args(3)?;
                let c = Box::new(v.pop().unwrap());
                let (a, b) = boxed(v);
                Ok(Expr::Mt(a, b, c))
            }
            "gamma" => {
                let mut v = parse_args(3)?;
                let c = Box::new(v.pop().unwrap());
                let (a, b) = boxed(v);
                Ok(Expr::Gamma(a, b, c))
            }
            "pow" => Ok({ let (a, b) = boxed(parse_args(2)?); Expr::Pow(a, b) }),
            "mul" => Ok({ let (a, b) = boxed(parse_args(2)?); Expr::Mul(a, b) }),
            "add" => Ok({ let (a, b) = boxed(parse_args(2)?); Expr::Add(a, b) }),
            "sub" => Ok({ let (a, b) = boxed(parse_args(2)?); Expr::Sub(a, b) }),
            "alpha" => Ok({ let (a, b) = boxed(parse_args(2)?); Expr::Alpha(a, b) }),
            "beta" => Ok({ let (a, b) = boxed(parse_args(2)?); Expr::Beta(a, b) }),
            "h" => {
                let mut v = parse_args(5)?;
                let e = Box::new(v.pop().unwrap());
                let d4 = Box::new(v.pop().unwrap());
                let c = Box::new(v.pop().unwrap());
                let (a, b) = boxed(v);
                Ok(Expr::H(a, b, c, d4, e))
            }
            other => Err(D::Error::custom(format!("unknown op {other}"))),
        }
    }
}

/// A numeric value or a symbolic expression (after the guard trips or under
/// the symbolic strategy).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Exact(BigNat),
    Sym(Expr),
}

impl Value {
    pub fn exact<T: Into<BigNat>>(v: T) -> Value {
        Value::Exact(v.into())
    }

    pub fn as_exact(&self) -> Option<&BigNat> {
        match self {
            Value::Exact(v) => Some(v),
            Value::Sym(_) => None,
        }
    }

    pub fn to_expr(&self) -> Expr {
        match self {
            Value::Exact(v) => Expr::Lit(v.clone()),
            Value::Sym(e) => e.clone(),
        }
    }

    pub fn lower_bound(&self) -> BigNat {
        match self {
            Value::Exact(v) => v.clone(),
            Value::Sym(e) => e.lower_bound(),
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Exact(v) => write!(f, "{v}"),
            Value::Sym(e) => write!(f, "{}", serde_json::to_string(e).map_err(|_| std::fmt::Error)?),
        }
    }
}

fn expect_u64(v: &BigNat) -> Result<u64> {
    v.to_u64().ok_or(Error::TooLarge(20))
}

fn checked_pow(base: &BigNat, exp: &BigNat, guard: DigitGuard) -> Result<BigNat> {
    if base.is_zero() {
        return Ok(if exp.is_zero() { BigNat::one() } else { BigNat::zero() });
    }
    if base.is_one() {
        return Ok(BigNat::one());
    }
    let e = expect_u64(exp)?;
    let bits_estimate = base.bits().saturating_mul(e);
    if bits_estimate > guard.max_bits() {
        return Err(Error::TooLarge(guard.max_digits));
    }
    let e32 = u32::try_from(e).map_err(|_| Error::TooLarge(guard.max_digits))?;
    let v = base.pow(e32);
    guard.admit(&v)?;
    Ok(v)
}

fn mul_v(a: Value, b: Value, guard: DigitGuard) -> Value {
    match (&a, &b) {
        (Value::Exact(x), Value::Exact(y)) => {
            let v = x * y;
            if guard.admit(&v).is_ok() {
                return Value::Exact(v);
            }
            Value::Sym(Expr::Mul(Box::new(Expr::Lit(x.clone())), Box::new(Expr::Lit(y.clone()))))
        }
        _ => Value::Sym(Expr::Mul(Box::new(a.to_expr()), Box::new(b.to_expr()))),
    }
}

fn add_v(a: Value, b: Value) -> Value {
    match (&a, &b) {
        (Value::Exact(x), Value::Exact(y)) => Value::Exact(x + y),
        _ => Value::Sym(Expr::Add(Box::new(a.to_expr()), Box::new(b.to_expr()))),
    }
}

fn sub_v(a: Value, b: Value) -> Result<Value> {
    match (&a, &b) {
        (Value::Exact(x), Value::Exact(y)) => {
            if y > x {
                Err(Error::InvalidInput("negative intermediate value in a bound".into()))
            } else {
                Ok(Value::Exact(x - y))
            }
        }
        _ => Ok(Value::Sym(Expr::Sub(Box::new(a.to_expr()), Box::new(b.to_expr())))),
    }
}

fn pow_v(a: Value, b: Value, guard: DigitGuard) -> Value {
    match (&a, &b) {
        (Value::Exact(x), Value::Exact(y)) => match checked_pow(x, y, guard) {
            Ok(v) => Value::Exact(v),
            Err(_) => Value::Sym(Expr::Pow(Box::new(Expr::Lit(x.clone())), Box::new(Expr::Lit(y.clone())))),
        },
        _ => Value::Sym(Expr::Pow(Box::new(a.to_expr()), Box::new(b.to_expr()))),
    }
}

/// `Σ_{d=1}^{m} d·x^{d-1}` with `0^0 = 1`.
fn sum_d_x_pow(x: u64, m: &BigNat, guard: DigitGuard) -> Result<BigNat> {
    if m.is_zero() {
        return Ok(BigNat::zero());
    }
    if x == 0 {
        // only the d=1 term survives
        return Ok(BigNat::one());
    }
    if x == 1 {
        // m(m+1)/2
        let v = m * (m + 1u32) / 2u32;
        guard.admit(&v)?;
        return Ok(v);
    }
    // (1 + m·x^{m+1} - (m+1)·x^m) / (x-1)^2
    let xe = BigNat::from(x);
    let xm = checked_pow(&xe, m, guard)?;
    let num = BigNat::one() + m * &xm * &xe - (m + 1u32) * &xm;
    let den = BigNat::from((x - 1) * (x - 1));
    let v = num / den;
    guard.admit(&v)?;
    Ok(v)
}

/// `alpha(k,m) = Σ_{d=1}^m d(k-1)^{d-1}`.
pub fn alpha_num(k: u32, m: &BigNat, guard: DigitGuard) -> Result<BigNat> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    sum_d_x_pow((k - 1) as u64, m, guard)
}

/// `beta(k,m) = Σ_{d=1}^m 2d(2k-1)^{d-1}`.
pub fn beta_num(k: u32, m: &BigNat, guard: DigitGuard) -> Result<BigNat> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let v = sum_d_x_pow((2 * k - 1) as u64, m, guard)? * 2u32;
    guard.admit(&v)?;
    Ok(v)
}

/// `gamma(k,d,m) = C(m,d)·2^d·m^d·(2k-1)^{d(m-1)}`.
pub fn gamma_num(k: u32, d: u64, m: &BigNat, guard: DigitGuard) -> Result<BigNat> {
    if k == 0 || d == 0 {
        return Err(Error::InvalidInput("k and d must be positive".into()));
    }
    if BigNat::from(d) > *m {
        return Err(Error::InvalidInput("gamma requires d <= m".into()));
    }
    // binomial with a small lower index
    let mut binom = BigNat::one();
    for i in 0..d {
        binom = binom * (m - i) / (i + 1);
    }
    let two_d = checked_pow(&BigNat::from(2u32), &BigNat::from(d), guard)?;
    let m_d = checked_pow(m, &BigNat::from(d), guard)?;
    let exp = BigNat::from(d) * (m - 1u32);
    let tail = checked_pow(&BigNat::from(2 * k - 1), &exp, guard)?;
    let v = binom * two_d * m_d * tail;
    guard.admit(&v)?;
    Ok(v)
}

fn alpha_v(k: u32, m: &Value, guard: DigitGuard) -> Result<Value> {
    match m {
        Value::Exact(me) => match alpha_num(k, me, guard) {
            Ok(v) => Ok(Value::Exact(v)),
            Err(Error::TooLarge(_)) => {
                Ok(Value::Sym(Expr::Alpha(Box::new(Expr::lit(k)), Box::new(Expr::Lit(me.clone())))))
            }
            Err(e) => Err(e),
        },
        Value::Sym(e) => Ok(Value::Sym(Expr::Alpha(Box::new(Expr::lit(k)), Box::new(e.clone()))))
    }
}

fn beta_v(k: u32, m: &Value, guard: DigitGuard) -> Result<Value> {
    match m {
        Value::Exact(me) => match beta_num(k, me, guard) {
            Ok(v) => Ok(Value::Exact(v)),
            Err(Error::TooLarge(_)) => {
                Ok(Value::Sym(Expr::Beta(Box::new(Expr::lit(k)), Box::new(Expr::Lit(me.clone())))))
            }
            Err(e) => Err(e),
        },
        Value::Sym(e) => Ok(Value::Sym(Expr::Beta(Box::new(Expr::lit(k)), Box::new(e.clone()))))
    }
}

fn gamma_v(k: u32, d: u64, m: &Value, guard: DigitGuard) -> Result<Value> {
    match m {
        Value::Exact(me) => match gamma_num(k, d, me, guard) {
            Ok(v) => Ok(Value::Exact(v)),
            Err(Error::TooLarge(_)) => Ok(Value::Sym(Expr::Gamma(
                Box::new(Expr::lit(k)),
                Box::new(Expr::lit(d)),
                Box::new(Expr::Lit(me.clone())),
            ))),
            Err(e) => Err(e),
        },
        Value::Sym(e) => Ok(Value::Sym(Expr::Gamma(
            Box::new(Expr::lit(k)),
            Box::new(Expr::lit(d)),
            Box::new(e.clone()),
        ))),
    }
}

/// The Grzegorczyk growth functions: `E_0(n,m) = n+m`, `E_1(n) = n²+2`,
/// `E_{q+1}(0) = 2`, `E_{q+1}(n+1) = E_q(E_{q+1}(n))`.
pub fn grzegorczyk_e(q: u32, args: &[BigNat], guard: DigitGuard) -> Result<BigNat> {
    let expected = if q == 0 { 2 } else { 1 };
    if args.len() != expected {
        return Err(Error::Arity { q, expected, got: args.len() });
    }
    fn e_eval(q: u32, n: &BigNat, guard: DigitGuard) -> Result<BigNat> {
        match q {
            0 => unreachable!("binary case handled by caller"),
            1 => {
                let v = n * n + 2u32;
                guard.admit(&v)?;
                Ok(v)
            }
            _ => {
                let steps = expect_u64(n)?;
                let mut acc = BigNat::from(2u32);
                for _ in 0..steps {
                    acc = e_eval(q - 1, &acc, guard)?;
                }
                Ok(acc)
            }
        }
    }
    match q {
        0 => {
            let v = &args[0] + &args[1];
            guard.admit(&v)?;
            Ok(v)
        }
        _ => e_eval(q, &args[0], guard),
    }
}

/// How Milliken–Taylor numbers are supplied to the bound recursions.
#[derive(Debug)]
pub enum MtStrategy {
    /// Exact value by exhaustive search; fails when the parameters are
    /// beyond the tiny regime.
    ExactTiny { n_max: usize },
    /// User-supplied values keyed by `(d, m, r)`; entries must be >= 1 and
    /// monotone in each argument where both keys are present.
    Table(BTreeMap<(u64, u64, u64), BigNat>),
    /// Leave `MT` uninterpreted.
    Symbolic,
}

impl MtStrategy {
    pub fn table(entries: BTreeMap<(u64, u64, u64), BigNat>) -> Result<Self> {
        for (&(d, m, r), v) in &entries {
            if v.is_zero() {
                return Err(Error::Strategy(format!("table entry MT({d},{m},{r}) must be >= 1")));
            }
            for (&(d2, m2, r2), v2) in &entries {
                if d <= d2 && m <= m2 && r <= r2 && v > v2 {
                    return Err(Error::Strategy(format!(
                        "table is not monotone: MT({d},{m},{r}) > MT({d2},{m2},{r2})"
                    )));
                }
            }
        }
        Ok(MtStrategy::Table(entries))
    }
}

/// Evaluation context for the bound functions.
pub struct BoundCtx<'a> {
    pub mt: &'a MtStrategy,
    pub guard: DigitGuard,
    pub search: &'a Search,
}

impl BoundCtx<'_> {
    /// The largest number of colors worth feeding to the exact searcher.
    const EXACT_R_CAP: u64 = 64;

    fn apply_mt(&self, d: Value, m: Value, r: Value) -> Result<Value> {
        match self.mt {
            MtStrategy::Symbolic => Ok(Value::Sym(Expr::Mt(
                Box::new(d.to_expr()),
                Box::new(m.to_expr()),
                Box::new(r.to_expr()),
            ))),
            MtStrategy::Table(entries) => {
                let (de, me, re) = match (d.as_exact(), m.as_exact(), r.as_exact()) {
                    (Some(a), Some(b), Some(c)) => (a, b, c),
                    _ => {
                        return Ok(Value::Sym(Expr::Mt(
                            Box::new(d.to_expr()),
                            Box::new(m.to_expr()),
                            Box::new(r.to_expr()),
                        )))
                    }
                };
                let key = (expect_u64(de)?, expect_u64(me)?, expect_u64(re)?);
                entries
                    .get(&key)
                    .cloned()
                    .map(Value::Exact)
                    .ok_or_else(|| Error::Strategy(format!("no table entry for MT{key:?}")))
            }
            MtStrategy::ExactTiny { n_max } => {
                let (de, me, re) = match (d.as_exact(), m.as_exact(), r.as_exact()) {
                    (Some(a), Some(b), Some(c)) => (a, b, c),
                    _ => {
                        return Ok(Value::Sym(Expr::Mt(
                            Box::new(d.to_expr()),
                            Box::new(m.to_expr()),
                            Box::new(r.to_expr()),
                        )))
                    }
                };
                let (de, me, re) = (expect_u64(de)?, expect_u64(me)?, expect_u64(re)?);
                if re > Self::EXACT_R_CAP {
                    return Err(Error::Strategy(format!(
                        "r={re} is beyond the exact computation regime"
                    )));
                }
                let q = ExactQuery {
                    kind: QueryKind::Mt,
                    k: 1,
                    d: de as usize,
                    m: me as usize,
                    r: re as u32,
                    n_max: *n_max,
                };
                match exact_number(self.search, &q)? {
                    Some(v) => Ok(Value::exact(v)),
                    None => Err(Error::Strategy(format!(
                        "MT({de},{me},{re}) not determined below n_max={n_max}"
                    ))),
                }
            }
        }
    }
}

/// `G(1,m,r) = MT(1,m,r)`; for larger `k`,
/// `G(k,m,r) ≤ MT(M(2k-1), 2M(2k-1)-1, r^alpha)` with `M = G(k-1,m,r)` and
/// `alpha = alpha(k, M(2k-1))`.
pub fn bound_g(ctx: &BoundCtx<'_>, k: u32, m: u64, r: u64) -> Result<Value> {
    if k == 0 || m == 0 || r == 0 {
        return Err(Error::InvalidInput("k, m, r must be positive".into()));
    }
    bound_g_v(ctx, k, &Value::exact(m), &Value::exact(r))
}

fn bound_g_v(ctx: &BoundCtx<'_>, k: u32, m: &Value, r: &Value) -> Result<Value> {
    if k == 1 {
        return ctx.apply_mt(Value::exact(1u32), m.clone(), r.clone());
    }
    let inner = bound_g_v(ctx, k - 1, m, r)?;
    let p = mul_v(inner, Value::exact(2 * k - 1), ctx.guard);
    let a = alpha_v(k, &p, ctx.guard)?;
    let ra = pow_v(r.clone(), a, ctx.guard);
    let second = sub_v(mul_v(Value::exact(2u32), p.clone(), ctx.guard), Value::exact(1u32))?;
    ctx.apply_mt(p, second, ra)
}

/// `G_±(k,m,r) ≤ MT(2kM, 4kM-1, r^beta)` with `M = G(k,m,r)` and
/// `beta = beta(k, 2kM)`.
pub fn bound_g_pm(ctx: &BoundCtx<'_>, k: u32, m: u64, r: u64) -> Result<Value> {
    let big_m = bound_g(ctx, k, m, r)?;
    let p = mul_v(Value::exact(2 * k), big_m, ctx.guard);
    let b = beta_v(k, &p, ctx.guard)?;
    let rb = pow_v(Value::exact(r), b, ctx.guard);
    let second = sub_v(mul_v(Value::exact(2u32), p.clone(), ctx.guard), Value::exact(1u32))?;
    ctx.apply_mt(p, second, rb)
}

/// How the stabilization recursion obtains its `G` values.
#[derive(Clone, Copy, Debug)]
pub enum GStrategy {
    /// Through [`bound_g`] with the ambient Milliken–Taylor strategy.
    ViaBound,
    /// Exact tiny values from the verifier.
    ExactTiny { n_max: usize },
}

/// `h(d,ell,r,k,0) = 0`, `h(d,ell,r,k,x+1) = G(k, h(..,x)+1, r^((k+1)^(d·ell)))`.
pub fn h_fn(
    ctx: &BoundCtx<'_>,
    d: u64,
    ell: u64,
    r: u64,
    k: u32,
    x: u64,
    g: GStrategy,
) -> Result<Value> {
    h_fn_v(ctx, d, &Value::exact(ell), r, k, &Value::exact(x), g)
}

fn h_fn_v(
    ctx: &BoundCtx<'_>,
    d: u64,
    ell: &Value,
    r: u64,
    k: u32,
    x: &Value,
    g: GStrategy,
) -> Result<Value> {
    let (ell_e, x_e) = match (ell.as_exact(), x.as_exact()) {
        (Some(a), Some(b)) => (expect_u64(a)?, expect_u64(b)?),
        _ => {
            return Ok(Value::Sym(Expr::H(
                Box::new(Expr::lit(d)),
                Box::new(ell.to_expr()),
                Box::new(Expr::lit(r)),
                Box::new(Expr::lit(k)),
                Box::new(x.to_expr()),
            )))
        }
    };
    let exp = pow_v(Value::exact(k + 1), Value::exact(d.saturating_mul(ell_e)), ctx.guard);
    let colors = pow_v(Value::exact(r), exp, ctx.guard);
    let mut acc = Value::exact(0u32);
    for _ in 0..x_e {
        let m = add_v(acc, Value::exact(1u32));
        acc = apply_g(ctx, g, k, &m, &colors)?;
    }
    Ok(acc)
}

fn apply_g(ctx: &BoundCtx<'_>, g: GStrategy, k: u32, m: &Value, r: &Value) -> Result<Value> {
    match g {
        GStrategy::ViaBound => bound_g_v(ctx, k, m, r),
        GStrategy::ExactTiny { n_max } => {
            let (me, re) = match (m.as_exact(), r.as_exact()) {
                (Some(a), Some(b)) => (expect_u64(a)?, expect_u64(b)?),
                _ => return Err(Error::Strategy("exact G needs ground arguments".into())),
            };
            if re > BoundCtx::EXACT_R_CAP {
                return Err(Error::Strategy(format!("r={re} is beyond the exact regime")));
            }
            let q = ExactQuery {
                kind: QueryKind::G,
                k,
                d: 1,
                m: me as usize,
                r: re as u32,
                n_max,
            };
            match exact_number(ctx.search, &q)? {
                Some(v) => Ok(Value::exact(v)),
                None => Err(Error::Strategy(format!(
                    "G({k},{me},{re}) not determined below n_max={n_max}"
                ))),
            }
        }
    }
}

/// `MG(k,1,m,r) = G(k,m,r)`; for `d ≥ 2`,
/// `MG(k,d,m,r) ≤ (d-1) + h(d-1, M+1, r, k, M-d+2)` with `M = MG(k,d-1,m-1,r)`.
pub fn bound_mg(ctx: &BoundCtx<'_>, k: u32, d: u64, m: u64, r: u64, g: GStrategy) -> Result<Value> {
    if d == 0 || m == 0 || d > m {
        return Err(Error::InvalidInput("need 1 <= d <= m".into()));
    }
    if d == 1 {
        return bound_g(ctx, k, m, r);
    }
    let dd = d - 1;
    let big_m = bound_mg(ctx, k, dd, m - 1, r, g)?;
    let ell = add_v(big_m.clone(), Value::exact(1u32));
    let x = sub_v(add_v(big_m, Value::exact(1u32)), Value::exact(dd))?;
    let h = h_fn_v(ctx, dd, &ell, r, k, &x, g)?;
    Ok(add_v(Value::exact(dd), h))
}

/// `MG_±(k,d,m,r) ≤ MT(2kM, 4kM-1, r^gamma)` with `M = MG(k,d,m,r)` and
/// `gamma = gamma(k, d, 2kM)`.
pub fn bound_mg_pm(
    ctx: &BoundCtx<'_>,
    k: u32,
    d: u64,
    m: u64,
    r: u64,
    g: GStrategy,
) -> Result<Value> {
    let big_m = bound_mg(ctx, k, d, m, r, g)?;
    let p = mul_v(Value::exact(2 * k), big_m, ctx.guard);
    let gm = gamma_v(k, d, &p, ctx.guard)?;
    let rg = pow_v(Value::exact(r), gm, ctx.guard);
    let second = sub_v(mul_v(Value::exact(2u32), p.clone(), ctx.guard), Value::exact(1u32))?;
    ctx.apply_mt(p, second, rg)
}
