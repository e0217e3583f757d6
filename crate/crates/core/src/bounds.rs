//! Tower functions and the explicit constants built from them.
//!
//! `t_1(x) = x` and `t_i(x) = 2^{t_{i-1}(x)}`. Integer chains are evaluated
//! exactly; non-integer arguments are evaluated in binary floating point with a
//! 128-bit mantissa. Levels whose exponent exceeds [`MATERIALIZE_BITS`] stay
//! symbolic and are rendered through the chain of values below them.

use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest exponent (in bits) for which `2^x` is materialized.
pub const MATERIALIZE_BITS: u64 = 1_000_000;

/// Mantissa precision for real-argument towers.
pub const REAL_PRECISION: usize = 128;

const RM: RoundingMode = RoundingMode::ToEven;

fn consts() -> Consts {
    Consts::new().expect("astro-float constant cache")
}

/// Base argument of a tower.
#[derive(Debug, Clone)]
pub enum TowerArg {
    Exact(BigRational),
    Real { value: BigFloat, label: String },
}

impl TowerArg {
    pub fn integer(n: impl Into<BigUint>) -> Self {
        TowerArg::Exact(BigRational::from_integer(n.into().into()))
    }

    pub fn rational(numer: i64, denom: i64) -> Self {
        TowerArg::Exact(BigRational::new(numer.into(), denom.into()))
    }

    /// `k / sqrt(8)`.
    pub fn k_over_sqrt8(k: u64) -> Self {
        let eight = BigFloat::from_u64(8, REAL_PRECISION);
        let value = BigFloat::from_u64(k, REAL_PRECISION).div(&eight.sqrt(REAL_PRECISION, RM), REAL_PRECISION, RM);
        TowerArg::Real {
            value,
            label: format!("{k}/sqrt(8)"),
        }
    }

    fn label(&self) -> String {
        match self {
            TowerArg::Exact(q) => q.to_string(),
            TowerArg::Real { label, .. } => label.clone(),
        }
    }
}

/// One level of a tower.
#[derive(Debug, Clone)]
pub enum LevelValue {
    Exact(BigRational),
    Real(BigFloat),
    /// Too large to materialize; see the level below.
    Symbolic,
}

impl LevelValue {
    fn is_materialized(&self) -> bool {
        !matches!(self, LevelValue::Symbolic)
    }
}

fn rational_to_float(q: &BigRational) -> BigFloat {
    let mut cc = consts();
    let n = BigFloat::parse(&q.numer().to_string(), Radix::Dec, REAL_PRECISION, RM, &mut cc);
    let d = BigFloat::parse(&q.denom().to_string(), Radix::Dec, REAL_PRECISION, RM, &mut cc);
    n.div(&d, REAL_PRECISION, RM)
}

fn float_within(x: &BigFloat, bound: u64) -> bool {
    let b = BigFloat::from_u64(bound, REAL_PRECISION);
    let neg_b = BigFloat::from_i64(-(bound as i64), REAL_PRECISION);
    matches!(x.cmp(&b), Some(c) if c <= 0) && matches!(x.cmp(&neg_b), Some(c) if c >= 0)
}

fn pow2_float(x: &BigFloat) -> BigFloat {
    let mut cc = consts();
    BigFloat::from_u8(2, REAL_PRECISION).pow(x, REAL_PRECISION, RM, &mut cc)
}

/// `2^prev`, materialized when the exponent is small enough.
fn exp2_level(prev: &LevelValue) -> LevelValue {
    match prev {
        LevelValue::Exact(q) if q.is_integer() => {
            let n = q.to_integer();
            match n.abs().to_u64() {
                Some(bits) if bits <= MATERIALIZE_BITS => {
                    let p = BigUint::one() << bits;
                    if n.is_negative() {
                        LevelValue::Exact(BigRational::new(1.into(), p.into()))
                    } else {
                        LevelValue::Exact(BigRational::from_integer(p.into()))
                    }
                }
                _ => LevelValue::Symbolic,
            }
        }
        LevelValue::Exact(q) => {
            let x = rational_to_float(q);
            if float_within(&x, MATERIALIZE_BITS) {
                LevelValue::Real(pow2_float(&x))
            } else {
                LevelValue::Symbolic
            }
        }
        LevelValue::Real(x) => {
            if float_within(x, MATERIALIZE_BITS) {
                LevelValue::Real(pow2_float(x))
            } else {
                LevelValue::Symbolic
            }
        }
        LevelValue::Symbolic => LevelValue::Symbolic,
    }
}

/// Decimal rendering; plain notation when the exponent lies in `-6..=30`.
fn render_float(x: &BigFloat) -> String {
    let mut cc = consts();
    let s = x
        .format(Radix::Dec, RM, &mut cc)
        .unwrap_or_else(|_| "NaN".to_string());
    plain_decimal(&s).unwrap_or(s)
}

fn plain_decimal(s: &str) -> Option<String> {
    let (mantissa, exp) = s.split_once('e')?;
    let exp: i64 = exp.parse().ok()?;
    if !(-6..=30).contains(&exp) {
        return None;
    }
    let (sign, mantissa) = mantissa.strip_prefix('-').map_or(("", mantissa), |m| ("-", m));
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int}{frac}");
    let point = int.len() as i64 + exp;
    let body = if point <= 0 {
        format!("0.{}{digits}", "0".repeat((-point) as usize))
    } else if point as usize >= digits.len() {
        format!("{digits}{}", "0".repeat(point as usize - digits.len()))
    } else {
        format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
    };
    Some(format!("{sign}{body}"))
}

/// `t_level(argument)` together with every level below it.
#[derive(Debug, Clone)]
pub struct TowerValue {
    argument: String,
    levels: Vec<LevelValue>,
}

/// Evaluates `t_level(arg)`.
pub fn tower(level: u32, arg: TowerArg) -> Result<TowerValue> {
    if level < 1 {
        return Err(Error::InvalidInput("tower level must be >= 1".into()));
    }
    let argument = arg.label();
    let first = match arg {
        TowerArg::Exact(q) => LevelValue::Exact(q),
        TowerArg::Real { value, .. } => LevelValue::Real(value),
    };
    let mut levels = vec![first];
    for _ in 1..level {
        let next = exp2_level(levels.last().unwrap());
        levels.push(next);
    }
    Ok(TowerValue { argument, levels })
}

impl TowerValue {
    pub fn level(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn argument(&self) -> &str {
        &self.argument
    }

    pub fn value(&self) -> &LevelValue {
        self.levels.last().unwrap()
    }

    /// `t_j` for `1 <= j <= level`.
    pub fn at_level(&self, j: u32) -> &LevelValue {
        &self.levels[j as usize - 1]
    }

    pub fn is_materialized(&self) -> bool {
        self.value().is_materialized()
    }

    /// The exact value when it is a non-negative integer.
    pub fn as_integer(&self) -> Option<BigUint> {
        match self.value() {
            LevelValue::Exact(q) if q.is_integer() && !q.is_negative() => q.to_integer().to_biguint(),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        match self.value() {
            LevelValue::Exact(q) => q.to_f64(),
            LevelValue::Real(x) => render_float(x).parse().ok(),
            LevelValue::Symbolic => None,
        }
    }

    /// Decimal rendering of level `j`; symbolic levels render as nested powers.
    pub fn render_level(&self, j: u32) -> String {
        match self.at_level(j) {
            LevelValue::Exact(q) => q.to_string(),
            LevelValue::Real(x) => render_float(x),
            LevelValue::Symbolic => format!("2^({})", self.render_level(j - 1)),
        }
    }

    pub fn render(&self) -> String {
        self.render_level(self.level())
    }

    /// `[log2 t_i, log2 log2 t_i, ...] = [t_{i-1}, ..., t_1]`.
    pub fn log_chain(&self) -> Vec<String> {
        (1..self.level()).rev().map(|j| self.render_level(j)).collect()
    }
}

impl fmt::Display for TowerValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Serialize for TowerValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TowerValue", 5)?;
        st.serialize_field("levels", &self.level())?;
        st.serialize_field("top_argument", &self.argument)?;
        st.serialize_field("materialized", &self.is_materialized())?;
        st.serialize_field("value", &self.render())?;
        st.serialize_field("log_chain", &self.log_chain())?;
        st.end()
    }
}

/// `M` with `log2^{(k-2)}(M) = l^r`, i.e. `t_{k-1}(l^r)`.
pub fn m_for(k: u32, l: u32, r: u32) -> Result<TowerValue> {
    if k < 2 {
        return Err(Error::InvalidDimension(format!("M(k,l,r) requires k >= 2, got {k}")));
    }
    if l < 1 || r < 1 {
        return Err(Error::InvalidInput("M(k,l,r) requires l, r >= 1".into()));
    }
    tower(k - 1, TowerArg::integer(BigUint::from(l).pow(r)))
}

/// The lower bound `1 / M^{k+l-1}`, exact or as a base-2 logarithm.
#[derive(Debug, Clone, PartialEq)]
pub enum Probability {
    Exact(BigRational),
    /// `log2(p)` rendered in terms of the tower chain.
    Log2(String),
}

impl Probability {
    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Probability::Exact(q) => Some(q),
            Probability::Log2(_) => None,
        }
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Probability::Exact(q) => write!(f, "{q}"),
            Probability::Log2(s) => write!(f, "2^({s})"),
        }
    }
}

impl Serialize for Probability {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AdversarialConstants {
    pub k: u32,
    #[serde(rename = "M")]
    pub m: String,
    #[serde(rename = "M_tower")]
    pub m_tower: TowerValue,
    /// `9k^2 / M`, as a decimal or a power of two.
    pub bound: String,
    /// `true` when the bound is at least 1 and says nothing.
    pub vacuous: bool,
    pub precision_bits: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub k: u32,
    pub l: u32,
    pub r: u32,
    #[serde(rename = "M")]
    pub m: String,
    #[serde(rename = "M_tower")]
    pub m_tower: TowerValue,
    pub p_lower: Probability,
    pub adversarial: Option<AdversarialConstants>,
}

/// `p = 1 / M^{k+l-1}` with `M = m_for(k, l, r)`.
pub fn p_lower(k: u32, l: u32, r: u32) -> Result<BoundReport> {
    let m = m_for(k, l, r)?;
    let exponent = u64::from(k + l - 1);
    let p = match m.as_integer() {
        Some(n) if n.bits().saturating_mul(exponent) <= MATERIALIZE_BITS => {
            Probability::Exact(BigRational::new(1.into(), n.pow(exponent as u32).into()))
        }
        _ => {
            // log2 M is the level below M.
            let log2_m = if m.level() >= 2 {
                m.render_level(m.level() - 1)
            } else {
                format!("log2({})", m.render())
            };
            Probability::Log2(format!("-{exponent}*{log2_m}"))
        }
    };
    Ok(BoundReport {
        k,
        l,
        r,
        m: m.render(),
        m_tower: m,
        p_lower: p,
        adversarial: if k >= 3 { Some(adversarial_constants(k)?) } else { None },
    })
}

/// `M = t_{k-2}(k/sqrt(8))` and the bound `9k^2/M` on constant `2k`-runs.
pub fn adversarial_constants(k: u32) -> Result<AdversarialConstants> {
    if k < 3 {
        return Err(Error::InvalidDimension(format!(
            "the adversarial bound needs k >= 3, got {k}"
        )));
    }
    let m = tower(k - 2, TowerArg::k_over_sqrt8(u64::from(k)))?;
    let nine_k2 = 9 * u64::from(k) * u64::from(k);
    let (bound, vacuous) = match m.value() {
        LevelValue::Exact(q) => {
            let b = BigRational::from_integer(nine_k2.into()) / q;
            let vac = b >= BigRational::one();
            (b.to_string(), vac)
        }
        LevelValue::Real(x) => {
            let b = BigFloat::from_u64(nine_k2, REAL_PRECISION).div(x, REAL_PRECISION, RM);
            let one = BigFloat::from_u8(1, REAL_PRECISION);
            let vac = matches!(b.cmp(&one), Some(c) if c >= 0);
            (render_float(&b), vac)
        }
        LevelValue::Symbolic => (
            format!("{nine_k2}*2^(-{})", m.render_level(m.level() - 1)),
            false,
        ),
    };
    debug_assert!(!bound.starts_with('-') && !bound.is_empty());
    Ok(AdversarialConstants {
        k,
        m: m.render(),
        m_tower: m,
        bound,
        vacuous,
        precision_bits: REAL_PRECISION,
    })
}

/// Positive `9k^2/M` as an `f64` when representable.
pub fn adversarial_bound_f64(report: &AdversarialConstants) -> Option<f64> {
    report.bound.parse().ok().filter(|b: &f64| !b.is_zero())
}
