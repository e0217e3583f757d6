//! Grid functions `f: {1..M}^k -> values`.
//!
//! Tables are stored row-major with coordinate 1 varying fastest, so the
//! window `(z_1, ..., z_k)` lives at index `sum_i (z_i - 1) * M^(i-1)`. Dropping
//! the first coordinate of a window is then a division by `M`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use super::construction::AdversarialRule;
use crate::error::{Error, Result};

/// Largest table `M^k` that will be materialized.
pub const TABLE_BUDGET: u64 = 10_000_000;

/// A function value: an integer or an exact rational.
#[derive(Debug, Clone)]
pub enum Value {
    Int(i64),
    Ratio(BigRational),
}

impl Value {
    pub fn to_ratio(&self) -> BigRational {
        match self {
            Value::Int(n) => BigRational::from_integer(BigInt::from(*n)),
            Value::Ratio(q) => q.clone(),
        }
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            _ => self.to_ratio().cmp(&other.to_ratio()),
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Ratio(q) => write!(f, "{q}"),
        }
    }
}

impl FromStr for Value {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(n) = s.parse::<i64>() {
            return Ok(Value::Int(n));
        }
        let bad = || Error::InvalidInput(format!("not an integer or p/q rational: {s:?}"));
        let (p, q) = s.split_once('/').ok_or_else(bad)?;
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q == BigInt::from(0) {
            return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
        }
        Ok(Value::Ratio(BigRational::new(p, q)))
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Value::Int(n) => s.serialize_i64(*n),
            Value::Ratio(q) if q.is_integer() => match q.to_integer().to_i64() {
                Some(n) => s.serialize_i64(n),
                None => s.serialize_str(&q.to_string()),
            },
            Value::Ratio(q) => s.serialize_str(&q.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Value::Int(n)),
            Raw::Text(s) => s.parse().map_err(de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Range {
    /// Values in `{0..r-1}`.
    Discrete { r: u32 },
    /// Arbitrary rationals (integers included).
    Rational,
}

#[derive(Debug, Clone)]
pub(crate) enum Backing {
    Ints(Arc<Vec<i64>>),
    Ratios(Arc<Vec<BigRational>>),
    Adversarial(Arc<AdversarialRule>),
}

/// `f: {1..M}^k -> values`, either tabulated or evaluated by rule.
#[derive(Debug, Clone)]
pub struct GridFunction {
    k: usize,
    grid: u32,
    range: Range,
    backing: Backing,
}

/// Checked `M^k`.
pub fn table_len(k: usize, grid: u32) -> Result<usize> {
    let n = u64::from(grid)
        .checked_pow(k as u32)
        .filter(|&n| n <= TABLE_BUDGET)
        .ok_or_else(|| Error::budget("grid table size", format!("{grid}^{k}"), TABLE_BUDGET))?;
    Ok(n as usize)
}

fn check_dims(k: usize, grid: u32) -> Result<()> {
    if k < 1 || grid < 1 {
        return Err(Error::InvalidDimension(format!(
            "grid function needs k >= 1 and M >= 1, got k={k}, M={grid}"
        )));
    }
    Ok(())
}

impl GridFunction {
    pub fn discrete(k: usize, grid: u32, r: u32, table: Vec<u32>) -> Result<Self> {
        check_dims(k, grid)?;
        let len = table_len(k, grid)?;
        if table.len() != len {
            return Err(Error::InvalidInput(format!(
                "table has {} entries, expected M^k = {len}",
                table.len()
            )));
        }
        if let Some(&v) = table.iter().find(|&&v| v >= r) {
            return Err(Error::InvalidInput(format!("value {v} outside 0..{r}")));
        }
        Ok(GridFunction {
            k,
            grid,
            range: Range::Discrete { r },
            backing: Backing::Ints(Arc::new(table.into_iter().map(i64::from).collect())),
        })
    }

    /// Rational-valued table; integer-only tables are stored compactly.
    pub fn rational(k: usize, grid: u32, table: Vec<Value>) -> Result<Self> {
        check_dims(k, grid)?;
        let len = table_len(k, grid)?;
        if table.len() != len {
            return Err(Error::InvalidInput(format!(
                "table has {} entries, expected M^k = {len}",
                table.len()
            )));
        }
        let backing = if table.iter().all(|v| matches!(v, Value::Int(_))) {
            Backing::Ints(Arc::new(
                table
                    .into_iter()
                    .map(|v| match v {
                        Value::Int(n) => n,
                        Value::Ratio(_) => unreachable!(),
                    })
                    .collect(),
            ))
        } else {
            Backing::Ratios(Arc::new(table.iter().map(Value::to_ratio).collect()))
        };
        Ok(GridFunction {
            k,
            grid,
            range: Range::Rational,
            backing,
        })
    }

    /// Tabulates a discrete function given on 1-based coordinates.
    pub fn tabulate(k: usize, grid: u32, r: u32, f: impl Fn(&[u32]) -> u32) -> Result<Self> {
        check_dims(k, grid)?;
        let len = table_len(k, grid)?;
        let mut z = vec![0u32; k];
        let table = (0..len)
            .map(|i| {
                coords_into(i, grid, &mut z);
                f(&z)
            })
            .collect();
        Self::discrete(k, grid, r, table)
    }

    pub fn constant(k: usize, grid: u32, r: u32, value: u32) -> Result<Self> {
        Self::tabulate(k, grid, r, |_| value)
    }

    pub(crate) fn from_rule(rule: AdversarialRule) -> Self {
        GridFunction {
            k: rule.k(),
            grid: rule.grid(),
            range: Range::Discrete { r: 2 },
            backing: Backing::Adversarial(Arc::new(rule)),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn grid(&self) -> u32 {
        self.grid
    }

    pub fn range(&self) -> Range {
        self.range
    }

    pub fn r(&self) -> Option<u32> {
        match self.range {
            Range::Discrete { r } => Some(r),
            Range::Rational => None,
        }
    }

    pub fn is_tabular(&self) -> bool {
        !matches!(self.backing, Backing::Adversarial(_))
    }

    pub(crate) fn adversarial_rule(&self) -> Option<&AdversarialRule> {
        match &self.backing {
            Backing::Adversarial(rule) => Some(rule),
            _ => None,
        }
    }

    /// Index of the window `z` (1-based coordinates) in the table.
    pub fn index_of(&self, z: &[u32]) -> usize {
        debug_assert_eq!(z.len(), self.k);
        z.iter()
            .rev()
            .fold(0usize, |acc, &zi| acc * self.grid as usize + (zi as usize - 1))
    }

    pub fn eval(&self, z: &[u32]) -> Result<Value> {
        if z.len() != self.k || z.iter().any(|&zi| zi < 1 || zi > self.grid) {
            return Err(Error::InvalidInput(format!(
                "{z:?} is not a point of {{1..{}}}^{}",
                self.grid, self.k
            )));
        }
        Ok(match &self.backing {
            Backing::Ints(t) => Value::Int(t[self.index_of(z)]),
            Backing::Ratios(t) => Value::Ratio(t[self.index_of(z)].clone()),
            Backing::Adversarial(rule) => Value::Int(i64::from(rule.eval(z))),
        })
    }

    /// Every value in table order.
    pub fn values(&self) -> Result<Vec<Value>> {
        Ok(match &self.backing {
            Backing::Ints(t) => t.iter().map(|&n| Value::Int(n)).collect(),
            Backing::Ratios(t) => t.iter().cloned().map(Value::Ratio).collect(),
            Backing::Adversarial(rule) => {
                let len = table_len(self.k, self.grid)?;
                let mut z = vec![0u32; self.k];
                (0..len)
                    .map(|i| {
                        coords_into(i, self.grid, &mut z);
                        Value::Int(i64::from(rule.eval(&z)))
                    })
                    .collect()
            }
        })
    }

    /// A tabulated copy; rule-backed functions are evaluated everywhere.
    pub fn materialize(&self) -> Result<GridFunction> {
        match &self.backing {
            Backing::Adversarial(_) => {
                let table = self
                    .values()?
                    .into_iter()
                    .map(|v| match v {
                        Value::Int(n) => n as u32,
                        Value::Ratio(_) => unreachable!(),
                    })
                    .collect();
                GridFunction::discrete(self.k, self.grid, 2, table)
            }
            _ => Ok(self.clone()),
        }
    }

    /// Order-preserving dense ids of the values.
    pub fn ranked(&self) -> Result<RankedTable> {
        let (ids, distinct) = match &self.backing {
            Backing::Ints(t) => rank_values(t),
            Backing::Ratios(t) => rank_values(t),
            Backing::Adversarial(_) => {
                let t: Vec<i64> = self
                    .values()?
                    .into_iter()
                    .map(|v| match v {
                        Value::Int(n) => n,
                        Value::Ratio(_) => unreachable!(),
                    })
                    .collect();
                rank_values(&t)
            }
        };
        Ok(RankedTable {
            k: self.k,
            grid: self.grid,
            ids,
            distinct,
        })
    }

    pub fn to_file(&self) -> Result<GridFile> {
        Ok(GridFile {
            k: self.k,
            grid: self.grid,
            r: self.r(),
            table: self.values()?,
        })
    }

    pub fn from_file(file: GridFile) -> Result<Self> {
        match file.r {
            Some(r) => {
                let table = file
                    .table
                    .iter()
                    .map(|v| match v {
                        Value::Int(n) if *n >= 0 && *n < i64::from(r) => Ok(*n as u32),
                        other => Err(Error::InvalidInput(format!(
                            "value {other} outside 0..{r}"
                        ))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                GridFunction::discrete(file.k, file.grid, r, table)
            }
            None => GridFunction::rational(file.k, file.grid, file.table),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GridFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("grid function JSON: {e}")))?;
        Self::from_file(file)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file()?).expect("grid file serializes"))
    }
}

trait IntoValue: Clone + Ord {
    fn into_value(self) -> Value;
}

impl IntoValue for i64 {
    fn into_value(self) -> Value {
        Value::Int(self)
    }
}

impl IntoValue for BigRational {
    fn into_value(self) -> Value {
        Value::Ratio(self)
    }
}

fn rank_values<T: IntoValue>(table: &[T]) -> (Vec<u32>, Vec<Value>) {
    let mut distinct: Vec<T> = table.to_vec();
    distinct.sort();
    distinct.dedup();
    let ids = table
        .iter()
        .map(|v| distinct.binary_search(v).unwrap() as u32)
        .collect();
    (ids, distinct.into_iter().map(IntoValue::into_value).collect())
}

/// Writes the 1-based coordinates of table index `i` into `z`.
pub fn coords_into(mut i: usize, grid: u32, z: &mut [u32]) {
    for zi in z.iter_mut() {
        *zi = (i % grid as usize) as u32 + 1;
        i /= grid as usize;
    }
}

/// A table of order-preserving value ids: `ids[i] < ids[j]` iff `f_i < f_j`.
#[derive(Debug, Clone)]
pub struct RankedTable {
    pub k: usize,
    pub grid: u32,
    pub ids: Vec<u32>,
    pub distinct: Vec<Value>,
}

impl RankedTable {
    pub fn id_of(&self, value: &Value) -> Option<u32> {
        self.distinct.binary_search(value).ok().map(|i| i as u32)
    }
}

/// On-disk grid function: `{k, M, r, table}`; `r` is absent for rational tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub k: usize,
    #[serde(rename = "M")]
    pub grid: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    pub table: Vec<Value>,
}
