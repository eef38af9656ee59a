//! Totally ordered abelian groups realized as lexicographically ordered
//! vectors of exact rationals.
//!
//! The input data of a tropical program lives in arity 1 (the reals), the
//! layered semiring uses arity 2, and the fully perturbed problems use
//! arity `n + 3`. All arithmetic is exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Formats a rational in the canonical `p/q` form with `q > 0`.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer `p`. The result is always reduced.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("invalid rational {s:?}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (parse_int(p)?, parse_int(q)?);
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

/// An element of `Q^k` under coordinate-wise addition and lexicographic order.
///
/// The arity is fixed at construction. The `Ord` impl compares
/// lexicographically and is only meaningful between values of equal arity;
/// use [`GroupValue::lex_cmp`] where arity is not already guaranteed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupValue {
    coords: Box<[BigRational]>,
}

impl GroupValue {
    pub fn new(coords: Vec<BigRational>) -> Self {
        // BigRational constructors already reduce; nothing else to canonicalize.
        GroupValue {
            coords: coords.into_boxed_slice(),
        }
    }

    pub fn from_integers(coords: &[i64]) -> Self {
        Self::new(
            coords
                .iter()
                .map(|&c| BigRational::from_integer(c.into()))
                .collect(),
        )
    }

    /// The neutral element of the given arity.
    pub fn zero(arity: usize) -> Self {
        Self::new(vec![BigRational::zero(); arity])
    }

    /// Arity-1 value holding `r`.
    pub fn scalar(r: BigRational) -> Self {
        Self::new(vec![r])
    }

    pub fn arity(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &BigRational {
        &self.coords[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: other.arity(),
            });
        }
        Ok(())
    }

    /// Lexicographic comparison; the first differing coordinate decides.
    pub fn lex_cmp(&self, other: &Self) -> Result<Ordering> {
        self.check_arity(other)?;
        Ok(self.coords.iter().cmp(other.coords.iter()))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&BigRational, &BigRational) -> BigRational,
    ) -> Self {
        Self::new(
            self.coords
                .iter()
                .zip(other.coords.iter())
                .map(|(a, b)| f(a, b))
                .collect(),
        )
    }

    /// Places `self` at `offset` inside a zero vector of arity `target`.
    pub fn embed(&self, target: usize, offset: usize) -> Result<Self> {
        if offset + self.arity() > target {
            return Err(Error::InvalidEmbedding {
                arity: self.arity(),
                offset,
                target,
            });
        }
        let mut coords = vec![BigRational::zero(); target];
        coords[offset..offset + self.arity()].clone_from_slice(&self.coords);
        Ok(Self::new(coords))
    }

    /// Concatenation `(self, other)`, used for the product groups `R^2 x H`.
    pub fn concat(&self, other: &Self) -> Self {
        Self::new(
            self.coords
                .iter()
                .chain(other.coords.iter())
                .cloned()
                .collect(),
        )
    }

    /// The coordinates in `range`, as a value of smaller arity.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self::new(self.coords[range].to_vec())
    }

    /// Multiplies every coordinate by a rational factor. Positive factors are
    /// order automorphisms of the group.
    pub fn scale(&self, factor: &BigRational) -> Self {
        Self::new(self.coords.iter().map(|c| c * factor).collect())
    }

    /// Largest classical absolute value among the coordinates.
    pub fn max_abs(&self) -> BigRational {
        self.coords
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigRational::zero)
    }
}

impl PartialOrd for GroupValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupValue {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(
            self.arity(),
            other.arity(),
            "comparing group values of different arity"
        );
        self.coords.iter().cmp(other.coords.iter())
    }
}

impl Add for &GroupValue {
    type Output = GroupValue;

    fn add(self, rhs: &GroupValue) -> GroupValue {
        self.try_add(rhs).expect("group addition")
    }
}

impl Sub for &GroupValue {
    type Output = GroupValue;

    fn sub(self, rhs: &GroupValue) -> GroupValue {
        self.try_sub(rhs).expect("group subtraction")
    }
}

impl Neg for &GroupValue {
    type Output = GroupValue;

    fn neg(self) -> GroupValue {
        GroupValue::new(self.coords.iter().map(|c| -c).collect())
    }
}

impl fmt::Debug for GroupValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GroupValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.arity() == 1 {
            return write!(f, "{}", self.coords[0]);
        }
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for GroupValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.arity()))?;
        for c in self.coords.iter() {
            seq.serialize_element(&format_rational(c))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for GroupValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(deserializer)?;
        if raw.is_empty() {
            return Err(de::Error::custom("group value must have arity at least 1"));
        }
        let coords = raw
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(de::Error::custom)?;
        Ok(GroupValue::new(coords))
    }
}
