//! The tropical semiring `T(G)`, signed tropical numbers, constraint rows
//! and tropical linear programs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupValue;
use crate::linalg::SignedMatrix;

/// An element of `T(G) = G ∪ {bottom}` with `max` as addition and the group
/// law as multiplication. `Bottom` sorts below every finite value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "Option<GroupValue>", into = "Option<GroupValue>")]
pub enum Tropical {
    Bottom,
    Finite(GroupValue),
}

impl From<Option<GroupValue>> for Tropical {
    fn from(v: Option<GroupValue>) -> Self {
        v.map_or(Tropical::Bottom, Tropical::Finite)
    }
}

impl From<Tropical> for Option<GroupValue> {
    fn from(t: Tropical) -> Self {
        match t {
            Tropical::Bottom => None,
            Tropical::Finite(g) => Some(g),
        }
    }
}

impl From<GroupValue> for Tropical {
    fn from(g: GroupValue) -> Self {
        Tropical::Finite(g)
    }
}

impl Tropical {
    /// The multiplicative unit, i.e. the group's neutral element.
    pub fn one(arity: usize) -> Self {
        Tropical::Finite(GroupValue::zero(arity))
    }

    pub fn from_integers(coords: &[i64]) -> Self {
        Tropical::Finite(GroupValue::from_integers(coords))
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Tropical::Bottom)
    }

    pub fn finite(&self) -> Option<&GroupValue> {
        match self {
            Tropical::Bottom => None,
            Tropical::Finite(g) => Some(g),
        }
    }

    pub fn arity(&self) -> Option<usize> {
        self.finite().map(GroupValue::arity)
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if let (Some(a), Some(b)) = (self.arity(), other.arity()) {
            if a != b {
                return Err(Error::ArityMismatch {
                    expected: a,
                    found: b,
                });
            }
        }
        Ok(())
    }

    /// Tropical addition `a ⊕ b = max(a, b)`.
    pub fn oplus(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        Ok(if self >= other {
            self.clone()
        } else {
            other.clone()
        })
    }

    /// Tropical multiplication: the group sum, with bottom absorbing.
    pub fn otimes(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Tropical::Finite(a), Tropical::Finite(b)) => Ok(Tropical::Finite(a.try_add(b)?)),
            _ => {
                self.check_arity(other)?;
                Ok(Tropical::Bottom)
            }
        }
    }

    /// Tropical division by a finite value.
    pub fn odiv(&self, by: &GroupValue) -> Result<Self> {
        match self {
            Tropical::Bottom => Ok(Tropical::Bottom),
            Tropical::Finite(a) => Ok(Tropical::Finite(a.try_sub(by)?)),
        }
    }

    /// `⊕` over an iterator; bottom for an empty iterator.
    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Tropical>) -> Result<Tropical> {
        items
            .into_iter()
            .try_fold(Tropical::Bottom, |acc, t| acc.oplus(t))
    }
}

impl fmt::Debug for Tropical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Tropical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tropical::Bottom => write!(f, "⊥"),
            Tropical::Finite(g) => write!(f, "{g}"),
        }
    }
}

/// A sign in `{-1, 0, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Neg => -1,
            Sign::Zero => 0,
            Sign::Pos => 1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Neg => Sign::Pos,
            Sign::Zero => Sign::Zero,
            Sign::Pos => Sign::Neg,
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        match self.as_i8() * rhs.as_i8() {
            1 => Sign::Pos,
            -1 => Sign::Neg,
            _ => Sign::Zero,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            -1 => Ok(Sign::Neg),
            0 => Ok(Sign::Zero),
            1 => Ok(Sign::Pos),
            other => Err(format!("sign must be -1, 0 or 1, got {other}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.as_i8()
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Neg => "-",
            Sign::Zero => "0",
            Sign::Pos => "+",
        })
    }
}

/// A signed tropical number: a positive copy `a` or a negative copy `⊖a` of
/// a tropical number, with the two copies of bottom identified.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SignedTropicalRepr", into = "SignedTropicalRepr")]
pub struct SignedTropical {
    sign: Sign,
    modulus: Tropical,
}

#[derive(Serialize, Deserialize)]
struct SignedTropicalRepr {
    sign: Sign,
    #[serde(rename = "mod")]
    modulus: Tropical,
}

impl TryFrom<SignedTropicalRepr> for SignedTropical {
    type Error = Error;

    fn try_from(r: SignedTropicalRepr) -> Result<Self> {
        SignedTropical::from_parts(r.sign, r.modulus)
    }
}

impl From<SignedTropical> for SignedTropicalRepr {
    fn from(s: SignedTropical) -> Self {
        SignedTropicalRepr {
            sign: s.sign,
            modulus: s.modulus,
        }
    }
}

impl SignedTropical {
    pub fn zero() -> Self {
        SignedTropical {
            sign: Sign::Zero,
            modulus: Tropical::Bottom,
        }
    }

    /// The positive copy of `t` (bottom when `t` is bottom).
    pub fn pos(t: Tropical) -> Self {
        let sign = if t.is_bottom() { Sign::Zero } else { Sign::Pos };
        SignedTropical { sign, modulus: t }
    }

    /// The negative copy `⊖t` (bottom when `t` is bottom).
    pub fn neg(t: Tropical) -> Self {
        SignedTropical::pos(t).reflect()
    }

    pub fn with_sign(sign: Sign, t: Tropical) -> Self {
        match sign {
            Sign::Zero => SignedTropical::zero(),
            Sign::Pos => SignedTropical::pos(t),
            Sign::Neg => SignedTropical::neg(t),
        }
    }

    /// Builds from explicit parts, enforcing `sign = 0 ⇔ modulus = bottom`.
    pub fn from_parts(sign: Sign, modulus: Tropical) -> Result<Self> {
        if (sign == Sign::Zero) != modulus.is_bottom() {
            return Err(Error::Parse(format!(
                "sign {sign} is inconsistent with modulus {modulus}"
            )));
        }
        Ok(SignedTropical { sign, modulus })
    }

    pub fn from_integers(sign: Sign, coords: &[i64]) -> Self {
        SignedTropical::with_sign(sign, Tropical::from_integers(coords))
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn modulus(&self) -> &Tropical {
        &self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::Zero
    }

    pub fn is_positive(&self) -> bool {
        self.sign == Sign::Pos
    }

    /// Positive and negative parts `(x⁺, x⁻)`.
    pub fn split(&self) -> (Tropical, Tropical) {
        match self.sign {
            Sign::Pos => (self.modulus.clone(), Tropical::Bottom),
            Sign::Neg => (Tropical::Bottom, self.modulus.clone()),
            Sign::Zero => (Tropical::Bottom, Tropical::Bottom),
        }
    }

    pub fn positive_part(&self) -> Tropical {
        self.split().0
    }

    pub fn negative_part(&self) -> Tropical {
        self.split().1
    }

    /// The reflection `x ↦ ⊖x`.
    pub fn reflect(&self) -> Self {
        SignedTropical {
            sign: self.sign.flip(),
            modulus: self.modulus.clone(),
        }
    }

    /// Signs multiply, moduli add.
    pub fn st_mul(&self, other: &Self) -> Result<Self> {
        let modulus = self.modulus.otimes(&other.modulus)?;
        Ok(SignedTropical::with_sign(self.sign * other.sign, modulus))
    }
}

impl fmt::Debug for SignedTropical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SignedTropical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Zero => write!(f, "⊥"),
            Sign::Pos => write!(f, "+{}", self.modulus),
            Sign::Neg => write!(f, "⊖{}", self.modulus),
        }
    }
}

/// How a point relates to one constraint row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Violated,
    SatisfiedStrict,
    Active,
}

impl RowStatus {
    pub fn is_satisfied(self) -> bool {
        self != RowStatus::Violated
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowEval {
    pub lhs: Tropical,
    pub rhs: Tropical,
    pub status: RowStatus,
}

/// The constraint `coeffs⁺ ⊙ x ⊕ constant⁺ ≥ coeffs⁻ ⊙ x ⊕ constant⁻`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedRow {
    pub coeffs: Vec<SignedTropical>,
    pub constant: SignedTropical,
}

impl SignedRow {
    pub fn new(coeffs: Vec<SignedTropical>, constant: SignedTropical) -> Self {
        SignedRow { coeffs, constant }
    }

    /// Evaluates both sides at `x`. Active means `lhs = rhs`, satisfied
    /// means `lhs ≥ rhs`.
    pub fn eval(&self, x: &[Tropical]) -> Result<RowEval> {
        if x.len() != self.coeffs.len() {
            return Err(Error::DimensionMismatch(format!(
                "row has {} coefficients but the point has {} coordinates",
                self.coeffs.len(),
                x.len()
            )));
        }
        let (mut lhs, mut rhs) = self.constant.split();
        for (a, xj) in self.coeffs.iter().zip(x) {
            let term = a.modulus().otimes(xj)?;
            match a.sign() {
                Sign::Pos => lhs = lhs.oplus(&term)?,
                Sign::Neg => rhs = rhs.oplus(&term)?,
                Sign::Zero => {}
            }
        }
        let status = match lhs.cmp(&rhs) {
            std::cmp::Ordering::Less => RowStatus::Violated,
            std::cmp::Ordering::Equal => RowStatus::Active,
            std::cmp::Ordering::Greater => RowStatus::SatisfiedStrict,
        };
        Ok(RowEval { lhs, rhs, status })
    }
}

/// Free-function form of [`SignedRow::eval`].
pub fn eval_row(row: &SignedRow, x: &[Tropical]) -> Result<RowEval> {
    row.eval(x)
}

/// Rewrites `alpha ⊙ x ⊕ alpha0 ≥ beta ⊙ x ⊕ beta0` into a signed row with at
/// most one side carrying each term. When both sides carry a finite term the
/// larger one is kept; ties keep the left (positive) side.
pub fn normalize_inequality(
    alpha: &[Tropical],
    alpha0: &Tropical,
    beta: &[Tropical],
    beta0: &Tropical,
) -> Result<SignedRow> {
    if alpha.len() != beta.len() {
        return Err(Error::DimensionMismatch(format!(
            "left side has {} terms, right side has {}",
            alpha.len(),
            beta.len()
        )));
    }
    let merge = |a: &Tropical, b: &Tropical| -> Result<SignedTropical> {
        a.check_arity(b)?;
        Ok(match (a, b) {
            (Tropical::Bottom, Tropical::Bottom) => SignedTropical::zero(),
            (_, Tropical::Bottom) => SignedTropical::pos(a.clone()),
            (Tropical::Bottom, _) => SignedTropical::neg(b.clone()),
            _ if a >= b => SignedTropical::pos(a.clone()),
            _ => SignedTropical::neg(b.clone()),
        })
    };
    let coeffs = alpha
        .iter()
        .zip(beta)
        .map(|(a, b)| merge(a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(SignedRow::new(coeffs, merge(alpha0, beta0)?))
}

/// `LP(A, b, c)`: minimize `c ⊙ x` subject to every row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TropicalLpRepr", into = "TropicalLpRepr")]
pub struct TropicalLP {
    arity: usize,
    rows: Vec<SignedRow>,
    objective: Vec<Tropical>,
}

#[derive(Serialize, Deserialize)]
struct TropicalLpRepr {
    arity: usize,
    rows: Vec<SignedRow>,
    objective: Vec<Tropical>,
}

impl TryFrom<TropicalLpRepr> for TropicalLP {
    type Error = Error;

    fn try_from(r: TropicalLpRepr) -> Result<Self> {
        TropicalLP::new(r.arity, r.rows, r.objective)
    }
}

impl From<TropicalLP> for TropicalLpRepr {
    fn from(lp: TropicalLP) -> Self {
        TropicalLpRepr {
            arity: lp.arity,
            rows: lp.rows,
            objective: lp.objective,
        }
    }
}

impl TropicalLP {
    /// Validates that every row has `objective.len()` coefficients and that
    /// all finite entries share `arity`.
    pub fn new(arity: usize, rows: Vec<SignedRow>, objective: Vec<Tropical>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Contract("group arity must be at least 1".into()));
        }
        let n = objective.len();
        let check = |t: &Tropical| match t.arity() {
            Some(a) if a != arity => Err(Error::ArityMismatch {
                expected: arity,
                found: a,
            }),
            _ => Ok(()),
        };
        for (i, row) in rows.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} coefficients, expected {n}",
                    row.coeffs.len()
                )));
            }
            for e in row.coeffs.iter().chain(std::iter::once(&row.constant)) {
                check(e.modulus())?;
            }
        }
        for c in &objective {
            check(c)?;
        }
        Ok(TropicalLP {
            arity,
            rows,
            objective,
        })
    }

    /// A pure feasibility instance (objective identically bottom).
    pub fn feasibility(arity: usize, n_vars: usize, rows: Vec<SignedRow>) -> Result<Self> {
        Self::new(arity, rows, vec![Tropical::Bottom; n_vars])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SignedRow] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &SignedRow {
        &self.rows[i]
    }

    pub fn objective(&self) -> &[Tropical] {
        &self.objective
    }

    pub fn with_objective(mut self, objective: Vec<Tropical>) -> Result<Self> {
        if objective.len() != self.n_vars() {
            return Err(Error::DimensionMismatch("objective length changed".into()));
        }
        self.objective = objective;
        Self::new(self.arity, self.rows, self.objective)
    }

    /// The coefficient matrix `A`.
    pub fn coefficient_matrix(&self) -> SignedMatrix {
        SignedMatrix::from_rows_unchecked(
            self.arity,
            self.rows.iter().map(|r| r.coeffs.clone()).collect(),
            self.n_vars(),
        )
    }

    /// The constant column `b`.
    pub fn constants(&self) -> Vec<SignedTropical> {
        self.rows.iter().map(|r| r.constant.clone()).collect()
    }

    /// The matrix `[A b; cᵀ ⊥]` whose minors drive the simplex method.
    pub fn system_matrix(&self) -> SignedMatrix {
        let mut rows: Vec<Vec<SignedTropical>> = self
            .rows
            .iter()
            .map(|r| {
                let mut v = r.coeffs.clone();
                v.push(r.constant.clone());
                v
            })
            .collect();
        let mut last: Vec<SignedTropical> = self
            .objective
            .iter()
            .cloned()
            .map(SignedTropical::pos)
            .collect();
        last.push(SignedTropical::zero());
        rows.push(last);
        SignedMatrix::from_rows_unchecked(self.arity, rows, self.n_vars() + 1)
    }

    /// Evaluates every row at `x`.
    pub fn evaluate(&self, x: &[Tropical]) -> Result<Vec<RowEval>> {
        self.rows.iter().map(|r| r.eval(x)).collect()
    }

    pub fn is_feasible(&self, x: &[Tropical]) -> Result<bool> {
        Ok(self.evaluate(x)?.iter().all(|e| e.status.is_satisfied()))
    }

    /// `c ⊙ x`.
    pub fn objective_value(&self, x: &[Tropical]) -> Result<Tropical> {
        if x.len() != self.n_vars() {
            return Err(Error::DimensionMismatch(
                "point length differs from variable count".into(),
            ));
        }
        self.objective
            .iter()
            .zip(x)
            .try_fold(Tropical::Bottom, |acc, (c, xj)| acc.oplus(&c.otimes(xj)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(v: i64) -> Tropical {
        Tropical::from_integers(&[v])
    }

    fn p(v: i64) -> SignedTropical {
        SignedTropical::pos(t(v))
    }

    fn m(v: i64) -> SignedTropical {
        SignedTropical::neg(t(v))
    }

    const B: Tropical = Tropical::Bottom;

    #[test]
    fn semiring_examples() {
        assert_eq!(t(3).oplus(&t(5)).unwrap(), t(5));
        assert_eq!(t(3).otimes(&B).unwrap(), B);
        assert_eq!(
            Tropical::from_integers(&[0, 2])
                .otimes(&Tropical::from_integers(&[-1, 1]))
                .unwrap(),
            Tropical::from_integers(&[-1, 3])
        );
        assert!(t(1).oplus(&Tropical::from_integers(&[1, 1])).is_err());
        assert!(B.otimes(&B).unwrap().is_bottom());
    }

    #[test]
    fn signed_examples() {
        assert_eq!(m(5).split(), (B, t(5)));
        let x = m(2);
        assert_eq!(x.reflect().reflect(), x);
        assert_eq!(m(2).st_mul(&m(3)).unwrap(), p(5));
        assert_eq!(SignedTropical::neg(B), SignedTropical::zero());
        assert!(SignedTropical::from_parts(Sign::Pos, B).is_err());
        assert!(SignedTropical::from_parts(Sign::Zero, t(1)).is_err());
    }

    #[test]
    fn eval_row_examples() {
        // x1 >= 1
        let row = SignedRow::new(vec![p(0), SignedTropical::zero()], m(1));
        let e = row.eval(&[t(1), t(0)]).unwrap();
        assert_eq!((e.lhs, e.rhs, e.status), (t(1), t(1), RowStatus::Active));

        // x2 <= x1
        let row = SignedRow::new(vec![p(0), m(0)], SignedTropical::zero());
        assert_eq!(row.eval(&[t(0), t(5)]).unwrap().status, RowStatus::Violated);

        // x1 <= max(x2 - 1, x3 - 2) at the all-bottom point
        let row = SignedRow::new(vec![m(0), p(-1), p(-2)], SignedTropical::zero());
        let e = row.eval(&[B, B, B]).unwrap();
        assert_eq!((e.lhs, e.rhs, e.status), (B, B, RowStatus::Active));

        assert!(row.eval(&[B]).is_err());
    }

    #[test]
    fn normalize_examples() {
        // max(1 + x1, x2) >= max(-1 + x1, 3 + x2)  ~>  1 + x1 >= 3 + x2
        let row = normalize_inequality(&[t(1), t(0)], &B, &[t(-1), t(3)], &B).unwrap();
        assert_eq!(row.coeffs, vec![p(1), m(3)]);
        assert!(row.constant.is_zero());

        let row = normalize_inequality(&[t(2)], &B, &[B], &B).unwrap();
        assert_eq!(row.coeffs, vec![p(2)]);

        let row = normalize_inequality(&[t(4)], &t(1), &[t(4)], &t(1)).unwrap();
        assert_eq!(row.coeffs, vec![p(4)]);
        assert_eq!(row.constant, p(1));
    }

    #[test]
    fn lp_validation() {
        let row = SignedRow::new(vec![p(0)], m(1));
        assert!(TropicalLP::new(1, vec![row.clone()], vec![B, B]).is_err());
        let wide = SignedRow::new(
            vec![SignedTropical::pos(Tropical::from_integers(&[0, 0]))],
            m(1),
        );
        assert!(matches!(
            TropicalLP::new(1, vec![wide], vec![B]),
            Err(Error::ArityMismatch { .. })
        ));
        let lp = TropicalLP::new(1, vec![row], vec![t(2)]).unwrap();
        assert_eq!(lp.objective_value(&[t(3)]).unwrap(), t(5));
        assert_eq!(lp.system_matrix().shape(), (2, 2));
    }

    #[test]
    fn json_forms() {
        assert_eq!(serde_json::to_string(&B).unwrap(), "null");
        assert_eq!(
            serde_json::to_string(&m(2)).unwrap(),
            r#"{"sign":-1,"mod":["2/1"]}"#
        );
        assert!(serde_json::from_str::<SignedTropical>(r#"{"sign":1,"mod":null}"#).is_err());
        assert!(serde_json::from_str::<SignedTropical>(r#"{"sign":2,"mod":["1"]}"#).is_err());
        let z: SignedTropical = serde_json::from_str(r#"{"sign":0,"mod":null}"#).unwrap();
        assert!(z.is_zero());
    }

    fn arb_trop() -> impl Strategy<Value = Tropical> {
        prop_oneof![1 => Just(Tropical::Bottom), 4 => (-5i64..5).prop_map(t)]
    }

    fn arb_signed() -> impl Strategy<Value = SignedTropical> {
        (arb_trop(), any::<bool>()).prop_map(|(v, s)| {
            if s {
                SignedTropical::pos(v)
            } else {
                SignedTropical::neg(v)
            }
        })
    }

    proptest! {
        #[test]
        fn semiring_axioms(a in arb_trop(), b in arb_trop(), c in arb_trop()) {
            let add = |x: &Tropical, y: &Tropical| x.oplus(y).unwrap();
            let mul = |x: &Tropical, y: &Tropical| x.otimes(y).unwrap();
            prop_assert_eq!(add(&add(&a, &b), &c), add(&a, &add(&b, &c)));
            prop_assert_eq!(mul(&mul(&a, &b), &c), mul(&a, &mul(&b, &c)));
            prop_assert_eq!(add(&a, &b), add(&b, &a));
            prop_assert_eq!(mul(&a, &b), mul(&b, &a));
            prop_assert_eq!(mul(&a, &add(&b, &c)), add(&mul(&a, &b), &mul(&a, &c)));
            prop_assert_eq!(add(&B, &a), a.clone());
            prop_assert_eq!(mul(&B, &a), B);
            prop_assert_eq!(mul(&Tropical::one(1), &a), a);
        }

        #[test]
        fn split_recovers_modulus(x in arb_signed()) {
            let (pos, neg) = x.split();
            prop_assert_eq!(&pos.oplus(&neg).unwrap(), x.modulus());
            prop_assert_eq!(x.is_zero(), x.modulus().is_bottom());
        }
    }
}
