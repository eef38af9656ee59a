//! Mean payoff games.
//!
//! A game is given by two `m × n` payment matrices over `T(R)`. From a Max
//! state `j` Min picks `i` with `A_ij` finite and receives `A_ij`; Max then
//! picks `j'` with `B_ij'` finite and receives `B_ij'`. State `j` is winning
//! for Max when the long-run average payoff from `j` is nonnegative, which
//! holds exactly when the feasibility problem
//!
//! ```text
//!   x_j ≥ 0,   A ⊙ x ≤ B ⊙ x
//! ```
//!
//! has a solution. [`winning_states`] decides this with the simplex
//! pipeline; [`value_iteration_oracle`] computes the values independently.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{format_rational, parse_rational, GroupValue};
use crate::simplex::{solve_general, PivotRule, RunOptions, Solution};
use crate::tropical::{normalize_inequality, SignedRow, SignedTropical, Tropical, TropicalLP};

/// Upper bound on `k* · m · n` for the value-iteration oracle.
pub const ORACLE_WORK_LIMIT: u128 = 10_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeanPayoffGame {
    a: Vec<Vec<Tropical>>,
    b: Vec<Vec<Tropical>>,
}

#[derive(Serialize, Deserialize)]
struct GameRepr {
    #[serde(rename = "A")]
    a: Vec<Vec<Option<String>>>,
    #[serde(rename = "B")]
    b: Vec<Vec<Option<String>>>,
}

fn parse_matrix(rows: &[Vec<Option<String>>]) -> Result<Vec<Vec<Tropical>>> {
    rows.iter()
        .map(|row| {
            row.iter()
                .map(|e| match e {
                    None => Ok(Tropical::Bottom),
                    Some(s) => Ok(Tropical::Finite(GroupValue::scalar(parse_rational(s)?))),
                })
                .collect()
        })
        .collect()
}

fn format_matrix(rows: &[Vec<Tropical>]) -> Vec<Vec<Option<String>>> {
    rows.iter()
        .map(|row| {
            row.iter()
                .map(|e| e.finite().map(|g| format_rational(g.coord(0))))
                .collect()
        })
        .collect()
}

impl Serialize for MeanPayoffGame {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GameRepr {
            a: format_matrix(&self.a),
            b: format_matrix(&self.b),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MeanPayoffGame {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GameRepr::deserialize(d)?;
        let a = parse_matrix(&repr.a).map_err(serde::de::Error::custom)?;
        let b = parse_matrix(&repr.b).map_err(serde::de::Error::custom)?;
        MeanPayoffGame::new(a, b).map_err(serde::de::Error::custom)
    }
}

impl MeanPayoffGame {
    /// Validates shapes, arity 1 entries, that `A` has no all-bottom column
    /// and that `B` has no all-bottom row.
    pub fn new(a: Vec<Vec<Tropical>>, b: Vec<Vec<Tropical>>) -> Result<Self> {
        let m = a.len();
        if m == 0 || b.len() != m {
            return Err(Error::InvalidGame(format!(
                "A has {m} rows, B has {}",
                b.len()
            )));
        }
        let n = a[0].len();
        if n == 0 {
            return Err(Error::InvalidGame("no Max states".into()));
        }
        for row in a.iter().chain(&b) {
            if row.len() != n {
                return Err(Error::InvalidGame("ragged payment matrix".into()));
            }
            if let Some(k) = row.iter().filter_map(Tropical::arity).find(|&k| k != 1) {
                return Err(Error::ArityMismatch {
                    expected: 1,
                    found: k,
                });
            }
        }
        if let Some(j) = (0..n).find(|&j| a.iter().all(|row| row[j].is_bottom())) {
            return Err(Error::InvalidGame(format!(
                "column {} of A is identically bottom",
                j + 1
            )));
        }
        if let Some(i) = b.iter().position(|row| row.iter().all(Tropical::is_bottom)) {
            return Err(Error::InvalidGame(format!(
                "row {} of B is identically bottom",
                i + 1
            )));
        }
        Ok(MeanPayoffGame { a, b })
    }

    /// Builds a game from integer payments, `None` standing for bottom.
    pub fn from_integers(a: &[Vec<Option<i64>>], b: &[Vec<Option<i64>>]) -> Result<Self> {
        let conv = |rows: &[Vec<Option<i64>>]| -> Vec<Vec<Tropical>> {
            rows.iter()
                .map(|row| {
                    row.iter()
                        .map(|e| e.map_or(Tropical::Bottom, |v| Tropical::from_integers(&[v])))
                        .collect()
                })
                .collect()
        };
        MeanPayoffGame::new(conv(a), conv(b))
    }

    pub fn a(&self) -> &[Vec<Tropical>] {
        &self.a
    }

    pub fn b(&self) -> &[Vec<Tropical>] {
        &self.b
    }

    /// Number of Min states.
    pub fn m(&self) -> usize {
        self.a.len()
    }

    /// Number of Max states.
    pub fn n(&self) -> usize {
        self.a[0].len()
    }

    /// The same game with every finite payment multiplied by `factor > 0`.
    pub fn scaled(&self, factor: &BigRational) -> Result<Self> {
        if !factor.is_positive() {
            return Err(Error::InvalidGame("scaling factor must be positive".into()));
        }
        let scale = |rows: &[Vec<Tropical>]| -> Vec<Vec<Tropical>> {
            rows.iter()
                .map(|row| {
                    row.iter()
                        .map(|e| match e {
                            Tropical::Bottom => Tropical::Bottom,
                            Tropical::Finite(g) => Tropical::Finite(g.scale(factor)),
                        })
                        .collect()
                })
                .collect()
        };
        MeanPayoffGame::new(scale(&self.a), scale(&self.b))
    }
}

/// The feasibility problem deciding whether state `j_bar` (0-based) is
/// winning: `B_i x ≥ A_i x` for every `i`, normalized, plus `x_j_bar ≥ 0`.
pub fn to_feasibility(game: &MeanPayoffGame, j_bar: usize) -> Result<TropicalLP> {
    let n = game.n();
    if j_bar >= n {
        return Err(Error::DimensionMismatch(format!(
            "state {j_bar} out of range for {n} states"
        )));
    }
    let mut rows = game
        .b
        .iter()
        .zip(&game.a)
        .map(|(b, a)| normalize_inequality(b, &Tropical::Bottom, a, &Tropical::Bottom))
        .collect::<Result<Vec<_>>>()?;
    let mut coeffs = vec![SignedTropical::zero(); n];
    coeffs[j_bar] = SignedTropical::pos(Tropical::one(1));
    rows.push(SignedRow::new(
        coeffs,
        SignedTropical::neg(Tropical::one(1)),
    ));
    TropicalLP::feasibility(1, n, rows)
}

/// The outcome of the pipeline for one initial state.
#[derive(Debug, Clone)]
pub struct StateReport {
    /// 0-based state index.
    pub state: usize,
    pub winning: bool,
    /// The projected solver point when the state is winning.
    pub certificate: Option<Vec<Tropical>>,
    pub solution: Solution,
}

/// Runs the simplex pipeline on every initial state.
pub fn solve_states(
    game: &MeanPayoffGame,
    rule: &dyn PivotRule,
    options: RunOptions,
) -> Result<Vec<StateReport>> {
    (0..game.n())
        .into_par_iter()
        .map(|j| {
            let lp = to_feasibility(game, j)?;
            let solution = solve_general(&lp, rule, options)?;
            let certificate = solution.status.point().map(<[Tropical]>::to_vec);
            Ok(StateReport {
                state: j,
                winning: certificate.is_some(),
                certificate,
                solution,
            })
        })
        .collect()
}

/// The 0-based winning states for Max, decided by the simplex pipeline with
/// Bland's rule.
pub fn winning_states(game: &MeanPayoffGame) -> Result<Vec<usize>> {
    Ok(
        solve_states(game, &crate::simplex::Bland, RunOptions::default())?
            .into_iter()
            .filter(|r| r.winning)
            .map(|r| r.state)
            .collect(),
    )
}

/// Values computed by value iteration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GameValues {
    /// Value per initial state, in the units of the input payments.
    #[serde(serialize_with = "serialize_rationals")]
    pub chi: Vec<BigRational>,
    /// 0-based winning states.
    pub winning: Vec<usize>,
    /// The factor clearing all denominators of the payments.
    #[serde(serialize_with = "serialize_rational")]
    pub scale: BigRational,
    /// Number of operator applications.
    pub iterations: u64,
}

fn serialize_rational<S: Serializer>(
    r: &BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

fn serialize_rationals<S: Serializer>(
    v: &[BigRational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

/// An integer game: payments cleared of denominators.
struct IntegerGame {
    a: Vec<Vec<Option<i128>>>,
    b: Vec<Vec<Option<i128>>>,
    scale: BigInt,
    w: i128,
}

fn to_integer_game(game: &MeanPayoffGame) -> Result<IntegerGame> {
    let finite = || {
        game.a
            .iter()
            .chain(&game.b)
            .flatten()
            .filter_map(|e| e.finite())
    };
    let scale = finite().fold(BigInt::one(), |acc, g| acc.lcm(g.coord(0).denom()));
    let scale_r = BigRational::from_integer(scale.clone());
    let mut w = 0i128;
    let mut conv = |rows: &[Vec<Tropical>]| -> Result<Vec<Vec<Option<i128>>>> {
        rows.iter()
            .map(|row| {
                row.iter()
                    .map(|e| match e.finite() {
                        None => Ok(None),
                        Some(g) => {
                            let v = (g.coord(0) * &scale_r).to_integer();
                            let v = v.to_i128().ok_or_else(|| {
                                Error::SizeGuard("scaled payment exceeds 128 bits".into())
                            })?;
                            w = w.max(v.abs());
                            Ok(Some(v))
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let a = conv(&game.a)?;
    let b = conv(&game.b)?;
    Ok(IntegerGame { a, b, scale, w })
}

/// One application of the dynamic-programming operator
/// `F(x)_j = min_i (−A_ij + max_j' (B_ij' + x_j'))`.
pub fn apply_operator(a: &[Vec<Option<i128>>], b: &[Vec<Option<i128>>], x: &[i128]) -> Vec<i128> {
    let inner: Vec<i128> = b
        .iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .filter_map(|(e, xj)| e.map(|v| v + xj))
                .max()
                .expect("B has no bottom row")
        })
        .collect();
    (0..x.len())
        .map(|j| {
            a.iter()
                .zip(&inner)
                .filter_map(|(row, y)| row[j].map(|v| y - v))
                .min()
                .expect("A has no bottom column")
        })
        .collect()
}

/// The nearest rational with denominator at most `n` to `num / den`.
fn nearest_small_fraction(num: i128, den: i128, n: usize) -> BigRational {
    let target = BigRational::new(BigInt::from(num), BigInt::from(den));
    let mut best: Option<(BigRational, BigRational)> = None;
    for q in 1..=n {
        let q = BigInt::from(q);
        let p = (&target * BigRational::from_integer(q.clone()))
            .round()
            .to_integer();
        let cand = BigRational::new(p, q);
        let dist = (&cand - &target).abs();
        if best.as_ref().is_none_or(|(_, d)| dist < *d) {
            best = Some((cand, dist));
        }
    }
    best.expect("n >= 1").0
}

/// Value iteration from `x = 0` for `k* = 4n²(n+m)W + 1` rounds on the
/// integer-scaled game (`k* = 1` when all payments vanish). A state is
/// winning iff `F^k*(0)_j / k* > −1/(2n)`.
pub fn value_iteration_oracle(game: &MeanPayoffGame) -> Result<GameValues> {
    let (m, n) = (game.m(), game.n());
    let ig = to_integer_game(game)?;
    let (nn, mm) = (n as u128, m as u128);
    let k_star = (4 * nn * nn * (nn + mm))
        .checked_mul(ig.w as u128)
        .and_then(|v| v.checked_add(1))
        .ok_or_else(|| Error::SizeGuard("iteration count overflows".into()))?;
    if k_star.saturating_mul(mm * nn) > ORACLE_WORK_LIMIT {
        return Err(Error::SizeGuard(format!(
            "value iteration would need {k_star} rounds"
        )));
    }
    let mut x = vec![0i128; n];
    for _ in 0..k_star {
        x = apply_operator(&ig.a, &ig.b, &x);
    }
    let k = k_star as i128;
    let scale = BigRational::from_integer(ig.scale);
    let chi = x
        .iter()
        .map(|&f| nearest_small_fraction(f, k, n) / &scale)
        .collect();
    let winning = (0..n).filter(|&j| 2 * (n as i128) * x[j] > -k).collect();
    Ok(GameValues {
        chi,
        winning,
        scale,
        iterations: k_star as u64,
    })
}

/// Samples a valid `m × n` game with integer payments in `[-w, w]`; each
/// entry is bottom with probability `bottom_density`. Invalid draws are
/// rejected and redrawn.
pub fn random_game<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    n: usize,
    w: i64,
    bottom_density: f64,
) -> MeanPayoffGame {
    assert!(m > 0 && n > 0 && w >= 0 && bottom_density < 1.0);
    loop {
        let mut draw = || -> Vec<Vec<Option<i64>>> {
            (0..m)
                .map(|_| {
                    (0..n)
                        .map(|_| (!rng.gen_bool(bottom_density)).then(|| rng.gen_range(-w..=w)))
                        .collect()
                })
                .collect()
        };
        let a = draw();
        let b = draw();
        if let Ok(game) = MeanPayoffGame::from_integers(&a, &b) {
            return game;
        }
    }
}
