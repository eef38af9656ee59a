//! Symbolic perturbation of an arbitrary tropical linear program over the
//! reals into a bounded, tropically generic one.
//!
//! Two layers are added. First every entry is lifted from `T(R)` into
//! `T(R^2)`, where the leading coordinate is a "layer": finite data sits in
//! layer 0, while the lower bounds `l` and the offsets `d` sit in distinct
//! negative layers standing for infinitely small values. Then every entry of
//! the block matrix
//!
//! ```text
//!   [  A      b ⊕ d ]
//!   [ ⊖e      u     ]
//!   [  Id    ⊖l     ]
//!   [  cᵀ     ⊥     ]
//! ```
//!
//! receives an infinitesimal tail in `H = R^(n+1)` from the matrix `E` with
//! `E[i][j] = i·δ^j` (1-based), which makes it tropically generic. The
//! resulting group has arity `n + 3`.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::group::GroupValue;
use crate::linalg::SignedMatrix;
use crate::tropical::{Sign, SignedRow, SignedTropical, Tropical, TropicalLP};

/// The extra coefficients `u`, `d`, `l` and the perturbation matrix `E` for
/// an instance with `m` constraints and `n` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbationContext {
    m: usize,
    n: usize,
    u: GroupValue,
    d: Vec<GroupValue>,
    l: Vec<GroupValue>,
    e: Vec<Vec<GroupValue>>,
}

impl PerturbationContext {
    /// `d_i = (-i, 0)`, `l_j = (-(j+m+1), 0)`, `l_{n+1} = (-(m+1), 0)` and
    /// `u = (0, u0)`, all 1-based.
    pub fn new(m: usize, n: usize, u0: BigRational) -> Self {
        let layer = |k: usize| {
            GroupValue::new(vec![
                -BigRational::from_integer(k.into()),
                BigRational::zero(),
            ])
        };
        let d = (1..=m).map(layer).collect();
        let mut l: Vec<GroupValue> = (1..=n).map(|j| layer(j + m + 1)).collect();
        l.push(layer(m + 1));
        let e = (1..=m + n + 2)
            .map(|i| {
                (0..=n)
                    .map(|j| {
                        let mut coords = vec![BigRational::zero(); n + 1];
                        coords[j] = BigRational::from_integer(i.into());
                        GroupValue::new(coords)
                    })
                    .collect()
            })
            .collect();
        PerturbationContext {
            m,
            n,
            u: GroupValue::new(vec![BigRational::zero(), u0]),
            d,
            l,
            e,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Arity of the fully perturbed group `R^2 x H`.
    pub fn arity(&self) -> usize {
        self.n + 3
    }

    pub fn u(&self) -> &GroupValue {
        &self.u
    }

    pub fn d(&self) -> &[GroupValue] {
        &self.d
    }

    /// `l_1 .. l_n` followed by `l_{n+1}`.
    pub fn l(&self) -> &[GroupValue] {
        &self.l
    }

    pub fn e(&self) -> &[Vec<GroupValue>] {
        &self.e
    }

    /// `0_H`.
    pub fn h_zero(&self) -> GroupValue {
        GroupValue::zero(self.n + 1)
    }

    /// A layered value with zero tail, `(v, 0_H)`.
    pub fn untailed(&self, v: &GroupValue) -> GroupValue {
        v.concat(&self.h_zero())
    }
}

/// `2n · max(|A_ij|, |b_i|)` over finite entries, using the classical
/// absolute value of each coordinate. Zero when every entry is bottom.
pub fn bound_u(a: &SignedMatrix, b: &[SignedTropical]) -> BigRational {
    let (rows, n) = a.shape();
    let entries = (0..rows).flat_map(|i| a.row(i).iter()).chain(b.iter());
    let max = entries
        .filter_map(|e| e.modulus().finite())
        .map(GroupValue::max_abs)
        .max()
        .unwrap_or_else(BigRational::zero);
    max * BigRational::from_integer((2 * n).into())
}

/// Moves an arity-1 value into layer 0: `β ↦ (0, β)`, keeping the sign.
pub fn lift_to_layers(x: &SignedTropical) -> Result<SignedTropical> {
    match x.modulus() {
        Tropical::Bottom => Ok(SignedTropical::zero()),
        Tropical::Finite(g) => {
            if g.arity() != 1 {
                return Err(Error::ArityMismatch {
                    expected: 1,
                    found: g.arity(),
                });
            }
            Ok(SignedTropical::with_sign(
                x.sign(),
                Tropical::Finite(g.embed(2, 1)?),
            ))
        }
    }
}

/// `M[E]`: positive entries gain the tail `ε_ij`, negative ones `-ε_ij`.
pub fn apply_perturbation(m: &SignedMatrix, e: &[Vec<GroupValue>]) -> Result<SignedMatrix> {
    let (rows, cols) = m.shape();
    if e.len() != rows || e.iter().any(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch(format!(
            "perturbation block does not match the {rows}x{cols} matrix"
        )));
    }
    let tail_arity = e
        .first()
        .and_then(|r| r.first())
        .map_or(0, GroupValue::arity);
    let out = (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    let entry = m.get(i, j);
                    let eps = &e[i][j];
                    Ok(match (entry.sign(), entry.modulus()) {
                        (Sign::Pos, Tropical::Finite(g)) => {
                            SignedTropical::pos(g.concat(eps).into())
                        }
                        (Sign::Neg, Tropical::Finite(g)) => {
                            SignedTropical::neg(g.concat(&-eps).into())
                        }
                        _ => SignedTropical::zero(),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SignedMatrix::new(m.arity() + tail_arity, out)
}

/// The perturbed problem together with the intermediate artifacts.
#[derive(Debug, Clone)]
pub struct PerturbedProblem {
    pub context: PerturbationContext,
    /// The `(m+n+2) x (n+1)` block matrix over `T(R^2)`.
    pub layered_block: SignedMatrix,
    /// The same block after applying `E`, over `T(R^2 x H)`.
    pub block: SignedMatrix,
    /// `b_i` was finite in the input.
    pub has_constant: Vec<bool>,
    /// The perturbed program: `m` original rows, the `u` row, `n` box rows.
    pub lp_tilde: TropicalLP,
}

impl PerturbedProblem {
    pub fn m(&self) -> usize {
        self.context.m
    }

    pub fn n(&self) -> usize {
        self.context.n
    }

    /// Index of the row `u ≥ e ⊙ x` in `lp_tilde`.
    pub fn upper_bound_row(&self) -> usize {
        self.m()
    }

    /// Index of the box row `x_j ≥ l_j` (0-based `j`) in `lp_tilde`.
    pub fn lower_bound_row(&self, j: usize) -> usize {
        self.m() + 1 + j
    }

    /// The lift of a point of the original program: finite `x_j` becomes
    /// `((0, x_j), 0_H)` and bottom becomes `(l_j, 0_H)`.
    pub fn lift_point(&self, x: &[Tropical]) -> Result<Vec<Tropical>> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch(
                "point length differs from variable count".into(),
            ));
        }
        x.iter()
            .zip(&self.context.l)
            .map(|(xj, lj)| {
                let layered = match xj {
                    Tropical::Bottom => lj.clone(),
                    Tropical::Finite(g) if g.arity() == 1 => g.embed(2, 1)?,
                    Tropical::Finite(g) => {
                        return Err(Error::ArityMismatch {
                            expected: 1,
                            found: g.arity(),
                        })
                    }
                };
                Ok(Tropical::Finite(self.context.untailed(&layered)))
            })
            .collect()
    }
}

/// Builds the perturbed program from an arbitrary arity-1 program.
pub fn build_lp_tilde(lp: &TropicalLP) -> Result<PerturbedProblem> {
    if lp.arity() != 1 {
        return Err(Error::ArityMismatch {
            expected: 1,
            found: lp.arity(),
        });
    }
    let (m, n) = (lp.n_rows(), lp.n_vars());
    let a = lp.coefficient_matrix();
    let b = lp.constants();
    let ctx = PerturbationContext::new(m, n, bound_u(&a, &b));
    let one2 = Tropical::one(2);

    let mut rows: Vec<Vec<SignedTropical>> = Vec::with_capacity(m + n + 2);
    for (i, row) in lp.rows().iter().enumerate() {
        let mut r = row
            .coeffs
            .iter()
            .map(lift_to_layers)
            .collect::<Result<Vec<_>>>()?;
        r.push(if row.constant.is_zero() {
            SignedTropical::pos(ctx.d[i].clone().into())
        } else {
            lift_to_layers(&row.constant)?
        });
        rows.push(r);
    }
    let mut u_row = vec![SignedTropical::neg(one2.clone()); n];
    u_row.push(SignedTropical::pos(ctx.u.clone().into()));
    rows.push(u_row);
    for j in 0..n {
        let mut r = vec![SignedTropical::zero(); n + 1];
        r[j] = SignedTropical::pos(one2.clone());
        r[n] = SignedTropical::neg(ctx.l[j].clone().into());
        rows.push(r);
    }
    let mut c_row = lp
        .objective()
        .iter()
        .map(|c| lift_to_layers(&SignedTropical::pos(c.clone())))
        .collect::<Result<Vec<_>>>()?;
    c_row.push(SignedTropical::zero());
    rows.push(c_row);

    let layered_block = SignedMatrix::new(2, rows)?;
    let block = apply_perturbation(&layered_block, &ctx.e)?;

    let constraint_rows = (0..m + n + 1)
        .map(|i| {
            let r = block.row(i);
            SignedRow::new(r[..n].to_vec(), r[n].clone())
        })
        .collect();
    let objective = block.row(m + n + 1)[..n]
        .iter()
        .map(|c| c.modulus().clone())
        .collect();
    let lp_tilde = TropicalLP::new(ctx.arity(), constraint_rows, objective)?;

    Ok(PerturbedProblem {
        has_constant: lp.rows().iter().map(|r| !r.constant.is_zero()).collect(),
        context: ctx,
        layered_block,
        block,
        lp_tilde,
    })
}

/// The homogenized auxiliary problem: maximize `t` over `(x, t)`.
#[derive(Debug, Clone)]
pub struct PhaseOne {
    /// Variables `x_1..x_n, t`; objective `t` with coefficient `𝟙`.
    pub lp: TropicalLP,
    /// The `n` box rows and the row `t ≥ l_{n+1}`.
    pub initial_basis: Vec<usize>,
    /// Index of the row `𝟙 ≥ t`.
    pub t_upper_row: usize,
    /// Index of the row `t ≥ l_{n+1}`.
    pub t_lower_row: usize,
}

/// Builds the Phase I problem. Rows, in order: the `m` homogenized rows
/// `A⁺x ⊕ b⁺t ⊕ d ≥ A⁻x ⊕ b⁻t`, then `u ⊙ t ≥ e ⊙ x`, the `n` box rows,
/// `𝟙 ≥ t` and `t ≥ l_{n+1}`.
pub fn build_phase_one(p: &PerturbedProblem) -> Result<PhaseOne> {
    let (m, n) = (p.m(), p.n());
    let ctx = &p.context;
    let arity = ctx.arity();
    let block = &p.block;

    let mut rows = Vec::with_capacity(m + n + 3);
    for i in 0..m {
        let r = block.row(i);
        let mut coeffs = r[..n].to_vec();
        let constant = if p.has_constant[i] {
            coeffs.push(r[n].clone());
            SignedTropical::pos(ctx.untailed(&ctx.d[i]).into())
        } else {
            coeffs.push(SignedTropical::zero());
            r[n].clone()
        };
        rows.push(SignedRow::new(coeffs, constant));
    }
    let r = block.row(m);
    rows.push(SignedRow::new(r.to_vec(), SignedTropical::zero()));
    for j in 0..n {
        let r = block.row(m + 1 + j);
        let mut coeffs = r[..n].to_vec();
        coeffs.push(SignedTropical::zero());
        rows.push(SignedRow::new(coeffs, r[n].clone()));
    }
    let t_only = |s: SignedTropical| {
        let mut v = vec![SignedTropical::zero(); n + 1];
        v[n] = s;
        v
    };
    let one = Tropical::one(arity);
    rows.push(SignedRow::new(
        t_only(SignedTropical::neg(one.clone())),
        SignedTropical::pos(one.clone()),
    ));
    rows.push(SignedRow::new(
        t_only(SignedTropical::pos(one.clone())),
        SignedTropical::neg(ctx.untailed(&ctx.l[n]).into()),
    ));

    let mut objective = vec![Tropical::Bottom; n + 1];
    objective[n] = one;
    let lp = TropicalLP::new(arity, rows, objective)?;

    let t_upper_row = m + n + 1;
    let t_lower_row = m + n + 2;
    let mut initial_basis: Vec<usize> = (0..n).map(|j| p.lower_bound_row(j)).collect();
    initial_basis.push(t_lower_row);
    Ok(PhaseOne {
        lp,
        initial_basis,
        t_upper_row,
        t_lower_row,
    })
}

/// `ρ ∘ π` on one value: drop the `H` tail, then `(0, β) ↦ β` and
/// `(α < 0, β) ↦ ⊥`.
pub fn project_value(x: &Tropical) -> Result<Tropical> {
    let Some(g) = x.finite() else {
        return Ok(Tropical::Bottom);
    };
    if g.arity() < 2 {
        return Err(Error::ArityMismatch {
            expected: 2,
            found: g.arity(),
        });
    }
    let layer = g.coord(0);
    if layer.is_positive() {
        return Err(Error::Contract(format!(
            "cannot project {g}: positive layer"
        )));
    }
    if layer.is_zero() {
        Ok(Tropical::Finite(GroupValue::scalar(g.coord(1).clone())))
    } else {
        Ok(Tropical::Bottom)
    }
}

/// `ρ ∘ π` applied entry-wise.
pub fn project_rho_pi(x: &[Tropical]) -> Result<Vec<Tropical>> {
    x.iter().map(project_value).collect()
}
