//! The tropical simplex method.
//!
//! On a bounded, tropically generic program every basis `I` (a set of
//! `n` rows whose coefficient submatrix is tropically non-singular) has a
//! basic point given by tropical Cramer formulas, and its reduced costs are
//! the Cramer solution of the transposed system against the objective.
//! Pivoting along the edge `I \ {i}` is done by testing every candidate
//! `I \ {i} ∪ {k}`: an edge of a bounded non-degenerate polyhedron has
//! exactly two endpoints, so exactly one candidate other than `I` is a
//! feasible basis.
//!
//! [`solve_general`] chains Phase I and Phase II on the perturbed problems
//! from [`crate::perturbation`] and handles arbitrary programs.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{tropical_cramer, tropical_permanent, MinorOracle, SignedMatrix};
use crate::perturbation::{
    build_lp_tilde, build_phase_one, project_rho_pi, PerturbedProblem, PhaseOne,
};
use crate::tropical::{RowStatus, Sign, SignedTropical, Tropical, TropicalLP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Minimize,
    Maximize,
}

impl Direction {
    /// The reduced-cost sign that marks an improving edge.
    pub fn improving_sign(self) -> Sign {
        match self {
            Direction::Minimize => Sign::Neg,
            Direction::Maximize => Sign::Pos,
        }
    }
}

/// A sorted set of constraint-row indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Basis(Vec<usize>);

impl Basis {
    pub fn new(mut rows: Vec<usize>) -> Result<Self> {
        rows.sort_unstable();
        let len = rows.len();
        rows.dedup();
        if rows.len() != len {
            return Err(Error::Contract("basis rows must be distinct".into()));
        }
        Ok(Basis(rows))
    }

    pub fn rows(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, row: usize) -> bool {
        self.0.binary_search(&row).is_ok()
    }

    /// `self \ {leaving} ∪ {entering}`.
    pub fn exchange(&self, leaving: usize, entering: usize) -> Basis {
        let mut rows: Vec<usize> = self.0.iter().copied().filter(|&r| r != leaving).collect();
        rows.push(entering);
        rows.sort_unstable();
        Basis(rows)
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", rows.join(","))
    }
}

fn check_basis_size(lp: &TropicalLP, rows: &[usize]) -> Result<()> {
    if rows.len() != lp.n_vars() {
        return Err(Error::DimensionMismatch(format!(
            "a basis needs {} rows, got {}",
            lp.n_vars(),
            rows.len()
        )));
    }
    if let Some(&r) = rows.iter().find(|&&r| r >= lp.n_rows()) {
        return Err(Error::DimensionMismatch(format!("row {r} out of range")));
    }
    Ok(())
}

/// The signed Cramer solution of the basis rows `A_I x + b_I = 0`. Callers
/// check positivity and feasibility separately.
pub fn basic_point(lp: &TropicalLP, basis: &Basis) -> Result<Vec<SignedTropical>> {
    check_basis_size(lp, basis.rows())?;
    let a = lp.coefficient_matrix().select_rows(basis.rows())?;
    let b: Vec<SignedTropical> = basis
        .rows()
        .iter()
        .map(|&i| lp.row(i).constant.clone())
        .collect();
    tropical_cramer(&a, &b)
}

/// What a candidate row set turned out to be.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisStatus {
    /// `tper A_I` is bottom.
    Singular,
    /// Non-singular, but the activating point leaves the open orthant or
    /// violates a row.
    Infeasible,
    /// A feasible basis with its basic point.
    Feasible(Vec<Tropical>),
}

/// Classifies a row set. Finite but non-unique permanents, and feasible
/// points activating rows outside the basis, are reported as degeneracy
/// errors since they cannot occur in a generic program.
pub fn classify_basis(lp: &TropicalLP, rows: &[usize]) -> Result<BasisStatus> {
    check_basis_size(lp, rows)?;
    let a = lp.coefficient_matrix().select_rows(rows)?;
    let det = tropical_permanent(&a)?;
    if det.value.is_bottom() {
        return Ok(BasisStatus::Singular);
    }
    if !det.unique {
        return Err(Error::Degenerate(format!(
            "basis {rows:?} has several optimal permutations"
        )));
    }
    let b: Vec<SignedTropical> = rows.iter().map(|&i| lp.row(i).constant.clone()).collect();
    let x = tropical_cramer(&a, &b)?;
    if !x.iter().all(SignedTropical::is_positive) {
        return Ok(BasisStatus::Infeasible);
    }
    let point: Vec<Tropical> = x.into_iter().map(|s| s.modulus().clone()).collect();
    for (i, eval) in lp.evaluate(&point)?.into_iter().enumerate() {
        let in_basis = rows.contains(&i);
        match eval.status {
            RowStatus::Violated => return Ok(BasisStatus::Infeasible),
            RowStatus::Active if !in_basis => {
                return Err(Error::Degenerate(format!(
                    "basic point of {rows:?} also activates row {i}"
                )))
            }
            RowStatus::SatisfiedStrict if in_basis => {
                return Err(Error::Contract(format!(
                    "basis row {i} is not active at its basic point"
                )))
            }
            _ => {}
        }
    }
    Ok(BasisStatus::Feasible(point))
}

/// Reduced costs of a basis: the solution `y` of `A_Iᵀ y = c`, indexed by
/// basis row. For minimization a negative entry marks an improving edge,
/// for maximization a positive one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedCosts {
    entries: BTreeMap<usize, SignedTropical>,
}

impl ReducedCosts {
    pub fn get(&self, row: usize) -> Option<&SignedTropical> {
        self.entries.get(&row)
    }

    pub fn entries(&self) -> &BTreeMap<usize, SignedTropical> {
        &self.entries
    }

    pub fn signs(&self) -> BTreeMap<usize, Sign> {
        self.entries.iter().map(|(&k, v)| (k, v.sign())).collect()
    }

    /// No entry has the improving sign for `direction`.
    pub fn certifies_optimality(&self, direction: Direction) -> bool {
        self.entries
            .values()
            .all(|v| v.sign() != direction.improving_sign())
    }
}

pub fn reduced_costs(lp: &TropicalLP, basis: &Basis) -> Result<ReducedCosts> {
    check_basis_size(lp, basis.rows())?;
    let at = lp
        .coefficient_matrix()
        .select_rows(basis.rows())?
        .transpose();
    let minus_c: Vec<SignedTropical> = lp
        .objective()
        .iter()
        .map(|c| SignedTropical::neg(c.clone()))
        .collect();
    let y = tropical_cramer(&at, &minus_c)?;
    Ok(ReducedCosts {
        entries: basis.rows().iter().copied().zip(y).collect(),
    })
}

fn pivot_with_point(
    lp: &TropicalLP,
    basis: &Basis,
    leaving: usize,
) -> Result<(Basis, usize, Vec<Tropical>)> {
    if !basis.contains(leaving) {
        return Err(Error::Contract(format!(
            "row {leaving} is not in basis {basis}"
        )));
    }
    let mut found = Vec::new();
    for k in (0..lp.n_rows()).filter(|&k| !basis.contains(k)) {
        let candidate = basis.exchange(leaving, k);
        if let BasisStatus::Feasible(point) = classify_basis(lp, candidate.rows())? {
            found.push((candidate, k, point));
        }
    }
    match found.len() {
        1 => Ok(found.pop().expect("one candidate")),
        0 => Err(Error::NoPivotCandidate { leaving }),
        count => Err(Error::MultiplePivotCandidates { leaving, count }),
    }
}

/// Moves from `basis` along the edge `basis \ {leaving}` to its other
/// endpoint.
pub fn pivot(lp: &TropicalLP, basis: &Basis, leaving: usize) -> Result<Basis> {
    pivot_with_point(lp, basis, leaving).map(|(b, _, _)| b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotDecision {
    Leave(usize),
    Optimal,
}

/// What a pivoting strategy is allowed to see: the run history, the signs
/// of the current reduced costs and signs of tropical minors of
/// `[A b; cᵀ ⊥]`. Moduli are deliberately out of reach.
pub struct PivotView<'a> {
    pub history: &'a [Basis],
    pub reduced_cost_signs: &'a BTreeMap<usize, Sign>,
    pub direction: Direction,
    pub oracle: &'a dyn MinorOracle,
}

/// A combinatorial pivoting strategy choosing the leaving row.
pub trait PivotRule: Send + Sync {
    fn name(&self) -> &'static str;

    fn choose(&self, view: &PivotView<'_>) -> Result<PivotDecision>;
}

/// Bland's rule: the smallest basis row whose reduced cost is improving.
pub fn bland_rule(
    _history: &[Basis],
    reduced_cost_signs: &BTreeMap<usize, Sign>,
    direction: Direction,
) -> PivotDecision {
    let improving = direction.improving_sign();
    reduced_cost_signs
        .iter()
        .find(|(_, &s)| s == improving)
        .map_or(PivotDecision::Optimal, |(&row, _)| {
            PivotDecision::Leave(row)
        })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Bland;

impl PivotRule for Bland {
    fn name(&self) -> &'static str {
        "bland"
    }

    fn choose(&self, view: &PivotView<'_>) -> Result<PivotDecision> {
        Ok(bland_rule(
            view.history,
            view.reduced_cost_signs,
            view.direction,
        ))
    }
}

/// Names accepted by [`rule_by_name`].
pub const RULE_NAMES: &[&str] = &["bland"];

pub fn rule_by_name(name: &str) -> Option<Box<dyn PivotRule>> {
    match name {
        "bland" => Some(Box::new(Bland)),
        _ => None,
    }
}

/// One visited basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub basis: Basis,
    pub point: Vec<Tropical>,
    pub objective: Tropical,
    pub reduced_cost_signs: BTreeMap<usize, Sign>,
    pub leaving: Option<usize>,
    pub entering: Option<usize>,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let signs: Vec<String> = self
            .reduced_cost_signs
            .iter()
            .map(|(r, s)| format!("{r}:{s}"))
            .collect();
        let opt = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |r| r.to_string());
        write!(
            f,
            "basis={} leave={} enter={} signs=[{}] objective={}",
            self.basis,
            opt(self.leaving),
            opt(self.entering),
            signs.join(" "),
            self.objective
        )
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Overrides the default cap of `C(m, n) + 1` pivots.
    pub max_iterations: Option<usize>,
}

/// `C(n, k)`, saturating.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

/// A single-owner simplex run in progress.
pub struct SimplexState<'a> {
    lp: &'a TropicalLP,
    system: SignedMatrix,
    basis: Basis,
    point: Vec<Tropical>,
    history: Vec<Basis>,
    direction: Direction,
}

impl<'a> SimplexState<'a> {
    /// Starts from `initial`, which must be a feasible basis.
    pub fn new(lp: &'a TropicalLP, initial: Basis, direction: Direction) -> Result<Self> {
        let point = match classify_basis(lp, initial.rows())? {
            BasisStatus::Feasible(point) => point,
            other => {
                return Err(Error::Contract(format!(
                    "initial basis {initial} is not a feasible basis ({other:?})"
                )))
            }
        };
        Ok(SimplexState {
            lp,
            system: lp.system_matrix(),
            history: vec![initial.clone()],
            basis: initial,
            point,
            direction,
        })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn point(&self) -> &[Tropical] {
        &self.point
    }

    pub fn history(&self) -> &[Basis] {
        &self.history
    }

    pub fn objective_value(&self) -> Result<Tropical> {
        self.lp.objective_value(&self.point)
    }

    /// Performs one iteration. Returns the trace record and whether the
    /// current basis is optimal.
    pub fn step(&mut self, rule: &dyn PivotRule) -> Result<(TraceStep, bool)> {
        let costs = reduced_costs(self.lp, &self.basis)?;
        let signs = costs.signs();
        let view = PivotView {
            history: &self.history,
            reduced_cost_signs: &signs,
            direction: self.direction,
            oracle: &self.system,
        };
        let decision = rule.choose(&view)?;
        let mut record = TraceStep {
            basis: self.basis.clone(),
            point: self.point.clone(),
            objective: self.objective_value()?,
            reduced_cost_signs: signs,
            leaving: None,
            entering: None,
        };
        let leaving = match decision {
            PivotDecision::Optimal => {
                if !costs.certifies_optimality(self.direction) {
                    return Err(Error::Contract(format!(
                        "rule {} stopped at a basis with an improving edge",
                        rule.name()
                    )));
                }
                return Ok((record, true));
            }
            PivotDecision::Leave(row) => row,
        };
        if record.reduced_cost_signs.get(&leaving) != Some(&self.direction.improving_sign()) {
            return Err(Error::Contract(format!(
                "rule {} chose row {leaving}, which is not an improving basis row",
                rule.name()
            )));
        }
        let (next, entering, point) = pivot_with_point(self.lp, &self.basis, leaving)?;
        record.leaving = Some(leaving);
        record.entering = Some(entering);
        self.history.push(next.clone());
        self.basis = next;
        self.point = point;
        Ok((record, false))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimplexOutcome {
    pub basis: Basis,
    pub point: Vec<Tropical>,
    pub objective: Tropical,
    /// Every visited basis, the last one optimal.
    pub trace: Vec<TraceStep>,
}

impl SimplexOutcome {
    pub fn pivots(&self) -> usize {
        self.trace.len().saturating_sub(1)
    }
}

/// Runs the simplex method from a feasible basis until the rule declares
/// optimality.
pub fn simplex_run(
    lp: &TropicalLP,
    initial: Basis,
    rule: &dyn PivotRule,
    direction: Direction,
    options: RunOptions,
) -> Result<SimplexOutcome> {
    let cap = options
        .max_iterations
        .unwrap_or_else(|| binomial(lp.n_rows(), lp.n_vars()).saturating_add(1));
    let mut state = SimplexState::new(lp, initial, direction)?;
    let mut trace = Vec::new();
    loop {
        let (record, optimal) = state.step(rule)?;
        trace.push(record);
        if optimal {
            break;
        }
        if trace.len() > cap {
            return Err(Error::IterationCap(cap));
        }
    }
    Ok(SimplexOutcome {
        objective: state.objective_value()?,
        basis: state.basis,
        point: state.point,
        trace,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SolveStatus {
    Infeasible,
    Optimal {
        point: Vec<Tropical>,
        value: Tropical,
    },
}

impl SolveStatus {
    pub fn is_feasible(&self) -> bool {
        matches!(self, SolveStatus::Optimal { .. })
    }

    pub fn point(&self) -> Option<&[Tropical]> {
        match self {
            SolveStatus::Optimal { point, .. } => Some(point),
            SolveStatus::Infeasible => None,
        }
    }
}

/// Everything produced while solving an arbitrary program.
#[derive(Debug, Clone)]
pub struct Solution {
    pub status: SolveStatus,
    pub perturbed: PerturbedProblem,
    pub phase_one: PhaseOne,
    pub phase_one_run: SimplexOutcome,
    pub phase_two_run: Option<SimplexOutcome>,
}

/// Solves an arbitrary arity-1 program: Phase I decides feasibility and
/// supplies a basis of the perturbed program, Phase II minimizes, and the
/// optimum is projected back.
pub fn solve_general(
    lp: &TropicalLP,
    rule: &dyn PivotRule,
    options: RunOptions,
) -> Result<Solution> {
    let perturbed = build_lp_tilde(lp)?;
    let phase_one = build_phase_one(&perturbed)?;
    let n = lp.n_vars();

    let phase_one_run = simplex_run(
        &phase_one.lp,
        Basis::new(phase_one.initial_basis.clone())?,
        rule,
        Direction::Maximize,
        options,
    )?;
    let one = Tropical::one(perturbed.context.arity());
    let t = &phase_one_run.point[n];
    if *t != one {
        if *t > one {
            return Err(Error::Contract(format!(
                "Phase I value {t} exceeds the unit"
            )));
        }
        return Ok(Solution {
            status: SolveStatus::Infeasible,
            perturbed,
            phase_one,
            phase_one_run,
            phase_two_run: None,
        });
    }

    let final_basis = &phase_one_run.basis;
    if !final_basis.contains(phase_one.t_upper_row) || final_basis.contains(phase_one.t_lower_row) {
        return Err(Error::Contract(format!(
            "Phase I optimum {final_basis} does not pin t to the unit"
        )));
    }
    let start = Basis::new(
        final_basis
            .rows()
            .iter()
            .copied()
            .filter(|&r| r != phase_one.t_upper_row)
            .collect(),
    )?;
    let phase_two_run = simplex_run(
        &perturbed.lp_tilde,
        start,
        rule,
        Direction::Minimize,
        options,
    )?;
    if let Some(first) = phase_two_run.trace.first() {
        if first.point[..] != phase_one_run.point[..n] {
            return Err(Error::Contract(
                "Phase II starts away from the Phase I optimum".into(),
            ));
        }
    }
    let point = project_rho_pi(&phase_two_run.point)?;
    let value = lp.objective_value(&point)?;
    Ok(Solution {
        status: SolveStatus::Optimal { point, value },
        perturbed,
        phase_one,
        phase_one_run,
        phase_two_run: Some(phase_two_run),
    })
}
