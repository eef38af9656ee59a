//! Independent brute-force oracles and instance generators shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::Rng;
use tropical_lp::linalg::{permutation_sign, SignedMatrix};
use tropical_lp::simplex::{binomial, reduced_costs, Direction, SimplexOutcome};
use tropical_lp::tropical::{RowStatus, Sign, SignedRow, SignedTropical, Tropical, TropicalLP};
use tropical_lp::GroupValue;

/// Permanent by enumerating all permutations: value, number of optimal
/// permutations, and the sign when the optimum is unique.
pub struct BrutePermanent {
    pub value: Tropical,
    pub argmax_count: usize,
    pub sign: Sign,
}

pub fn brute_permanent(m: &SignedMatrix) -> BrutePermanent {
    let (n, _) = m.shape();
    let mut best = Tropical::Bottom;
    let mut winners: Vec<Vec<usize>> = Vec::new();
    for perm in (0..n).permutations(n) {
        let mut total = Some(GroupValue::zero(m.arity()));
        for (i, &j) in perm.iter().enumerate() {
            total = match (total, m.get(i, j).modulus().finite()) {
                (Some(t), Some(g)) => Some(&t + g),
                _ => None,
            };
        }
        let Some(total) = total else { continue };
        let total = Tropical::Finite(total);
        if total > best {
            best = total;
            winners = vec![perm];
        } else if total == best {
            winners.push(perm);
        }
    }
    let sign = if winners.len() == 1 {
        let perm = &winners[0];
        perm.iter()
            .enumerate()
            .fold(permutation_sign(perm), |s, (i, &j)| s * m.get(i, j).sign())
    } else {
        Sign::Zero
    };
    BrutePermanent {
        value: best,
        argmax_count: winners.len(),
        sign,
    }
}

pub fn random_entry<R: Rng>(rng: &mut R, bottom_prob: f64, range: i64) -> SignedTropical {
    if rng.gen_bool(bottom_prob) {
        return SignedTropical::zero();
    }
    let sign = if rng.gen_bool(0.5) {
        Sign::Pos
    } else {
        Sign::Neg
    };
    SignedTropical::from_integers(sign, &[rng.gen_range(-range..=range)])
}

pub fn random_matrix<R: Rng>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    bottom_prob: f64,
    range: i64,
) -> SignedMatrix {
    let entries = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| random_entry(rng, bottom_prob, range))
                .collect()
        })
        .collect();
    SignedMatrix::new(1, entries).unwrap()
}

pub fn random_lp<R: Rng>(
    rng: &mut R,
    m: usize,
    n: usize,
    bottom_prob: f64,
    range: i64,
) -> TropicalLP {
    let rows = (0..m)
        .map(|_| {
            SignedRow::new(
                (0..n)
                    .map(|_| random_entry(rng, bottom_prob, range))
                    .collect(),
                random_entry(rng, bottom_prob, range),
            )
        })
        .collect();
    let objective = (0..n)
        .map(|_| {
            if rng.gen_bool(bottom_prob) {
                Tropical::Bottom
            } else {
                Tropical::from_integers(&[rng.gen_range(-range..=range)])
            }
        })
        .collect();
    TropicalLP::new(1, rows, objective).unwrap()
}

/// All points of `({⊥} ∪ [lo, hi])^n`.
pub fn grid(n: usize, lo: i64, hi: i64) -> Vec<Vec<Tropical>> {
    let axis: Vec<Tropical> = std::iter::once(Tropical::Bottom)
        .chain((lo..=hi).map(|v| Tropical::from_integers(&[v])))
        .collect();
    (0..n)
        .map(|_| axis.iter().cloned())
        .multi_cartesian_product()
        .collect()
}

/// Every failed invariant of a recorded simplex run, as text.
#[derive(Debug, Default)]
pub struct TraceReport {
    pub repeated_basis: bool,
    pub infeasible_or_wrong_active: Vec<String>,
    pub worse_steps: usize,
    pub stalled_steps: usize,
    pub not_certified: bool,
    pub over_bound: bool,
}

impl TraceReport {
    pub fn strictly_monotone(&self) -> bool {
        self.worse_steps == 0 && self.stalled_steps == 0
    }

    pub fn all_but_strictness(&self) -> bool {
        !self.repeated_basis
            && self.infeasible_or_wrong_active.is_empty()
            && self.worse_steps == 0
            && !self.not_certified
            && !self.over_bound
    }
}

pub fn inspect_trace(lp: &TropicalLP, run: &SimplexOutcome, direction: Direction) -> TraceReport {
    let mut report = TraceReport::default();
    let distinct: BTreeSet<_> = run.trace.iter().map(|s| s.basis.clone()).collect();
    report.repeated_basis = distinct.len() != run.trace.len();
    for step in &run.trace {
        for (i, e) in lp.evaluate(&step.point).unwrap().iter().enumerate() {
            let ok = e.status.is_satisfied()
                && (e.status == RowStatus::Active) == step.basis.contains(i);
            if !ok {
                report
                    .infeasible_or_wrong_active
                    .push(format!("row {i} is {:?} at {}", e.status, step.basis));
            }
        }
    }
    for w in run.trace.windows(2) {
        let (a, b) = (&w[0].objective, &w[1].objective);
        let worse = match direction {
            Direction::Minimize => b > a,
            Direction::Maximize => b < a,
        };
        if worse {
            report.worse_steps += 1;
        } else if a == b {
            report.stalled_steps += 1;
        }
    }
    report.not_certified = !reduced_costs(lp, &run.basis)
        .unwrap()
        .certifies_optimality(direction);
    report.over_bound = run.pivots() > binomial(lp.n_rows(), lp.n_vars());
    report
}

pub fn random_admissible<R: Rng>(rng: &mut R, arity: usize) -> Tropical {
    if rng.gen_bool(0.1) {
        return Tropical::Bottom;
    }
    let mut coords = vec![rng.gen_range(-3..=0)];
    coords.extend((1..arity).map(|_| rng.gen_range(-3..=3)));
    Tropical::from_integers(&coords)
}

/// Checks the homomorphism and order identities of `ρ∘π` on `pairs`
/// sampled pairs; returns the failures.
pub fn projection_homomorphism_failures<R: Rng>(rng: &mut R, pairs: usize) -> Vec<String> {
    use tropical_lp::perturbation::project_value;
    let mut failures = Vec::new();
    for _ in 0..pairs {
        let arity = rng.gen_range(2..=6);
        let (a, b) = (random_admissible(rng, arity), random_admissible(rng, arity));
        let (pa, pb) = (project_value(&a).unwrap(), project_value(&b).unwrap());
        if project_value(&a.oplus(&b).unwrap()).unwrap() != pa.oplus(&pb).unwrap() {
            failures.push(format!("oplus {a} {b}"));
        }
        if project_value(&a.otimes(&b).unwrap()).unwrap() != pa.otimes(&pb).unwrap() {
            failures.push(format!("otimes {a} {b}"));
        }
        if a <= b && pa > pb {
            failures.push(format!("order {a} {b}"));
        }
    }
    failures
}

/// Feasibility transport between a program and its perturbation on random
/// instances with `m ≤ 3`, `n ≤ 2`: every feasible grid point with
/// coordinates at most `u0` lifts to a feasible point, and every sampled
/// feasible point of the perturbed program projects to a feasible point.
/// Returns `(checked points, failures)`.
pub fn transport_failures<R: Rng>(rng: &mut R, instances: usize) -> (usize, Vec<String>) {
    use tropical_lp::perturbation::{build_lp_tilde, project_rho_pi};
    let mut checked = 0;
    let mut failures = Vec::new();
    for _ in 0..instances {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=2);
        let lp = random_lp(rng, m, n, 0.3, 2);
        let p = build_lp_tilde(&lp).unwrap();
        let u0 = p.context.u().coord(1).clone();
        for x in grid(n, -5, 5) {
            if !lp.is_feasible(&x).unwrap() {
                continue;
            }
            if x.iter()
                .any(|xj| xj.finite().is_some_and(|g| *g.coord(0) > u0))
            {
                continue;
            }
            checked += 1;
            let lifted = p.lift_point(&x).unwrap();
            if !p.lp_tilde.is_feasible(&lifted).unwrap() {
                failures.push(format!(
                    "lift of {x:?} infeasible in perturbation of {lp:?}"
                ));
            }
            // wiggle the lift inside its layers and project back
            let arity = p.context.arity();
            let moved: Vec<Tropical> = lifted
                .iter()
                .map(|v| {
                    let g = v.finite().unwrap();
                    let mut c: Vec<i64> = g
                        .coords()
                        .iter()
                        .map(|r| r.to_integer().try_into().unwrap())
                        .collect();
                    if c[0] < 0 {
                        c[0] = rng.gen_range(c[0]..=-1);
                        c[1] = rng.gen_range(-3..=3);
                    }
                    for t in c.iter_mut().take(arity).skip(2) {
                        *t = rng.gen_range(-2..=2);
                    }
                    Tropical::from_integers(&c)
                })
                .collect();
            if p.lp_tilde.is_feasible(&moved).unwrap() {
                checked += 1;
                let back = project_rho_pi(&moved).unwrap();
                if !lp.is_feasible(&back).unwrap() {
                    failures.push(format!("projection of {moved:?} infeasible in {lp:?}"));
                }
            }
        }
    }
    (checked, failures)
}

/// Perturbed block matrices of random programs up to `4 × 3`; returns the
/// number that failed the exhaustive genericity check.
pub fn nongeneric_blocks<R: Rng>(rng: &mut R, count: usize) -> usize {
    use tropical_lp::linalg::{is_tropically_generic, GenericityLimits};
    use tropical_lp::perturbation::build_lp_tilde;
    (0..count)
        .filter(|_| {
            let m = rng.gen_range(1..=4);
            let n = rng.gen_range(1..=3);
            let p = build_lp_tilde(&random_lp(rng, m, n, 0.3, 3)).unwrap();
            !is_tropically_generic(&p.block, GenericityLimits::default()).unwrap()
        })
        .count()
}

/// Phase I system matrices `[A b; cᵀ ⊥]` of random programs with
/// `n, m ≤ 3`; returns the number that are not tropically generic.
pub fn nongeneric_phase_one<R: Rng>(rng: &mut R, count: usize) -> usize {
    use tropical_lp::linalg::{is_tropically_generic, GenericityLimits};
    use tropical_lp::perturbation::{build_lp_tilde, build_phase_one};
    (0..count)
        .filter(|_| {
            let m = rng.gen_range(1..=3);
            let n = rng.gen_range(1..=3);
            let p = build_lp_tilde(&random_lp(rng, m, n, 0.3, 3)).unwrap();
            let one = build_phase_one(&p).unwrap();
            !is_tropically_generic(&one.lp.system_matrix(), GenericityLimits::default()).unwrap()
        })
        .count()
}
