//! Exact tropical linear programming and mean payoff games.
//!
//! Values live in `T(G)` for a lexicographically ordered group `G = Q^k`.
//! Arbitrary tropical programs over `T(Q)` are reduced to bounded, generic
//! programs over a larger group by symbolic perturbation and solved with the
//! tropical simplex method under a combinatorial pivoting rule. Mean payoff
//! games are decided through their feasibility reduction and cross-checked
//! against value iteration.

pub mod error;
pub mod group;
pub mod linalg;
pub mod mpg;
pub mod perturbation;
pub mod simplex;
pub mod tropical;

pub use error::{Error, Result};
pub use group::GroupValue;
pub use linalg::{tropical_cramer, tropical_permanent, PermanentResult, SignedMatrix};
pub use mpg::{value_iteration_oracle, winning_states, GameValues, MeanPayoffGame};
pub use simplex::{
    solve_general, Basis, Bland, Direction, PivotRule, RunOptions, Solution, SolveStatus,
};
pub use tropical::{Sign, SignedRow, SignedTropical, Tropical, TropicalLP};
