mod common;

use common::inspect_trace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tropical_lp::mpg::{random_game, solve_states, MeanPayoffGame};
use tropical_lp::simplex::{pivot, Bland, Direction, RunOptions};

#[test]
fn game_traces_satisfy_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let (mut stalls, mut pivots) = (0, 0);
    for _ in 0..40 {
        let m = rng.gen_range(1..=5);
        let n = rng.gen_range(1..=5);
        let game = random_game(&mut rng, m, n, 4, 0.3);
        for r in solve_states(&game, &Bland, RunOptions::default()).unwrap() {
            let s = &r.solution;
            let one = inspect_trace(&s.phase_one.lp, &s.phase_one_run, Direction::Maximize);
            assert!(one.all_but_strictness(), "{one:?}");
            stalls += one.stalled_steps;
            pivots += s.phase_one_run.pivots();
            if let Some(two) = &s.phase_two_run {
                let rep = inspect_trace(&s.perturbed.lp_tilde, two, Direction::Minimize);
                assert!(rep.all_but_strictness(), "{rep:?}");
                stalls += rep.stalled_steps;
                pivots += two.pivots();
            }
        }
    }
    assert!(stalls < pivots);
}

/// An improving pivot strictly improves the lifted objective, but its
/// valuation may stay put when the edge lies in a level set.
#[test]
fn objective_valuation_can_stall_on_improving_pivot() {
    let game: MeanPayoffGame =
        serde_json::from_str(r#"{"A":[["-1",null],["-4","0"]],"B":[["-2","-1"],["-1",null]]}"#)
            .unwrap();
    let reports = solve_states(&game, &Bland, RunOptions::default()).unwrap();
    let s = &reports[0].solution;
    let run = &s.phase_one_run;
    let report = inspect_trace(&s.phase_one.lp, run, Direction::Maximize);
    assert!(report.all_but_strictness());
    assert_eq!(report.stalled_steps, 1);
    let last = &run.trace[run.trace.len() - 2..];
    assert_eq!(last[0].leaving, Some(5));
    assert_eq!(last[0].objective, last[1].objective);
    assert_ne!(last[0].basis, last[1].basis);
}

/// Every edge of a bounded generic polyhedron has exactly two endpoints, so
/// pivoting back along the same edge returns the starting basis.
#[test]
fn every_edge_has_two_endpoints() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..8 {
        let game = random_game(&mut rng, 3, 3, 4, 0.3);
        let reports = solve_states(&game, &Bland, RunOptions::default()).unwrap();
        let s = &reports[0].solution;
        let lp = &s.phase_one.lp;
        for step in &s.phase_one_run.trace {
            for &i in step.basis.rows() {
                let next = pivot(lp, &step.basis, i).unwrap();
                assert_ne!(next, step.basis);
                let entered = *next
                    .rows()
                    .iter()
                    .find(|r| !step.basis.contains(**r))
                    .unwrap();
                assert_eq!(pivot(lp, &next, entered).unwrap(), step.basis);
            }
        }
    }
}
