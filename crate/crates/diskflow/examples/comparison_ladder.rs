//! Comparison principle in action. Ordered boundary data keeps flows
//! ordered for all time, stationary profiles serve as fixed rungs of a
//! ladder, and every flow even obeys a comparison against its own time
//! translate shifted by +- pi. Violations beyond the scheme tolerance
//! would break the maximum principle the discretization is built to keep.

use std::f64::consts::PI;
use std::sync::Arc;

use diskflow::boundary::{BoundaryDataSpec, BoundaryFamily};
use diskflow::checkers::{
    comparison_check, comparison_tolerance, self_comparison_check, CheckOutcome,
};
use diskflow::grid::{build_graded_grid, RadialGrid};
use diskflow::solver::{FlowRun, Profile, SnapshotRecorder, SolverSettings};
use diskflow::stationary::StationaryProfile;

fn evolve(grid: &Arc<RadialGrid>, family: BoundaryFamily) -> Vec<Profile> {
    let mut run = FlowRun::new(
        (**grid).clone(),
        BoundaryDataSpec::new(family, 1),
        SolverSettings::default(),
    );
    let mut rec = SnapshotRecorder::new(1);
    run.solve_until(0.2, &mut [&mut rec]);
    rec.snapshots
}

fn main() {
    let grid = Arc::new(build_graded_grid(128, 2.0).unwrap());
    let tol = comparison_tolerance(&grid, SolverSettings::default().dt_max);
    let frozen = |alpha: f64| {
        let sp = StationaryProfile::theta(alpha, 1);
        vec![Profile::new(grid.clone(), sp.sample(&grid), 0.0, 1)]
    };
    let pi_wall = vec![
        Profile::new(grid.clone(), vec![PI; grid.nodes().len()], 0.0, 1),
        Profile::new(grid.clone(), vec![PI; grid.nodes().len()], 0.2, 1),
    ];

    let seed = evolve(&grid, BoundaryFamily::FourArctan { alpha: 1.0 });
    let low_ramp = evolve(&grid, BoundaryFamily::LinearRamp { slope: 2.0 });
    let high_ramp = evolve(&grid, BoundaryFamily::LinearRamp { slope: 2.5 });

    println!("scheme tolerance 10 (dr^2 + dt_max) = {tol:.3e}");
    println!();
    println!(
        "{:<34} {:>14} {:>9}",
        "pair (lower vs upper)", "worst gap", "ordered"
    );
    let pairs: [(&str, &[Profile], &[Profile]); 4] = [
        ("2 arctan(r/2) vs 2 arctan(r)", &frozen(0.5), &frozen(1.0)),
        ("2 arctan(r) vs 2 arctan(4r)", &frozen(1.0), &frozen(4.0)),
        ("four-arctan seed vs pi", &seed, &pi_wall),
        ("ramp 2.0 vs ramp 2.5", &low_ramp, &high_ramp),
    ];
    for (label, sub, sup) in pairs {
        let rep = comparison_check(sub, sup, tol);
        println!(
            "{label:<34} {:>14.3e} {:>9}",
            rep.max_violation,
            rep.ordered()
        );
    }

    println!();
    match self_comparison_check(&seed, 0.01, tol) {
        CheckOutcome::Checked(rep) => println!(
            "self-comparison (tau = 0.01): worst band exceedance {:.3e} over {} pairs -> {}",
            rep.max_violation,
            rep.pairs_checked,
            if rep.ordered() {
                "inside h(t - tau) +- pi"
            } else {
                "violated"
            },
        ),
        CheckOutcome::Inapplicable { reason } => println!("self-comparison inapplicable: {reason}"),
    }
}
