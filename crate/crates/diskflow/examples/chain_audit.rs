//! Intersection counting: the number of times a profile crosses a
//! stationary barrier (packaged as maximal alternating chains of grid
//! nodes) can only decrease along the flow — a discrete zero-counting
//! principle. The greedy scanner that computes the counts is audited
//! against an independent brute-force enumeration, and steeper barriers
//! can only lower the count.

use std::f64::consts::PI;
use std::sync::Arc;

use diskflow::boundary::{BoundaryDataSpec, BoundaryFamily};
use diskflow::checkers::{
    chain_band, exhaustive_chain_p, exhaustive_chain_q, max_chain_p, max_chain_q, CheckOutcome,
};
use diskflow::grid::build_graded_grid;
use diskflow::solver::{FlowRun, SnapshotRecorder, SolverSettings};
use diskflow::stationary::StationaryProfile;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let eps = chain_band(1e-6, 1e-10);

    // A wiggly tabulated profile that crosses both reference levels twice.
    let spec = BoundaryDataSpec::new(
        BoundaryFamily::ScaledProfile {
            samples: vec![(0.0, 0.0), (0.3, 3.3), (0.6, 1.0), (1.0, 3.4)],
        },
        1,
    );
    let mut run = FlowRun::new(
        build_graded_grid(256, 2.0).unwrap(),
        spec,
        SolverSettings::default(),
    );
    let mut rec = SnapshotRecorder::new(1);
    run.solve_until(0.02, &mut [&mut rec]);

    let barrier = StationaryProfile::chi(2.0, 1);
    println!(
        "{:>9} {:>22} {:>22}",
        "t", "three-band chain M_P", "two-band chain M_Q"
    );
    for snap in rec.snapshots.iter().step_by(rec.snapshots.len() / 10) {
        let m_p = max_chain_p(snap, &barrier, PI, eps)
            .checked()
            .map_or("-".to_string(), |r| r.max_length.to_string());
        let m_q = max_chain_q(snap, PI / 2.0, PI, eps)
            .checked()
            .map_or("-".to_string(), |r| r.max_length.to_string());
        println!("{:>9.5} {m_p:>22} {m_q:>22}", snap.time);
    }
    println!("(lengths are 1 mod 4 and 1 mod 2 by construction, and never increase)");

    // Steeper barriers peel crossings off the same initial profile.
    println!();
    println!("barrier ladder on the initial profile:");
    for alpha in [0.5, 1.0, 2.0, 4.0, 16.0] {
        let chi = StationaryProfile::chi(alpha, 1);
        if let CheckOutcome::Checked(rep) = max_chain_p(&rec.snapshots[0], &chi, PI, eps) {
            println!("  vs pi - 2 arctan({alpha:>4} r): M_P = {}", rep.max_length);
        }
    }

    // Greedy scanner vs brute-force enumeration on random node data.
    let audit_grid = Arc::new(build_graded_grid(48, 1.0).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    let mut disagreements = 0;
    for _ in 0..200 {
        let mut values = vec![0.0f64];
        for _ in 0..audit_grid.nodes().len() - 1 {
            let prev = *values.last().unwrap();
            values.push((prev + rng.random_range(-0.7..0.7)).clamp(-1.0, 4.2));
        }
        let profile = diskflow::solver::Profile::new(audit_grid.clone(), values, 0.0, 1);
        let greedy = max_chain_q(&profile, PI / 2.0, PI, eps);
        let brute = exhaustive_chain_q(&profile, PI / 2.0, PI, eps);
        if let (Some(g), Some(&b)) = (greedy.checked(), brute.checked()) {
            checked += 1;
            disagreements += usize::from(g.max_length != b);
        }
        let greedy = max_chain_p(&profile, &barrier, PI, eps);
        let brute = exhaustive_chain_p(&profile, &barrier, PI, eps);
        if let (Some(g), Some(&b)) = (greedy.checked(), brute.checked()) {
            checked += 1;
            disagreements += usize::from(g.max_length != b);
        }
    }
    println!();
    println!("greedy vs exhaustive on random walks: {checked} comparisons, {disagreements} disagreements");
}
