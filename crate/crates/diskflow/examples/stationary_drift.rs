//! Steady states under the flow: the arctan families solve the equation
//! exactly, so evolving one with its own trace frozen on the boundary must
//! leave it parked — drift is pure scheme noise, and the energy of the
//! degree-one member reproduces its closed form 2 pi.

use std::f64::consts::PI;

use diskflow::boundary::{BoundaryDataSpec, BoundaryFamily};
use diskflow::energy::energy;
use diskflow::grid::{build_graded_grid, default_gamma};
use diskflow::solver::{FlowRun, SolverSettings};

fn main() {
    let cases = [
        ("2 arctan(r)", 1.0, 1u32, 1i8, 0i32),
        ("2 arctan(4 r)", 4.0, 1, 1, 0),
        ("2 arctan((r/2)^2)", 0.5, 2, 1, 0),
        ("pi - 2 arctan(r^3)", 1.0, 3, -1, 1),
    ];
    println!(
        "{:<22} {:>6} {:>12} {:>14} {:>14}",
        "profile", "k", "drift", "E(0)", "E(T)"
    );
    for (label, alpha, k, sign, offset_m) in cases {
        let grid = build_graded_grid(256, default_gamma(k)).unwrap();
        let spec = BoundaryDataSpec::new(
            BoundaryFamily::StationaryArctan {
                alpha,
                sign,
                offset_m,
            },
            k,
        );
        let mut run = FlowRun::new(grid, spec, SolverSettings::default());
        let start = run.profile.clone();
        let e0 = energy(&start);
        run.solve_until(0.5, &mut []);
        let drift = run
            .profile
            .values
            .iter()
            .zip(&start.values)
            .fold(0.0f64, |m, (&a, &b)| m.max((a - b).abs()));
        println!(
            "{label:<22} {k:>6} {drift:>12.3e} {e0:>14.9} {:>14.9}",
            energy(&run.profile)
        );
    }
    println!();
    println!(
        "closed form for the degree-one profile: E = 2 pi = {:.9}",
        2.0 * PI
    );
}
