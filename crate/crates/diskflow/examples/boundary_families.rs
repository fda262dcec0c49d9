//! The admissible boundary data families and what validation can tell you
//! before a run: equivariance pins h(0, t) to a multiple of pi, the data
//! must vanish like r^k at the origin, and data trapped in [-pi, pi] can
//! never blow up — the sharp threshold the scenarios probe from both sides.

use diskflow::boundary::{BoundaryDataSpec, BoundaryFamily, TimeModulation};
use diskflow::grid::build_graded_grid;

fn main() {
    let grid = build_graded_grid(128, 2.0).unwrap();
    let families: [(&str, BoundaryFamily); 6] = [
        (
            "stationary arctan",
            BoundaryFamily::StationaryArctan {
                alpha: 1.0,
                sign: 1,
                offset_m: 0,
            },
        ),
        (
            "four-arctan seed",
            BoundaryFamily::FourArctan { alpha: 1.0 },
        ),
        ("ramp below pi", BoundaryFamily::LinearRamp { slope: 3.0 }),
        ("ramp above pi", BoundaryFamily::LinearRamp { slope: 3.5 }),
        (
            "tabulated knots",
            BoundaryFamily::ScaledProfile {
                samples: vec![(0.0, 0.0), (0.3, 3.3), (0.6, 1.0), (1.0, 3.4)],
            },
        ),
        (
            "constant pi",
            BoundaryFamily::Constant {
                value: std::f64::consts::PI,
            },
        ),
    ];

    println!(
        "{:<20} {:>10} {:>12} {:>12} {:>16}",
        "family", "sup |h0|", "pi lattice", "r^k vanish", "bounded by pi"
    );
    for (label, family) in families {
        let spec = BoundaryDataSpec::new(family, 1);
        let report = spec.validate(&grid, 1.0);
        println!(
            "{label:<20} {:>10.4} {:>12} {:>12} {:>16}",
            report.sup_abs,
            report.origin_in_pi_lattice,
            report.core_ratio_finite,
            report.bounded_by_pi,
        );
    }

    println!();
    println!("a cosine modulation moves the tail while the origin stays pinned:");
    let mut spec = BoundaryDataSpec::new(BoundaryFamily::FourArctan { alpha: 1.0 }, 1);
    spec.modulation = TimeModulation::Cosine {
        amplitude: 0.15,
        period: 1.0,
    };
    println!("{:>6} {:>12} {:>12}", "t", "h0(0, t)", "h0(1, t)");
    for i in 0..=6 {
        let t = i as f64 * 0.25;
        println!(
            "{t:>6.2} {:>12.6} {:>12.6}",
            spec.evaluate(0.0, t),
            spec.evaluate(1.0, t)
        );
    }
}
