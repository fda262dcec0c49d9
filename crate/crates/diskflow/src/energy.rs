//! Dirichlet energy of the equivariant map, its dissipation identity, and
//! the pointwise Sacks-Uhlenbeck identity.
//!
//! E(h) = pi * integral_0^1 (h_r^2 + k^2 sin^2(h)/r^2) r dr.
//!
//! Along the flow, dE/dt = 2 pi h_r(1) d/dt h0(1) - 2 pi * integral h_t^2 r dr:
//! a boundary flux (zero for frozen data) minus a nonnegative dissipation.
//! All time derivatives here come from differencing accepted snapshots,
//! never from the spatial operator, so these checks are independent of the
//! solver's own residuals.

use std::f64::consts::PI;

use crate::solver::{radial_derivative, Profile};

/// Trapezoidal rule over the (graded) grid nodes.
fn trapezoid(nodes: &[f64], f: &[f64]) -> f64 {
    nodes
        .windows(2)
        .zip(f.windows(2))
        .map(|(r, v)| 0.5 * (v[0] + v[1]) * (r[1] - r[0]))
        .sum()
}

/// Equivariant Dirichlet energy of a profile. The integrand at r = 0 is
/// its limit 0: the r weight kills h_r^2, and sin^2(h)/r ~ r^{2k-1}.
pub fn energy(profile: &Profile) -> f64 {
    let nodes = profile.grid.nodes();
    let hr = radial_derivative(&profile.grid, &profile.values);
    let k2 = (profile.k * profile.k) as f64;
    let integrand: Vec<f64> = nodes
        .iter()
        .zip(&profile.values)
        .zip(&hr)
        .map(|((&r, &h), &g)| {
            if r == 0.0 {
                0.0
            } else {
                PI * (g * g + k2 * h.sin().powi(2) / (r * r)) * r
            }
        })
        .collect();
    trapezoid(nodes, &integrand)
}

/// One midpoint evaluation of the energy dissipation identity between two
/// snapshots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRateSample {
    /// Midpoint time (t1 + t2)/2.
    pub time: f64,
    /// Midpoint energy (E1 + E2)/2.
    pub energy: f64,
    /// (E2 - E1)/(t2 - t1).
    pub de_dt: f64,
    /// 2 pi h_r(1) * d/dt h0(1), h_r on the averaged profile.
    pub flux: f64,
    /// 2 pi * integral h_t^2 r dr with h_t differenced from the snapshots.
    pub dissipation: f64,
    /// |de_dt - (flux - dissipation)|.
    pub residual: f64,
}

/// Checks the dissipation identity on a pair of snapshots close in time.
pub fn energy_rate_check(first: &Profile, second: &Profile) -> EnergyRateSample {
    assert!(
        second.time > first.time,
        "rate check needs strictly ordered snapshot times"
    );
    assert_eq!(first.grid, second.grid, "rate check needs a shared grid");
    let dt = second.time - first.time;
    let nodes = first.grid.nodes();

    let e1 = energy(first);
    let e2 = energy(second);
    let de_dt = (e2 - e1) / dt;

    let h_t: Vec<f64> = first
        .values
        .iter()
        .zip(&second.values)
        .map(|(&a, &b)| (b - a) / dt)
        .collect();
    let integrand: Vec<f64> = nodes.iter().zip(&h_t).map(|(&r, &v)| v * v * r).collect();
    let dissipation = 2.0 * PI * trapezoid(nodes, &integrand);

    let mid: Vec<f64> = first
        .values
        .iter()
        .zip(&second.values)
        .map(|(&a, &b)| 0.5 * (a + b))
        .collect();
    let hr_edge = *radial_derivative(&first.grid, &mid).last().unwrap();
    let flux = 2.0 * PI * hr_edge * h_t.last().unwrap();

    EnergyRateSample {
        time: 0.5 * (first.time + second.time),
        energy: 0.5 * (e1 + e2),
        de_dt,
        flux,
        dissipation,
        residual: (de_dt - (flux - dissipation)).abs(),
    }
}

/// Dissipation-identity audit across a whole run's snapshots.
#[derive(Debug, Clone, Default)]
pub struct EnergyLedger {
    pub samples: Vec<EnergyRateSample>,
}

impl EnergyLedger {
    /// Builds midpoint samples from consecutive snapshot pairs.
    pub fn from_snapshots(snapshots: &[Profile]) -> Self {
        let samples = snapshots
            .windows(2)
            .filter(|w| w[1].time > w[0].time)
            .map(|w| energy_rate_check(&w[0], &w[1]))
            .collect();
        Self { samples }
    }

    /// Largest upward energy move between consecutive samples; 0 when the
    /// ledger is monotone non-increasing.
    pub fn max_energy_increase(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| w[1].energy - w[0].energy)
            .fold(0.0f64, f64::max)
    }

    pub fn max_identity_residual(&self) -> f64 {
        self.samples.iter().map(|s| s.residual).fold(0.0, f64::max)
    }

    /// Running max of E stays within E(start) + sup|flux| * elapsed + tol.
    pub fn within_flux_budget(&self, tol: f64) -> bool {
        let Some(first) = self.samples.first() else {
            return true;
        };
        let sup_flux = self
            .samples
            .iter()
            .map(|s| s.flux.abs())
            .fold(0.0, f64::max);
        self.samples
            .iter()
            .all(|s| s.energy <= first.energy + sup_flux * (s.time - first.time) + tol)
    }
}

/// Pointwise residual of the identity
/// 2 * integral_0^r s^2 h_r h_t ds = r^2 h_r^2 - k^2 sin^2 h,
/// returned per node as LHS - RHS with a cumulative trapezoidal LHS.
/// h_t comes from the caller (snapshot differencing, or zero for steady
/// profiles).
pub fn sacks_uhlenbeck_residual(profile: &Profile, h_t: &[f64]) -> Vec<f64> {
    assert_eq!(h_t.len(), profile.values.len());
    let nodes = profile.grid.nodes();
    let hr = radial_derivative(&profile.grid, &profile.values);
    let k2 = (profile.k * profile.k) as f64;

    let g: Vec<f64> = nodes
        .iter()
        .zip(&hr)
        .zip(h_t)
        .map(|((&r, &dr), &dt)| 2.0 * r * r * dr * dt)
        .collect();

    let mut lhs = 0.0;
    let mut out = Vec::with_capacity(nodes.len());
    for i in 0..nodes.len() {
        if i > 0 {
            lhs += 0.5 * (g[i - 1] + g[i]) * (nodes[i] - nodes[i - 1]);
        }
        let rhs = nodes[i] * nodes[i] * hr[i] * hr[i] - k2 * profile.values[i].sin().powi(2);
        out.push(lhs - rhs);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{BoundaryDataSpec, BoundaryFamily};
    use crate::grid::build_graded_grid;
    use crate::solver::{FlowRun, RunStatus, SolverSettings};
    use crate::stationary::StationaryProfile;

    fn sampled(sp: &StationaryProfile, n: usize) -> Profile {
        let grid = build_graded_grid(n, 2.0).unwrap();
        let values = sp.sample(&grid);
        Profile::new(grid, values, 0.0, sp.k)
    }

    #[test]
    fn energy_of_poles_vanishes() {
        let grid = build_graded_grid(64, 2.0).unwrap();
        let north = Profile::new(grid.clone(), vec![0.0; 65], 0.0, 1);
        assert_eq!(energy(&north), 0.0);
        let south = Profile::new(grid, vec![PI; 65], 0.0, 1);
        assert!(energy(&south).abs() < 1e-12);
    }

    #[test]
    fn energy_of_degree_one_bubble_is_two_pi() {
        // For theta_1, k = 1 the integrand collapses to 8r/(1+r^2)^2 with
        // exact integral 2: energy = 2 pi.
        let p = sampled(&StationaryProfile::theta(1.0, 1), 1024);
        let e = energy(&p);
        let rel = (e - 2.0 * PI).abs() / (2.0 * PI);
        assert!(rel < 0.005, "relative error {rel:e}");
        assert!(
            rel < 1e-3,
            "trapezoid on the graded grid should do much better"
        );
    }

    #[test]
    fn energy_is_nonnegative_on_assorted_profiles() {
        for sp in [
            StationaryProfile::theta(4.0, 2),
            StationaryProfile::chi(0.5, 1),
            StationaryProfile::four_arctan(1.0, 3),
        ] {
            assert!(energy(&sampled(&sp, 128)) >= 0.0);
        }
    }

    fn snapshots_at(family: BoundaryFamily, k: u32, n: usize, times: &[f64]) -> Vec<Profile> {
        let grid = build_graded_grid(n, 2.0).unwrap();
        let spec = BoundaryDataSpec::new(family, k);
        let mut run = FlowRun::new(grid, spec, SolverSettings::default());
        let mut out = Vec::new();
        for &t in times {
            run.solve_until(t, &mut []);
            assert_eq!(run.status, RunStatus::CompletedT);
            out.push(run.profile.clone());
            run.status = RunStatus::Running;
        }
        out
    }

    #[test]
    fn rate_identity_is_quiet_on_a_steady_flow() {
        let snaps = snapshots_at(
            BoundaryFamily::StationaryArctan {
                alpha: 1.0,
                sign: 1,
                offset_m: 0,
            },
            1,
            128,
            &[0.1, 0.11],
        );
        let s = energy_rate_check(&snaps[0], &snaps[1]);
        assert!(
            s.flux.abs() < 1e-6,
            "static boundary has no flux, got {}",
            s.flux
        );
        assert!(s.de_dt.abs() < 1e-3);
        assert!(s.residual < 1e-3, "residual {:e}", s.residual);
    }

    #[test]
    fn energy_decays_without_flux_on_the_growth_seed() {
        let times: Vec<f64> = (0..=20).map(|i| 0.01 * i as f64).collect();
        let snaps = snapshots_at(
            BoundaryFamily::FourArctan { alpha: 1.0 },
            1,
            128,
            &times[1..],
        );
        let ledger = EnergyLedger::from_snapshots(&snaps);
        assert!(ledger.samples.len() >= 18);
        for s in &ledger.samples {
            assert_eq!(s.flux, 0.0, "frozen boundary trace moves nowhere");
            assert!(s.de_dt <= 1e-9, "energy rose at rate {}", s.de_dt);
        }
        assert!(ledger.max_energy_increase() <= 0.0);
        assert!(ledger.within_flux_budget(1e-9));
    }

    #[test]
    fn rate_residual_shrinks_with_the_time_window() {
        // The residual of the rate identity is dominated by the backward
        // Euler defect, which scales with the differencing window, not with
        // the grid. Compare two windows on one trajectory while the seed is
        // still moving fast.
        let snaps = snapshots_at(
            BoundaryFamily::FourArctan { alpha: 1.0 },
            1,
            192,
            &[0.05, 0.052, 0.058],
        );
        let rf = energy_rate_check(&snaps[0], &snaps[1]).residual;
        let rc = energy_rate_check(&snaps[0], &snaps[2]).residual;
        assert!(rf.is_finite() && rc.is_finite());
        assert!(rf < 0.75 * rc, "narrow window must win: {rf:e} vs {rc:e}");
    }

    #[test]
    fn pointwise_identity_holds_on_steady_states_up_to_truncation() {
        for (alpha, k) in [(1.0, 1u32), (4.0, 2), (0.5, 3)] {
            let p = sampled(&StationaryProfile::theta(alpha, k), 256);
            let zero = vec![0.0; p.values.len()];
            let res = sacks_uhlenbeck_residual(&p, &zero);
            let sup = res.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
            assert!(sup < 2e-3, "alpha={alpha} k={k}: sup residual {sup:e}");

            let p2 = sampled(&StationaryProfile::theta(alpha, k), 512);
            let res2 = sacks_uhlenbeck_residual(&p2, &vec![0.0; p2.values.len()]);
            let sup2 = res2.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
            assert!(
                sup2 < sup / 3.0,
                "alpha={alpha} k={k}: truncation should fall near second order"
            );
        }
    }

    #[test]
    fn pointwise_identity_exposes_the_excluded_constant() {
        // h = pi/2 solves the equation but is not equivariant; the identity
        // fails by exactly 1 at r = 1 (LHS 0, RHS -1).
        let grid = build_graded_grid(128, 2.0).unwrap();
        let p = Profile::new(grid, vec![PI / 2.0; 129], 0.0, 1);
        let zero = vec![0.0; 129];
        let res = sacks_uhlenbeck_residual(&p, &zero);
        assert!((res.last().unwrap() - 1.0).abs() < 1e-9);
        // And it vanishes identically on the zero map.
        let p0 = Profile::new(build_graded_grid(128, 2.0).unwrap(), vec![0.0; 129], 0.0, 1);
        assert!(sacks_uhlenbeck_residual(&p0, &zero)
            .iter()
            .all(|&x| x == 0.0));
    }
}
