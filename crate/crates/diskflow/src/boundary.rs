//! Boundary and initial data h0(r, t) on the parabolic boundary.
//!
//! k-equivariance forces h0(r, t) = m pi + r^k htilde(r, t) with htilde
//! bounded near the origin, so the admissible families are declared, not
//! free-form: arctan profiles, the four-arctan seed, ramps proportional to
//! r^k, tabulated profiles, and constants. Time dependence enters through
//! a multiplicative modulation of htilde (never of the origin multiple),
//! which keeps h0(0, t) pinned to the same multiple of pi for all t.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::grid::RadialGrid;

/// Multiplicative time modulation mu(t) of the r-dependent part, mu(0) = 1.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum TimeModulation {
    #[default]
    None,
    /// mu(t) = 1 + rate * t
    Linear { rate: f64 },
    /// mu(t) = 1 + amplitude * (cos(2 pi t / period) - 1); mu(0) = 1.
    Cosine { amplitude: f64, period: f64 },
}

impl TimeModulation {
    pub fn factor(&self, t: f64) -> f64 {
        match *self {
            TimeModulation::None => 1.0,
            TimeModulation::Linear { rate } => 1.0 + rate * t,
            TimeModulation::Cosine { amplitude, period } => {
                1.0 + amplitude * ((2.0 * PI * t / period).cos() - 1.0)
            }
        }
    }
}

/// The declared data families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum BoundaryFamily {
    /// m pi + sign * 2 arctan((alpha r)^k)
    StationaryArctan {
        alpha: f64,
        sign: i8,
        offset_m: i32,
    },
    /// 4 arctan((alpha r)^k)
    FourArctan {
        alpha: f64,
    },
    /// slope * r^k (the linear cone for k = 1)
    LinearRamp {
        slope: f64,
    },
    /// Piecewise-linear table of (r, h) knots; first knot must sit at r = 0.
    ScaledProfile {
        samples: Vec<(f64, f64)>,
    },
    Constant {
        value: f64,
    },
}

/// Immutable description of h0 on the whole parabolic boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryDataSpec {
    #[serde(flatten)]
    pub family: BoundaryFamily,
    pub k: u32,
    #[serde(default)]
    pub modulation: TimeModulation,
}

impl BoundaryDataSpec {
    pub fn new(family: BoundaryFamily, k: u32) -> Self {
        Self {
            family,
            k,
            modulation: TimeModulation::None,
        }
    }

    /// The pinned origin multiple m: h0(0, t) = m pi for all t.
    pub fn origin_multiple(&self) -> i32 {
        match self.family {
            BoundaryFamily::StationaryArctan { offset_m, .. } => offset_m,
            BoundaryFamily::FourArctan { .. } | BoundaryFamily::LinearRamp { .. } => 0,
            BoundaryFamily::ScaledProfile { ref samples } => {
                (samples.first().map_or(0.0, |s| s.1) / PI).round() as i32
            }
            BoundaryFamily::Constant { value } => (value / PI).round() as i32,
        }
    }

    /// Unmodulated profile at t = 0.
    fn base_value(&self, r: f64) -> f64 {
        let k = self.k as i32;
        match self.family {
            BoundaryFamily::StationaryArctan {
                alpha,
                sign,
                offset_m,
            } => offset_m as f64 * PI + sign as f64 * 2.0 * (alpha * r).powi(k).atan(),
            BoundaryFamily::FourArctan { alpha } => 4.0 * (alpha * r).powi(k).atan(),
            BoundaryFamily::LinearRamp { slope } => slope * r.powi(k),
            BoundaryFamily::ScaledProfile { ref samples } => interp_knots(samples, r),
            BoundaryFamily::Constant { value } => value,
        }
    }

    /// h0(r, t). Radii outside [0, 1] or negative times are usage errors.
    pub fn evaluate(&self, r: f64, t: f64) -> f64 {
        assert!(
            (0.0..=1.0).contains(&r) && t >= 0.0 && t.is_finite(),
            "boundary data queried outside its domain: r = {r}, t = {t}"
        );
        let anchor = self.origin_multiple() as f64 * PI;
        anchor + self.modulation.factor(t) * (self.base_value(r) - anchor)
    }

    /// Report-only structural validation against a grid and horizon.
    pub fn validate(&self, grid: &RadialGrid, t_max: f64) -> ValidationReport {
        let m = self.origin_multiple();
        let mut origin_in_pi_lattice = true;
        for i in 0..=16 {
            let t = t_max * i as f64 / 16.0;
            if (self.evaluate(0.0, t) - m as f64 * PI).abs() > 1e-12 {
                origin_in_pi_lattice = false;
            }
        }

        // h0 - m pi must vanish like r^k: measure the ratio on the three
        // smallest positive nodes.
        let anchor = m as f64 * PI;
        let core_ratio_bound = grid.nodes()[1..4]
            .iter()
            .map(|&r| ((self.evaluate(r, 0.0) - anchor) / r.powi(self.k as i32)).abs())
            .fold(0.0, f64::max);

        // Sup of |h0| over the parabolic boundary: the initial profile on
        // the grid plus both lateral traces.
        let mut sup_abs = 0.0f64;
        for &r in grid.nodes() {
            sup_abs = sup_abs.max(self.evaluate(r, 0.0).abs());
        }
        for i in 0..=64 {
            let t = t_max * i as f64 / 64.0;
            sup_abs = sup_abs.max(self.evaluate(0.0, t).abs());
            sup_abs = sup_abs.max(self.evaluate(1.0, t).abs());
        }

        ValidationReport {
            origin_in_pi_lattice,
            core_ratio_bound,
            core_ratio_finite: core_ratio_bound.is_finite(),
            bounded_by_pi: sup_abs <= PI + 1e-12,
            sup_abs,
        }
    }
}

/// Structural findings about a data spec. Boundedness by pi is the
/// global-existence criterion: data within [-pi, pi] on the parabolic
/// boundary cannot blow up in finite time.
///
/// Only finitely checkable facts appear here; flatness of the odd radial
/// derivatives of htilde at the origin is not recoverable from samples and
/// is not attempted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub origin_in_pi_lattice: bool,
    pub core_ratio_bound: f64,
    pub core_ratio_finite: bool,
    pub bounded_by_pi: bool,
    pub sup_abs: f64,
}

impl ValidationReport {
    pub fn all_structural_checks_pass(&self) -> bool {
        self.origin_in_pi_lattice && self.core_ratio_finite
    }
}

/// Sampled traces of h0 on the parabolic boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicBoundary {
    pub horizon: f64,
    /// (t, h0(0, t)) samples.
    pub left_values: Vec<(f64, f64)>,
    /// (t, h0(1, t)) samples.
    pub right_values: Vec<(f64, f64)>,
    /// h0(r, 0) on the grid nodes.
    pub initial_values: Vec<f64>,
}

impl ParabolicBoundary {
    pub fn sample(spec: &BoundaryDataSpec, grid: &RadialGrid, horizon: f64, nt: usize) -> Self {
        let times = (0..=nt).map(|i| horizon * i as f64 / nt as f64);
        let left_values: Vec<_> = times.clone().map(|t| (t, spec.evaluate(0.0, t))).collect();
        let right_values: Vec<_> = times.map(|t| (t, spec.evaluate(1.0, t))).collect();
        let initial_values = grid
            .nodes()
            .iter()
            .map(|&r| spec.evaluate(r, 0.0))
            .collect();
        Self {
            horizon,
            left_values,
            right_values,
            initial_values,
        }
    }
}

fn interp_knots(samples: &[(f64, f64)], r: f64) -> f64 {
    assert!(
        samples.len() >= 2 && samples[0].0 == 0.0,
        "tabulated profiles need at least two knots starting at r = 0"
    );
    if r <= samples[0].0 {
        return samples[0].1;
    }
    for w in samples.windows(2) {
        let ((r0, h0), (r1, h1)) = (w[0], w[1]);
        if r <= r1 {
            return h0 + (h1 - h0) * (r - r0) / (r1 - r0);
        }
    }
    samples.last().unwrap().1
}
