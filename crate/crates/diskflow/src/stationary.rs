//! Closed-form steady states of the radial flow and barrier fitting.
//!
//! The stationary families, all exact zeros of the spatial operator except
//! the four-arctan seed:
//!
//! - theta_alpha(r) = 2 arctan((alpha r)^k), increasing 0 -> pi
//! - chi_alpha(r)   = pi - 2 arctan((alpha r)^k), decreasing pi -> 0
//! - constants m pi
//! - psi(r) = 4 arctan((alpha r)^k), the seed whose flow grows forever
//!   (nonnegative residual, so it moves upward under the flow)

use std::f64::consts::PI;

use crate::grid::RadialGrid;
use crate::solver::Profile;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StationaryFamily {
    ThetaAlpha,
    ChiAlpha,
    ConstantMPi,
    FourArctan,
}

/// One member of a stationary family: value(r) = m*pi + base(r).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryProfile {
    pub family: StationaryFamily,
    pub alpha: f64,
    pub m: i32,
    pub k: u32,
}

impl StationaryProfile {
    pub fn theta(alpha: f64, k: u32) -> Self {
        Self {
            family: StationaryFamily::ThetaAlpha,
            alpha,
            m: 0,
            k,
        }
    }

    pub fn chi(alpha: f64, k: u32) -> Self {
        Self {
            family: StationaryFamily::ChiAlpha,
            alpha,
            m: 0,
            k,
        }
    }

    pub fn constant(m: i32) -> Self {
        Self {
            family: StationaryFamily::ConstantMPi,
            alpha: 1.0,
            m,
            k: 1,
        }
    }

    pub fn four_arctan(alpha: f64, k: u32) -> Self {
        Self {
            family: StationaryFamily::FourArctan,
            alpha,
            m: 0,
            k,
        }
    }

    /// Exact value and first derivative at radius r.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let k = self.k as i32;
        let u = (self.alpha * r).powi(k);
        // d/dr (alpha r)^k = k alpha^k r^{k-1}; r^0 = 1 even at r = 0.
        let du = self.k as f64 * self.alpha.powi(k) * r.powi(k - 1);
        let atan_pair = (2.0 * u.atan(), 2.0 * du / (1.0 + u * u));
        let offset = self.m as f64 * PI;
        match self.family {
            StationaryFamily::ThetaAlpha => (offset + atan_pair.0, atan_pair.1),
            StationaryFamily::ChiAlpha => (offset + PI - atan_pair.0, -atan_pair.1),
            StationaryFamily::ConstantMPi => (offset, 0.0),
            StationaryFamily::FourArctan => (offset + 2.0 * atan_pair.0, 2.0 * atan_pair.1),
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(r).0
    }

    /// Values at every node of a grid, ready to feed the flow solver.
    pub fn sample(&self, grid: &RadialGrid) -> Vec<f64> {
        grid.nodes().iter().map(|&r| self.value(r)).collect()
    }

    pub fn describe(&self) -> String {
        match self.family {
            StationaryFamily::ThetaAlpha => format!("theta(alpha={}, k={})", self.alpha, self.k),
            StationaryFamily::ChiAlpha => format!("chi(alpha={}, k={})", self.alpha, self.k),
            StationaryFamily::ConstantMPi => format!("constant {}*pi", self.m),
            StationaryFamily::FourArctan => {
                format!("four-arctan(alpha={}, k={})", self.alpha, self.k)
            }
        }
    }
}

/// Outcome of the semi-barrier search: the smallest ladder scale alpha
/// whose theta_alpha dominates |h| on the longest node prefix [0, r0].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BarrierFit {
    Found { alpha: f64, r0: f64 },
    NoBarrier,
}

/// Scales searched: 2^0, 2^1, ..., 2^30.
const LADDER_BITS: u32 = 31;

/// Fits a theta_alpha barrier over a profile pinned to 0 at the origin.
///
/// For each ladder alpha the dominated prefix is the largest p with
/// theta_alpha(r_i) >= |h_i| for all i <= p. The fit keeps the longest
/// prefix over the ladder and returns the smallest alpha achieving it.
/// A nonzero origin value (within 1e-12) cannot sit under any theta_alpha,
/// so it yields NoBarrier immediately.
pub fn barrier_fit(profile: &Profile) -> BarrierFit {
    if profile.values[0].abs() > 1e-12 {
        return BarrierFit::NoBarrier;
    }
    let nodes = profile.grid.nodes();
    let prefix = |alpha: f64| -> usize {
        let theta = StationaryProfile::theta(alpha, profile.k);
        let mut p = 0;
        for (i, &r) in nodes.iter().enumerate().skip(1) {
            if theta.value(r) >= profile.values[i].abs() {
                p = i;
            } else {
                break;
            }
        }
        p
    };
    let best = prefix((1u64 << (LADDER_BITS - 1)) as f64);
    if best == 0 {
        return BarrierFit::NoBarrier;
    }
    for bit in 0..LADDER_BITS {
        let alpha = (1u64 << bit) as f64;
        if prefix(alpha) == best {
            return BarrierFit::Found {
                alpha,
                r0: nodes[best],
            };
        }
    }
    unreachable!("the top ladder scale achieved the best prefix");
}
