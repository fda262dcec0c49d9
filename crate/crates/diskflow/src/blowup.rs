//! Gradient blow-up detection and post-mortem: parabolic rescaling of the
//! singular core, arctan-bubble fitting, front tracking, and the
//! single-vs-multi-bubble verdict.
//!
//! The flow can only concentrate at the origin, where the profile locks
//! onto the self-similar shape m pi +- 2 arctan((alpha rho)^k) at scale
//! R_n ~ 1/max|h_r|. Everything here is pure analysis over snapshots a
//! detector observer captured while the solver was running.

use std::collections::VecDeque;
use std::f64::consts::PI;

use serde::Serialize;

use crate::solver::{gradient_stats, FlowObserver, ObserverSignal, Profile, RunStatus};

/// Ring-buffer length: how many trailing accepted profiles the detector
/// keeps. Adaptive stepping shrinks dt toward detection, so the buffered
/// times are automatically spaced geometrically, denser near the event.
pub const BUFFER_LEN: usize = 64;

/// Minimum gradient for a trustworthy bubble extraction: below this the
/// core scale is not separated from the boundary data scale.
pub const MIN_FIT_GRADIENT: f64 = 100.0;

/// One buffered profile with its gradient statistics.
#[derive(Debug, Clone)]
pub struct SnapshotStat {
    pub profile: Profile,
    pub max_gradient: f64,
    pub argmax_radius: f64,
}

impl SnapshotStat {
    pub fn of(profile: Profile) -> Self {
        let (max_gradient, argmax_radius) = gradient_stats(&profile);
        Self {
            profile,
            max_gradient,
            argmax_radius,
        }
    }

    /// Extraction scale 2k / max|h_r|: theta_alpha has slope 2 k alpha at
    /// the core, so rescaling by this puts the fitted alpha near 1.
    pub fn extraction_scale(&self) -> f64 {
        2.0 * self.profile.k as f64 / self.max_gradient
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlowUpTrigger {
    GradientThreshold,
    StepFailure,
}

/// A detected (or solver-forced) singularity with its trailing history.
#[derive(Debug, Clone, Serialize)]
pub struct BlowUpEvent {
    pub detect_time: f64,
    pub max_gradient: f64,
    pub argmax_radius: f64,
    pub trigger: BlowUpTrigger,
    /// Peak gradient sat inside the grid's smallest decile at detection.
    pub concentrated_at_origin: bool,
    #[serde(skip)]
    pub snapshots: Vec<SnapshotStat>,
}

/// Observer that watches max |h_r|, keeps the trailing profiles, and halts
/// the run when the threshold is crossed.
pub struct BlowUpDetector {
    pub g_max: f64,
    buffer: VecDeque<SnapshotStat>,
    fired: bool,
}

impl BlowUpDetector {
    pub fn new(g_max: f64) -> Self {
        Self {
            g_max,
            buffer: VecDeque::with_capacity(BUFFER_LEN),
            fired: false,
        }
    }

    pub fn buffered(&self) -> impl Iterator<Item = &SnapshotStat> {
        self.buffer.iter()
    }

    /// Folds the captured history into a blow-up event. None when the run
    /// simply completed (no firing, no step failure).
    pub fn into_event(self, final_status: RunStatus) -> Option<BlowUpEvent> {
        let trigger = if self.fired {
            BlowUpTrigger::GradientThreshold
        } else if final_status == RunStatus::StepFailure {
            BlowUpTrigger::StepFailure
        } else {
            return None;
        };
        let last = self.buffer.back()?;
        let decile = last.profile.grid.first_decile_radius();
        let event = BlowUpEvent {
            detect_time: last.profile.time,
            max_gradient: last.max_gradient,
            argmax_radius: last.argmax_radius,
            trigger,
            concentrated_at_origin: last.argmax_radius <= decile,
            snapshots: self.buffer.into_iter().collect(),
        };
        Some(event)
    }
}

impl FlowObserver for BlowUpDetector {
    fn on_accepted(&mut self, profile: &Profile) -> ObserverSignal {
        let stat = SnapshotStat::of(profile.clone());
        let over = stat.max_gradient > self.g_max;
        if self.buffer.len() == BUFFER_LEN {
            self.buffer.pop_front();
        }
        self.buffer.push_back(stat);
        if over {
            self.fired = true;
            ObserverSignal::Halt
        } else {
            ObserverSignal::Continue
        }
    }
}

/// A fitted bubble core in rescaled coordinates rho = r / R_n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BubbleFit {
    /// Snapshot time the fit was taken at.
    pub t_n: f64,
    /// Extraction scale.
    pub r_n: f64,
    /// Fitted scale in rescaled coordinates (about 1 when R_n = 2k/G).
    pub alpha_est: f64,
    pub sign: i8,
    pub m_offset: i32,
    /// Sup-norm misfit (radians) against m pi + sign 2 arctan((alpha rho)^k)
    /// over the fit window.
    pub sup_error: f64,
    /// Fit window [rho_lo, rho_hi] in rescaled coordinates.
    pub window: (f64, f64),
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitError {
    /// Core and data scales are not separated enough to trust a fit.
    InsufficientGradient { max_gradient: f64 },
    /// No node of the profile lies in the transit band: under-resolved.
    NoTransit,
}

/// Fits the arctan model to the transit nearest the origin.
///
/// The transit band is where sign (h - m pi) lies in (0.1 pi, 0.9 pi);
/// the window is the first contiguous node run inside it. On the window,
/// tan(sign (h - m pi)/2) = (alpha rho)^k turns the fit into least squares
/// for log alpha at known slope k.
pub fn fit_arctan_core(profile: &Profile, r_n: f64) -> Result<BubbleFit, FitError> {
    let nodes = profile.grid.nodes();
    let h = &profile.values;
    let k = profile.k as f64;
    let m_offset = (h[0] / PI).round() as i32;
    let anchor = m_offset as f64 * PI;

    // Direction of the transit: the first departure beyond 0.1 pi decides.
    let mut sign = 0i8;
    for &hv in &h[1..] {
        let dev = hv - anchor;
        if dev.abs() > 0.1 * PI {
            sign = if dev > 0.0 { 1 } else { -1 };
            break;
        }
    }
    if sign == 0 {
        return Err(FitError::NoTransit);
    }
    let s = sign as f64;

    let mut window = Vec::new();
    let mut entered = false;
    for (i, &hv) in h.iter().enumerate().skip(1) {
        let t = s * (hv - anchor);
        let in_band = t > 0.1 * PI && t < 0.9 * PI;
        if in_band {
            entered = true;
            window.push(i);
        } else if entered {
            break;
        }
    }
    if window.is_empty() {
        return Err(FitError::NoTransit);
    }

    let mut acc = 0.0;
    for &i in &window {
        let y = (s * (h[i] - anchor) / 2.0).tan().ln();
        let x = (nodes[i] / r_n).ln();
        acc += y - k * x;
    }
    let alpha_est = (acc / (window.len() as f64 * k)).exp();

    let mut sup_error = 0.0f64;
    for &i in &window {
        let rho = nodes[i] / r_n;
        let model = anchor + s * 2.0 * (alpha_est * rho).powi(profile.k as i32).atan();
        sup_error = sup_error.max((h[i] - model).abs());
    }

    Ok(BubbleFit {
        t_n: profile.time,
        r_n,
        alpha_est,
        sign,
        m_offset,
        sup_error,
        window: (nodes[window[0]] / r_n, nodes[*window.last().unwrap()] / r_n),
        samples: window.len(),
    })
}

/// Bubble extraction from a detection buffer entry: gated on gradient
/// scale separation, scale fixed to 2k / G.
pub fn extract_bubble(event: &BlowUpEvent, index: usize) -> Result<BubbleFit, FitError> {
    let stat = &event.snapshots[index];
    if stat.max_gradient < MIN_FIT_GRADIENT {
        return Err(FitError::InsufficientGradient {
            max_gradient: stat.max_gradient,
        });
    }
    fit_arctan_core(&stat.profile, stat.extraction_scale())
}

/// Counts complete upward transits of the band [pi/4, 3pi/4] within
/// [0, r_limit]; each is one bubble core. Re-arming requires returning
/// below pi/4. Returns the transit intervals (last radius below the band,
/// first radius above it).
pub fn bubble_count(profile: &Profile, r_limit: f64) -> (usize, Vec<(f64, f64)>) {
    let lo = PI / 4.0;
    let hi = 3.0 * PI / 4.0;
    let mut armed_at: Option<f64> = None;
    let mut intervals = Vec::new();
    for (&r, &h) in profile.grid.nodes().iter().zip(&profile.values) {
        if r > r_limit {
            break;
        }
        if h <= lo {
            armed_at = Some(r);
        } else if h >= hi {
            if let Some(a) = armed_at.take() {
                intervals.push((a, r));
            }
        }
    }
    (intervals.len(), intervals)
}

/// sup{ r : h <= level + eps on [0, r] }, sharpened by linear
/// interpolation at the first crossing; 1.0 when there is none.
pub fn r_plus(profile: &Profile, level: f64, eps: f64) -> f64 {
    let nodes = profile.grid.nodes();
    let h = &profile.values;
    for i in 0..nodes.len() {
        if h[i] > level + eps {
            if i == 0 {
                return 0.0;
            }
            let (r0, r1) = (nodes[i - 1], nodes[i]);
            let (h0, h1) = (h[i - 1], h[i]);
            let cross = r0 + (level - h0) / (h1 - h0) * (r1 - r0);
            return cross.clamp(r0, r1);
        }
    }
    1.0
}

/// (t, r_plus at pi, r_minus at pi/2) per snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontSample {
    pub time: f64,
    pub r_plus: f64,
    pub r_minus: f64,
}

pub fn track_fronts(snaps: &[Profile], eps: f64) -> Vec<FrontSample> {
    snaps
        .iter()
        .map(|p| FrontSample {
            time: p.time,
            r_plus: r_plus(p, PI, eps),
            r_minus: r_plus(p, PI / 2.0, eps),
        })
        .collect()
}

/// Plateau reading outside the bubble core: h sampled on grid nodes with
/// r in [10 R_n, 100 R_n], reduced to the nearest multiple of pi and the
/// worst deviation from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OriginLimitReport {
    pub multiple: i32,
    pub deviation: f64,
    pub window: (f64, f64),
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum OriginLimitOutcome {
    Report(OriginLimitReport),
    /// The window holds no grid nodes: grid too coarse for this scale.
    Inconclusive,
}

pub fn origin_limit_check(profile: &Profile, r_n: f64) -> OriginLimitOutcome {
    let lo = 10.0 * r_n;
    let hi = (100.0 * r_n).min(1.0);
    let mut vals: Vec<f64> = profile
        .grid
        .nodes()
        .iter()
        .zip(&profile.values)
        .filter(|(&r, _)| r >= lo && r <= hi)
        .map(|(_, &h)| h)
        .collect();
    if vals.is_empty() {
        return OriginLimitOutcome::Inconclusive;
    }
    vals.sort_by(|a, b| a.total_cmp(b));
    let median = vals[vals.len() / 2];
    let multiple = (median / PI).round() as i32;
    let target = multiple as f64 * PI;
    let deviation = vals.iter().map(|v| (v - target).abs()).fold(0.0, f64::max);
    OriginLimitOutcome::Report(OriginLimitReport {
        multiple,
        deviation,
        window: (lo, hi),
        samples: vals.len(),
    })
}
