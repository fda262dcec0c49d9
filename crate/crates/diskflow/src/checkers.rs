//! Numerical audits of the flow's ordering structure: the comparison
//! principle, the self-comparison (time-shift) bound, lap-number chains,
//! and a discrete interior maximum check.
//!
//! These are checkers, not provers: they evaluate the claimed inequalities
//! on sampled space-time lattices with explicit tolerances and report
//! worst violations. Hypothesis failures are first-class outcomes
//! (Inapplicable), never silent passes.

use std::f64::consts::PI;

use crate::grid::RadialGrid;
use crate::solver::Profile;
use crate::stationary::StationaryProfile;

/// Tolerance budget for comparison checks: C (dr_max^2 + dt_max), C = 10.
pub fn comparison_tolerance(grid: &RadialGrid, dt_max: f64) -> f64 {
    10.0 * (grid.max_spacing().powi(2) + dt_max)
}

/// Dead band around levels when classifying chain nodes: grid jitter near
/// tangential contact must not mint spurious chain elements.
pub fn chain_band(tol_band: f64, newton_tol: f64) -> f64 {
    tol_band + 10.0 * newton_tol
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderingVerdict {
    Ordered,
    Violated,
}

/// Result of an ordering audit over a space-time sample.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderingReport {
    /// Number of aligned snapshot pairs compared.
    pub pairs_checked: usize,
    /// Sup of (sub - super) over the sample; negative means strict order.
    pub max_violation: f64,
    /// (r, t) where the sup is attained.
    pub worst_location: Option<(f64, f64)>,
    pub tolerance: f64,
    pub verdict: OrderingVerdict,
}

impl OrderingReport {
    fn from_scan(
        pairs_checked: usize,
        max_violation: f64,
        worst_location: Option<(f64, f64)>,
        tolerance: f64,
    ) -> Self {
        let verdict = if max_violation <= tolerance {
            OrderingVerdict::Ordered
        } else {
            OrderingVerdict::Violated
        };
        Self {
            pairs_checked,
            max_violation,
            worst_location,
            tolerance,
            verdict,
        }
    }

    pub fn ordered(&self) -> bool {
        self.verdict == OrderingVerdict::Ordered
    }
}

/// Linear interpolation of a snapshot sequence at time t (clamped inside
/// the sampled range by the callers).
fn interp_values(snaps: &[Profile], t: f64) -> Vec<f64> {
    let idx = snaps.partition_point(|p| p.time < t);
    if idx == 0 {
        return snaps[0].values.clone();
    }
    if idx == snaps.len() {
        return snaps[snaps.len() - 1].values.clone();
    }
    let (a, b) = (&snaps[idx - 1], &snaps[idx]);
    if b.time == a.time {
        return b.values.clone();
    }
    let w = (t - a.time) / (b.time - a.time);
    a.values
        .iter()
        .zip(&b.values)
        .map(|(&x, &y)| x + w * (y - x))
        .collect()
}

/// Verifies sub <= super + tol over all aligned space-time samples.
/// Both snapshot lists must live on the same grid; the super run is
/// interpolated in time at each sub snapshot time.
pub fn comparison_check(sub: &[Profile], superior: &[Profile], tol: f64) -> OrderingReport {
    assert!(
        !sub.is_empty() && !superior.is_empty(),
        "comparison needs snapshots"
    );
    assert_eq!(
        sub[0].grid.nodes(),
        superior[0].grid.nodes(),
        "comparison runs must share a grid"
    );
    let (t_lo, t_hi) = (superior[0].time, superior[superior.len() - 1].time);
    let mut pairs = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut at = None;
    for snap in sub {
        if snap.time < t_lo - 1e-12 || snap.time > t_hi + 1e-12 {
            continue;
        }
        let upper = interp_values(superior, snap.time);
        pairs += 1;
        for (i, (&lo, &hi)) in snap.values.iter().zip(&upper).enumerate() {
            let gap = lo - hi;
            if gap > worst {
                worst = gap;
                at = Some((snap.grid.nodes()[i], snap.time));
            }
        }
    }
    assert!(pairs > 0, "comparison found no overlapping snapshot times");
    OrderingReport::from_scan(pairs, worst, at, tol)
}

/// Outcome of a check whose hypotheses may fail on the given data.
#[derive(Debug, Clone, PartialEq)]
pub enum CheckOutcome<T> {
    Checked(T),
    Inapplicable { reason: String },
}

impl<T> CheckOutcome<T> {
    pub fn checked(&self) -> Option<&T> {
        match self {
            CheckOutcome::Checked(t) => Some(t),
            CheckOutcome::Inapplicable { .. } => None,
        }
    }
}

/// Time-shift self-comparison: h(r, t - tau) - pi <= h(r, t) <= h(r, t - tau) + pi.
///
/// Hypotheses (checked before anything else): the profile stays within pi
/// of its start for the first tau of flow, and the outer boundary trace
/// moves less than pi across any tau window. Either failure is
/// Inapplicable, not a violation.
pub fn self_comparison_check(
    snaps: &[Profile],
    tau: f64,
    tol: f64,
) -> CheckOutcome<OrderingReport> {
    assert!(tau > 0.0 && !snaps.is_empty());
    let t0 = snaps[0].time;

    for snap in snaps.iter().filter(|s| s.time <= t0 + tau) {
        let dev = snap
            .values
            .iter()
            .zip(&snaps[0].values)
            .map(|(&a, &b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if dev > PI {
            return CheckOutcome::Inapplicable {
                reason: format!(
                    "initial continuity fails: profile moved {dev:.3} > pi within tau of start"
                ),
            };
        }
    }
    for snap in snaps.iter().filter(|s| s.time >= t0 + tau) {
        let past = interp_values(snaps, snap.time - tau);
        let edge_move = (snap.values.last().unwrap() - past.last().unwrap()).abs();
        if edge_move > PI {
            return CheckOutcome::Inapplicable {
                reason: format!("boundary trace moved {edge_move:.3} > pi across a tau window"),
            };
        }
    }

    let mut pairs = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut at = None;
    for snap in snaps.iter().filter(|s| s.time >= t0 + tau) {
        let past = interp_values(snaps, snap.time - tau);
        pairs += 1;
        for (i, (&now, &then)) in snap.values.iter().zip(&past).enumerate() {
            // Worst one-sided exceedance of the two-sided band then +- pi.
            let gap = (now - then - PI).max(then - PI - now);
            if gap > worst {
                worst = gap;
                at = Some((snap.grid.nodes()[i], snap.time));
            }
        }
    }
    if pairs == 0 {
        return CheckOutcome::Inapplicable {
            reason: "no snapshots at or beyond tau".to_string(),
        };
    }
    CheckOutcome::Checked(OrderingReport::from_scan(pairs, worst, at, tol))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainKind {
    P,
    Q,
}

/// Longest admissible chain found in a profile at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub kind: ChainKind,
    pub time: f64,
    pub max_length: usize,
    /// Strictly increasing radii realizing the chain.
    pub witness: Vec<f64>,
    pub lower_reference: String,
    pub upper_reference: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NodeClass {
    Below,
    Between,
    Above,
}

/// Greedy longest pattern-prefix over an ascending node scan. Earliest
/// match is optimal for subsequence embedding, so the greedy prefix length
/// is exact; the chain length is then the largest pattern-legal length
/// (parity `modulus`, residue 1) not exceeding it.
fn greedy_chain(
    radii: &[f64],
    classify: impl Fn(usize) -> Option<NodeClass>,
    wanted: impl Fn(usize) -> NodeClass,
    modulus: usize,
) -> (usize, Vec<f64>) {
    let mut witness = Vec::new();
    let mut pos = 1;
    for (i, &r) in radii.iter().enumerate() {
        if classify(i) == Some(wanted(pos)) {
            witness.push(r);
            pos += 1;
        }
    }
    let matched = pos - 1;
    if matched == 0 {
        return (0, witness);
    }
    let m = matched - ((matched - 1) % modulus);
    witness.truncate(m);
    (m, witness)
}

/// Maximal chain with the period-4 pattern below h1 / between h1 and the
/// level h2 / above h2 / between, with M = 1 mod 4. The standing
/// hypotheses h(0) < h1(0), h(1) > h1(1) gate applicability.
pub fn max_chain_p(
    profile: &Profile,
    h1: &StationaryProfile,
    h2_level: f64,
    eps: f64,
) -> CheckOutcome<ChainReport> {
    let nodes = profile.grid.nodes();
    let h = &profile.values;
    let n = nodes.len() - 1;
    let h1_first = h1.value(nodes[0]);
    let h1_last = h1.value(nodes[n]);
    let starts_below = h[0] < h1_first - eps;
    if !starts_below {
        return CheckOutcome::Inapplicable {
            reason: format!(
                "h(0) = {:.4} is not below the lower barrier {:.4}",
                h[0], h1_first
            ),
        };
    }
    let ends_above = h[n] > h1_last + eps;
    if !ends_above {
        return CheckOutcome::Inapplicable {
            reason: format!(
                "h(1) = {:.4} is not above the lower barrier {:.4}",
                h[n], h1_last
            ),
        };
    }

    let classify = |i: usize| -> Option<NodeClass> {
        let lo = h1.value(nodes[i]);
        if h[i] < lo - eps {
            Some(NodeClass::Below)
        } else if h[i] > lo + eps && h[i] < h2_level - eps {
            Some(NodeClass::Between)
        } else if h[i] > h2_level + eps {
            Some(NodeClass::Above)
        } else {
            None
        }
    };
    let wanted = |pos: usize| match pos % 4 {
        1 => NodeClass::Below,
        2 | 0 => NodeClass::Between,
        _ => NodeClass::Above,
    };
    let (m, witness) = greedy_chain(nodes, classify, wanted, 4);
    debug_assert!(
        m >= 1,
        "applicability guarantees a below-node at the origin"
    );
    CheckOutcome::Checked(ChainReport {
        kind: ChainKind::P,
        time: profile.time,
        max_length: m,
        witness,
        lower_reference: h1.describe(),
        upper_reference: format!("level {h2_level:.6}"),
    })
}

/// Maximal chain alternating below h1_level / above h2_level, M = 1 mod 2.
pub fn max_chain_q(
    profile: &Profile,
    h1_level: f64,
    h2_level: f64,
    eps: f64,
) -> CheckOutcome<ChainReport> {
    let nodes = profile.grid.nodes();
    let h = &profile.values;
    let starts_below = h[0] < h1_level - eps;
    if !starts_below {
        return CheckOutcome::Inapplicable {
            reason: format!(
                "no below-region at the origin: h(0) = {:.4} vs level {:.4}",
                h[0], h1_level
            ),
        };
    }
    let classify = |i: usize| -> Option<NodeClass> {
        if h[i] < h1_level - eps {
            Some(NodeClass::Below)
        } else if h[i] > h2_level + eps {
            Some(NodeClass::Above)
        } else {
            None
        }
    };
    let wanted = |pos: usize| {
        if pos % 2 == 1 {
            NodeClass::Below
        } else {
            NodeClass::Above
        }
    };
    let (m, witness) = greedy_chain(nodes, classify, wanted, 2);
    debug_assert!(m >= 1);
    CheckOutcome::Checked(ChainReport {
        kind: ChainKind::Q,
        time: profile.time,
        max_length: m,
        witness,
        lower_reference: format!("level {h1_level:.6}"),
        upper_reference: format!("level {h2_level:.6}"),
    })
}

/// Longest admissible subsequence by dynamic programming: reach[p] says a
/// pattern prefix of length p embeds into the nodes scanned so far. This
/// enumerates every node subsequence implicitly and shares no code with
/// the greedy scanner, so it serves as its audit oracle.
fn exhaustive_prefix(
    count: usize,
    matches: impl Fn(usize, usize) -> bool,
    modulus: usize,
) -> usize {
    let mut reach = vec![false; count + 1];
    reach[0] = true;
    let mut matched = 0;
    for i in 0..count {
        for p in (1..=(matched + 1).min(count)).rev() {
            if reach[p - 1] && matches(i, p) {
                reach[p] = true;
                matched = matched.max(p);
            }
        }
    }
    if matched == 0 {
        0
    } else {
        matched - ((matched - 1) % modulus)
    }
}

/// Audit twin of max_chain_p (same hypotheses, independent search).
pub fn exhaustive_chain_p(
    profile: &Profile,
    h1: &StationaryProfile,
    h2_level: f64,
    eps: f64,
) -> CheckOutcome<usize> {
    let nodes = profile.grid.nodes();
    let h = &profile.values;
    let n = nodes.len() - 1;
    let hypotheses = h[0] < h1.value(nodes[0]) - eps && h[n] > h1.value(nodes[n]) + eps;
    if !hypotheses {
        return CheckOutcome::Inapplicable {
            reason: "hypotheses fail".into(),
        };
    }
    let m = exhaustive_prefix(
        nodes.len(),
        |i, p| {
            let lo = h1.value(nodes[i]);
            match p % 4 {
                1 => h[i] < lo - eps,
                2 | 0 => h[i] > lo + eps && h[i] < h2_level - eps,
                _ => h[i] > h2_level + eps,
            }
        },
        4,
    );
    CheckOutcome::Checked(m)
}

/// Audit twin of max_chain_q.
pub fn exhaustive_chain_q(
    profile: &Profile,
    h1_level: f64,
    h2_level: f64,
    eps: f64,
) -> CheckOutcome<usize> {
    let h = &profile.values;
    let hypotheses = h[0] < h1_level - eps;
    if !hypotheses {
        return CheckOutcome::Inapplicable {
            reason: "hypotheses fail".into(),
        };
    }
    let m = exhaustive_prefix(
        profile.grid.nodes().len(),
        |i, p| {
            if p % 2 == 1 {
                h[i] < h1_level - eps
            } else {
                h[i] > h2_level + eps
            }
        },
        2,
    );
    CheckOutcome::Checked(m)
}

/// Chain length series over a run, audited for forward-in-time
/// non-increase (chains can only unwind as the flow smooths).
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSeries {
    /// (time, M) at applicable samples.
    pub samples: Vec<(f64, usize)>,
    pub inapplicable: usize,
    /// Consecutive applicable sample pairs where M grew.
    pub violations: Vec<(f64, f64)>,
}

impl ChainSeries {
    pub fn monotone_non_increasing(&self) -> bool {
        self.violations.is_empty()
    }

    fn from_outcomes(outcomes: impl Iterator<Item = (f64, CheckOutcome<ChainReport>)>) -> Self {
        let mut samples = Vec::new();
        let mut inapplicable = 0;
        for (t, outcome) in outcomes {
            match outcome {
                CheckOutcome::Checked(rep) => samples.push((t, rep.max_length)),
                CheckOutcome::Inapplicable { .. } => inapplicable += 1,
            }
        }
        let violations = samples
            .windows(2)
            .filter(|w| w[1].1 > w[0].1)
            .map(|w| (w[0].0, w[1].0))
            .collect();
        Self {
            samples,
            inapplicable,
            violations,
        }
    }
}

pub fn chain_monotonicity_p(
    snaps: &[Profile],
    h1: &StationaryProfile,
    h2_level: f64,
    eps: f64,
) -> ChainSeries {
    ChainSeries::from_outcomes(
        snaps
            .iter()
            .map(|s| (s.time, max_chain_p(s, h1, h2_level, eps))),
    )
}

pub fn chain_monotonicity_q(
    snaps: &[Profile],
    h1_level: f64,
    h2_level: f64,
    eps: f64,
) -> ChainSeries {
    ChainSeries::from_outcomes(
        snaps
            .iter()
            .map(|s| (s.time, max_chain_q(s, h1_level, h2_level, eps))),
    )
}

/// Grid-level energy floor of one monotone transit between two levels:
/// amplitude^2 pi / log(1 / r_1), from the Cauchy-Schwarz bound
/// (b - a)^2 <= (integral h_r^2 r dr)(log span). Any chain of M elements
/// must pay for its transits, so M * quantum stays below the run's peak
/// energy.
pub fn chain_energy_quantum(grid: &RadialGrid, amplitude: f64) -> f64 {
    PI * amplitude * amplitude / (1.0 / grid.nodes()[1]).ln()
}

/// One flagged interior touch of the level.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximumViolation {
    pub time: f64,
    pub radius: f64,
    pub value: f64,
}

/// Interior maximum audit: for t > 0 no interior node may reach
/// level - tol while both boundary nodes stay strictly below it.
#[derive(Debug, Clone, PartialEq)]
pub struct MaximumPrincipleReport {
    pub level: f64,
    pub snapshots_checked: usize,
    /// Smallest level - max interior |h| seen over t > 0.
    pub min_margin: f64,
    pub violations: Vec<MaximumViolation>,
}

impl MaximumPrincipleReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn discrete_maximum_check(snaps: &[Profile], level: f64, tol: f64) -> MaximumPrincipleReport {
    let mut min_margin = f64::INFINITY;
    let mut violations = Vec::new();
    let mut checked = 0;
    for snap in snaps.iter().filter(|s| s.time > 0.0) {
        checked += 1;
        let n = snap.values.len() - 1;
        let boundary = snap.values[0].abs().max(snap.values[n].abs());
        let mut interior_max = 0.0f64;
        let mut at = 0;
        for i in 1..n {
            if snap.values[i].abs() > interior_max {
                interior_max = snap.values[i].abs();
                at = i;
            }
        }
        min_margin = min_margin.min(level - interior_max);
        if interior_max >= level - tol && boundary < level - tol {
            violations.push(MaximumViolation {
                time: snap.time,
                radius: snap.grid.nodes()[at],
                value: snap.values[at],
            });
        }
    }
    MaximumPrincipleReport {
        level,
        snapshots_checked: checked,
        min_margin,
        violations,
    }
}
