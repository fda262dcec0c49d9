//! Implicit time stepping for the radial flow
//! h_t = h_rr + h_r/r - k^2 sin(2h)/(2 r^2).
//!
//! Space: second-order central differences on the graded grid (non-uniform
//! three-point stencils). Time: backward Euler with Newton iteration on the
//! tridiagonal Jacobian and adaptive dt. Implicit stepping is the point:
//! near blow-up the problem is stiff and an explicit scheme would be held
//! hostage by the origin layer's dr_min^2.
//!
//! The origin node is Dirichlet data h(0, t) = m pi (the origin value of an
//! equivariant flow cannot move), the outer node follows the boundary
//! family; only interior nodes are solved for.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::boundary::BoundaryDataSpec;
use crate::grid::RadialGrid;

/// Within this distance of a lattice point m pi the nonlinearity sin(2h)/2
/// is evaluated as the deviation itself (their difference is O(dev^3)),
/// dodging the rounding floor of sin that 1/r^2 would amplify.
const SMALL_ANGLE: f64 = 1e-8;

/// Per accepted step, max |h_r| may grow by at most this factor (plus the
/// absolute slack below, so near-flat profiles are never throttled).
const GRADIENT_GROWTH_CAP: f64 = 1.25;
const GRADIENT_GROWTH_SLACK: f64 = 1.0;

/// One snapshot of the flow: h at every node at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub grid: Arc<RadialGrid>,
    pub values: Vec<f64>,
    pub time: f64,
    pub k: u32,
}

impl Profile {
    pub fn new(grid: impl Into<Arc<RadialGrid>>, values: Vec<f64>, time: f64, k: u32) -> Self {
        let grid = grid.into();
        assert_eq!(
            values.len(),
            grid.nodes().len(),
            "profile needs one value per grid node"
        );
        Self {
            grid,
            values,
            time,
            k,
        }
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Non-uniform three-point coefficients of the linear part
/// L h = h_rr + h_r / r at interior node i: L h ~ a h_{i-1} + b h_i + c h_{i+1}.
fn linear_coeffs(nodes: &[f64], i: usize) -> (f64, f64, f64) {
    let dm = nodes[i] - nodes[i - 1];
    let dp = nodes[i + 1] - nodes[i];
    let r = nodes[i];
    let a = (2.0 - dp / r) / (dm * (dm + dp));
    let b = -2.0 / (dm * dp) + (dp - dm) / (r * dm * dp);
    let c = (2.0 + dm / r) / (dp * (dm + dp));
    (a, b, c)
}

/// sin(2h)/2 with the small-angle ratio path.
fn half_sin_double(h: f64) -> f64 {
    // Near any lattice point m pi the angle-addition form sin(2h)/2 =
    // sin(2 dev)/2 with dev = h - m pi is exact; evaluating it as dev
    // avoids the rounding floor of sin at 2 m pi, which the 1/r^2 weight
    // would otherwise amplify at the innermost nodes.
    let dev = h - (h / PI).round() * PI;
    if dev.abs() < SMALL_ANGLE {
        dev
    } else {
        (2.0 * h).sin() / 2.0
    }
}

/// Discrete spatial operator tau(h) = h_rr + h_r/r - k^2 sin(2h)/(2 r^2)
/// on the interior nodes i = 1 .. N-1.
pub fn evaluate_tau(profile: &Profile) -> Vec<f64> {
    let nodes = profile.grid.nodes();
    let h = &profile.values;
    let k2 = (profile.k * profile.k) as f64;
    (1..nodes.len() - 1)
        .map(|i| {
            let (a, _, c) = linear_coeffs(nodes, i);
            let r = nodes[i];
            // Difference form: the stencil weights reach 1/dr_min^2, so the
            // plain weighted sum of near-equal values loses digits. Writing
            // it against h_i (the center weight is -(a + c)) annihilates
            // constant profiles exactly.
            let linear = a * (h[i - 1] - h[i]) + c * (h[i + 1] - h[i]);
            linear - k2 * half_sin_double(h[i]) / (r * r)
        })
        .collect()
}

/// First derivative h_r at every node: one-sided second-order stencils at
/// both ends, central non-uniform stencils inside.
pub fn radial_derivative(grid: &RadialGrid, values: &[f64]) -> Vec<f64> {
    let r = grid.nodes();
    let n = grid.resolution();
    let mut out = vec![0.0; n + 1];

    let (d1, d2) = (r[1] - r[0], r[2] - r[1]);
    out[0] = -(2.0 * d1 + d2) / (d1 * (d1 + d2)) * values[0] + (d1 + d2) / (d1 * d2) * values[1]
        - d1 / (d2 * (d1 + d2)) * values[2];

    for i in 1..n {
        let dm = r[i] - r[i - 1];
        let dp = r[i + 1] - r[i];
        out[i] = -dp / (dm * (dm + dp)) * values[i - 1]
            + (dp - dm) / (dm * dp) * values[i]
            + dm / (dp * (dm + dp)) * values[i + 1];
    }

    let (e1, e2) = (r[n - 1] - r[n - 2], r[n] - r[n - 1]);
    out[n] = e2 / (e1 * (e1 + e2)) * values[n - 2] - (e1 + e2) / (e1 * e2) * values[n - 1]
        + (2.0 * e2 + e1) / (e2 * (e1 + e2)) * values[n];

    out
}

/// Sup of |h_r| over the grid and the radius where it is attained.
pub fn gradient_stats(profile: &Profile) -> (f64, f64) {
    let grad = radial_derivative(&profile.grid, &profile.values);
    let mut best = (0.0f64, 0.0f64);
    for (i, g) in grad.iter().enumerate() {
        if g.abs() > best.0 {
            best = (g.abs(), profile.grid.nodes()[i]);
        }
    }
    best
}

/// Solves the tridiagonal system in place; `dia` and `rhs` are clobbered,
/// the solution lands in `rhs`.
fn thomas_solve(sub: &[f64], dia: &mut [f64], sup: &[f64], rhs: &mut [f64]) {
    let n = dia.len();
    for i in 1..n {
        let w = sub[i] / dia[i - 1];
        dia[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= dia[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / dia[i];
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub newton_tol: f64,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub max_newton_iters: u32,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            newton_tol: 1e-10,
            dt_init: 1e-6,
            dt_min: 1e-12,
            dt_max: 1e-2,
            max_newton_iters: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Running,
    #[serde(rename = "completed-horizon")]
    CompletedT,
    BlowUpDetected,
    StepFailure,
}

/// One line of the run's event log (serialized as JSON-lines).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventRecord {
    pub time: f64,
    pub event: String,
    pub detail: String,
}

/// A flow in progress: current profile, its data spec, adaptive step state.
#[derive(Debug, Clone)]
pub struct FlowRun {
    pub profile: Profile,
    pub spec: BoundaryDataSpec,
    pub dt: f64,
    pub settings: SolverSettings,
    pub step_count: u64,
    pub event_log: Vec<EventRecord>,
    pub status: RunStatus,
    /// max |h_r| of the last accepted profile, for growth-limited stepping.
    last_gradient: f64,
    /// sup |h| over the parabolic boundary data seen so far, for the
    /// spurious-root bound in attempt_step.
    data_sup: f64,
}

/// What an observer tells the driver after seeing an accepted profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObserverSignal {
    Continue,
    /// Stop integrating; the run is marked BlowUpDetected.
    Halt,
}

/// Callback fed every accepted profile, e.g. snapshot recorders and
/// blow-up detectors. Observers see the run read-only.
pub trait FlowObserver {
    fn on_accepted(&mut self, profile: &Profile) -> ObserverSignal;
}

impl FlowRun {
    /// Seeds the flow at t = 0 from the data spec sampled on the grid.
    pub fn new(grid: RadialGrid, spec: BoundaryDataSpec, settings: SolverSettings) -> Self {
        let grid = Arc::new(grid);
        let mut values: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&r| spec.evaluate(r, 0.0))
            .collect();
        // Pin the origin to its multiple of pi exactly; sampled data is
        // only within rounding of it.
        values[0] = spec.origin_multiple() as f64 * PI;
        let k = spec.k;
        let dt = settings.dt_init.clamp(settings.dt_min, settings.dt_max);
        let mut run = Self {
            profile: Profile {
                grid,
                values,
                time: 0.0,
                k,
            },
            spec,
            dt,
            settings,
            step_count: 0,
            event_log: Vec::new(),
            status: RunStatus::Running,
            last_gradient: 0.0,
            data_sup: 0.0,
        };
        run.last_gradient = gradient_stats(&run.profile).0;
        run.data_sup = run
            .profile
            .values
            .iter()
            .fold(0.0f64, |m, &v| m.max(v.abs()));
        run.log("started", format!("N = {}", run.profile.grid.resolution()));
        run
    }

    fn log(&mut self, event: &str, detail: String) {
        self.event_log.push(EventRecord {
            time: self.profile.time,
            event: event.to_string(),
            detail,
        });
    }

    /// One backward-Euler attempt at step size dt. On Newton convergence
    /// the profile is advanced and true is returned; otherwise the profile
    /// is untouched.
    fn attempt_step(&mut self, dt: f64) -> bool {
        let nodes = self.profile.grid.nodes();
        let n = self.profile.grid.resolution();
        let k2 = (self.profile.k * self.profile.k) as f64;
        let t_new = self.profile.time + dt;
        let prev = &self.profile.values;

        let mut h = prev.clone();
        h[0] = self.spec.origin_multiple() as f64 * PI;
        h[n] = self.spec.evaluate(1.0, t_new);

        let mut sub = vec![0.0; n - 1];
        let mut dia = vec![0.0; n - 1];
        let mut sup = vec![0.0; n - 1];
        let mut rhs = vec![0.0; n - 1];

        for _ in 0..self.settings.max_newton_iters {
            // Residual F_i = h_i - dt tau_i(h) - h^n_i on interior nodes.
            let mut sup_res = 0.0f64;
            for i in 1..n {
                let (a, b, c) = linear_coeffs(nodes, i);
                let r = nodes[i];
                // Same difference form as evaluate_tau, so steady states the
                // operator annihilates are fixed points of the stepper too.
                let linear = a * (h[i - 1] - h[i]) + c * (h[i + 1] - h[i]);
                let tau = linear - k2 * half_sin_double(h[i]) / (r * r);
                let f = h[i] - dt * tau - prev[i];
                rhs[i - 1] = -f;
                sup_res = sup_res.max(f.abs());
                sub[i - 1] = -dt * a;
                dia[i - 1] = 1.0 - dt * (b - k2 * (2.0 * h[i]).cos() / (r * r));
                sup[i - 1] = -dt * c;
            }
            if !sup_res.is_finite() {
                return false;
            }
            if sup_res < self.settings.newton_tol {
                // Comparison with pi-translates bounds any true solution by
                // its parabolic boundary data plus pi. A converged root far
                // above that is a spurious branch of the implicit system,
                // not a flow state: reject it like a Newton failure so the
                // driver shrinks dt and, if that never helps, gives up.
                let sup_h = h.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
                if sup_h > self.data_sup.max(h[n].abs()) + PI + 1.0 {
                    return false;
                }
                self.data_sup = self.data_sup.max(h[n].abs());
                self.profile.values = h;
                self.profile.time = t_new;
                return true;
            }
            thomas_solve(&sub, &mut dia, &sup, &mut rhs);
            for i in 1..n {
                h[i] += rhs[i - 1];
            }
        }
        false
    }

    /// Advances one accepted step: retry with halved dt on Newton failure,
    /// grow dt by 1.2 (capped at dt_max) on success, give up below dt_min.
    /// `horizon` optionally caps the step so runs land on a target time.
    fn step_capped(&mut self, horizon: Option<f64>) {
        if self.status != RunStatus::Running {
            return;
        }
        let mut attempt = self.dt;
        let mut capped = false;
        if let Some(t_end) = horizon {
            let remaining = t_end - self.profile.time;
            if remaining < attempt {
                attempt = remaining;
                capped = true;
            }
        }
        loop {
            if attempt < self.settings.dt_min {
                self.status = RunStatus::StepFailure;
                self.log(
                    "step-failure",
                    format!("dt fell below {} ", self.settings.dt_min),
                );
                return;
            }
            let saved = (self.profile.values.clone(), self.profile.time);
            if self.attempt_step(attempt) {
                // Accuracy control: a step that grows max |h_r| past the cap
                // has jumped concentration scales. Newton converges either
                // way — once the core falls through the mesh it lands on a
                // spurious spiky root — so convergence alone cannot police
                // this. Rejecting the step keeps the trajectory on the
                // continuum branch and makes the approach to a singular
                // time geometric in the gradient.
                let g_new = gradient_stats(&self.profile).0;
                if g_new > GRADIENT_GROWTH_SLACK + GRADIENT_GROWTH_CAP * self.last_gradient {
                    self.profile.values = saved.0;
                    self.profile.time = saved.1;
                    self.log(
                        "dt-halved",
                        format!(
                            "gradient jump {:.3e} -> {:.3e} at dt = {attempt:.3e}",
                            self.last_gradient, g_new
                        ),
                    );
                    attempt *= 0.5;
                    capped = false;
                    continue;
                }
                self.last_gradient = g_new;
                self.step_count += 1;
                // A horizon-capped first try should not shrink the stored
                // step; halved attempts should.
                let base = if capped { self.dt } else { attempt };
                self.dt = (base * 1.2)
                    .min(self.settings.dt_max)
                    .max(self.settings.dt_min);
                return;
            }
            self.log("dt-halved", format!("newton stalled at dt = {attempt:.3e}"));
            attempt *= 0.5;
            capped = false;
        }
    }

    /// Advances one accepted step (or fails the run).
    pub fn step(&mut self) {
        self.step_capped(None);
    }

    /// Steps until `t_end`, a status change, or an observer halt. Every
    /// accepted profile is offered to every observer.
    pub fn solve_until(&mut self, t_end: f64, observers: &mut [&mut dyn FlowObserver]) {
        const SNAP: f64 = 1e-12;
        loop {
            if self.status != RunStatus::Running {
                return;
            }
            if self.profile.time >= t_end - SNAP {
                self.profile.time = t_end.max(self.profile.time);
                self.status = RunStatus::CompletedT;
                self.log("completed", format!("t = {t_end}"));
                return;
            }
            self.step_capped(Some(t_end));
            if self.status != RunStatus::Running {
                return;
            }
            let mut halt = false;
            for obs in observers.iter_mut() {
                if obs.on_accepted(&self.profile) == ObserverSignal::Halt {
                    halt = true;
                }
            }
            if halt {
                self.status = RunStatus::BlowUpDetected;
                let (g, r) = gradient_stats(&self.profile);
                self.log(
                    "blow-up-halt",
                    format!("max |h_r| = {g:.3e} at r = {r:.3e}"),
                );
                return;
            }
        }
    }
}

/// Records every `stride`-th accepted profile.
pub struct SnapshotRecorder {
    pub stride: u64,
    seen: u64,
    pub snapshots: Vec<Profile>,
}

impl SnapshotRecorder {
    pub fn new(stride: u64) -> Self {
        assert!(stride >= 1);
        Self {
            stride,
            seen: 0,
            snapshots: Vec::new(),
        }
    }
}

impl FlowObserver for SnapshotRecorder {
    fn on_accepted(&mut self, profile: &Profile) -> ObserverSignal {
        if self.seen.is_multiple_of(self.stride) {
            self.snapshots.push(profile.clone());
        }
        self.seen += 1;
        ObserverSignal::Continue
    }
}

/// The flow profile lifted back to the sphere along the theta = 0 slice.
#[derive(Debug, Clone)]
pub struct ReconstructedMap {
    /// Unit vectors (sin h, 0, cos h) per node.
    pub vectors: Vec<[f64; 3]>,
    /// |grad v|^2 = h_r^2 + k^2 sin^2(h)/r^2 per node; at the origin the
    /// reporting convention is 0 for k >= 2 and 2 h_r(0+)^2 for k = 1.
    pub grad_sq: Vec<f64>,
    pub k: u32,
}

pub fn reconstruct_map(profile: &Profile) -> ReconstructedMap {
    let nodes = profile.grid.nodes();
    let k2 = (profile.k * profile.k) as f64;
    let grad = radial_derivative(&profile.grid, &profile.values);
    let vectors: Vec<[f64; 3]> = profile
        .values
        .iter()
        .map(|&h| [h.sin(), 0.0, h.cos()])
        .collect();
    let mut grad_sq: Vec<f64> = (1..nodes.len())
        .map(|i| {
            let s = profile.values[i].sin();
            grad[i] * grad[i] + k2 * s * s / (nodes[i] * nodes[i])
        })
        .collect();
    let origin = if profile.k == 1 {
        2.0 * grad[0] * grad[0]
    } else {
        0.0
    };
    grad_sq.insert(0, origin);
    ReconstructedMap {
        vectors,
        grad_sq,
        k: profile.k,
    }
}
