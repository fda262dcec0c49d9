//! Scenario pipelines: solve, diagnose, check, persist. One directory of
//! artifacts per run (config echo, CSV series, JSON-lines events, JSON
//! report, text summary), pass/fail folded into the report so the CLI can
//! turn it into an exit status.
//!
//! The comparison demo runs a fixed slate of ordered pairs; the other
//! scenarios take their boundary data from the config.

use std::f64::consts::PI;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::blowup::{
    bubble_count, extract_bubble, fit_arctan_core, origin_limit_check, track_fronts,
    BlowUpDetector, BlowUpEvent, OriginLimitOutcome,
};
use crate::boundary::{BoundaryDataSpec, BoundaryFamily};
use crate::checkers::{
    chain_band, chain_monotonicity_p, chain_monotonicity_q, comparison_check, comparison_tolerance,
    exhaustive_chain_p, exhaustive_chain_q, max_chain_p, max_chain_q, self_comparison_check,
    ChainSeries, CheckOutcome,
};
use crate::config::{RunConfig, Scenario, SweepAxis};
use crate::energy::{energy, EnergyLedger};
use crate::grid::{build_graded_grid, RadialGrid};
use crate::report::{
    write_event_log, write_json, write_series_csv, write_snapshot_csv, write_summary, Scalar,
    ScenarioReport, SweepCell, SweepReport,
};
use crate::solver::{evaluate_tau, gradient_stats, FlowRun, Profile, RunStatus, SnapshotRecorder};
use crate::stationary::StationaryProfile;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("output error: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Grid(#[from] crate::grid::GridError),
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Debug)]
pub struct ScenarioOutcome {
    pub report: ScenarioReport,
    pub out_dir: PathBuf,
    pub passed: bool,
}

/// Runs one configured scenario, writing all artifacts under out_dir.
/// `jobs` caps sweep parallelism; single runs ignore it.
pub fn run_scenario(
    config: &RunConfig,
    out_dir: &Path,
    jobs: usize,
) -> Result<ScenarioOutcome, ScenarioError> {
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("config.toml"), config.to_toml_string())?;
    let report = match config.scenario {
        Scenario::Stationary => stationary_pipeline(config, out_dir)?,
        Scenario::GlobalInfinity => global_pipeline(config, out_dir)?,
        Scenario::FiniteTimeBlowup => blowup_pipeline(config, out_dir)?,
        Scenario::ComparisonDemo => comparison_pipeline(config, out_dir)?,
        Scenario::ChainAudit => chain_audit_pipeline(config, out_dir)?,
        Scenario::Sweep => sweep_pipeline(config, out_dir, jobs)?,
    };
    write_json(&out_dir.join("report.json"), &report)?;
    write_summary(&out_dir.join("summary.txt"), &report)?;
    let passed = report.all_passed();
    Ok(ScenarioOutcome {
        report,
        out_dir: out_dir.to_path_buf(),
        passed,
    })
}

fn new_report(config: &RunConfig) -> ScenarioReport {
    ScenarioReport::new(
        config.scenario.name(),
        config.k,
        config.grid.n,
        config.horizon,
        config.seed,
    )
}

/// Snapshot stride keeping roughly 64 recorded profiles over the horizon
/// once the step has grown to dt_max.
fn snapshot_stride(config: &RunConfig) -> u64 {
    let est = config.horizon / config.stepping.dt_max;
    ((est / 64.0).ceil() as u64).max(1)
}

struct Evolved {
    run: FlowRun,
    /// Initial profile, recorded strides, final profile.
    snapshots: Vec<Profile>,
    event: Option<BlowUpEvent>,
}

fn evolve(
    config: &RunConfig,
    spec: BoundaryDataSpec,
    detect: bool,
) -> Result<Evolved, ScenarioError> {
    let grid = config.build_grid()?;
    let mut run = FlowRun::new(grid, spec, config.solver_settings());
    let mut recorder = SnapshotRecorder::new(snapshot_stride(config));
    let mut snapshots = vec![run.profile.clone()];
    let event = if detect {
        let mut detector = BlowUpDetector::new(config.tolerances.g_max);
        run.solve_until(config.horizon, &mut [&mut recorder, &mut detector]);
        detector.into_event(run.status)
    } else {
        run.solve_until(config.horizon, &mut [&mut recorder]);
        None
    };
    snapshots.extend(recorder.snapshots);
    if snapshots.last().is_none_or(|p| p.time < run.profile.time) {
        snapshots.push(run.profile.clone());
    }
    Ok(Evolved {
        run,
        snapshots,
        event,
    })
}

fn write_run_files(out_dir: &Path, ev: &Evolved) -> io::Result<()> {
    write_snapshot_csv(&out_dir.join("snapshots.csv"), &ev.snapshots)?;
    let ledger = EnergyLedger::from_snapshots(&ev.snapshots);
    let rows: Vec<Vec<f64>> = ledger
        .samples
        .iter()
        .map(|s| vec![s.time, s.energy, s.de_dt, s.flux, s.dissipation, s.residual])
        .collect();
    write_series_csv(
        &out_dir.join("energy.csv"),
        &["time", "energy", "de_dt", "flux", "dissipation", "residual"],
        &rows,
    )?;
    write_event_log(&out_dir.join("events.jsonl"), &ev.run.event_log)
}

fn nearest_node(grid: &RadialGrid, r: f64) -> usize {
    let mut best = 0;
    for (i, &node) in grid.nodes().iter().enumerate() {
        if (node - r).abs() < (grid.nodes()[best] - r).abs() {
            best = i;
        }
    }
    best
}

fn stationary_pipeline(
    config: &RunConfig,
    out_dir: &Path,
) -> Result<ScenarioReport, ScenarioError> {
    let mut report = new_report(config);
    let ev = evolve(config, config.boundary_spec(), false)?;
    write_run_files(out_dir, &ev)?;
    report.status = ev.run.status;

    report.check(
        "completed",
        ev.run.status == RunStatus::CompletedT,
        format!("final time {}", ev.run.profile.time),
    );
    let first = &ev.snapshots[0];
    let last = ev.snapshots.last().unwrap();
    let drift = first
        .values
        .iter()
        .zip(&last.values)
        .map(|(&a, &b)| (b - a).abs())
        .fold(0.0f64, f64::max);
    report.check(
        "drift",
        drift <= 1e-3,
        format!("sup drift {drift:.3e} vs 1e-3"),
    );
    let ledger = EnergyLedger::from_snapshots(&ev.snapshots);
    let growth = ledger.max_energy_increase();
    report.check(
        "energy-steady",
        growth <= 1e-6,
        format!("max energy increase {growth:.3e} vs 1e-6"),
    );
    report.scalar("drift", drift);
    report.scalar("energy-initial", energy(first));
    report.scalar("energy-final", energy(last));
    report.scalar("steps", ev.run.step_count as f64);
    Ok(report)
}

fn global_pipeline(config: &RunConfig, out_dir: &Path) -> Result<ScenarioReport, ScenarioError> {
    let mut report = new_report(config);
    let ev = evolve(config, config.boundary_spec(), false)?;
    write_run_files(out_dir, &ev)?;
    let fronts = track_fronts(&ev.snapshots, config.tolerances.tol_band);
    write_series_csv(
        &out_dir.join("fronts.csv"),
        &["time", "r_plus", "r_minus"],
        &fronts
            .iter()
            .map(|f| vec![f.time, f.r_plus, f.r_minus])
            .collect::<Vec<_>>(),
    )?;
    report.status = ev.run.status;

    report.check(
        "completed",
        ev.run.status == RunStatus::CompletedT,
        format!("final time {}", ev.run.profile.time),
    );

    let mut min_diff = f64::INFINITY;
    for pair in ev.snapshots.windows(2) {
        for (&a, &b) in pair[0].values.iter().zip(&pair[1].values) {
            min_diff = min_diff.min(b - a);
        }
    }
    report.check(
        "monotone-in-time",
        min_diff >= -1e-6,
        format!("min snapshot-to-snapshot change {min_diff:.3e} vs -1e-6"),
    );

    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for snap in &ev.snapshots {
        for &v in &snap.values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    report.check(
        "bounded",
        lo >= -1e-6 && hi <= PI + 1e-6,
        format!("range [{lo:.6}, {hi:.6}] vs [0, pi]"),
    );

    let ledger = EnergyLedger::from_snapshots(&ev.snapshots);
    let growth = ledger.max_energy_increase();
    report.check(
        "energy-decrease",
        growth <= 1e-6,
        format!("max energy increase {growth:.3e} vs 1e-6"),
    );

    let tol = comparison_tolerance(&ev.run.profile.grid, config.stepping.dt_max);
    match self_comparison_check(&ev.snapshots, 0.01, tol) {
        CheckOutcome::Checked(rep) => report.check(
            "self-comparison",
            rep.ordered(),
            format!(
                "worst band exceedance {:.3e} vs {tol:.3e}",
                rep.max_violation
            ),
        ),
        CheckOutcome::Inapplicable { reason } => {
            report.check("self-comparison", false, format!("inapplicable: {reason}"))
        }
    }

    let probe = nearest_node(&ev.run.profile.grid, 0.5);
    let rise = ev.run.profile.values[probe] - ev.snapshots[0].values[probe];
    report.check(
        "probe-rise",
        rise >= 0.05,
        format!("h(0.5, T) - h(0.5, 0) = {rise:.4} vs 0.05"),
    );

    let (g, _) = gradient_stats(&ev.run.profile);
    let r_n = 2.0 * config.k as f64 / g;
    match fit_arctan_core(&ev.run.profile, r_n) {
        Ok(fit) => {
            report.check(
                "core-shape",
                fit.sup_error <= 0.05 * PI,
                format!(
                    "rescaled core misfit {:.4} vs {:.4}",
                    fit.sup_error,
                    0.05 * PI
                ),
            );
            report.scalar("core-alpha", fit.alpha_est);
            report.scalar("core-sup-error", fit.sup_error);
        }
        Err(e) => report.check("core-shape", false, format!("fit failed: {e:?}")),
    }

    report.scalar("energy-initial", energy(&ev.snapshots[0]));
    report.scalar("energy-final", energy(ev.snapshots.last().unwrap()));
    report.scalar("min-step-difference", min_diff);
    report.scalar("sup-h", hi);
    report.scalar("probe-rise", rise);
    report.scalar("max-gradient-final", g);
    report.scalar("steps", ev.run.step_count as f64);
    Ok(report)
}

fn blowup_pipeline(config: &RunConfig, out_dir: &Path) -> Result<ScenarioReport, ScenarioError> {
    let mut report = new_report(config);
    let ev = evolve(config, config.boundary_spec(), true)?;
    write_run_files(out_dir, &ev)?;
    report.status = ev.run.status;

    match &ev.event {
        None => {
            let (g, _) = gradient_stats(&ev.run.profile);
            report.check(
                "blow-up-detected",
                false,
                format!(
                    "no detection by t = {}: max gradient {g:.3e} vs threshold {:.3e}",
                    ev.run.profile.time, config.tolerances.g_max
                ),
            );
            report.scalar("max-gradient-final", g);
        }
        Some(event) => {
            let buffered: Vec<Profile> =
                event.snapshots.iter().map(|s| s.profile.clone()).collect();
            write_snapshot_csv(&out_dir.join("buffered.csv"), &buffered)?;
            let fronts = track_fronts(&buffered, config.tolerances.tol_band);
            write_series_csv(
                &out_dir.join("fronts.csv"),
                &["time", "r_plus", "r_minus"],
                &fronts
                    .iter()
                    .map(|f| vec![f.time, f.r_plus, f.r_minus])
                    .collect::<Vec<_>>(),
            )?;

            report.check(
                "blow-up-detected",
                true,
                format!(
                    "trigger {:?} at t = {:.6}",
                    event.trigger, event.detect_time
                ),
            );
            report.check(
                "concentrated-at-origin",
                event.concentrated_at_origin,
                format!("peak gradient radius {:.3e}", event.argmax_radius),
            );

            let mut bad_counts = Vec::new();
            for stat in &event.snapshots {
                let (count, _) = bubble_count(&stat.profile, 1.0);
                if count != 1 {
                    bad_counts.push((stat.profile.time, count));
                }
            }
            report.check(
                "single-bubble",
                bad_counts.is_empty(),
                if bad_counts.is_empty() {
                    format!(
                        "1 core transit in all {} buffered snapshots",
                        event.snapshots.len()
                    )
                } else {
                    format!("off-count snapshots: {bad_counts:?}")
                },
            );

            let last = event.snapshots.last().unwrap();
            match origin_limit_check(&last.profile, last.extraction_scale()) {
                OriginLimitOutcome::Report(rep) => {
                    report.check(
                        "origin-limit",
                        rep.multiple == 1 && rep.deviation <= 0.1 * PI,
                        format!(
                            "plateau at {} pi, deviation {:.4} vs {:.4}",
                            rep.multiple,
                            rep.deviation,
                            0.1 * PI
                        ),
                    );
                    report.scalar("origin-deviation", rep.deviation);
                }
                OriginLimitOutcome::Inconclusive => report.check(
                    "origin-limit",
                    false,
                    "no grid nodes in the plateau window".to_string(),
                ),
            }

            match extract_bubble(event, event.snapshots.len() - 1) {
                Ok(fit) => {
                    report.scalar("bubble-alpha", fit.alpha_est);
                    report.scalar("bubble-sup-error", fit.sup_error);
                    report.scalar("bubble-sign", fit.sign as f64);
                }
                Err(e) => report.check("bubble-fit", false, format!("{e:?}")),
            }

            report.scalar("detect-time", event.detect_time);
            report.scalar("max-gradient", event.max_gradient);
            report.scalar("argmax-radius", event.argmax_radius);
        }
    }

    let tol = comparison_tolerance(&ev.run.profile.grid, config.stepping.dt_max);
    match self_comparison_check(&ev.snapshots, 0.01, tol) {
        CheckOutcome::Checked(rep) => report.check(
            "self-comparison",
            rep.ordered(),
            format!(
                "worst band exceedance {:.3e} vs {tol:.3e}",
                rep.max_violation
            ),
        ),
        CheckOutcome::Inapplicable { reason } => {
            report.check("self-comparison", false, format!("inapplicable: {reason}"))
        }
    }

    report.scalar("steps", ev.run.step_count as f64);
    Ok(report)
}

fn comparison_pipeline(
    config: &RunConfig,
    out_dir: &Path,
) -> Result<ScenarioReport, ScenarioError> {
    let mut report = new_report(config);
    let grid = Arc::new(config.build_grid()?);
    let k = config.k;
    let tol = comparison_tolerance(&grid, config.stepping.dt_max);
    let frozen = |alpha: f64| -> Vec<Profile> {
        let sp = StationaryProfile::theta(alpha, k);
        vec![Profile {
            grid: grid.clone(),
            values: sp.sample(&grid),
            time: 0.0,
            k,
        }]
    };
    let constant = |value: f64, horizon: f64| -> Vec<Profile> {
        let n = grid.nodes().len();
        vec![
            Profile {
                grid: grid.clone(),
                values: vec![value; n],
                time: 0.0,
                k,
            },
            Profile {
                grid: grid.clone(),
                values: vec![value; n],
                time: horizon,
                k,
            },
        ]
    };

    let seed_run = evolve(
        config,
        BoundaryDataSpec::new(BoundaryFamily::FourArctan { alpha: 1.0 }, k),
        false,
    )?;
    write_run_files(out_dir, &seed_run)?;
    let stationary_run = evolve(
        config,
        BoundaryDataSpec::new(
            BoundaryFamily::StationaryArctan {
                alpha: 1.0,
                sign: 1,
                offset_m: 0,
            },
            k,
        ),
        false,
    )?;
    let ramp_low = evolve(
        config,
        BoundaryDataSpec::new(BoundaryFamily::LinearRamp { slope: 2.0 }, k),
        false,
    )?;
    let ramp_high = evolve(
        config,
        BoundaryDataSpec::new(BoundaryFamily::LinearRamp { slope: 2.5 }, k),
        false,
    )?;

    report.check(
        "completed",
        [&seed_run, &stationary_run, &ramp_low, &ramp_high]
            .iter()
            .all(|ev| ev.run.status == RunStatus::CompletedT),
        format!(
            "run statuses {:?}",
            [&seed_run, &stationary_run, &ramp_low, &ramp_high].map(|ev| ev.run.status)
        ),
    );

    let theta_half = frozen(0.5);
    let theta_one = frozen(1.0);
    let theta_four = frozen(4.0);
    let pi_wall = constant(PI, config.horizon);
    let pairs: [(&str, &[Profile], &[Profile]); 5] = [
        ("theta-half-below-theta-one", &theta_half, &theta_one),
        ("theta-one-below-theta-four", &theta_one, &theta_four),
        ("seed-run-below-pi", &seed_run.snapshots, &pi_wall),
        (
            "stationary-run-below-pi",
            &stationary_run.snapshots,
            &pi_wall,
        ),
        (
            "ramp-two-below-ramp-two-and-half",
            &ramp_low.snapshots,
            &ramp_high.snapshots,
        ),
    ];
    for (name, sub, superior) in pairs {
        let rep = comparison_check(sub, superior, tol);
        report.check(
            name,
            rep.ordered(),
            format!(
                "max violation {:.3e} vs {tol:.3e} over {} pairs",
                rep.max_violation, rep.pairs_checked
            ),
        );
        report.scalars.push(Scalar {
            name: format!("violation-{name}"),
            value: rep.max_violation,
        });
    }
    report.status = seed_run.run.status;
    Ok(report)
}

/// Random walk from 0 on a small uniform lattice; exercises every class
/// pattern the chain scanners distinguish.
fn random_walk_profile(rng: &mut ChaCha8Rng, grid: &Arc<RadialGrid>) -> Profile {
    let mut values: Vec<f64> = vec![0.0];
    for _ in 1..grid.nodes().len() {
        let prev = *values.last().unwrap();
        let next = (prev + rng.random_range(-0.7..0.7)).clamp(-1.0, 4.2);
        values.push(next);
    }
    Profile {
        grid: grid.clone(),
        values,
        time: 0.0,
        k: 1,
    }
}

fn chain_audit_pipeline(
    config: &RunConfig,
    out_dir: &Path,
) -> Result<ScenarioReport, ScenarioError> {
    let mut report = new_report(config);
    let eps = chain_band(config.tolerances.tol_band, config.tolerances.newton_tol);
    let ev = evolve(config, config.boundary_spec(), false)?;
    write_run_files(out_dir, &ev)?;
    report.status = ev.run.status;

    report.check(
        "completed",
        ev.run.status == RunStatus::CompletedT,
        format!("final time {}", ev.run.profile.time),
    );

    let lower = StationaryProfile::chi(2.0, config.k);
    let p_series = chain_monotonicity_p(&ev.snapshots, &lower, PI, eps);
    let q_series = chain_monotonicity_q(&ev.snapshots, PI / 2.0, PI, eps);

    let chain_rows: Vec<Vec<f64>> = ev
        .snapshots
        .iter()
        .map(|snap| {
            let m_p = max_chain_p(snap, &lower, PI, eps)
                .checked()
                .map_or(-1.0, |r| r.max_length as f64);
            let m_q = max_chain_q(snap, PI / 2.0, PI, eps)
                .checked()
                .map_or(-1.0, |r| r.max_length as f64);
            vec![snap.time, m_p, m_q]
        })
        .collect();
    write_series_csv(
        &out_dir.join("chains.csv"),
        &["time", "m_p", "m_q"],
        &chain_rows,
    )?;

    let series_check = |report: &mut ScenarioReport, name: &str, series: &ChainSeries| {
        report.check(
            name,
            series.monotone_non_increasing(),
            if series.violations.is_empty() {
                format!(
                    "{} applicable samples, {} inapplicable",
                    series.samples.len(),
                    series.inapplicable
                )
            } else {
                format!("growth between times {:?}", series.violations)
            },
        );
    };
    series_check(&mut report, "p-chain-forward", &p_series);
    series_check(&mut report, "q-chain-forward", &q_series);

    let parity_ok = p_series
        .samples
        .iter()
        .all(|&(_, m)| m >= 1 && (m - 1) % 4 == 0)
        && q_series
            .samples
            .iter()
            .all(|&(_, m)| m >= 1 && (m - 1) % 2 == 0);
    report.check(
        "parity",
        parity_ok,
        "every reported length is 1 mod 4 (three-band) or 1 mod 2 (two-band)",
    );

    let initial = &ev.snapshots[0];
    let ladder = [0.5, 1.0, 2.0, 3.0, 4.0, 8.0, 16.0];
    let ladder_m: Vec<usize> = ladder
        .iter()
        .filter_map(|&alpha| {
            max_chain_p(initial, &StationaryProfile::chi(alpha, config.k), PI, eps)
                .checked()
                .map(|r| r.max_length)
        })
        .collect();
    report.check(
        "barrier-scale-non-increase",
        ladder_m.windows(2).all(|w| w[1] <= w[0]),
        format!("lengths along the barrier ladder: {ladder_m:?}"),
    );

    let audit_grid = Arc::new(build_graded_grid(48, 1.0)?);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut audited = 0;
    let mut applicable = 0;
    let mut mismatches = Vec::new();
    for trial in 0..64 {
        let sample = random_walk_profile(&mut rng, &audit_grid);
        let greedy_p = max_chain_p(&sample, &lower, PI, eps);
        let dp_p = exhaustive_chain_p(&sample, &lower, PI, eps);
        match (greedy_p.checked(), dp_p.checked()) {
            (Some(rep), Some(&m)) => {
                applicable += 1;
                if rep.max_length != m {
                    mismatches.push((trial, "three-band", rep.max_length, m));
                }
            }
            (None, None) => {}
            (a, b) => mismatches.push((
                trial,
                "three-band applicability",
                a.is_some() as usize,
                b.is_some() as usize,
            )),
        }
        let greedy_q = max_chain_q(&sample, PI / 2.0, PI, eps);
        let dp_q = exhaustive_chain_q(&sample, PI / 2.0, PI, eps);
        match (greedy_q.checked(), dp_q.checked()) {
            (Some(rep), Some(&m)) => {
                if rep.max_length != m {
                    mismatches.push((trial, "two-band", rep.max_length, m));
                }
            }
            (None, None) => {}
            (a, b) => mismatches.push((
                trial,
                "two-band applicability",
                a.is_some() as usize,
                b.is_some() as usize,
            )),
        }
        audited += 1;
    }
    report.check(
        "greedy-matches-enumeration",
        mismatches.is_empty(),
        if mismatches.is_empty() {
            format!("{audited} random profiles audited, {applicable} three-band applicable")
        } else {
            format!("disagreements: {mismatches:?}")
        },
    );

    if let Some(&(_, m)) = p_series.samples.first() {
        report.scalar("m-p-initial", m as f64);
    }
    if let Some(&(_, m)) = p_series.samples.last() {
        report.scalar("m-p-final", m as f64);
    }
    if let Some(&(_, m)) = q_series.samples.first() {
        report.scalar("m-q-initial", m as f64);
    }
    if let Some(&(_, m)) = q_series.samples.last() {
        report.scalar("m-q-final", m as f64);
    }
    report.scalar("audited-profiles", audited as f64);
    Ok(report)
}

fn sweep_pipeline(
    config: &RunConfig,
    out_dir: &Path,
    jobs: usize,
) -> Result<ScenarioReport, ScenarioError> {
    let axis = config
        .sweep
        .clone()
        .expect("validated sweep config has an axis");
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| ScenarioError::Pool(e.to_string()))?;
    let mut report = new_report(config);
    report.status = RunStatus::CompletedT;

    let (axis_name, cells) = match &axis {
        SweepAxis::K(ks) => ("k", sweep_k(config, out_dir, &pool, ks)?),
        SweepAxis::Alpha(alphas) => ("alpha", sweep_alpha(config, &pool, alphas)?),
        SweepAxis::GridN(ns) => ("grid-n", sweep_grid(config, &pool, ns)?),
    };

    let mut table = SweepReport::new(axis_name);
    table.cells = cells;
    for cell in &table.cells {
        report.check(
            &format!("cell-{}", cell.label),
            cell.passed,
            cell.scalars
                .iter()
                .map(|s| format!("{} = {:.6e}", s.name, s.value))
                .collect::<Vec<_>>()
                .join(", "),
        );
    }

    match &axis {
        SweepAxis::K(_) => {}
        SweepAxis::Alpha(alphas) => {
            let energies: Vec<f64> = table
                .cells
                .iter()
                .filter_map(|c| c.scalars.iter().find(|s| s.name == "energy"))
                .map(|s| s.value)
                .collect();
            report.check(
                "energy-increasing-in-scale",
                energies.windows(2).all(|w| w[1] > w[0]),
                format!("energies over alpha {alphas:?}: {energies:?}"),
            );
        }
        SweepAxis::GridN(ns) => {
            let residuals: Vec<f64> = table
                .cells
                .iter()
                .filter_map(|c| c.scalars.iter().find(|s| s.name == "residual"))
                .map(|s| s.value)
                .collect();
            let mut orders = Vec::new();
            for i in 1..residuals.len() {
                let ratio_n = ns[i] as f64 / ns[i - 1] as f64;
                orders.push((residuals[i - 1] / residuals[i]).ln() / ratio_n.ln());
            }
            report.check(
                "residual-order",
                orders.iter().all(|&p| p >= 1.8),
                format!("observed orders {orders:?} vs 1.8"),
            );
        }
    }

    write_json(&out_dir.join("sweep.json"), &table)?;
    Ok(report)
}

fn sweep_k(
    config: &RunConfig,
    out_dir: &Path,
    pool: &rayon::ThreadPool,
    ks: &[u32],
) -> Result<Vec<SweepCell>, ScenarioError> {
    let results: Vec<SweepCell> = pool.install(|| {
        ks.par_iter()
            .map(|&k| {
                let mut derived = config.clone();
                derived.scenario = Scenario::Stationary;
                derived.k = k;
                derived.grid.gamma = None;
                derived.sweep = None;
                let label = format!("k-{k}");
                match run_scenario(&derived, &out_dir.join(format!("cell-{label}")), 1) {
                    Ok(outcome) => SweepCell {
                        label,
                        passed: outcome.passed,
                        status: outcome.report.status,
                        scalars: outcome.report.scalars.clone(),
                    },
                    Err(e) => SweepCell {
                        label,
                        passed: false,
                        status: RunStatus::Running,
                        scalars: vec![Scalar {
                            name: format!("error: {e}"),
                            value: f64::NAN,
                        }],
                    },
                }
            })
            .collect()
    });
    Ok(results)
}

fn sweep_alpha(
    config: &RunConfig,
    pool: &rayon::ThreadPool,
    alphas: &[f64],
) -> Result<Vec<SweepCell>, ScenarioError> {
    let grid = Arc::new(config.build_grid()?);
    let k = config.k;
    let cells = pool.install(|| {
        alphas
            .par_iter()
            .map(|&alpha| {
                let sp = StationaryProfile::theta(alpha, k);
                let profile = Profile {
                    grid: grid.clone(),
                    values: sp.sample(&grid),
                    time: 0.0,
                    k,
                };
                let e = energy(&profile);
                SweepCell {
                    label: format!("alpha-{alpha}"),
                    passed: e.is_finite() && e > 0.0,
                    status: RunStatus::CompletedT,
                    scalars: vec![Scalar {
                        name: "energy".into(),
                        value: e,
                    }],
                }
            })
            .collect()
    });
    Ok(cells)
}

fn sweep_grid(
    config: &RunConfig,
    pool: &rayon::ThreadPool,
    ns: &[usize],
) -> Result<Vec<SweepCell>, ScenarioError> {
    let k = config.k;
    let gamma = config.gamma();
    let alpha = match config.boundary.family {
        BoundaryFamily::StationaryArctan { alpha, .. } => alpha,
        BoundaryFamily::FourArctan { alpha } => alpha,
        _ => 1.0,
    };
    let cells: Vec<Result<SweepCell, ScenarioError>> = pool.install(|| {
        ns.par_iter()
            .map(|&n| {
                let grid = Arc::new(build_graded_grid(n, gamma)?);
                let sp = StationaryProfile::theta(alpha, k);
                let profile = Profile {
                    grid: grid.clone(),
                    values: sp.sample(&grid),
                    time: 0.0,
                    k,
                };
                let residual = evaluate_tau(&profile)
                    .iter()
                    .map(|t| t.abs())
                    .fold(0.0f64, f64::max);
                Ok(SweepCell {
                    label: format!("n-{n}"),
                    passed: residual.is_finite(),
                    status: RunStatus::CompletedT,
                    scalars: vec![Scalar {
                        name: "residual".into(),
                        value: residual,
                    }],
                })
            })
            .collect()
    });
    cells.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::canonical;

    #[test]
    fn stride_keeps_snapshot_counts_reasonable() {
        let mut c = canonical(Scenario::GlobalInfinity);
        assert_eq!(snapshot_stride(&c), 8, "T = 5 at dt_max 1e-2");
        c.horizon = 0.05;
        assert_eq!(snapshot_stride(&c), 1);
    }

    #[test]
    fn random_walks_are_seed_deterministic() {
        let grid = Arc::new(build_graded_grid(48, 1.0).unwrap());
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        let pa = random_walk_profile(&mut a, &grid);
        let pb = random_walk_profile(&mut b, &grid);
        assert_eq!(pa.values, pb.values);
        assert!(pa.values.iter().all(|v| (-1.0..=4.2).contains(v)));
    }

    #[test]
    fn stationary_scenario_passes_end_to_end() {
        let mut c = canonical(Scenario::Stationary);
        c.grid.n = 64;
        c.horizon = 0.1;
        let dir = tempfile::tempdir().unwrap();
        let outcome = run_scenario(&c, dir.path(), 1).unwrap();
        assert!(
            outcome.passed,
            "{}",
            crate::report::render_summary(&outcome.report)
        );
        for name in [
            "config.toml",
            "snapshots.csv",
            "energy.csv",
            "events.jsonl",
            "report.json",
            "summary.txt",
        ] {
            assert!(dir.path().join(name).exists(), "missing {name}");
        }
    }

    #[test]
    fn comparison_demo_passes_at_desk_scale() {
        let mut c = canonical(Scenario::ComparisonDemo);
        c.grid.n = 64;
        c.horizon = 0.05;
        let dir = tempfile::tempdir().unwrap();
        let outcome = run_scenario(&c, dir.path(), 1).unwrap();
        assert!(
            outcome.passed,
            "{}",
            crate::report::render_summary(&outcome.report)
        );
        assert_eq!(
            outcome.report.checks.len(),
            6,
            "completion plus five ordered pairs"
        );
    }

    #[test]
    fn chain_audit_passes_and_writes_chain_series() {
        let mut c = canonical(Scenario::ChainAudit);
        c.grid.n = 256;
        c.horizon = 0.002;
        let dir = tempfile::tempdir().unwrap();
        let outcome = run_scenario(&c, dir.path(), 1).unwrap();
        assert!(
            outcome.passed,
            "{}",
            crate::report::render_summary(&outcome.report)
        );
        assert!(dir.path().join("chains.csv").exists());
    }

    #[test]
    fn alpha_sweep_orders_energies() {
        let mut c = canonical(Scenario::Sweep);
        c.grid.n = 256;
        c.sweep = Some(SweepAxis::Alpha(vec![0.5, 1.0, 2.0, 4.0]));
        let dir = tempfile::tempdir().unwrap();
        let outcome = run_scenario(&c, dir.path(), 2).unwrap();
        assert!(
            outcome.passed,
            "{}",
            crate::report::render_summary(&outcome.report)
        );
        assert!(dir.path().join("sweep.json").exists());
    }

    #[test]
    fn grid_sweep_measures_second_order() {
        let mut c = canonical(Scenario::Sweep);
        c.sweep = Some(SweepAxis::GridN(vec![128, 256, 512]));
        let dir = tempfile::tempdir().unwrap();
        let outcome = run_scenario(&c, dir.path(), 2).unwrap();
        assert!(
            outcome.passed,
            "{}",
            crate::report::render_summary(&outcome.report)
        );
    }

    #[test]
    fn determinism_byte_identical_reruns() {
        let mut c = canonical(Scenario::ChainAudit);
        c.grid.n = 64;
        c.horizon = 0.002;
        c.seed = 99;
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        run_scenario(&c, dir_a.path(), 1).unwrap();
        run_scenario(&c, dir_b.path(), 1).unwrap();
        for name in [
            "config.toml",
            "snapshots.csv",
            "chains.csv",
            "report.json",
            "summary.txt",
            "events.jsonl",
        ] {
            let a = fs::read(dir_a.path().join(name)).unwrap();
            let b = fs::read(dir_b.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between identical runs");
        }
    }
}
