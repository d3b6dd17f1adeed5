//! Scenario execution: one simulation pass, metric dispatch, expectation
//! verdicts, and deterministic result files.
//!
//! A run writes, under `<out_root>/<scenario id>/`:
//!
//! * `manifest.json` — the scenario configuration echoed back, plus the
//!   full statements of the claims it cites;
//! * `results.csv` — every scalar measurement, sorted by key;
//! * `verdicts.json` — one entry per expectation with the measured value
//!   and a pass flag (non-finite measurements serialize as `null`);
//! * `snapshots/` — field profiles (line and radial grids) or mid-level
//!   contours (plane grids) at each snapshot time;
//! * one CSV per measurement that has a series worth keeping (level
//!   positions, Hausdorff traces, shell probes, band profiles, …).
//!
//! Everything is deterministic — traversal orders are fixed, floats print
//! in shortest round-trip form, and no timestamps or hostnames appear —
//! so rerunning a scenario rewrites every file byte-for-byte.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{
    claim_statement, Comparator, MetricSpec, Scenario, ScenarioError, SimSpec,
};
use crate::front::{
    build_retracting_supersolution, minimal_speed, tristable_terrace_speeds, FrontError,
};
use crate::geometry::{
    check_dUrho, check_eB_identity, check_hyp_U, direction_sets, dyadic_ladder, spreading_speed,
    spreading_speed_analytic, DirectionSets, SpreadingPrediction, SupportSet,
};
use crate::metrics::{dilated_probe, directional_speed, hausdorff_trace};
use crate::pde::{extract_level_set, simulate, Field, Grid, GridKind, SimOptions};
use crate::reaction::{integral_sign, ReactionTerm, Sign};

/// Angular resolution of sampled direction classifications.
const DIRECTION_SAMPLES: usize = 720;
/// Erosion depth of sampled direction classifications.
const DIRECTION_RHO: f64 = 0.5;
/// Bracket tolerance for front speeds computed on behalf of predictions.
const SPEED_TOL: f64 = 1e-3;
/// Level used for the generic snapshot contour artifacts on plane grids.
const CONTOUR_LEVEL: f64 = 0.5;

/// One evaluated expectation.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    /// Result key that was compared.
    pub metric: String,
    /// Comparison operator.
    pub comparator: Comparator,
    /// Reference value.
    pub value: f64,
    /// Half-width for `within`.
    pub tolerance: f64,
    /// Claim the comparison witnesses.
    pub claim: String,
    /// The measured value (serialized as `null` when non-finite).
    pub measured: f64,
    /// Did the comparison hold?
    pub pass: bool,
}

/// Everything a run produced.
#[derive(Debug)]
pub struct Report {
    /// Scenario id.
    pub id: String,
    /// Directory the files were written into.
    pub out_dir: PathBuf,
    /// Scalar measurements by result key.
    pub results: BTreeMap<String, f64>,
    /// Evaluated expectations, in scenario order.
    pub verdicts: Vec<Verdict>,
    /// Paths of the written files, relative to `out_dir`.
    pub artifacts: Vec<String>,
}

impl Report {
    /// Did every expectation hold?
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }
}

/// Resolve the output root: `$SPREADLAB_OUT` when set, else
/// `./spreadlab-out`.
pub fn default_out_root() -> PathBuf {
    match std::env::var_os("SPREADLAB_OUT") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => PathBuf::from("spreadlab-out"),
    }
}

/// Shortest round-trip decimal form, with explicit `inf`/`nan` spellings
/// for CSV cells.
fn fmt(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x}")
    }
}

/// Lazily computed shared state for one run.
struct Ctx<'a> {
    scenario: &'a Scenario,
    reaction: ReactionTerm,
    support: SupportSet,
    snapshots: Vec<Field>,
    c_star: Option<f64>,
    dirs: Option<DirectionSets>,
    ball_dirs: Option<DirectionSets>,
    terrace: Option<(f64, f64)>,
}

impl Ctx<'_> {
    /// Minimal front speed of the scenario reaction.
    fn c_star(&mut self) -> Result<f64, ScenarioError> {
        if self.c_star.is_none() {
            self.c_star = Some(minimal_speed(&self.reaction, SPEED_TOL)?.c_star);
        }
        Ok(self.c_star.unwrap())
    }

    /// Sampled direction classification of the scenario support.
    fn dirs(&mut self) -> &DirectionSets {
        if self.dirs.is_none() {
            self.dirs = Some(direction_sets(
                &self.support,
                DIRECTION_RHO,
                DIRECTION_SAMPLES,
                &dyadic_ladder(),
            ));
        }
        self.dirs.as_ref().unwrap()
    }

    /// All-bounded classification of the unit ball, for ball predictions.
    fn ball_dirs(&mut self) -> &DirectionSets {
        if self.ball_dirs.is_none() {
            let ball = SupportSet::ball(1.0, 2);
            self.ball_dirs = Some(
                direction_sets(&ball, DIRECTION_RHO, DIRECTION_SAMPLES, &dyadic_ladder())
                    .labeled_all_bounded(),
            );
        }
        self.ball_dirs.as_ref().unwrap()
    }

    /// Terrace speeds of the scenario reaction.
    fn terrace(&mut self) -> Result<(f64, f64), ScenarioError> {
        if self.terrace.is_none() {
            self.terrace = Some(tristable_terrace_speeds(&self.reaction)?);
        }
        Ok(self.terrace.unwrap())
    }

    /// The snapshot within `1e-6` of `t`.
    fn snapshot_at(&self, t: f64) -> Result<&Field, ScenarioError> {
        self.snapshots
            .iter()
            .find(|s| (s.time() - t).abs() < 1e-6)
            .ok_or(ScenarioError::MissingSnapshot { time: t })
    }
}

/// Snapshot times a metric needs beyond the scenario's own schedule.
fn required_times(metric: &MetricSpec, ctx: &mut Ctx<'_>) -> Result<Vec<f64>, ScenarioError> {
    Ok(match metric {
        MetricSpec::DilatedProbe { time, .. } | MetricSpec::PlateauBand { time, .. } => {
            vec![*time]
        }
        MetricSpec::LocalHausdorff { t_early, t_late, .. } => vec![*t_early, *t_late],
        MetricSpec::GlobalHausdorff { t_late, .. } => vec![*t_late],
        MetricSpec::ShellOscillation { n_lo, n_hi, .. } => {
            let c_star = ctx.c_star()?;
            let mut times = Vec::new();
            for n in *n_lo..=*n_hi {
                let scale = (2.0f64).powi(n as i32 - 2);
                times.push(scale / c_star);
                times.push(scale);
            }
            times
        }
        _ => Vec::new(),
    })
}

/// Merge, sort, and deduplicate snapshot times.
fn merge_times(base: &[f64], extra: &[f64], t_final: f64) -> Result<Vec<f64>, ScenarioError> {
    let mut all: Vec<f64> = base.iter().chain(extra.iter()).copied().collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    if let Some(&last) = all.last() {
        if last > t_final + 1e-9 {
            return Err(ScenarioError::Invalid {
                id: String::new(),
                why: format!("a metric needs a snapshot at t = {last} beyond t_final = {t_final}"),
            });
        }
    }
    Ok(all)
}

/// Execute a validated scenario, writing its files under
/// `<out_root>/<id>/`.
pub fn run_scenario(scenario: &Scenario, out_root: &Path) -> Result<Report, ScenarioError> {
    scenario.validate()?;
    let out_dir = out_root.join(&scenario.id);
    std::fs::create_dir_all(&out_dir)?;

    let mut ctx = Ctx {
        scenario,
        reaction: ReactionTerm::parse(&scenario.reaction)?,
        support: scenario.support.build()?,
        snapshots: Vec::new(),
        c_star: None,
        dirs: None,
        ball_dirs: None,
        terrace: None,
    };

    // One simulation pass serves every snapshot-reading metric.
    if let Some(grid_spec) = &scenario.grid {
        let sim = scenario.sim.as_ref().expect("validated");
        let mut extra = Vec::new();
        for metric in &scenario.metrics {
            extra.extend(required_times(metric, &mut ctx)?);
        }
        let times = merge_times(&scenario.snapshot_times, &extra, sim.t_final)?;
        let grid = grid_spec.build()?;
        let opts = sim_options(sim);
        ctx.snapshots = simulate(
            &grid,
            &ctx.support,
            &ctx.reaction,
            sim.t_final,
            &times,
            &opts,
        )?;
    }

    let mut results = BTreeMap::new();
    let mut artifacts: Vec<(String, String)> = Vec::new();
    for metric in &scenario.metrics {
        evaluate(metric, &mut ctx, &mut results, &mut artifacts)?;
    }

    let verdicts: Vec<Verdict> = scenario
        .expectations
        .iter()
        .map(|e| {
            let measured = results.get(&e.metric).copied().unwrap_or(f64::NAN);
            Verdict {
                metric: e.metric.clone(),
                comparator: e.comparator,
                value: e.value,
                tolerance: e.tolerance,
                claim: e.claim.clone(),
                measured,
                pass: e.comparator.holds(measured, e.value, e.tolerance),
            }
        })
        .collect();

    write_snapshot_artifacts(&ctx.snapshots, &mut artifacts);
    let written = write_files(scenario, &out_dir, &results, &verdicts, &artifacts)?;

    Ok(Report {
        id: scenario.id.clone(),
        out_dir,
        results,
        verdicts,
        artifacts: written,
    })
}

fn sim_options(sim: &SimSpec) -> SimOptions {
    let opts = SimOptions::new(sim.c_max, sim.read_radius);
    if sim.init_subsamples > 1 {
        opts.with_cell_average(sim.init_subsamples)
    } else {
        opts
    }
}

/// Evaluate one metric into the result table and artifact list.
fn evaluate(
    metric: &MetricSpec,
    ctx: &mut Ctx<'_>,
    results: &mut BTreeMap<String, f64>,
    artifacts: &mut Vec<(String, String)>,
) -> Result<(), ScenarioError> {
    let put = |key: String, value: f64, results: &mut BTreeMap<String, f64>| {
        results.insert(key, value);
    };
    match metric {
        MetricSpec::FrontSpeed { name, reaction, tol } => {
            let f = ReactionTerm::parse(reaction)?;
            let speed = minimal_speed(&f, *tol)?.c_star;
            put(name.clone(), speed, results);
        }
        MetricSpec::FrontBlocked { name, reaction } => {
            let f = ReactionTerm::parse(reaction)?;
            let blocked = match minimal_speed(&f, SPEED_TOL) {
                Err(FrontError::NoPositiveFront { .. }) => 1.0,
                Ok(_) => 0.0,
                Err(other) => return Err(other.into()),
            };
            let sign = match integral_sign(&f) {
                Sign::Positive => 1.0,
                Sign::Zero => 0.0,
                Sign::Negative => -1.0,
            };
            put(name.clone(), blocked, results);
            put(format!("{name}-integral-sign"), sign, results);
        }
        MetricSpec::TerraceSpeeds { name } => {
            let (c1, c2) = ctx.terrace()?;
            put(format!("{name}-c1"), c1, results);
            put(format!("{name}-c2"), c2, results);
            put(format!("{name}-gap"), c1 - c2, results);
        }
        MetricSpec::DirectionalSpeed {
            name,
            direction,
            lambda,
            ray_limit,
        } => {
            let m = directional_speed(&ctx.snapshots, direction, *lambda, *ray_limit)?;
            put(format!("{name}-fitted"), m.fitted_speed, results);
            put(format!("{name}-inner-min"), m.min_probe_inner, results);
            put(format!("{name}-outer-sup"), m.sup_probe_outer, results);
            put(
                format!("{name}-saturated"),
                if m.saturated { 1.0 } else { 0.0 },
                results,
            );
            let mut csv = String::from("t,position\n");
            for (t, pos) in m.times.iter().zip(&m.level_positions) {
                csv.push_str(&format!("{},{}\n", fmt(*t), fmt(*pos)));
            }
            artifacts.push((format!("{name}-positions.csv"), csv));
        }
        MetricSpec::FormulaSpeed { name, direction } => {
            let c_star = ctx.c_star()?;
            let sampled = spreading_speed(ctx.dirs(), c_star, *direction);
            let analytic =
                spreading_speed_analytic(&ctx.support, c_star, *direction).unwrap_or(f64::NAN);
            put(format!("{name}-sampled"), sampled, results);
            put(format!("{name}-analytic"), analytic, results);
        }
        MetricSpec::HypCheck { name } => {
            let ok = check_hyp_U(ctx.dirs());
            put(name.clone(), if ok { 1.0 } else { 0.0 }, results);
        }
        MetricSpec::ErosionDistanceCheck {
            name,
            rho,
            probe_radius,
        } => {
            let (holds, bound) = check_dUrho(&ctx.support, *rho, *probe_radius);
            put(
                format!("{name}-holds"),
                if holds { 1.0 } else { 0.0 },
                results,
            );
            put(format!("{name}-bound"), bound, results);
        }
        MetricSpec::EbIdentity { name, direction } => {
            ctx.dirs();
            let dirs = ctx.dirs.as_ref().unwrap();
            let (lhs, rhs) = check_eB_identity(&ctx.support, dirs, *direction)?;
            put(format!("{name}-lhs"), lhs, results);
            put(format!("{name}-rhs"), rhs, results);
            put(format!("{name}-gap"), (lhs - rhs).abs(), results);
        }
        MetricSpec::LocalHausdorff {
            name,
            lambda,
            radius,
            prediction,
            t_early,
            t_late,
        } => {
            let c_star = ctx.c_star()?;
            let dirs = match prediction.as_str() {
                "support" => ctx.dirs().clone(),
                "support-base-ratios" => ctx.dirs().labeled_from_base_ratios(),
                _ => ctx.ball_dirs().clone(),
            };
            let pred = SpreadingPrediction::new(dirs, c_star);
            let trace = hausdorff_trace(&ctx.snapshots, &pred, &ctx.support, *lambda, *radius);
            let lookup = |t: f64| -> Result<f64, ScenarioError> {
                trace
                    .times
                    .iter()
                    .position(|&ti| (ti - t).abs() < 1e-6)
                    .map(|i| trace.local_dH[i])
                    .ok_or(ScenarioError::MissingSnapshot { time: t })
            };
            let early = lookup(*t_early)?;
            let late = lookup(*t_late)?;
            put(format!("{name}-early"), early, results);
            put(format!("{name}-late"), late, results);
            put(format!("{name}-delta"), late - early, results);
            put(format!("{name}-ratio"), early / late, results);
            let mut csv = String::from("t,dh\n");
            for (t, dh) in trace.times.iter().zip(&trace.local_dH) {
                csv.push_str(&format!("{},{}\n", fmt(*t), fmt(*dh)));
            }
            artifacts.push((format!("{name}.csv"), csv));
        }
        MetricSpec::GlobalHausdorff {
            name,
            lambda,
            t_late,
        } => {
            let c_star = ctx.c_star()?;
            let pred = SpreadingPrediction::new(ctx.ball_dirs().clone(), c_star);
            let trace = hausdorff_trace(&ctx.snapshots, &pred, &ctx.support, *lambda, 1.0);
            let late = trace
                .times
                .iter()
                .position(|&ti| (ti - *t_late).abs() < 1e-6)
                .map(|i| trace.global_dH_over_t[i])
                .ok_or(ScenarioError::MissingSnapshot { time: *t_late })?;
            put(format!("{name}-late"), late, results);
            let mut csv = String::from("t,dh_over_t\n");
            for (t, dh) in trace.times.iter().zip(&trace.global_dH_over_t) {
                csv.push_str(&format!("{},{}\n", fmt(*t), fmt(*dh)));
            }
            artifacts.push((format!("{name}.csv"), csv));
        }
        MetricSpec::DilatedProbe {
            name, time, points, take, ..
        } => {
            let snapshot = ctx.snapshot_at(*time)?;
            let (min, max) = dilated_probe(snapshot, points)?;
            put(
                name.clone(),
                if take == "min" { min } else { max },
                results,
            );
        }
        MetricSpec::ShellOscillation {
            name,
            n_lo,
            n_hi,
            lambda,
            inner_level,
        } => {
            let c_star = ctx.c_star()?;
            let mut detected = 0.0;
            let mut min_outer = f64::INFINITY;
            let mut min_inner = f64::INFINITY;
            let mut csv = String::from("n,t_outer,x_outer,u_outer,t_inner,x_inner,u_inner,hit\n");
            for n in *n_lo..=*n_hi {
                let scale = (2.0f64).powi(n as i32 - 2);
                let tau = scale / c_star;
                let x_outer = 12.0 * c_star * tau;
                let u_outer = ctx.snapshot_at(tau)?.sample(&[x_outer]);
                let x_inner = 4.0 * scale;
                let u_inner = ctx.snapshot_at(scale)?.sample(&[x_inner]);
                let hit = u_outer < *lambda && u_inner > *inner_level;
                if hit {
                    detected = 1.0;
                }
                min_outer = min_outer.min(u_outer);
                min_inner = min_inner.min(u_inner);
                csv.push_str(&format!(
                    "{n},{},{},{},{},{},{},{}\n",
                    fmt(tau),
                    fmt(x_outer),
                    fmt(u_outer),
                    fmt(scale),
                    fmt(x_inner),
                    fmt(u_inner),
                    u8::from(hit)
                ));
            }
            put(format!("{name}-detected"), detected, results);
            put(format!("{name}-min-outer"), min_outer, results);
            put(format!("{name}-min-inner"), min_inner, results);
            artifacts.push((format!("{name}.csv"), csv));
        }
        MetricSpec::PlateauBand {
            name,
            time,
            level,
            inner_factor,
            outer_factor,
        } => {
            let (c1, c2) = ctx.terrace()?;
            let lo = inner_factor * c2 * time;
            let hi = outer_factor * c1 * time;
            if lo >= hi {
                return Err(ScenarioError::Invalid {
                    id: ctx.scenario.id.clone(),
                    why: format!("plateau band is empty: [{lo}, {hi}]"),
                });
            }
            let snapshot = ctx.snapshot_at(*time)?;
            let step = snapshot.grid().spacing() / 2.0;
            let mut max_dev = 0.0f64;
            let mut csv = String::from("x,u\n");
            // Walk the band on both sides of the origin; the seed is
            // symmetric, but the discrete field need not be read that way.
            let mut xs = Vec::new();
            let mut x = -hi;
            while x <= -lo + 1e-12 {
                xs.push(x);
                x += step;
            }
            let mut x = lo;
            while x <= hi + 1e-12 {
                xs.push(x);
                x += step;
            }
            for &x in &xs {
                let u = snapshot.sample(&[x]);
                max_dev = max_dev.max((u - level).abs());
                csv.push_str(&format!("{},{}\n", fmt(x), fmt(u)));
            }
            put(format!("{name}-max-deviation"), max_dev, results);
            put(format!("{name}-band-lo"), lo, results);
            put(format!("{name}-band-hi"), hi, results);
            artifacts.push((format!("{name}.csv"), csv));
        }
        MetricSpec::RetractingCheck {
            name,
            speed,
            lambda,
            t_horizon,
            n_dim,
            r_max,
            h,
            c_max,
            coverage_span,
        } => {
            let barrier = build_retracting_supersolution(
                &ctx.reaction,
                *speed,
                *lambda,
                *t_horizon,
                *n_dim,
            )?;
            let start = barrier.r_total + speed * t_horizon;
            if start + 10.0 > *r_max {
                return Err(ScenarioError::Invalid {
                    id: ctx.scenario.id.clone(),
                    why: format!(
                        "audit domain r_max = {r_max} does not reach the \
                         covered-ball radius {start}"
                    ),
                });
            }

            let mut coverage_min = f64::INFINITY;
            for k in 0..1000 {
                let radius = start + coverage_span * k as f64 / 999.0;
                coverage_min = coverage_min.min(barrier.value(0.0, radius));
            }
            let mut origin_max = f64::NEG_INFINITY;
            for k in 0..1000 {
                let t = t_horizon * k as f64 / 999.0;
                origin_max = origin_max.max(barrier.value(t, 0.0));
            }

            // Interior equation residual on the active branch, skipping
            // the min-kink neighborhood and magnitudes too large for
            // meaningful central differences.
            let n = *n_dim as f64;
            let delta = 1e-3;
            let mut residual_min = f64::INFINITY;
            for i in 0..12 {
                let t = t_horizon * (0.05 + 0.9 * i as f64 / 11.0);
                for j in 0..25 {
                    let radius =
                        barrier.r_prime + 1.0 + (start - barrier.r_prime - 1.0) * j as f64 / 24.0;
                    let one = barrier.branch_one(t, radius);
                    let two = barrier.branch_two(t, radius);
                    if (one - two).abs() < 1e-6 * one.max(two) {
                        continue;
                    }
                    let value = one.min(two);
                    if value > 1e3 {
                        continue;
                    }
                    let branch = |tt: f64, rr: f64| {
                        if one < two {
                            barrier.branch_one(tt, rr)
                        } else {
                            barrier.branch_two(tt, rr)
                        }
                    };
                    let dt = (branch(t + delta, radius) - branch(t - delta, radius))
                        / (2.0 * delta);
                    let dr = (branch(t, radius + delta) - branch(t, radius - delta))
                        / (2.0 * delta);
                    let drr = (branch(t, radius + delta) - 2.0 * value
                        + branch(t, radius - delta))
                        / (delta * delta);
                    let residual =
                        dt - drr - (n - 1.0) / radius * dr - ctx.reaction.evaluate(value);
                    residual_min = residual_min.min(residual);
                }
            }

            // Independent check: seed everything outside the covered ball
            // and watch the origin directly.
            let grid = Grid::radial(*n_dim, *r_max, *h);
            let exterior =
                SupportSet::radial_intervals("barrier-exterior", vec![(start, f64::INFINITY)], 1);
            let times: Vec<f64> = (1..=40).map(|k| t_horizon * k as f64 / 40.0).collect();
            let opts = SimOptions::new(*c_max, 0.0);
            let snaps = simulate(&grid, &exterior, &ctx.reaction, *t_horizon, &times, &opts)?;
            let mut sim_origin_max = f64::NEG_INFINITY;
            let mut csv = String::from("t,barrier_origin,sim_origin\n");
            for snap in &snaps {
                let u = snap.sample(&[0.0]);
                sim_origin_max = sim_origin_max.max(u);
                csv.push_str(&format!(
                    "{},{},{}\n",
                    fmt(snap.time()),
                    fmt(barrier.value(snap.time(), 0.0)),
                    fmt(u)
                ));
            }

            put(format!("{name}-coverage-min"), coverage_min, results);
            put(format!("{name}-origin-max"), origin_max, results);
            put(format!("{name}-residual-min"), residual_min, results);
            put(format!("{name}-sim-origin-max"), sim_origin_max, results);
            artifacts.push((format!("{name}.csv"), csv));
        }
        MetricSpec::DirectionSetsExport { name } => {
            let dirs = ctx.dirs();
            let mut csv = String::from("index,ex,ey,liminf_ratio,eroded_ratio,label\n");
            for i in 0..dirs.directions.len() {
                csv.push_str(&format!(
                    "{i},{},{},{},{},{}\n",
                    fmt(dirs.directions[i][0]),
                    fmt(dirs.directions[i][1]),
                    fmt(dirs.liminf_ratio[i]),
                    fmt(dirs.limsup_eroded_ratio[i]),
                    dirs.labels[i]
                ));
            }
            artifacts.push((format!("{name}.csv"), csv));
        }
        MetricSpec::SpreadingSetExport { name, cap_factor } => {
            let c_star = ctx.c_star()?;
            let pred = SpreadingPrediction::new(ctx.dirs().clone(), c_star);
            let polyline = pred.boundary_polyline(cap_factor * c_star);
            let mut csv = String::from("x,y\n");
            for p in polyline {
                csv.push_str(&format!("{},{}\n", fmt(p[0]), fmt(p[1])));
            }
            artifacts.push((format!("{name}.csv"), csv));
        }
    }
    Ok(())
}

/// Per-snapshot artifacts: full profiles on line and radial grids, the
/// mid-level contour on plane grids.
fn write_snapshot_artifacts(snapshots: &[Field], artifacts: &mut Vec<(String, String)>) {
    for snapshot in snapshots {
        let t = snapshot.time();
        let grid = snapshot.grid();
        match grid.kind() {
            GridKind::Line | GridKind::Radial(_) => {
                let (lo, _) = grid.bounds()[0];
                let h = grid.spacing();
                let axis = if matches!(grid.kind(), GridKind::Line) {
                    "x"
                } else {
                    "r"
                };
                let mut csv = format!("{axis},u\n");
                for (i, u) in snapshot.values().iter().enumerate() {
                    csv.push_str(&format!("{},{}\n", fmt(lo + i as f64 * h), fmt(*u)));
                }
                artifacts.push((format!("snapshots/t{}.csv", fmt(t)), csv));
            }
            GridKind::Plane => {
                let contour = extract_level_set(snapshot, CONTOUR_LEVEL);
                let mut csv = String::from("x,y\n");
                for p in contour.points {
                    csv.push_str(&format!("{},{}\n", fmt(p[0]), fmt(p[1])));
                }
                artifacts.push((format!("snapshots/contour-t{}.csv", fmt(t)), csv));
            }
        }
    }
}

#[derive(Serialize)]
struct ManifestClaim {
    id: String,
    statement: &'static str,
}

#[derive(Serialize)]
struct Manifest<'a> {
    scenario: &'a Scenario,
    claims: Vec<ManifestClaim>,
}

#[derive(Serialize)]
struct VerdictsDoc<'a> {
    id: &'a str,
    all_passed: bool,
    verdicts: &'a [Verdict],
}

/// Write every file for one run; returns the relative paths written.
fn write_files(
    scenario: &Scenario,
    out_dir: &Path,
    results: &BTreeMap<String, f64>,
    verdicts: &[Verdict],
    artifacts: &[(String, String)],
) -> Result<Vec<String>, ScenarioError> {
    let mut written = Vec::new();
    let mut emit = |rel: &str, contents: &str| -> Result<(), ScenarioError> {
        let path = out_dir.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, contents)?;
        written.push(rel.to_string());
        Ok(())
    };

    let manifest = Manifest {
        scenario,
        claims: scenario
            .claims
            .iter()
            .map(|id| ManifestClaim {
                id: id.clone(),
                statement: claim_statement(id).expect("validated"),
            })
            .collect(),
    };
    emit(
        "manifest.json",
        &format!("{}\n", serde_json::to_string_pretty(&manifest)?),
    )?;

    let mut results_csv = String::from("name,value\n");
    for (name, value) in results {
        results_csv.push_str(&format!("{name},{}\n", fmt(*value)));
    }
    emit("results.csv", &results_csv)?;

    let doc = VerdictsDoc {
        id: &scenario.id,
        all_passed: verdicts.iter().all(|v| v.pass),
        verdicts,
    };
    emit(
        "verdicts.json",
        &format!("{}\n", serde_json::to_string_pretty(&doc)?),
    )?;

    for (rel, contents) in artifacts {
        emit(rel, contents)?;
    }
    Ok(written)
}
