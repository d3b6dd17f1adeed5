//! Asymptotic measurements over simulation snapshots: directional front
//! positions and fitted speeds, dilated-set probes, and Hausdorff
//! comparisons of level sets against geometric predictions.
//!
//! The long-time statements being tested all have the form "after
//! rescaling by `t`, the super-level set `E_λ(t) = {u(t,·) > λ}` looks
//! like a fixed set": along a ray the λ-crossing drifts at a definite
//! speed, compact sets inside the predicted spreading set saturate to 1
//! while sets outside decay to 0, and the rescaled level set converges to
//! the prediction locally in Hausdorff distance.  Desk-scale proxies for
//! the limits: slopes are fitted over the last half of the snapshot
//! times (indicator-data transients decay on order-one time), and
//! "→ 1 / → 0" is read as crossing 0.99 / 0.01 at the final time.

use crate::geometry::{hausdorff, SpreadingPrediction, SupportSet};
use crate::pde::{extract_level_set, Field, GridKind};
use thiserror::Error;

/// Errors from measurements that would read outside the simulated domain.
#[derive(Debug, Error)]
pub enum MetricsError {
    /// The measurement ray leaves the grid before `ray_limit`.
    #[error("measurement ray exits the domain before reach {reach}")]
    RayExitsDomain { reach: f64 },
    /// A dilated probe point lands outside the grid.
    #[error("dilated probe point ({x}, {y}) exits the domain")]
    PointExitsDomain { x: f64, y: f64 },
    /// Too few snapshots fall inside the fitting window.
    #[error("need at least 4 snapshots in the fitting window, have {have}")]
    TooFewSnapshots { have: usize },
}

/// Front positions along one ray and the speed fitted to them.
#[derive(Debug, Clone)]
pub struct SpreadingMeasurement {
    /// Unit direction of the ray.
    pub direction: Vec<f64>,
    /// Snapshot times.
    pub times: Vec<f64>,
    /// `sup{s : u(t, s·e) > λ}` per snapshot (0 when the ray never
    /// exceeds `λ`, the ray limit when it always does).
    pub level_positions: Vec<f64>,
    /// Least-squares slope of position against time over the last half of
    /// the snapshots.
    pub fitted_speed: f64,
    /// Threshold defining the tracked level.
    pub lambda: f64,
    /// `min u(T, s·T·e)` over `0 ≤ s ≤ 0.8·fitted_speed` at the final
    /// time: tends to 1 when the fitted speed is honest.
    pub min_probe_inner: f64,
    /// `sup u(T, s·T·e)` over `s ≥ 1.2·fitted_speed` (within the ray) at
    /// the final time: tends to 0 when the fitted speed is honest.
    pub sup_probe_outer: f64,
    /// The level position hit the ray limit at the final time: the front
    /// has saturated the measurable window and the fit is unreliable.
    pub saturated: bool,
}

/// Hausdorff comparisons of level sets against a prediction, per time.
#[derive(Debug, Clone)]
#[allow(non_snake_case)]
pub struct HausdorffTrace {
    /// Snapshot times.
    pub times: Vec<f64>,
    /// Hausdorff distance between `(1/t)E_λ(t) ∩ B̄_R` and the predicted
    /// spreading set clipped to `B̄_R`, per time (+∞ when one side is
    /// empty or `t ≈ 0`).
    pub local_dH: Vec<f64>,
    /// Hausdorff distance between `E_λ(t)` and the boundary of
    /// `{dist(·, U) ≤ c*t}`, divided by `t`.
    pub global_dH_over_t: Vec<f64>,
    /// Clipping radius of the local comparison.
    pub radius: f64,
    /// Threshold defining the level sets.
    pub lambda: f64,
}

fn in_bounds(field: &Field, p: &[f64]) -> bool {
    field
        .grid()
        .bounds()
        .iter()
        .zip(p)
        .all(|(&(lo, hi), &x)| x >= lo - 1e-9 && x <= hi + 1e-9)
}

fn ray_point(e: &[f64], s: f64) -> Vec<f64> {
    e.iter().map(|&c| c * s).collect()
}

fn sample_ray(field: &Field, e: &[f64], s: f64) -> f64 {
    field.sample(&ray_point(e, s))
}

/// Largest `s ∈ [0, limit]` with `u(s·e) > λ`, by scan plus bisection;
/// 0 when the ray never exceeds `λ`, `limit` when it always does.
fn top_crossing(field: &Field, e: &[f64], lambda: f64, limit: f64) -> f64 {
    let step = field.grid().spacing() / 2.0;
    let n = (limit / step).ceil() as usize;
    let mut above: Option<f64> = None;
    // Scan from the far end toward the origin for the last excursion.
    for k in (0..=n).rev() {
        let s = (k as f64 * step).min(limit);
        if sample_ray(field, e, s) > lambda {
            above = Some(s);
            break;
        }
    }
    let Some(mut lo) = above else {
        return 0.0;
    };
    if lo >= limit - 1e-12 {
        return limit;
    }
    let mut hi = (lo + step).min(limit);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if sample_ray(field, e, mid) > lambda {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn lsq_slope(times: &[f64], values: &[f64]) -> f64 {
    let n = times.len() as f64;
    let mt = times.iter().sum::<f64>() / n;
    let mv = values.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, v) in times.iter().zip(values) {
        num += (t - mt) * (v - mv);
        den += (t - mt) * (t - mt);
    }
    num / den
}

/// Track the `λ`-level position along the ray `s·e`, `s ∈ [0, ray_limit]`,
/// across snapshots, and fit a speed to the last half of the times.
///
/// The two bracket probes evaluate the measured front both ways at the
/// final time `T`: the solution should be near 1 on `[0, 0.8·ĉ·T]` and
/// near 0 beyond `1.2·ĉ·T`.
pub fn directional_speed(
    snapshots: &[Field],
    e: &[f64],
    lambda: f64,
    ray_limit: f64,
) -> Result<SpreadingMeasurement, MetricsError> {
    assert!((0.0..1.0).contains(&lambda) && lambda > 0.0);
    assert!(ray_limit > 0.0);
    let norm: f64 = e.iter().map(|c| c * c).sum::<f64>().sqrt();
    assert!((norm - 1.0).abs() < 1e-9, "direction must be a unit vector");

    let last = snapshots.last().expect("need at least one snapshot");
    if !in_bounds(last, &ray_point(e, ray_limit)) {
        return Err(MetricsError::RayExitsDomain { reach: ray_limit });
    }
    let window = snapshots.len() / 2;
    if snapshots.len() - window < 4 {
        return Err(MetricsError::TooFewSnapshots {
            have: snapshots.len() - window,
        });
    }

    let times: Vec<f64> = snapshots.iter().map(|s| s.time()).collect();
    let positions: Vec<f64> = snapshots
        .iter()
        .map(|s| top_crossing(s, e, lambda, ray_limit))
        .collect();
    let fitted_speed = lsq_slope(&times[window..], &positions[window..]);
    let saturated = *positions.last().unwrap() >= ray_limit - 1e-9;

    let t_final = *times.last().unwrap();
    let inner_reach = (0.8 * fitted_speed * t_final).clamp(0.0, ray_limit);
    let outer_start = (1.2 * fitted_speed * t_final).clamp(0.0, ray_limit);
    let step = last.grid().spacing() / 2.0;
    let mut min_probe_inner = f64::INFINITY;
    let mut s = 0.0;
    while s <= inner_reach {
        min_probe_inner = min_probe_inner.min(sample_ray(last, e, s));
        s += step;
    }
    let mut sup_probe_outer = 0.0f64;
    let mut s = outer_start;
    while s <= ray_limit {
        sup_probe_outer = sup_probe_outer.max(sample_ray(last, e, s));
        s += step;
    }

    Ok(SpreadingMeasurement {
        direction: e.to_vec(),
        times,
        level_positions: positions,
        fitted_speed,
        lambda,
        min_probe_inner,
        sup_probe_outer,
        saturated,
    })
}

/// Minimum and maximum of `u(t, t·x)` over the dilated point set
/// `{t·x : x ∈ c_set}` for one snapshot.
pub fn dilated_probe(snapshot: &Field, c_set: &[Vec<f64>]) -> Result<(f64, f64), MetricsError> {
    assert!(!c_set.is_empty());
    let t = snapshot.time();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for x in c_set {
        let p: Vec<f64> = x.iter().map(|&c| c * t).collect();
        if !in_bounds(snapshot, &p) {
            return Err(MetricsError::PointExitsDomain {
                x: p[0],
                y: p.get(1).copied().unwrap_or(0.0),
            });
        }
        let v = snapshot.sample(&p);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok((lo, hi))
}

/// Point cloud of the rescaled level set `(1/t)E_λ(t)` clipped to the ball
/// of radius `radius`: rescaled contour points plus the sphere arcs where
/// the region reaches the clipping boundary.
fn rescaled_level_cloud(field: &Field, lambda: f64, radius: f64) -> Vec<[f64; 2]> {
    let t = field.time();
    let contour = extract_level_set(field, lambda);
    let mut cloud: Vec<[f64; 2]> = contour
        .points
        .iter()
        .map(|p| [p[0] / t, p[1] / t])
        .filter(|p| (p[0] * p[0] + p[1] * p[1]).sqrt() <= radius + 1e-12)
        .collect();
    match field.grid().kind() {
        GridKind::Line => {
            for e in [[-1.0, 0.0], [1.0, 0.0]] {
                let p = [radius * t * e[0]];
                if in_bounds(field, &p) && field.sample(&p) > lambda {
                    cloud.push([radius * e[0], 0.0]);
                }
            }
        }
        GridKind::Radial(_) => {
            let p = [radius * t];
            if in_bounds(field, &p) && field.sample(&p) > lambda {
                cloud.push([radius, 0.0]);
            }
        }
        GridKind::Plane => {
            let arcs = 720;
            for k in 0..arcs {
                let th = 2.0 * std::f64::consts::PI * k as f64 / arcs as f64;
                let e = [th.cos(), th.sin()];
                let p = [radius * t * e[0], radius * t * e[1]];
                if in_bounds(field, &p) && field.sample(&p) > lambda {
                    cloud.push([radius * e[0], radius * e[1]]);
                }
            }
        }
    }
    cloud
}

/// Point cloud of the predicted spreading set clipped to the ball of
/// radius `radius`: envelope points `w(e)·e` inside the ball, or the
/// sphere points the prediction spills past.  One-dimensional grids see
/// only the axis trace of the prediction, so the clouds being compared
/// live in the same ambient set.
fn prediction_cloud(
    prediction: &SpreadingPrediction,
    radius: f64,
    kind: GridKind,
) -> Vec<[f64; 2]> {
    let dirs: Vec<[f64; 2]> = match kind {
        GridKind::Line => vec![[-1.0, 0.0], [1.0, 0.0]],
        GridKind::Radial(_) => vec![[1.0, 0.0]],
        GridKind::Plane => prediction.dirs.directions.clone(),
    };
    let mut cloud = Vec::new();
    for e in dirs {
        let w = prediction.speed(e).min(radius);
        cloud.push([w * e[0], w * e[1]]);
    }
    cloud
}

/// Point cloud on the boundary of the thickened support
/// `{x : dist(x, U) ≤ reach}`, read off sign changes of
/// `dist(·, U) − reach` along the edges of a lattice covering the grid.
fn thickened_boundary_cloud(field: &Field, u_set: &SupportSet, reach: f64) -> Vec<[f64; 2]> {
    let grid = field.grid();
    let mut cloud = Vec::new();
    match grid.kind() {
        GridKind::Line | GridKind::Radial(_) => {
            let (lo, hi) = grid.bounds()[0];
            let n = 2000usize;
            let step = (hi - lo) / n as f64;
            let g = |x: f64| u_set.dist_to_U(&[x]) - reach;
            let mut prev = g(lo);
            for k in 1..=n {
                let x = lo + k as f64 * step;
                let cur = g(x);
                if (prev > 0.0) != (cur > 0.0) && prev != cur {
                    let frac = prev / (prev - cur);
                    cloud.push([lo + (k as f64 - 1.0 + frac) * step, 0.0]);
                }
                prev = cur;
            }
        }
        GridKind::Plane => {
            let (xlo, xhi) = grid.bounds()[0];
            let (ylo, yhi) = grid.bounds()[1];
            let n = 400usize;
            let dx = (xhi - xlo) / n as f64;
            let dy = (yhi - ylo) / n as f64;
            let mut values = vec![0.0f64; (n + 1) * (n + 1)];
            for j in 0..=n {
                for i in 0..=n {
                    let x = xlo + i as f64 * dx;
                    let y = ylo + j as f64 * dy;
                    values[j * (n + 1) + i] = u_set.dist_to_U(&[x, y]) - reach;
                }
            }
            let mut push_crossing = |a: f64, b: f64, pa: [f64; 2], pb: [f64; 2]| {
                if (a > 0.0) != (b > 0.0) && a != b {
                    let frac = a / (a - b);
                    cloud.push([pa[0] + frac * (pb[0] - pa[0]), pa[1] + frac * (pb[1] - pa[1])]);
                }
            };
            for j in 0..=n {
                for i in 0..=n {
                    let x = xlo + i as f64 * dx;
                    let y = ylo + j as f64 * dy;
                    let v = values[j * (n + 1) + i];
                    if i < n {
                        push_crossing(v, values[j * (n + 1) + i + 1], [x, y], [x + dx, y]);
                    }
                    if j < n {
                        push_crossing(v, values[(j + 1) * (n + 1) + i], [x, y], [x, y + dy]);
                    }
                }
            }
        }
    }
    cloud
}

/// Level-set point cloud of one snapshot in ambient coordinates.
fn level_cloud(field: &Field, lambda: f64) -> Vec<[f64; 2]> {
    extract_level_set(field, lambda).points
}

/// Track, per snapshot, the local Hausdorff distance between the rescaled
/// level set and the prediction (both clipped to `B̄_radius`) and the
/// global distance between the raw level set and the `c*t`-thickening of
/// the support, divided by `t`.
pub fn hausdorff_trace(
    snapshots: &[Field],
    prediction: &SpreadingPrediction,
    u_set: &SupportSet,
    lambda: f64,
    radius: f64,
) -> HausdorffTrace {
    assert!(!snapshots.is_empty());
    assert!(radius > 0.0);
    let mut times = Vec::with_capacity(snapshots.len());
    let mut local = Vec::with_capacity(snapshots.len());
    let mut global = Vec::with_capacity(snapshots.len());
    let kind = snapshots[0].grid().kind();
    let prediction_points = prediction_cloud(prediction, radius, kind);
    for snap in snapshots {
        let t = snap.time();
        times.push(t);
        if t < 1e-9 {
            local.push(f64::INFINITY);
            global.push(f64::INFINITY);
            continue;
        }
        let rescaled = rescaled_level_cloud(snap, lambda, radius);
        local.push(hausdorff(&rescaled, &prediction_points));
        let raw = level_cloud(snap, lambda);
        let thickened = thickened_boundary_cloud(snap, u_set, prediction.c_star * t);
        global.push(hausdorff(&raw, &thickened) / t);
    }
    HausdorffTrace {
        times,
        local_dH: local,
        global_dH_over_t: global,
        radius,
        lambda,
    }
}
