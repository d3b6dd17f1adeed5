//! Asymptotic spreading predictions from classified directions.
//!
//! Once the unbounded directions `𝒰` of a support are known, the predicted
//! spreading speed along a unit direction `e` is
//!
//! `w(e) = c* / min(1, dist(e, ℝ⁺𝒰))`,
//!
//! infinite when `e` itself is unbounded: influence arriving from a far
//! branch of the set along `ξ ∈ 𝒰` reaches the observer at `τe` once the
//! planar front has covered the gap `τ·dist(e, ℝ⁺𝒰)`, while the local
//! ball-spreading floor `c*` always applies.  The corresponding spreading
//! set — the rescaled long-time shape of the invaded region — is
//!
//! `𝒲 = {x : min(|x|, dist(x, ℝ⁺𝒰)) < c*}`,
//!
//! and the two descriptions agree exactly: `x = τe` lies in `𝒲` precisely
//! when `τ < w(e)`.

use super::directions::{DirectionLabel, DirectionSets};
use super::SupportSet;

fn dist_to_ray(x: [f64; 2], xi: [f64; 2]) -> f64 {
    let dot = (x[0] * xi[0] + x[1] * xi[1]).max(0.0);
    let norm2 = x[0] * x[0] + x[1] * x[1];
    (norm2 - dot * dot).max(0.0).sqrt()
}

/// Predicted spreading speed along unit direction `e` for minimal planar
/// speed `c_star`, from sampled unbounded directions.  `+∞` when `e` is
/// itself unbounded.
pub fn spreading_speed(dirs: &DirectionSets, c_star: f64, e: [f64; 2]) -> f64 {
    assert!(c_star > 0.0);
    let idx = dirs.nearest_index(e);
    if dirs.labels[idx] == DirectionLabel::Unbounded {
        return f64::INFINITY;
    }
    let mut gap = 1.0f64;
    for i in dirs.unbounded_indices() {
        gap = gap.min(dist_to_ray(e, dirs.directions[i]));
    }
    c_star / gap
}

/// Predicted spreading speed from analytic direction metadata, when the
/// support carries it: the unbounded family is scanned on a fine angular
/// grid instead of the sampled labels.  Useful as a closed-form reference
/// against measured speeds.
pub fn spreading_speed_analytic(u: &SupportSet, c_star: f64, e: [f64; 2]) -> Option<f64> {
    let meta = u.analytic()?;
    assert!(c_star > 0.0);
    if meta.is_unbounded_eroded(e) {
        return Some(f64::INFINITY);
    }
    let fine = 14_400;
    let mut gap = 1.0f64;
    for i in 0..fine {
        let th = 2.0 * std::f64::consts::PI * i as f64 / fine as f64;
        let xi = [th.cos(), th.sin()];
        if meta.is_unbounded_eroded(xi) {
            gap = gap.min(dist_to_ray(e, xi));
        }
    }
    Some(c_star / gap)
}

/// Is `x` inside the predicted time-1 spreading set
/// `{min(|x|, dist(x, ℝ⁺𝒰)) < c*}`?
pub fn spreading_set_contains(dirs: &DirectionSets, c_star: f64, x: [f64; 2]) -> bool {
    assert!(c_star > 0.0);
    let mut reach = (x[0] * x[0] + x[1] * x[1]).sqrt();
    for i in dirs.unbounded_indices() {
        reach = reach.min(dist_to_ray(x, dirs.directions[i]));
    }
    reach < c_star
}

/// A support's spreading prediction: classified directions plus the
/// minimal planar speed, with the envelope and membership views bundled.
#[derive(Debug, Clone)]
pub struct SpreadingPrediction {
    /// Classified directions of the support.
    pub dirs: DirectionSets,
    /// Minimal planar front speed feeding the prediction.
    pub c_star: f64,
}

impl SpreadingPrediction {
    /// Bundle classified directions with a minimal speed.
    pub fn new(dirs: DirectionSets, c_star: f64) -> SpreadingPrediction {
        assert!(c_star > 0.0);
        SpreadingPrediction { dirs, c_star }
    }

    /// Predicted speed along unit direction `e`.
    pub fn speed(&self, e: [f64; 2]) -> f64 {
        spreading_speed(&self.dirs, self.c_star, e)
    }

    /// Is `x` inside the predicted time-1 spreading set?
    pub fn contains(&self, x: [f64; 2]) -> bool {
        spreading_set_contains(&self.dirs, self.c_star, x)
    }

    /// Polygonal trace of the spreading-set boundary `{w(e)·e}`, with
    /// speeds capped at `cap` so unbounded directions stay plottable.
    pub fn boundary_polyline(&self, cap: f64) -> Vec<[f64; 2]> {
        self.dirs
            .directions
            .iter()
            .map(|&e| {
                let w = self.speed(e).min(cap);
                [w * e[0], w * e[1]]
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::directions::{direction_sets, dyadic_ladder};
    use std::sync::OnceLock;

    fn dirs_for(u: &SupportSet) -> DirectionSets {
        direction_sets(u, 0.5, 720, &dyadic_ladder())
    }

    fn halfspace_dirs() -> &'static DirectionSets {
        static CELL: OnceLock<DirectionSets> = OnceLock::new();
        CELL.get_or_init(|| dirs_for(&SupportSet::halfspace(2)))
    }

    #[test]
    fn bounded_support_spreads_like_a_ball() {
        let dirs = dirs_for(&SupportSet::ball(3.0, 2));
        for k in 0..32 {
            let th = 2.0 * std::f64::consts::PI * k as f64 / 32.0;
            let e = [th.cos(), th.sin()];
            assert!((spreading_speed(&dirs, 2.0, e) - 2.0).abs() < 1e-12);
        }
        assert!(spreading_set_contains(&dirs, 2.0, [0.9, 0.0]));
        assert!(spreading_set_contains(&dirs, 2.0, [0.0, 0.0]));
        assert!(!spreading_set_contains(&dirs, 2.0, [2.1, 0.0]));
    }

    #[test]
    fn halfspace_speeds_scale_like_inverse_sine() {
        let dirs = halfspace_dirs();
        let c = 2.0;
        // Straight down is unbounded.
        assert!(spreading_speed(dirs, c, [0.0, -1.0]).is_infinite());
        // At 45° above horizontal the gap to the nearest unbounded ray is
        // sin 45°, so the speed is c*√2.
        let e = [1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()];
        let w = spreading_speed(dirs, c, e);
        assert!((w - c * 2f64.sqrt()).abs() < 0.05 * c, "w = {w}");
        // Straight up the gap saturates at 1.
        let w_up = spreading_speed(dirs, c, [0.0, 1.0]);
        assert!((w_up - c).abs() < 0.01 * c, "w = {w_up}");
    }

    #[test]
    fn analytic_speeds_match_sampled_speeds_on_the_halfspace() {
        let u = SupportSet::halfspace(2);
        let dirs = halfspace_dirs();
        for th_deg in [20, 45, 90, 135] {
            let th = (th_deg as f64).to_radians();
            let e = [th.cos(), th.sin()];
            let sampled = spreading_speed(dirs, 2.0, e);
            let analytic = spreading_speed_analytic(&u, 2.0, e).unwrap();
            assert!(
                (sampled - analytic).abs() < 0.08 * analytic,
                "θ = {th_deg}: {sampled} vs {analytic}"
            );
        }
    }

    #[test]
    fn cone_speeds_match_the_closed_form() {
        let u = SupportSet::cone_subgraph(-1.0);
        let dirs = dirs_for(&u);
        let c = 2.0;
        // Over the downward wedge {e₂ ≤ −|e₁|}: sideways the nearest
        // unbounded ray is 45° away, giving c√2; straight up every ray is
        // at least distance 1, giving c.
        let w_side = spreading_speed(&dirs, c, [1.0, 0.0]);
        assert!((w_side - c * 2f64.sqrt()).abs() < 0.1, "w = {w_side}");
        let w_up = spreading_speed(&dirs, c, [0.0, 1.0]);
        assert!((w_up - c).abs() < 0.02, "w = {w_up}");
        // The analytic route reproduces the exact values more tightly.
        let a_side = spreading_speed_analytic(&u, c, [1.0, 0.0]).unwrap();
        assert!((a_side - c * 2f64.sqrt()).abs() < 0.005 * a_side);
    }

    #[test]
    fn envelope_and_membership_views_agree() {
        // min(|x|, ray distances) < c*  ⟺  |x| < w(x/|x|) — they are the
        // same expression rearranged, so agreement must be exact away from
        // the boundary.
        let sets = [
            SupportSet::halfspace(2),
            SupportSet::ball(2.0, 2),
            SupportSet::cone_subgraph(1.0),
            SupportSet::sqrt_subgraph(),
            SupportSet::tube_plus_parabola(),
        ];
        let c = 2.0;
        let mut state = 42u64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for u in &sets {
            let dirs = dirs_for(u);
            for _ in 0..10_000 {
                let r = 10.0 * c * next();
                let th = 2.0 * std::f64::consts::PI * next();
                let x = [r * th.cos(), r * th.sin()];
                if r < 1e-9 {
                    continue;
                }
                let member = spreading_set_contains(&dirs, c, x);
                let w = spreading_speed(&dirs, c, [x[0] / r, x[1] / r]);
                let radial = r < w;
                if (r - w).abs() > 1e-9 * (1.0 + w.min(1e12)) {
                    assert_eq!(member, radial, "{} at {x:?}", u.label());
                }
            }
        }
    }

    #[test]
    fn speed_profile_has_no_spurious_jumps() {
        // Away from the unbounded family the capped speed profile moves
        // continuously between neighbouring samples.
        let dirs = halfspace_dirs();
        let c = 2.0;
        let cap = 10.0 * c;
        let mut prev: Option<f64> = None;
        for k in 0..=720 {
            let th = std::f64::consts::PI * (0.1 + 0.8 * k as f64 / 720.0);
            let e = [th.cos(), th.sin()];
            let w = spreading_speed(dirs, c, e).min(cap);
            if let Some(p) = prev {
                assert!((w - p).abs() < 1.0 * c, "jump at θ = {th}: {p} → {w}");
            }
            prev = Some(w);
        }
    }

    #[test]
    fn prediction_bundle_round_trips() {
        let dirs = dirs_for(&SupportSet::ball(1.0, 2));
        let pred = SpreadingPrediction::new(dirs, 2.0);
        assert!((pred.speed([1.0, 0.0]) - 2.0).abs() < 1e-12);
        assert!(pred.contains([1.5, 0.0]));
        let poly = pred.boundary_polyline(20.0);
        assert_eq!(poly.len(), 720);
        for p in &poly {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            assert!((r - 2.0).abs() < 1e-9);
        }
    }
}
