//! Initial supports as geometric oracles: membership, distance to the set,
//! distance to the complement, erosion, direction classification, spreading
//! predictions, and Hausdorff distances.
//!
//! A support is an (typically unbounded) closed set `U ⊂ ℝ^N`.  Everything
//! downstream — which directions the set escapes to infinity along, how a
//! level set of the reaction-diffusion solution tracks `U + B_{c*t}` — is
//! driven by two scalar oracles: `dist(x, U)` and, for `x ∈ U`,
//! `dist(x, ∂U)`.  The *erosion* `U_ρ = {x ∈ U : dist(x, ∂U) ≥ ρ}` strips a
//! `ρ`-collar off the set; thin tendrils of `U` die under erosion, which is
//! exactly what separates sets whose far-field influence is robust from
//! those whose influence rides on vanishing channels.
//!
//! Built-in shapes cover the laboratory's catalogue: balls and radial
//! interval unions, half-spaces, a union of dyadic shells, cones and other
//! subgraphs `{x₂ ≤ γ(x₁)}`, a Gaussian-thin slab, and a half-tube with a
//! thin channel hugging `x₂ = √x₁`.  Distances are closed-form where the
//! geometry allows (balls, half-spaces, radial unions, cones) and numeric
//! elsewhere (1-D minimisation over boundary parametrisations, with
//! witness-point clouds for eroded sets); numeric oracles carry a relative
//! error budget of about `1e-3` at probe scales.
//!
//! Planar shapes use the convention that a point is `(x₁, x₂)` with the
//! graph axis last: a subgraph is `{x₂ ≤ γ(x₁)}`.  Radial shapes accept any
//! dimension and read only `|x|`.

use std::sync::Arc;

use thiserror::Error;

mod directions;
mod hausdorff;
mod spreading;

pub use directions::{
    check_dUrho, check_eB_identity, check_hyp_U, direction_sets, dyadic_ladder, DirectionLabel,
    DirectionSets, BOUNDED_TOL, UNBOUNDED_TOL,
};
pub use hausdorff::hausdorff;
pub use spreading::{
    spreading_set_contains, spreading_speed, spreading_speed_analytic, SpreadingPrediction,
};

/// Errors from support-set construction and direction-set preconditions.
#[derive(Debug, Error)]
pub enum GeometryError {
    /// No built-in support goes by this name.
    #[error("unknown support set `{name}`")]
    UnknownSupport { name: String },
    /// An operation's precondition was violated.
    #[error("geometry precondition violated: {why}")]
    Precondition { why: &'static str },
}

/// Closed-form direction predicates attached to built-in supports: which
/// unit vectors see the set recede linearly (bounded) and which remain at
/// sublinear distance even after erosion (unbounded).
#[derive(Clone)]
pub struct AnalyticDirections {
    /// Whether the set is star-shaped with respect to the origin.
    pub star_shaped: bool,
    bounded: Arc<dyn Fn([f64; 2]) -> bool + Send + Sync>,
    unbounded_eroded: Arc<dyn Fn([f64; 2]) -> bool + Send + Sync>,
}

impl AnalyticDirections {
    /// Does direction `e` see the set recede at linear rate?
    pub fn is_bounded(&self, e: [f64; 2]) -> bool {
        (self.bounded)(e)
    }

    /// Does direction `e` stay at sublinear distance from the eroded set?
    pub fn is_unbounded_eroded(&self, e: [f64; 2]) -> bool {
        (self.unbounded_eroded)(e)
    }
}

impl std::fmt::Debug for AnalyticDirections {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnalyticDirections")
            .field("star_shaped", &self.star_shaped)
            .finish_non_exhaustive()
    }
}

#[derive(Clone)]
enum Shape {
    Ball { radius: f64 },
    RadialIntervals { intervals: Vec<(f64, f64)> },
    Halfspace,
    ShellUnion,
    ConeSubgraph { alpha: f64 },
    SqrtSubgraph,
    GaussianSlab,
    TubePlusParabola,
    CustomSubgraph { gamma: Arc<dyn Fn(f64) -> f64 + Send + Sync> },
}

/// A support set `U ⊂ ℝ^N` with membership and distance oracles, possibly
/// eroded by a recorded depth.
#[derive(Clone)]
pub struct SupportSet {
    base_label: String,
    dim: usize,
    rho: f64,
    shape: Shape,
    analytic: Option<AnalyticDirections>,
    /// Member cloud of the eroded set for shapes without a closed-form
    /// eroded distance (empty cloud = eroded set empty at witness scales).
    witnesses: Option<Arc<Vec<[f64; 2]>>>,
}

impl std::fmt::Debug for SupportSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SupportSet")
            .field("label", &self.label())
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

impl std::fmt::Display for SupportSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.label())
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Minimise `f` over `[lo, hi]`: coarse grid, then golden-section
/// refinement around the best grid point.
fn minimize_1d(lo: f64, hi: f64, samples: usize, f: &dyn Fn(f64) -> f64) -> f64 {
    let mut best_t = lo;
    let mut best = f(lo);
    for k in 1..=samples {
        let t = lo + (hi - lo) * k as f64 / samples as f64;
        let v = f(t);
        if v < best {
            best = v;
            best_t = t;
        }
    }
    let h = (hi - lo) / samples as f64;
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (best_t - h, best_t + h);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..70 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    best.min(fc).min(fd)
}

/// Distance from `z` to the graph `{(t, gamma(t)) : t ∈ [lo, hi]}`.
fn curve_distance(z: [f64; 2], lo: f64, hi: f64, gamma: &dyn Fn(f64) -> f64) -> f64 {
    minimize_1d(lo, hi, 600, &|t| {
        let dx = z[0] - t;
        let dy = z[1] - gamma(t);
        (dx * dx + dy * dy).sqrt()
    })
}

/// Distance from `z` to the ray `{origin + t·dir : t ≥ 0}` (unit `dir`).
fn ray_distance(z: [f64; 2], origin: [f64; 2], dir: [f64; 2]) -> f64 {
    let p = [z[0] - origin[0], z[1] - origin[1]];
    let t = (p[0] * dir[0] + p[1] * dir[1]).max(0.0);
    let q = [p[0] - t * dir[0], p[1] - t * dir[1]];
    norm(&q)
}

/// Distance from `z` to the vee `{(t, alpha·|t| − shift) : t ∈ ℝ}`.
fn vee_distance(z: [f64; 2], alpha: f64, shift: f64) -> f64 {
    let s = (1.0 + alpha * alpha).sqrt();
    let apex = [0.0, -shift];
    let right = ray_distance(z, apex, [1.0 / s, alpha / s]);
    let left = ray_distance(z, apex, [-1.0 / s, alpha / s]);
    right.min(left)
}

/// Merged radial intervals of the dyadic shell union, out to radius
/// `up_to`: the first three shells merge into `[0, 5]`, later ones are the
/// disjoint `[2ⁿ−1, 2ⁿ+1]`.
fn shell_intervals(up_to: f64) -> Vec<(f64, f64)> {
    let mut intervals = vec![(0.0, 5.0)];
    let mut n = 3u32;
    loop {
        let lo = 2f64.powi(n as i32) - 1.0;
        if lo > up_to {
            break;
        }
        intervals.push((lo, lo + 2.0));
        n += 1;
        if n > 60 {
            break;
        }
    }
    intervals
}

/// Distance from radius `r` to a sorted disjoint union of radial intervals.
fn radial_point_distance(intervals: &[(f64, f64)], r: f64) -> f64 {
    let mut best = f64::INFINITY;
    for &(a, b) in intervals {
        if r >= a && r <= b {
            return 0.0;
        }
        best = best.min((a - r).abs().min((r - b).abs()));
    }
    best
}

/// For `r` inside one of the intervals: distance to the complement of the
/// union (an interval starting at 0 has no inner edge; an unbounded one has
/// no outer edge).
fn radial_edge_distance(intervals: &[(f64, f64)], r: f64) -> f64 {
    for &(a, b) in intervals {
        if r >= a && r <= b {
            let inner = if a > 0.0 { r - a } else { f64::INFINITY };
            let outer = if b.is_finite() { b - r } else { f64::INFINITY };
            return inner.min(outer);
        }
    }
    0.0
}

fn erode_intervals(intervals: &[(f64, f64)], rho: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(a, b) in intervals {
        let lo = if a > 0.0 { a + rho } else { 0.0 };
        let hi = if b.is_finite() { b - rho } else { b };
        if lo <= hi {
            out.push((lo, hi));
        }
    }
    out
}

/// Vertical half-thickness of the thin channel around `x₂ = √x₁`.
fn channel_half_thickness(t: f64) -> f64 {
    (-t * t / 2.0).exp()
}

/// Distance from `z` to the channel `{x₁ ≥ 0, |x₂ − √x₁| ≤ e^{−x₁²/2}}`.
fn channel_distance(z: [f64; 2], hi: f64) -> f64 {
    minimize_1d(0.0, hi, 600, &|t| {
        let t = t.max(0.0);
        let dx = z[0] - t;
        let vertical = ((z[1] - t.sqrt()).abs() - channel_half_thickness(t)).max(0.0);
        (dx * dx + vertical * vertical).sqrt()
    })
}

/// Distance from `z` to the half-tube `{x₁ ≥ 0, |x₂| ≤ half_width}`.
fn half_tube_distance(z: [f64; 2], half_width: f64) -> f64 {
    let dx = (-z[0]).max(0.0);
    let dy = (z[1].abs() - half_width).max(0.0);
    (dx * dx + dy * dy).sqrt()
}

impl Shape {
    fn contains(&self, x: &[f64]) -> bool {
        match self {
            Shape::Ball { radius } => norm(x) <= *radius,
            Shape::RadialIntervals { intervals } => radial_point_distance(intervals, norm(x)) == 0.0,
            Shape::Halfspace => *x.last().unwrap() <= 0.0,
            Shape::ShellUnion => {
                let r = norm(x);
                radial_point_distance(&shell_intervals(r + 2.0), r) == 0.0
            }
            Shape::ConeSubgraph { alpha } => {
                assert_eq!(x.len(), 2, "subgraph shapes live in the plane");
                x[1] <= alpha * x[0].abs()
            }
            Shape::SqrtSubgraph => {
                assert_eq!(x.len(), 2, "subgraph shapes live in the plane");
                x[1] <= x[0].abs().sqrt()
            }
            Shape::GaussianSlab => {
                assert_eq!(x.len(), 2, "subgraph shapes live in the plane");
                x[1].abs() <= (-x[0] * x[0]).exp()
            }
            Shape::TubePlusParabola => {
                assert_eq!(x.len(), 2, "subgraph shapes live in the plane");
                let in_tube = x[0] >= 0.0 && x[1].abs() <= 1.0;
                let in_channel =
                    x[0] >= 0.0 && (x[1] - x[0].sqrt()).abs() <= channel_half_thickness(x[0]);
                in_tube || in_channel
            }
            Shape::CustomSubgraph { gamma } => {
                assert_eq!(x.len(), 2, "subgraph shapes live in the plane");
                x[1] <= gamma(x[0])
            }
        }
    }

    /// Distance from a point outside the base set to the base set.
    fn outside_distance(&self, x: &[f64]) -> f64 {
        match self {
            Shape::Ball { radius } => (norm(x) - radius).max(0.0),
            Shape::RadialIntervals { intervals } => radial_point_distance(intervals, norm(x)),
            Shape::Halfspace => x.last().unwrap().max(0.0),
            Shape::ShellUnion => {
                let r = norm(x);
                radial_point_distance(&shell_intervals(2.0 * r + 8.0), r)
            }
            Shape::ConeSubgraph { alpha } => vee_distance(plane(x), *alpha, 0.0),
            Shape::SqrtSubgraph => {
                let z = plane(x);
                let reach = norm(x) + 20.0;
                curve_distance(z, -reach, reach, &|t| t.abs().sqrt())
            }
            Shape::GaussianSlab => {
                let z = plane(x);
                let side = if z[1] >= 0.0 { 1.0 } else { -1.0 };
                let reach = norm(x) + 10.0;
                curve_distance(z, -reach, reach, &|t| side * (-t * t).exp())
            }
            Shape::TubePlusParabola => {
                let z = plane(x);
                let reach = norm(x) + 20.0;
                half_tube_distance(z, 1.0).min(channel_distance(z, reach))
            }
            Shape::CustomSubgraph { gamma } => {
                let z = plane(x);
                let reach = norm(x) + 20.0;
                curve_distance(z, -reach, reach, &|t| gamma(t))
            }
        }
    }

    /// Distance from a point of the base set to its complement.
    fn boundary_distance(&self, x: &[f64]) -> f64 {
        match self {
            Shape::Ball { radius } => (radius - norm(x)).max(0.0),
            Shape::RadialIntervals { intervals } => radial_edge_distance(intervals, norm(x)),
            Shape::Halfspace => (-x.last().unwrap()).max(0.0),
            Shape::ShellUnion => {
                let r = norm(x);
                radial_edge_distance(&shell_intervals(r + 2.0), r)
            }
            Shape::ConeSubgraph { alpha } => vee_distance(plane(x), *alpha, 0.0),
            Shape::SqrtSubgraph => {
                let z = plane(x);
                let reach = norm(x) + 20.0;
                curve_distance(z, -reach, reach, &|t| t.abs().sqrt())
            }
            Shape::GaussianSlab => {
                let z = plane(x);
                let reach = norm(x) + 10.0;
                let top = curve_distance(z, -reach, reach, &|t| (-t * t).exp());
                let bottom = curve_distance(z, -reach, reach, &|t| -(-t * t).exp());
                top.min(bottom)
            }
            Shape::TubePlusParabola => tube_union_boundary_distance(plane(x)),
            Shape::CustomSubgraph { gamma } => {
                let z = plane(x);
                let reach = norm(x) + 20.0;
                curve_distance(z, -reach, reach, &|t| gamma(t))
            }
        }
    }

    fn needs_witnesses(&self) -> bool {
        matches!(
            self,
            Shape::SqrtSubgraph
                | Shape::GaussianSlab
                | Shape::TubePlusParabola
                | Shape::CustomSubgraph { .. }
        )
    }
}

fn plane(x: &[f64]) -> [f64; 2] {
    assert_eq!(x.len(), 2, "subgraph shapes live in the plane");
    [x[0], x[1]]
}

/// Distance from a point of the tube-plus-channel union to the union's
/// complement: minimum over boundary pieces of either part, each filtered
/// against the interior of the other part.
fn tube_union_boundary_distance(z: [f64; 2]) -> f64 {
    let reach = norm(&z) + 20.0;
    let mut best = f64::INFINITY;
    let samples = 800;
    let mut consider = |p: [f64; 2]| {
        let d = ((z[0] - p[0]).powi(2) + (z[1] - p[1]).powi(2)).sqrt();
        if d < best {
            best = d;
        }
    };
    let channel_interior = |p: [f64; 2]| {
        p[0] > 0.0 && (p[1] - p[0].sqrt()).abs() < channel_half_thickness(p[0])
    };
    let tube_interior = |p: [f64; 2]| p[0] > 0.0 && p[1].abs() < 1.0;
    for k in 0..=samples {
        let t = reach * k as f64 / samples as f64;
        for wall in [[t, 1.0], [t, -1.0]] {
            if !channel_interior(wall) {
                consider(wall);
            }
        }
        let h = channel_half_thickness(t);
        for wall in [[t, t.sqrt() + h], [t, t.sqrt() - h]] {
            if !tube_interior(wall) {
                consider(wall);
            }
        }
    }
    for k in 0..=80 {
        let y = -1.0 + 2.0 * k as f64 / 80.0;
        consider([0.0, y]);
    }
    best
}

const WITNESS_FAR_RANGE: f64 = 66_000.0;

/// Parameter grid for witness clouds: dense near the origin, logarithmic
/// out to the far probe range.
fn witness_parameters(symmetric: bool) -> Vec<f64> {
    let mut ts = Vec::new();
    let mut t = 0.0;
    while t <= 40.0 {
        ts.push(t);
        t += 0.05;
    }
    let mut t = 40.0f64;
    while t <= WITNESS_FAR_RANGE {
        t *= 1.006;
        ts.push(t);
    }
    if symmetric {
        let mirrored: Vec<f64> = ts.iter().skip(1).map(|v| -v).collect();
        ts.extend(mirrored);
    }
    ts
}

/// Build a member cloud of the eroded set for shapes without closed-form
/// eroded distances.  Witnesses are exact members (membership is checked
/// through the boundary-distance oracle), so the induced distance is an
/// upper bound converging at witness density.
fn build_witnesses(shape: &Shape, rho: f64) -> Vec<[f64; 2]> {
    let mut cloud = Vec::new();
    let mut admit = |p: [f64; 2]| {
        if shape.contains(&p) && shape.boundary_distance(&p) >= rho {
            cloud.push(p);
        }
    };
    match shape {
        Shape::SqrtSubgraph => {
            for t in witness_parameters(true) {
                let g = t.abs().sqrt();
                let slope = if t.abs() > 1e-9 {
                    0.5 / t.abs().sqrt()
                } else {
                    1e9
                };
                let graze = 1.05 * rho * (1.0 + slope * slope).sqrt() + 0.05 * rho;
                for depth in [graze, 2.0 * rho, 4.0 * rho] {
                    admit([t, g - depth]);
                }
            }
        }
        Shape::CustomSubgraph { gamma } => {
            for t in witness_parameters(true) {
                let h = (1e-4f64).max(1e-4 * t.abs());
                let slope = (gamma(t + h) - gamma(t - h)) / (2.0 * h);
                let graze = 1.05 * rho * (1.0 + slope * slope).sqrt() + 0.05 * rho;
                for depth in [graze, 2.0 * rho, 4.0 * rho] {
                    admit([t, gamma(t) - depth]);
                }
            }
        }
        Shape::GaussianSlab => {
            let mut t = -3.0;
            while t <= 3.0 {
                admit([t, 0.0]);
                t += 0.002;
            }
        }
        Shape::TubePlusParabola => {
            // The tube's erosion is handled in closed form; witnesses only
            // track the thin channel (which dies quickly under erosion).
            let mut t = 0.0;
            while t <= 10.0 {
                admit([t, t.sqrt()]);
                t += 0.01;
            }
        }
        _ => unreachable!("witness clouds are only built for numeric shapes"),
    }
    cloud
}

impl SupportSet {
    fn base(label: impl Into<String>, dim: usize, shape: Shape) -> SupportSet {
        SupportSet {
            base_label: label.into(),
            dim,
            rho: 0.0,
            shape,
            analytic: None,
            witnesses: None,
        }
    }

    fn with_analytic(
        mut self,
        star_shaped: bool,
        bounded: impl Fn([f64; 2]) -> bool + Send + Sync + 'static,
        unbounded_eroded: impl Fn([f64; 2]) -> bool + Send + Sync + 'static,
    ) -> SupportSet {
        self.analytic = Some(AnalyticDirections {
            star_shaped,
            bounded: Arc::new(bounded),
            unbounded_eroded: Arc::new(unbounded_eroded),
        });
        self
    }

    /// Closed ball `{|x| ≤ radius}` in dimension `dim`.
    pub fn ball(radius: f64, dim: usize) -> SupportSet {
        assert!(radius > 0.0 && dim >= 1);
        SupportSet::base(format!("ball(r={radius})"), dim, Shape::Ball { radius })
            .with_analytic(true, |_| true, |_| false)
    }

    /// Union of radial intervals `{|x| ∈ ⋃ [aᵢ, bᵢ]}`; intervals must be
    /// sorted and disjoint; the last may extend to infinity.
    pub fn radial_intervals(
        label: impl Into<String>,
        intervals: Vec<(f64, f64)>,
        dim: usize,
    ) -> SupportSet {
        assert!(!intervals.is_empty() && dim >= 1);
        for pair in intervals.windows(2) {
            assert!(pair[0].1 < pair[1].0, "intervals must be sorted and disjoint");
        }
        let unbounded = intervals.last().unwrap().1.is_infinite();
        SupportSet::base(label, dim, Shape::RadialIntervals { intervals }).with_analytic(
            false,
            move |_| !unbounded,
            move |_| unbounded,
        )
    }

    /// Half-space `{x_N ≤ 0}` (graph axis last) in dimension `dim`.
    pub fn halfspace(dim: usize) -> SupportSet {
        assert!(dim >= 1);
        SupportSet::base("halfspace", dim, Shape::Halfspace).with_analytic(
            true,
            |e| e[1] > 0.0,
            |e| e[1] <= 0.0,
        )
    }

    /// Union of dyadic shells `{2ⁿ−1 ≤ |x| ≤ 2ⁿ+1}` over all `n ≥ 0`.
    pub fn shell_union(dim: usize) -> SupportSet {
        assert!(dim >= 1);
        // Neither direction family is analytically non-trivial here: the
        // distance ratio genuinely oscillates along dyadic scales.
        SupportSet::base("shell-union", dim, Shape::ShellUnion).with_analytic(
            false,
            |_| false,
            |_| false,
        )
    }

    /// Cone subgraph `{x₂ ≤ α|x₁|}` in the plane.
    pub fn cone_subgraph(alpha: f64) -> SupportSet {
        let a = alpha;
        SupportSet::base(
            format!("cone(alpha={alpha})"),
            2,
            Shape::ConeSubgraph { alpha },
        )
        .with_analytic(
            true,
            move |e| e[1] > a * e[0].abs(),
            move |e| e[1] <= a * e[0].abs(),
        )
    }

    /// Square-root subgraph `{x₂ ≤ √|x₁|}` in the plane.
    pub fn sqrt_subgraph() -> SupportSet {
        SupportSet::base("sqrt-subgraph", 2, Shape::SqrtSubgraph).with_analytic(
            true,
            |e| e[1] > 0.0,
            |e| e[1] <= 0.0,
        )
    }

    /// Gaussian-thin slab `{|x₂| ≤ e^{−x₁²}}` in the plane; its erosions
    /// are bounded, so no direction stays near them.
    pub fn gaussian_slab() -> SupportSet {
        SupportSet::base("gaussian-slab", 2, Shape::GaussianSlab).with_analytic(
            true,
            |e| e[1] != 0.0,
            |_| false,
        )
    }

    /// Half-tube `{x₁ ≥ 0, |x₂| ≤ 1}` plus the thin channel
    /// `{x₁ ≥ 0, |x₂ − √x₁| ≤ e^{−x₁²/2}}` in the plane.
    pub fn tube_plus_parabola() -> SupportSet {
        SupportSet::base("tube-plus-parabola", 2, Shape::TubePlusParabola).with_analytic(
            false,
            |e| e[0] < 1.0 - 1e-9,
            |e| e[0] >= 1.0 - 1e-9,
        )
    }

    /// Custom subgraph `{x₂ ≤ γ(x₁)}` with a caller-provided continuous
    /// boundary function; no analytic direction metadata.
    pub fn custom_subgraph(
        label: impl Into<String>,
        gamma: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> SupportSet {
        SupportSet::base(
            label,
            2,
            Shape::CustomSubgraph {
                gamma: Arc::new(gamma),
            },
        )
    }

    /// Look a built-in support up by name.  Recognised names: `ball`
    /// (param `radius`), `halfspace`, `shell-union`, `cone` (param
    /// `alpha`), `sqrt-subgraph`, `gaussian-slab`, `tube-plus-parabola`.
    pub fn parse(name: &str, params: &[(String, f64)], dim: usize) -> Result<SupportSet, GeometryError> {
        let get = |key: &str, default: f64| {
            params
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| *v)
                .unwrap_or(default)
        };
        match name {
            "ball" => Ok(SupportSet::ball(get("radius", 1.0), dim)),
            "halfspace" => Ok(SupportSet::halfspace(dim)),
            "shell-union" => Ok(SupportSet::shell_union(dim)),
            "cone" => Ok(SupportSet::cone_subgraph(get("alpha", 1.0))),
            "sqrt-subgraph" => Ok(SupportSet::sqrt_subgraph()),
            "gaussian-slab" => Ok(SupportSet::gaussian_slab()),
            "tube-plus-parabola" => Ok(SupportSet::tube_plus_parabola()),
            _ => Err(GeometryError::UnknownSupport {
                name: name.to_string(),
            }),
        }
    }

    /// Display label, including any erosion depth.
    pub fn label(&self) -> String {
        if self.rho == 0.0 {
            self.base_label.clone()
        } else {
            format!("{} (eroded rho={:.4})", self.base_label, self.rho)
        }
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Accumulated erosion depth (0 for base sets).
    pub fn erosion_depth(&self) -> f64 {
        self.rho
    }

    /// Analytic direction metadata, when the shape carries it.
    pub fn analytic(&self) -> Option<&AnalyticDirections> {
        self.analytic.as_ref()
    }

    /// Membership test.
    pub fn contains(&self, x: &[f64]) -> bool {
        if !self.shape.contains(x) {
            return false;
        }
        self.rho == 0.0 || self.shape.boundary_distance(x) >= self.rho
    }

    /// Distance from `x` to the set (0 inside, +∞ when the eroded set is
    /// empty at witness resolution).
    #[allow(non_snake_case)]
    pub fn dist_to_U(&self, x: &[f64]) -> f64 {
        if self.contains(x) {
            return 0.0;
        }
        if self.rho == 0.0 {
            return self.shape.outside_distance(x);
        }
        match &self.shape {
            Shape::Ball { radius } => {
                if *radius > self.rho {
                    (norm(x) - (radius - self.rho)).max(0.0)
                } else {
                    f64::INFINITY
                }
            }
            Shape::RadialIntervals { intervals } => {
                let eroded = erode_intervals(intervals, self.rho);
                if eroded.is_empty() {
                    f64::INFINITY
                } else {
                    radial_point_distance(&eroded, norm(x))
                }
            }
            Shape::Halfspace => (x.last().unwrap() + self.rho).max(0.0),
            Shape::ShellUnion => {
                let r = norm(x);
                let eroded = erode_intervals(&shell_intervals(2.0 * r + 8.0), self.rho);
                if eroded.is_empty() {
                    f64::INFINITY
                } else {
                    radial_point_distance(&eroded, r)
                }
            }
            Shape::ConeSubgraph { alpha } => eroded_cone_distance(plane(x), *alpha, self.rho),
            Shape::TubePlusParabola => {
                let z = plane(x);
                let tube = if self.rho < 1.0 {
                    let dx = (self.rho - z[0]).max(0.0);
                    let dy = (z[1].abs() - (1.0 - self.rho)).max(0.0);
                    (dx * dx + dy * dy).sqrt()
                } else {
                    f64::INFINITY
                };
                tube.min(self.witness_distance(z))
            }
            _ => self.witness_distance(plane(x)),
        }
    }

    fn witness_distance(&self, z: [f64; 2]) -> f64 {
        let Some(cloud) = &self.witnesses else {
            return f64::INFINITY;
        };
        let mut best = f64::INFINITY;
        for w in cloud.iter() {
            let d2 = (z[0] - w[0]).powi(2) + (z[1] - w[1]).powi(2);
            if d2 < best {
                best = d2;
            }
        }
        best.sqrt()
    }

    /// Distance from `x` to the complement of the set (0 outside).
    pub fn dist_to_complement(&self, x: &[f64]) -> f64 {
        if !self.contains(x) {
            return 0.0;
        }
        (self.shape.boundary_distance(x) - self.rho).max(0.0)
    }

    /// Erode by `rho > 0`: keep the points at depth at least `rho`.
    /// Erosions compose additively: eroding an erosion deepens it.
    pub fn erode(&self, rho: f64) -> SupportSet {
        assert!(rho > 0.0, "erosion depth must be positive");
        let total = self.rho + rho;
        let witnesses = if self.shape.needs_witnesses() {
            Some(Arc::new(build_witnesses(&self.shape, total)))
        } else {
            None
        };
        SupportSet {
            base_label: self.base_label.clone(),
            dim: self.dim,
            rho: total,
            shape: self.shape.clone(),
            analytic: self.analytic.clone(),
            witnesses,
        }
    }

    /// Exact member samples of the set inside the ball of radius
    /// `radius`, used as probe seeds by the erosion-robustness check.
    /// Polar grids are supplemented with shape-aware seeds so that thin
    /// features (shell rims, the channel spine) are represented.
    pub fn member_probes(&self, radius: f64) -> Vec<Vec<f64>> {
        let mut probes: Vec<Vec<f64>> = Vec::new();
        if self.dim == 1 {
            let n = 400;
            for k in 0..=n {
                let x = -radius + 2.0 * radius * k as f64 / n as f64;
                if self.contains(&[x]) {
                    probes.push(vec![x]);
                }
            }
            return probes;
        }
        let radial = 120;
        let angular = 180;
        for i in 1..=radial {
            let r = radius * i as f64 / radial as f64;
            for j in 0..angular {
                let th = 2.0 * std::f64::consts::PI * j as f64 / angular as f64;
                let p = vec![r * th.cos(), r * th.sin()];
                if self.contains(&p) {
                    probes.push(p);
                }
            }
        }
        if matches!(self.shape, Shape::TubePlusParabola) {
            let n = 400;
            for k in 0..=n {
                let t = radius * k as f64 / n as f64;
                let p = vec![t, t.sqrt()];
                if norm(&p) <= radius && self.contains(&p) {
                    probes.push(p);
                }
            }
        }
        probes
    }
}

/// Distance to the eroded cone subgraph `{x₂ ≤ α|x₁|}_ρ`.  For `α ≤ 0` the
/// erosion is the exact vee shift by `ρ√(1+α²)`; for `α > 0` the eroded
/// boundary is two offset rays joined by a circular arc of radius `ρ`
/// around the apex.
fn eroded_cone_distance(z: [f64; 2], alpha: f64, rho: f64) -> f64 {
    let s = (1.0 + alpha * alpha).sqrt();
    if alpha <= 0.0 {
        let shift = rho * s;
        if z[1] <= alpha * z[0].abs() - shift {
            return 0.0;
        }
        return vee_distance(z, alpha, shift);
    }
    // Inward normals of the two faces.
    let n_right = [alpha / s, -1.0 / s];
    let n_left = [-alpha / s, -1.0 / s];
    let d_right = [1.0 / s, alpha / s];
    let d_left = [-1.0 / s, alpha / s];
    let right = ray_distance(
        z,
        [rho * n_right[0], rho * n_right[1]],
        d_right,
    );
    let left = ray_distance(z, [rho * n_left[0], rho * n_left[1]], d_left);
    // Arc between the two ray origins, through the bottom of the circle.
    let angle = z[1].atan2(z[0]);
    let arc_lo = n_left[1].atan2(n_left[0]);
    let arc_hi = n_right[1].atan2(n_right[0]);
    let arc = if angle >= arc_lo && angle <= arc_hi {
        (norm(&z) - rho).abs()
    } else {
        f64::INFINITY
    };
    right.min(left).min(arc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shell_distances_are_dyadic() {
        let u = SupportSet::shell_union(2);
        for n in [2u32, 5, 8] {
            let probe = [3.0 * 2f64.powi(n as i32), 0.0];
            let expected = 2f64.powi(n as i32) - 1.0;
            assert!(
                (u.dist_to_U(&probe) - expected).abs() < 1e-9,
                "n = {n}"
            );
        }
        // The first three shells merge into [0, 5].
        assert!(u.contains(&[0.0, 0.0]) && u.contains(&[4.0, 0.0]));
        assert!((u.dist_to_complement(&[3.0, 0.0]) - 2.0).abs() < 1e-9);
        assert!((u.dist_to_U(&[6.0, 0.0]) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn membership_implies_zero_distance() {
        let sets = [
            SupportSet::ball(2.0, 2),
            SupportSet::halfspace(2),
            SupportSet::cone_subgraph(-1.0),
            SupportSet::sqrt_subgraph(),
            SupportSet::gaussian_slab(),
            SupportSet::tube_plus_parabola(),
        ];
        for u in &sets {
            for k in 0..200 {
                let th = 2.0 * std::f64::consts::PI * k as f64 / 200.0;
                let p = [7.0 * th.cos(), 7.0 * th.sin()];
                if u.contains(&p) {
                    assert_eq!(u.dist_to_U(&p), 0.0, "{}", u.label());
                }
            }
        }
    }

    #[test]
    fn ball_erosion_is_a_smaller_ball() {
        let u = SupportSet::ball(2.0, 2);
        let eroded = u.erode(1.0);
        let inner = SupportSet::ball(1.0, 2);
        for k in 0..1000 {
            let th = 2.0 * std::f64::consts::PI * k as f64 / 1000.0;
            let r = 2.5 * (k as f64 / 1000.0);
            let p = [r * th.cos(), r * th.sin()];
            assert_eq!(eroded.contains(&p), inner.contains(&p));
            assert!((eroded.dist_to_U(&p) - inner.dist_to_U(&p)).abs() < 1e-9);
        }
        // Over-eroding empties the set.
        let dead = SupportSet::ball(0.5, 2).erode(1.0);
        for k in 0..100 {
            let p = [0.01 * k as f64, 0.0];
            assert!(!dead.contains(&p));
        }
        assert!(dead.dist_to_U(&[0.0, 0.0]).is_infinite());
    }

    #[test]
    fn halfspace_erosion_is_a_shift() {
        let u = SupportSet::halfspace(2).erode(0.75);
        for k in 0..300 {
            let y = -2.0 + 4.0 * k as f64 / 300.0;
            let p = [3.0, y];
            assert_eq!(u.contains(&p), y <= -0.75);
            assert!((u.dist_to_U(&p) - (y + 0.75).max(0.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn erosion_is_monotone() {
        let sets = [
            SupportSet::ball(3.0, 2),
            SupportSet::cone_subgraph(1.0),
            SupportSet::sqrt_subgraph(),
            SupportSet::tube_plus_parabola(),
        ];
        for u in &sets {
            let shallow = u.erode(0.3);
            let deep = u.erode(0.8);
            for k in 0..400 {
                let th = 2.0 * std::f64::consts::PI * k as f64 / 400.0;
                let r = 6.0 * ((k % 20) as f64 + 1.0) / 20.0;
                let p = [r * th.cos(), r * th.sin()];
                if deep.contains(&p) {
                    assert!(shallow.contains(&p), "{} at {:?}", u.label(), p);
                }
                if shallow.contains(&p) {
                    assert!(u.contains(&p), "{} at {:?}", u.label(), p);
                }
            }
        }
    }

    #[test]
    fn distance_is_lipschitz_on_probe_grids() {
        // Exact shapes at machine tolerance, numeric shapes within the
        // refinement budget.
        let exact = [
            SupportSet::ball(2.0, 2),
            SupportSet::halfspace(2),
            SupportSet::shell_union(2),
            SupportSet::cone_subgraph(-1.0),
        ];
        let numeric = [SupportSet::sqrt_subgraph(), SupportSet::gaussian_slab()];
        let mut rng = 123456789u64;
        let mut next = move || {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((rng >> 11) as f64 / (1u64 << 53) as f64) * 30.0 - 15.0
        };
        for _ in 0..200 {
            let x = [next(), next()];
            let y = [next(), next()];
            let gap = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
            for u in &exact {
                assert!(
                    (u.dist_to_U(&x) - u.dist_to_U(&y)).abs() <= gap + 1e-9,
                    "{}",
                    u.label()
                );
            }
            for u in &numeric {
                assert!(
                    (u.dist_to_U(&x) - u.dist_to_U(&y)).abs() <= gap + 1e-6,
                    "{}",
                    u.label()
                );
            }
        }
    }

    #[test]
    fn eroded_cone_matches_brute_force() {
        let u = SupportSet::cone_subgraph(1.0).erode(0.4);
        // Brute-force distance through dense member sampling.
        let brute = |z: [f64; 2]| {
            let mut best = f64::INFINITY;
            let n = 500;
            for i in 0..=n {
                for j in 0..=n {
                    let p = [-8.0 + 16.0 * i as f64 / n as f64, -8.0 + 16.0 * j as f64 / n as f64];
                    if u.contains(&p) {
                        best = best
                            .min(((z[0] - p[0]).powi(2) + (z[1] - p[1]).powi(2)).sqrt());
                    }
                }
            }
            best
        };
        for z in [[0.0, 1.0], [2.0, 3.0], [-1.0, 0.5], [0.3, -0.2]] {
            let exact = u.dist_to_U(&z);
            let sampled = brute(z);
            assert!(
                (exact - sampled).abs() < 0.05,
                "z = {z:?}: {exact} vs {sampled}"
            );
        }
    }

    #[test]
    fn tube_contains_both_parts() {
        let u = SupportSet::tube_plus_parabola();
        assert!(u.contains(&[5.0, 0.0]));
        assert!(u.contains(&[5.0, 5f64.sqrt()]));
        assert!(!u.contains(&[5.0, 1.5]));
        assert!(!u.contains(&[-1.0, 0.0]));
        // Channel witnesses survive shallow erosion near the weld but die
        // far out, where the channel is thinner than the erosion depth.
        let eroded = u.erode(0.5);
        assert!(eroded.contains(&[5.0, 0.0]));
        assert!(!eroded.contains(&[25.0, 5.0]));
        let far_channel = [100.0, 10.0];
        let d = eroded.dist_to_U(&far_channel);
        assert!(d > 8.0, "channel should be gone from the erosion: {d}");
    }

    #[test]
    fn parse_known_names() {
        assert!(SupportSet::parse("ball", &[("radius".into(), 2.0)], 2).is_ok());
        assert!(SupportSet::parse("cone", &[("alpha".into(), -1.0)], 2).is_ok());
        let err = SupportSet::parse("moebius", &[], 2).unwrap_err();
        assert!(matches!(err, GeometryError::UnknownSupport { name } if name == "moebius"));
    }
}
