//! Minimal front speed by bisection on the shooting predicate, profile
//! reconstruction, and the two terrace speeds of tristable reactions.
//!
//! The predicate "the trajectory shot at speed `c` reaches `q = 1`" is
//! monotone in `c`, false at `c = 0` (there `w(1) = ε² − 2∫₀¹f < 0` whenever
//! the integral is positive) and true at `c = 2 + max|f′|`.  Bisection pins
//! the flip inside a bracket of width `tol`; the reported `c_star` is the
//! bracket's *upper* end, whose trajectory actually connects and furnishes
//! the profile — so the profile solves the equation at exactly the reported
//! speed.
//!
//! The launch value plays the role of `ε → 0⁺`.  For *pulled* fronts
//! (`f′(0) > 0`, flip at the linearized speed `2√f′(0)`) the flip location
//! feels the launch logarithmically — the bias behaves like
//! `π² c / ln²(1/ε)` — so the proxy must sit extremely deep: `ε = 1e-120`
//! biases the KPP flip by only `1.3e-4`.  When `f′(0) ≤ 0` the flip is a
//! transversal crossing with power-law launch sensitivity and `ε = 1e-12`
//! is already far below any tolerance; it is also much cheaper, since the
//! adaptive launch layer costs `O(max|f′| · ln(1/ε))` steps.

use super::shoot::{shoot, PhaseTrajectory};
use super::{profile_dz, profile_step, FrontError};
use crate::reaction::{check_hypotheses, integral_sign, ReactionKind, ReactionTerm, Sign};

/// Launch value standing in for `ε → 0⁺`; see module docs.
pub(crate) fn launch_epsilon(f: &ReactionTerm) -> f64 {
    if f.derivative(0.0) > 1e-12 {
        1e-120
    } else {
        1e-12
    }
}

/// Minimal-speed result: certified bracket and connecting profile.
#[derive(Clone, Debug)]
pub struct FrontResult {
    /// Smallest speed whose trajectory connects, to bracket accuracy; equals
    /// `bracket.1`.
    pub c_star: f64,
    /// `(c_lo, c_hi)`: the trajectory vanishes at `c_lo` and reaches at
    /// `c_hi`, with `c_hi − c_lo ≤ tol`.
    pub bracket: (f64, f64),
    /// Strictly increasing sample coordinates of the profile.
    pub profile_z: Vec<f64>,
    /// Strictly decreasing profile values in `(0, 1)`; first `> 1 − 1e-3`,
    /// last `< 1e-3`, and `φ(0) = theta_used`.
    pub profile_phi: Vec<f64>,
    /// Level at which the profile is anchored: the invasion threshold θ of
    /// the reaction, pushed up to `0.5` when θ sits lower (any level in
    /// `(θ, 1)` anchors the same front).
    pub theta_used: f64,
}

/// Profile truncation margin: integrate until φ passes `1 − TRIM` above and
/// `TRIM` below, comfortably inside the required `1e-3` endpoint bands.
const TRIM: f64 = 5e-4;

/// Reconstruct the front profile from the connecting trajectory: read
/// `p(θ) = −√w(θ)` off the orbit, then integrate the profile system both
/// ways in `z` from `(θ, p(θ))`.
///
/// Climbing toward `1` follows the same orbit backward; it crosses any level
/// below `1` in finite `z` because `w > 0` all along a reaching trajectory.
/// The step is capped so that the single step crossing `1 − TRIM` cannot
/// jump past `1` even where the orbit is steep (`|p|` can reach order one
/// near the top when the reaction is steeper than its linearization).
/// Descending toward `0` rides the contracting node/saddle approach, where
/// steps shrink with `|p| ∝ φ`, so the loop terminates strictly above `0`.
fn reconstruct_profile(
    f: &ReactionTerm,
    c: f64,
    trajectory: &PhaseTrajectory,
    theta_used: f64,
) -> (Vec<f64>, Vec<f64>) {
    let steepest = trajectory
        .w_samples
        .iter()
        .fold(0.0f64, |acc, w| acc.max(*w))
        .sqrt();
    let dz = profile_dz(f).min(3e-4 / steepest.max(1e-6));
    let p_theta = -trajectory.w_at(theta_used).sqrt();

    let mut climb = Vec::new();
    let (mut phi, mut p) = (theta_used, p_theta);
    while phi < 1.0 - TRIM {
        let (next_phi, next_p) = profile_step(f, c, phi, p, -dz);
        assert!(
            next_p < 0.0 && next_phi > phi,
            "profile climb lost monotonicity at phi = {phi}"
        );
        phi = next_phi;
        p = next_p;
        climb.push(phi);
        assert!(climb.len() < 4_000_000, "profile climb ran away");
    }

    let mut descent = Vec::new();
    let (mut phi, mut p) = (theta_used, p_theta);
    while phi > TRIM {
        let (next_phi, next_p) = profile_step(f, c, phi, p, dz);
        assert!(
            next_p < 0.0 && next_phi < phi,
            "profile descent lost monotonicity at phi = {phi}"
        );
        phi = next_phi;
        p = next_p;
        descent.push(phi);
        assert!(descent.len() < 4_000_000, "profile descent ran away");
    }

    let n_climb = climb.len();
    let mut profile_z = Vec::with_capacity(n_climb + 1 + descent.len());
    let mut profile_phi = Vec::with_capacity(n_climb + 1 + descent.len());
    for (i, value) in climb.iter().rev().enumerate() {
        profile_z.push(-((n_climb - i) as f64) * dz);
        profile_phi.push(*value);
    }
    profile_z.push(0.0);
    profile_phi.push(theta_used);
    for (i, value) in descent.iter().enumerate() {
        profile_z.push((i + 1) as f64 * dz);
        profile_phi.push(*value);
    }
    (profile_z, profile_phi)
}

/// Compute the minimal front speed `c*` of `f` to bracket width `tol`, with
/// the connecting profile.
///
/// Callers are expected to have verified the invasion property
/// ([`check_hypotheses`]); here only the integral sign is re-checked, since
/// a non-positive `∫₀¹ f` provably rules out positive-speed fronts.
///
/// # Examples
///
/// ```
/// use spreadlab::front::minimal_speed;
/// use spreadlab::reaction::ReactionTerm;
///
/// let result = minimal_speed(&ReactionTerm::kpp(), 1e-3).unwrap();
/// assert!((result.c_star - 2.0).abs() < 1e-3);
/// ```
pub fn minimal_speed(f: &ReactionTerm, tol: f64) -> Result<FrontResult, FrontError> {
    assert!(tol > 0.0 && tol.is_finite(), "tolerance must be positive");
    let sign = integral_sign(f);
    if sign != Sign::Positive {
        return Err(FrontError::NoPositiveFront { sign });
    }
    let epsilon = launch_epsilon(f);

    let mut lo = 0.0f64;
    let mut hi = 2.0 + f.max_abs_slope();
    let top = shoot(f, hi, epsilon)?;
    if !top.reached() {
        return Err(FrontError::BracketFailure { c_hi: hi });
    }
    let mut best = top;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let probe = shoot(f, mid, epsilon)?;
        if probe.reached() {
            hi = mid;
            best = probe;
        } else {
            lo = mid;
        }
    }

    let theta = check_hypotheses(f).theta.unwrap_or(0.5);
    let theta_used = theta.max(0.5);
    let (profile_z, profile_phi) = reconstruct_profile(f, hi, &best, theta_used);

    Ok(FrontResult {
        c_star: hi,
        bracket: (lo, hi),
        profile_z,
        profile_phi,
        theta_used,
    })
}

/// Tolerance used for the two terrace speeds.
const TERRACE_TOL: f64 = 5e-4;

/// The two front speeds hiding inside a tristable reaction: `c1` for the
/// front connecting the middle state `β` to `0`, `c2` for the front
/// connecting `1` to `β`.
///
/// Each is the minimal speed of the reaction restricted to its subinterval
/// and rescaled to `[0, 1]`: `g1(s) = f(βs)/β` and
/// `g2(s) = f(β + (1−β)s)/(1−β)`, whose derivatives are `f′` evaluated at
/// the mapped point — so both restrictions inherit the C¹ bound of `f`.
/// A single front connecting `1` to `0` exists exactly when `c1 < c2`;
/// `c1 ≥ c2` is the terrace regime (two separating front levels).
pub fn tristable_terrace_speeds(f: &ReactionTerm) -> Result<(f64, f64), FrontError> {
    if f.kind() != ReactionKind::Tristable {
        return Err(FrontError::NotTristable { kind: f.kind() });
    }
    let param = |name: &str| -> f64 {
        f.params()
            .iter()
            .find(|(key, _)| key == name)
            .map(|(_, value)| *value)
            .expect("tristable terms carry alpha/beta/gamma")
    };
    let beta = param("beta");

    let lower = f.clone();
    let g1 = ReactionTerm::custom(
        format!("lower-branch(beta={beta}) of {}", f.label()),
        move |s| lower.evaluate(beta * s) / beta,
        {
            let lower = f.clone();
            move |s| lower.derivative(beta * s)
        },
    );
    let upper = f.clone();
    let g2 = ReactionTerm::custom(
        format!("upper-branch(beta={beta}) of {}", f.label()),
        move |s| upper.evaluate(beta + (1.0 - beta) * s) / (1.0 - beta),
        {
            let upper = f.clone();
            move |s| upper.derivative(beta + (1.0 - beta) * s)
        },
    );

    let c1 = minimal_speed(&g1, TERRACE_TOL)?.c_star;
    let c2 = minimal_speed(&g2, TERRACE_TOL)?.c_star;
    Ok((c1, c2))
}
