//! Phase-plane shooting for the front ODE in the `w = p²` chart.
//!
//! The scalar equation `dw/dq = 2c√w − 2f(q)` is integrated from the launch
//! `w(0) = ε²` (i.e. `p(0) = −ε`) toward `q = 1`.  Near the launch the
//! natural length scale is `q` itself — the solution is self-similar under
//! `q ↦ εs`, `w ↦ ε²W` while `f` is linear — so the adaptive step grows
//! proportionally to `q + ε` until it hits the uniform cap `1e-4`.  The step
//! rule depends only on `q`, `ε`, and the reaction's slope bound, never on
//! the speed `c`, so trajectories shot at different speeds from the same
//! launch share their sample grid exactly; pointwise comparison theorems can
//! then be asserted sample-by-sample without interpolation.
//!
//! Termination is decided against a *vanish floor*: `min(1e-16, ε²·1e-6)`.
//! For launches down at `ε ~ 1e-120` (used as the `ε → 0⁺` proxy) an
//! absolute threshold would swallow the launch layer whole, so the floor is
//! kept six orders of magnitude below the launch value, while never rising
//! above `1e-16`.

use super::FrontError;
use crate::reaction::ReactionTerm;

/// Hard cap on the uniform step size in `q`.
const MAX_STEP: f64 = 1e-4;

/// Relative step fraction in the launch layer.
const STEP_FRACTION: f64 = 0.01;

/// `w` beyond this is reported as blow-up (unreachable for sane speeds; the
/// growth of `√w` in `q` is at most `|c| + max|f| / √w`).
const BLOW_UP: f64 = 1e16;

/// How a shot trajectory ended.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Termination {
    /// `w` hit the vanish floor at this `q ≤ 1`: the orbit stalls before
    /// connecting, so no front exists at this speed from this launch.
    VanishedAt(f64),
    /// The trajectory arrived at `q = 1` with this `w(1)` above the floor.
    ReachedOneWith(f64),
    /// `w` exceeded the blow-up cap.
    BlowUp,
}

/// A shooting orbit of the front ODE in the `(q, w = p²)` chart.
#[derive(Clone, Debug)]
pub struct PhaseTrajectory {
    /// Wave speed the orbit was shot at.
    pub c: f64,
    /// Launch value: `|p(0)| = ε`, so `w(0) = ε²`.
    pub epsilon: f64,
    /// Strictly increasing sample locations in `[0, 1]`.
    pub q_samples: Vec<f64>,
    /// `w = p² ≥ 0` at each sample.
    pub w_samples: Vec<f64>,
    /// How the integration ended.
    pub termination: Termination,
}

impl PhaseTrajectory {
    /// Whether the orbit arrived at `q = 1` with positive `w`.
    pub fn reached(&self) -> bool {
        matches!(self.termination, Termination::ReachedOneWith(_))
    }

    /// Linear interpolation of `w` at `q` inside the sampled range.
    ///
    /// # Panics
    ///
    /// Panics if `q` lies outside `[first, last]` sample.
    pub fn w_at(&self, q: f64) -> f64 {
        let first = *self.q_samples.first().expect("trajectory is sampled");
        let last = *self.q_samples.last().expect("trajectory is sampled");
        assert!(
            (first..=last).contains(&q),
            "q = {q} outside sampled range [{first}, {last}]"
        );
        let idx = match self
            .q_samples
            .binary_search_by(|probe| probe.partial_cmp(&q).expect("samples are finite"))
        {
            Ok(exact) => return self.w_samples[exact],
            Err(insertion) => insertion,
        };
        let (q0, q1) = (self.q_samples[idx - 1], self.q_samples[idx]);
        let (w0, w1) = (self.w_samples[idx - 1], self.w_samples[idx]);
        w0 + (w1 - w0) * (q - q0) / (q1 - q0)
    }

    /// The vanish floor used for this launch value.
    pub fn vanish_floor(&self) -> f64 {
        vanish_floor(self.epsilon)
    }
}

/// Vanish floor for a given launch: `min(1e-16, ε² · 1e-6)`.
pub(crate) fn vanish_floor(epsilon: f64) -> f64 {
    (epsilon * epsilon * 1e-6).min(1e-16)
}

/// One RK4 step of `dw/dq = 2c√w − 2f(q)`; `w` is clamped to `0` inside the
/// right-hand side so intermediate stage overshoots below zero stay finite.
fn rk4_step(f: &ReactionTerm, c: f64, q: f64, w: f64, h: f64) -> f64 {
    let rhs = |q: f64, w: f64| 2.0 * c * w.max(0.0).sqrt() - 2.0 * f.evaluate(q);
    let k1 = rhs(q, w);
    let k2 = rhs(q + 0.5 * h, w + 0.5 * h * k1);
    let k3 = rhs(q + 0.5 * h, w + 0.5 * h * k2);
    let k4 = rhs(q + h, w + h * k3);
    w + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Shoot the trajectory of the front ODE from `(q, p) = (0, −ε)` at speed
/// `c`, in the `w = p²` chart.
///
/// Returns the sampled trajectory with its termination; see module docs for
/// the step rule and vanish floor.  The only error is a nonfinite `w`, which
/// signals a speed far outside any sensible bracket.
///
/// # Panics
///
/// Panics if `ε ∉ (0, 1]` or `c` is not finite.
///
/// # Examples
///
/// ```
/// use spreadlab::front::shoot;
/// use spreadlab::reaction::ReactionTerm;
///
/// let f = ReactionTerm::kpp();
/// assert!(shoot(&f, 3.0, 1e-8).unwrap().reached()); // c > c* = 2
/// assert!(!shoot(&f, 1.0, 1e-8).unwrap().reached()); // c < c* = 2
/// ```
pub fn shoot(f: &ReactionTerm, c: f64, epsilon: f64) -> Result<PhaseTrajectory, FrontError> {
    assert!(
        epsilon > 0.0 && epsilon <= 1.0,
        "launch epsilon must lie in (0, 1], got {epsilon}"
    );
    assert!(c.is_finite(), "speed must be finite");

    let floor = vanish_floor(epsilon);
    // Speed-independent step normalization: the largest speed the bisection
    // will ever probe is 2 + max|f′|, and relative growth per launch step is
    // ~2c·STEP_FRACTION/c_ref, so normalizing by c_ref keeps every probed
    // speed accurate on one shared grid.
    let c_ref = 2.0 + f.max_abs_slope();

    let mut q = 0.0f64;
    let mut w = epsilon * epsilon;
    let mut q_samples = vec![q];
    let mut w_samples = vec![w];

    let termination = loop {
        let h = (STEP_FRACTION * (q + epsilon) / c_ref)
            .min(MAX_STEP)
            .min(1.0 - q);
        let w_next = rk4_step(f, c, q, w, h);
        if !w_next.is_finite() {
            return Err(FrontError::NonFinite { c, q });
        }
        if w_next <= floor {
            // Bisect the step fraction for the floor crossing: the crossing
            // happens where f > 0, so w moves monotonically down through it.
            let mut lo = 0.0f64;
            let mut hi = 1.0f64;
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                if rk4_step(f, c, q, w, mid * h) <= floor {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let q_v = q + hi * h;
            q_samples.push(q_v);
            w_samples.push(rk4_step(f, c, q, w, hi * h).max(0.0));
            break Termination::VanishedAt(q_v);
        }
        q += h;
        w = w_next;
        q_samples.push(q);
        w_samples.push(w);
        if w > BLOW_UP {
            break Termination::BlowUp;
        }
        if 1.0 - q <= 1e-12 {
            break Termination::ReachedOneWith(w);
        }
    };

    Ok(PhaseTrajectory {
        c,
        epsilon,
        q_samples,
        w_samples,
        termination,
    })
}
