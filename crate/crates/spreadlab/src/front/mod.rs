//! Traveling fronts in one space dimension.
//!
//! A front `u(t, x) = φ(x − ct)` of `∂t u = Δu + f(u)` solves
//!
//! ```text
//!     φ″ + c φ′ + f(φ) = 0,    1 = φ(−∞) > φ(z) > φ(+∞) = 0.
//! ```
//!
//! Writing `q = φ` and `p = φ′ < 0`, the profile is an orbit of the phase
//! system `q′ = p`, `p′ = −c p − f(q)` connecting `(1, 0)` to `(0, 0)`.  The
//! degenerate launch at `p = 0` is handled by the substitution `w = p²`,
//! which obeys the scalar equation
//!
//! ```text
//!     dw/dq = 2 c √w − 2 f(q),    w(0) = ε²,
//! ```
//!
//! integrated in `q` from `0` to `1` ([`shoot`]).  A trajectory either
//! *vanishes* (`w → 0` before `q = 1`; the orbit stalls, no front at this
//! speed from this launch) or *reaches one* (`w(1) > 0`).  The infimum of
//! speeds whose trajectory reaches `1` is the minimal front speed `c*`
//! ([`minimal_speed`]), and the certified bracket around it yields the
//! profile itself, a compactly supported subsolution for `c < c*`
//! ([`compact_subsolution`]), an exponentially decaying supersolution for
//! `c > c*` ([`exponential_supersolution`]), and the radially retracting
//! supersolution used to pin solutions down near the origin
//! ([`build_retracting_supersolution`]).

mod shoot;
mod speed;
mod subsolution;
mod supersolution;

pub use shoot::{shoot, PhaseTrajectory, Termination};
pub use speed::{minimal_speed, tristable_terrace_speeds, FrontResult};
pub use subsolution::{compact_subsolution, CompactSubsolution};
pub use supersolution::{
    build_retracting_supersolution, exponential_supersolution, ExponentialSupersolution,
    RetractingSupersolution,
};

use crate::reaction::{ReactionKind, ReactionTerm, Sign};
use thiserror::Error;

/// Errors from front construction.
#[derive(Debug, Error)]
pub enum FrontError {
    /// The trajectory produced a NaN or infinity — the speed is far outside
    /// any reasonable bracket.
    #[error("phase trajectory became nonfinite at q = {q} (c = {c})")]
    NonFinite {
        /// Speed being shot at.
        c: f64,
        /// Location where the integration broke down.
        q: f64,
    },
    /// `∫₀¹ f` is not positive, so any front has non-positive speed and no
    /// positive minimal speed exists.
    #[error("no positive-speed front: ∫₀¹ f has sign {sign:?}, need positive")]
    NoPositiveFront {
        /// The offending integral sign.
        sign: Sign,
    },
    /// The shooting predicate is still false at the top of the bisection
    /// bracket; the speed search cannot start.
    #[error("trajectory still vanishes at the bracket top c = {c_hi}")]
    BracketFailure {
        /// Upper bracket endpoint that failed.
        c_hi: f64,
    },
    /// A subsolution was requested at a speed that is not below the minimal
    /// speed.
    #[error("speed c = {c} is not below the minimal speed")]
    SpeedNotBelowMinimal {
        /// Offending speed.
        c: f64,
    },
    /// A supersolution was requested at a speed that is not above the
    /// minimal speed.
    #[error("speed c = {c} is not above the minimal speed")]
    SpeedNotAboveMinimal {
        /// Offending speed.
        c: f64,
    },
    /// The compact-subsolution search failed; the speed is too far below the
    /// minimal speed (callers should retry closer to it).
    #[error("no compact subsolution at c = {c}: {why}")]
    SubsolutionNotFound {
        /// Speed that was searched.
        c: f64,
        /// What gave out.
        why: &'static str,
    },
    /// The retracting-supersolution parameter search underflowed.
    #[error("retracting-supersolution parameter search failed: {why}")]
    ParameterSearch {
        /// What gave out.
        why: &'static str,
    },
    /// Terrace speeds are only defined for tristable reactions.
    #[error("terrace speeds need a tristable reaction, got {kind:?}")]
    NotTristable {
        /// Kind that was passed instead.
        kind: ReactionKind,
    },
}

/// One RK4 step of the profile system `φ′ = p`, `p′ = −c p − f(φ)`.
pub(crate) fn profile_step(f: &ReactionTerm, c: f64, phi: f64, p: f64, dz: f64) -> (f64, f64) {
    let rhs = |phi: f64, p: f64| (p, -c * p - f.evaluate(phi));
    let (k1q, k1p) = rhs(phi, p);
    let (k2q, k2p) = rhs(phi + 0.5 * dz * k1q, p + 0.5 * dz * k1p);
    let (k3q, k3p) = rhs(phi + 0.5 * dz * k2q, p + 0.5 * dz * k2p);
    let (k4q, k4p) = rhs(phi + dz * k3q, p + dz * k3p);
    (
        phi + dz / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q),
        p + dz / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
    )
}

/// Step size for profile integration in `z`, scaled by the reaction's
/// stiffness: decay rates grow like √max|f′|, and the finite-difference
/// residual tests downstream need (dz² · rate⁴) to stay below ~1e-6.
pub(crate) fn profile_dz(f: &ReactionTerm) -> f64 {
    (2.5e-3 / (1.0 + f.max_abs_slope())).min(5e-3)
}
