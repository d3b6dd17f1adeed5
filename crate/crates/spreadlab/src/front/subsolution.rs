//! Compactly supported subsolution arcs for speeds just below minimal.
//!
//! A trajectory launched at `(0, −ε)` that vanishes at an interior point
//! `s_v` traces, read in `z`, an arc that starts at height `s_v` with zero
//! slope, descends, and returns to `0` at a finite abscissa `a` — exactly
//! the compact profile a comparison argument wants below the front speed.
//! For the arc to be useful its turning point must clear the invasion
//! threshold θ, which happens only when the launch value sits just below
//! the reach/vanish flip of the given speed: the sweep therefore bisects
//! the launch value against the "reaches 1" predicate, keeping the
//! vanishing side, and stops early once the turning point is high enough
//! (pushing all the way to the flip only stretches the arc).

use super::shoot::{shoot, Termination};
use super::speed::launch_epsilon;
use super::{profile_dz, profile_step, FrontError};
use crate::reaction::{check_hypotheses, ReactionTerm};

/// Largest launch value the sweep will try; launches this large already
/// reach 1 for any speed escapably close to minimal.
const EPS_BAR: f64 = 0.1;

/// Cap on launch bisections (the interval spans many orders of magnitude,
/// and float exhaustion ends the loop before this does).
const MAX_BISECTIONS: usize = 400;

/// A compact arc `φ̲` solving the front equation on `[0, a]` with
/// `φ̲(0) = turning height`, `φ̲′(0) = 0`, `φ̲(a) = 0`.
#[derive(Clone, Debug)]
pub struct CompactSubsolution {
    /// Speed the arc was built for.
    pub c: f64,
    /// Right end of the support; `z` runs over `[0, a]`.
    pub a: f64,
    /// Strictly increasing sample abscissas from `0` to `a`.
    pub z: Vec<f64>,
    /// Arc values: `phi[0]` is the turning height (above θ, below 1),
    /// strictly decreasing to an exact `0.0` at the end.
    pub phi: Vec<f64>,
    /// Arc slopes at the same samples; `p[0] = 0` exactly.
    pub p: Vec<f64>,
    /// Launch value of the vanishing trajectory the arc came from.
    pub epsilon_used: f64,
}

fn vanish_point(termination: &Termination) -> Option<f64> {
    match termination {
        Termination::VanishedAt(q) => Some(*q),
        _ => None,
    }
}

/// Build a compact subsolution arc at speed `c` below the minimal speed.
///
/// Errors: [`FrontError::SpeedNotBelowMinimal`] when even the deepest
/// launch reaches 1 (so `c` is not below the flip);
/// [`FrontError::SubsolutionNotFound`] when `c` is so far below minimal
/// that every launch up to [`EPS_BAR`] vanishes, or when the sweep cannot
/// raise the turning point past θ.
///
/// # Examples
///
/// ```
/// use spreadlab::front::compact_subsolution;
/// use spreadlab::reaction::ReactionTerm;
///
/// let arc = compact_subsolution(&ReactionTerm::kpp(), 1.99).unwrap();
/// assert!(arc.phi[0] > 0.5 && arc.phi[0] < 1.0);
/// assert_eq!(*arc.phi.last().unwrap(), 0.0);
/// ```
pub fn compact_subsolution(
    f: &ReactionTerm,
    c: f64,
) -> Result<CompactSubsolution, FrontError> {
    let report = check_hypotheses(f);
    let Some(theta) = report.theta else {
        return Err(FrontError::SubsolutionNotFound {
            c,
            why: "reaction has no invasion threshold",
        });
    };

    let epsilon0 = launch_epsilon(f);
    let deep = shoot(f, c, epsilon0)?;
    if deep.reached() {
        return Err(FrontError::SpeedNotBelowMinimal { c });
    }
    let top = shoot(f, c, EPS_BAR)?;
    if !top.reached() {
        return Err(FrontError::SubsolutionNotFound {
            c,
            why: "speed is too far below minimal: every launch up to 0.1 vanishes",
        });
    }

    // Raise the vanishing launch toward the flip until the turning point
    // clears the target height (well above θ, but not so close to 1 that
    // the arc hangs forever near the top).
    let s_target = 0.9f64.max(theta + 0.01).min(0.5 * (1.0 + theta));
    let (mut lo, mut hi) = (epsilon0, EPS_BAR);
    let mut best = deep;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let probe = shoot(f, c, mid)?;
        if probe.reached() {
            hi = mid;
        } else {
            lo = mid;
            let high_enough = vanish_point(&probe.termination)
                .is_some_and(|q| q >= s_target);
            best = probe;
            if high_enough {
                break;
            }
        }
    }

    let Some(s_v) = vanish_point(&best.termination) else {
        return Err(FrontError::SubsolutionNotFound {
            c,
            why: "lowest launch did not vanish cleanly",
        });
    };
    if s_v <= theta || s_v >= 1.0 {
        return Err(FrontError::SubsolutionNotFound {
            c,
            why: "turning point never cleared the invasion threshold",
        });
    }

    // Convert the vanishing trajectory to z-space by re-integrating the
    // profile system from the turning point (s_v, 0); by uniqueness this
    // retraces the same phase curve down to the launch line.
    let steepest = best
        .w_samples
        .iter()
        .fold(0.0f64, |acc, w| acc.max(*w))
        .sqrt();
    let dz = profile_dz(f).min(2e-4 / steepest.max(1e-6));
    let epsilon_used = best.epsilon;

    let mut z = vec![0.0];
    let mut phi_samples = vec![s_v];
    let mut p_samples = vec![0.0];
    let (mut phi, mut p) = (s_v, 0.0);
    let mut abscissa = 0.0f64;
    loop {
        let (next_phi, next_p) = profile_step(f, c, phi, p, dz);
        if next_phi <= 0.0 {
            // Refine the final fraction so the arc ends exactly on zero.
            let (mut lo_t, mut hi_t) = (0.0f64, 1.0f64);
            for _ in 0..60 {
                let t = 0.5 * (lo_t + hi_t);
                let (trial, _) = profile_step(f, c, phi, p, dz * t);
                if trial > 0.0 {
                    lo_t = t;
                } else {
                    hi_t = t;
                }
            }
            let (_, end_p) = profile_step(f, c, phi, p, dz * hi_t);
            abscissa += dz * hi_t;
            z.push(abscissa);
            phi_samples.push(0.0);
            p_samples.push(end_p);
            break;
        }
        assert!(
            next_phi < phi,
            "subsolution arc lost monotonicity at phi = {phi}"
        );
        phi = next_phi;
        p = next_p;
        abscissa += dz;
        z.push(abscissa);
        phi_samples.push(phi);
        p_samples.push(p);
        assert!(z.len() < 4_000_000, "subsolution arc ran away");
    }

    Ok(CompactSubsolution {
        c,
        a: abscissa,
        z,
        phi: phi_samples,
        p: p_samples,
        epsilon_used,
    })
}
