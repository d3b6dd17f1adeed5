//! Barriers for speeds above minimal: a planar exponential profile, and a
//! radial barrier whose level sets are retracting spheres.
//!
//! **Planar barrier.**  For `c` above the minimal speed the trajectory shot
//! at `c` reaches `q = 1` with `w(1) > 0`.  Read in `z` and extended above
//! `1` by the linear slope rule `p(q) = p(1) − c(q − 1)`, it yields a
//! profile `φ̄` with `φ̄(0) = 1` that solves `φ̄″ + cφ̄′ + f(φ̄) = 0` on all
//! of ℝ (the reaction is extended by zero outside `[0,1]`, and the negative
//! side collapses to the closed form `A e^{−cz} + 1 − A`, `A = √w(1)/c`,
//! which matches value, slope and curvature at `z = 0`).  Its logarithmic
//! slope `−φ̄′/φ̄` stays inside `[m⁻¹, m]` for a computable `m > 1`, and
//! `φ̄` is convex from some abscissa `b` on — the two facts the radial
//! construction leans on.
//!
//! **Retracting barrier.**  For `c′ > c″` above minimal, the tilted profile
//! `ψ(z) = φ̄(z) e^{−β(z−Z)}` (with `φ̄` built at speed `c″`, and `Z` the
//! abscissa where `φ̄` crosses the near-linearity scale `s₀`) satisfies, for
//! `β` small enough,
//!
//! ```text
//! −ψ″ − (c′−β)ψ′ > f(φ̄)e^{−β(z−Z)} + (c′−c″)/(2m)·ψ,
//! ```
//!
//! because dividing out the exponential reduces it to
//! `g(z) = (c′−c″−3β)(−φ̄′) + β(c′−2β)φ̄ − (c′−c″)/(2m)·φ̄ > 0`, which the
//! bound `−φ̄′ ≥ φ̄/m` turns into a positivity check on the scalar
//! `(c′−c″−3β)/m + β(c′−2β) − (c′−c″)/(2m)`.  The barrier on a ray is then
//! `v = min(v₁, v₂)` with `v₁(t,r) = φ̄(r − c′(t−T) + L)` and
//! `v₂(t,r) = ψ(r − c′(t−T) + L) + ψ(−r − c′(t−T) + L)`, evaluated at
//! `r = R′ − radius` outside the ball of radius `R′` and capped by its
//! center value inside; the curvature term `(N−1)/|x|` is absorbed by
//! `R′ > (N−1)/β`.  At time `0` the barrier is ≥ 1 beyond `R + cT`, yet its
//! center value stays below any prescribed `λ` for all of `[0, T]` — the
//! sphere where the barrier transitions retracts as time runs forward.

use super::shoot::{shoot, Termination};
use super::speed::{launch_epsilon, minimal_speed};
use super::{profile_dz, profile_step, FrontError};
use crate::reaction::ReactionTerm;

/// Depth at which the decaying branch hands over to a pure exponential tail.
const TAIL_FLOOR: f64 = 1e-9;

/// Largest exponent fed to `exp` (keeps products finite far outside the
/// sampled window; the barrier only needs to stay ≥ 1 out there).
const EXP_CAP: f64 = 700.0;

fn exp_capped(x: f64) -> f64 {
    x.min(EXP_CAP).exp()
}

/// Planar barrier profile for a speed above minimal: decreasing on ℝ,
/// equal to `A e^{−cz} + 1 − A` for `z < 0`, sampled for `z ≥ 0`, with a
/// pure exponential tail past the sampled window.
#[derive(Clone, Debug)]
pub struct ExponentialSupersolution {
    /// Speed the profile was built at.
    pub c: f64,
    /// Coefficient `A = √w(1)/c` of the closed form on the negative side.
    pub a_coefficient: f64,
    /// Two-sided logarithmic-slope bound: `m⁻¹ ≤ −φ̄′/φ̄ ≤ m` everywhere.
    pub m: f64,
    /// Convexity onset: `φ̄″ ≥ 0` on `[b, ∞)`.
    pub b: f64,
    /// End of the sampled window; the exponential tail starts here.
    pub z_end: f64,
    dz: f64,
    phi: Vec<f64>,
    p: Vec<f64>,
    tail_rate: f64,
    reaction: ReactionTerm,
}

impl ExponentialSupersolution {
    /// Profile value at `z`.
    pub fn value(&self, z: f64) -> f64 {
        if z < 0.0 {
            self.a_coefficient * exp_capped(-self.c * z) + 1.0 - self.a_coefficient
        } else if z >= self.z_end {
            let last = *self.phi.last().unwrap();
            last * exp_capped(-self.tail_rate * (z - self.z_end))
        } else {
            let (k, t) = self.locate(z);
            let (h00, h10, h01, h11) = hermite_basis(t);
            h00 * self.phi[k]
                + h10 * self.dz * self.p[k]
                + h01 * self.phi[k + 1]
                + h11 * self.dz * self.p[k + 1]
        }
    }

    /// Profile slope at `z` (negative everywhere).
    pub fn slope(&self, z: f64) -> f64 {
        if z < 0.0 {
            -self.c * self.a_coefficient * exp_capped(-self.c * z)
        } else if z >= self.z_end {
            -self.tail_rate * self.value(z)
        } else {
            let (k, t) = self.locate(z);
            let (d00, d10, d01, d11) = hermite_basis_derivative(t);
            (d00 * self.phi[k] + d01 * self.phi[k + 1]) / self.dz
                + d10 * self.p[k]
                + d11 * self.p[k + 1]
        }
    }

    /// Profile curvature at `z`, through the defining equation on the
    /// sampled branch and the closed forms on the outer branches.
    pub fn second_derivative(&self, z: f64) -> f64 {
        if z < 0.0 {
            self.c * self.c * self.a_coefficient * exp_capped(-self.c * z)
        } else if z >= self.z_end {
            self.tail_rate * self.tail_rate * self.value(z)
        } else {
            -self.c * self.slope(z) - self.reaction.evaluate(self.value(z))
        }
    }

    fn locate(&self, z: f64) -> (usize, f64) {
        let raw = z / self.dz;
        let k = (raw.floor() as usize).min(self.phi.len() - 2);
        (k, raw - k as f64)
    }
}

fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}

fn hermite_basis_derivative(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    (
        6.0 * t2 - 6.0 * t,
        3.0 * t2 - 4.0 * t + 1.0,
        -6.0 * t2 + 6.0 * t,
        3.0 * t2 - 2.0 * t,
    )
}

/// Build the planar barrier at speed `c` above minimal.
///
/// Errors with [`FrontError::SpeedNotAboveMinimal`] when the trajectory
/// shot at `c` vanishes (so `c` is not above the flip).
///
/// # Examples
///
/// ```
/// use spreadlab::front::exponential_supersolution;
/// use spreadlab::reaction::ReactionTerm;
///
/// let barrier = exponential_supersolution(&ReactionTerm::kpp(), 3.0).unwrap();
/// assert!((barrier.value(0.0) - 1.0).abs() < 1e-12);
/// assert!(barrier.m > 1.0);
/// ```
pub fn exponential_supersolution(
    f: &ReactionTerm,
    c: f64,
) -> Result<ExponentialSupersolution, FrontError> {
    let traj = shoot(f, c, launch_epsilon(f))?;
    let Termination::ReachedOneWith(w1) = traj.termination else {
        return Err(FrontError::SpeedNotAboveMinimal { c });
    };
    let a_coefficient = w1.sqrt() / c;

    let steepest = traj
        .w_samples
        .iter()
        .fold(0.0f64, |acc, w| acc.max(*w))
        .sqrt();
    let dz = profile_dz(f).min(3e-4 / steepest.max(1e-6));

    let mut phi_samples = vec![1.0];
    let mut p_samples = vec![-w1.sqrt()];
    let (mut phi, mut p) = (1.0, -w1.sqrt());
    while phi > TAIL_FLOOR {
        let (next_phi, next_p) = profile_step(f, c, phi, p, dz);
        assert!(
            next_phi < phi && next_p < 0.0,
            "barrier profile lost monotonicity at phi = {phi}"
        );
        phi = next_phi;
        p = next_p;
        phi_samples.push(phi);
        p_samples.push(p);
        assert!(phi_samples.len() < 4_000_000, "barrier profile ran away");
    }
    let z_end = (phi_samples.len() - 1) as f64 * dz;
    let tail_rate = -p / phi;

    // Logarithmic-slope extremes: the negative side sweeps between c and
    // c·A, the sampled side contributes each −p/φ, the tail repeats the
    // final ratio.
    let mut hi_ratio = c.max(c * a_coefficient);
    let mut lo_ratio = c.min(c * a_coefficient);
    for (value, slope) in phi_samples.iter().zip(&p_samples) {
        let ratio = -slope / value;
        hi_ratio = hi_ratio.max(ratio);
        lo_ratio = lo_ratio.min(ratio);
    }
    let m = (hi_ratio.max(1.0 / lo_ratio) * 1.02).max(1.01);

    // Convexity onset: last sample with negative curvature, pushed one
    // step to the right (the closed form on z < 0 is convex outright).
    let mut last_negative = None;
    for (k, (value, slope)) in phi_samples.iter().zip(&p_samples).enumerate() {
        if -c * slope - f.evaluate(*value) < 0.0 {
            last_negative = Some(k);
        }
    }
    let b = match last_negative {
        Some(k) => (k + 1) as f64 * dz,
        None => dz,
    };

    Ok(ExponentialSupersolution {
        c,
        a_coefficient,
        m,
        b,
        z_end,
        dz,
        phi: phi_samples,
        p: p_samples,
        tail_rate,
        reaction: f.clone(),
    })
}

/// Radial barrier whose transition sphere retracts at speed `c′` as time
/// runs forward; see the module docs for the construction.
#[derive(Clone, Debug)]
pub struct RetractingSupersolution {
    /// Requested outer speed (`> c_prime`).
    pub c: f64,
    /// Drift speed of the barrier, two thirds of the way up from minimal.
    pub c_prime: f64,
    /// Speed of the underlying planar profile, one third of the way up.
    pub c_second: f64,
    /// Tilt rate of `ψ`; lies in `(0, c_prime − c_second)`.
    pub beta: f64,
    /// Scale below which the reaction tracks its linearization to within
    /// `(c_prime − c_second)/(4m)` relatively.
    pub s_zero: f64,
    /// Abscissa where the planar profile crosses `s_zero`.
    pub z_of_s_zero: f64,
    /// Translation applied to both profile arguments; exceeds
    /// `z_of_s_zero + ln2/beta`, the convexity onset, and the abscissa
    /// where the profile drops below `lambda`.
    pub l_offset: f64,
    /// Radius of the constant cap; exceeds `(N−1)/beta`.
    pub r_prime: f64,
    /// Total radius `r_prime + l_offset`: the barrier is ≥ 1 at time 0
    /// beyond `r_total + c·t_horizon`.
    pub r_total: f64,
    /// Time horizon the barrier is certified on.
    pub t_horizon: f64,
    /// Center-value bound: `value(t, 0) < lambda` on `[0, t_horizon]`.
    pub lambda: f64,
    /// Space dimension.
    pub n_dim: usize,
    barrier: ExponentialSupersolution,
}

impl RetractingSupersolution {
    fn arguments(&self, t: f64, radius: f64) -> (f64, f64) {
        let rr = if radius <= self.r_prime {
            0.0
        } else {
            self.r_prime - radius
        };
        let drift = -self.c_prime * (t - self.t_horizon) + self.l_offset;
        (rr + drift, -rr + drift)
    }

    /// The tilted profile `ψ(z) = φ̄(z) e^{−β(z − Z)}`.
    pub fn psi(&self, z: f64) -> f64 {
        self.barrier.value(z) * exp_capped(-self.beta * (z - self.z_of_s_zero))
    }

    /// The translating planar branch.
    pub fn branch_one(&self, t: f64, radius: f64) -> f64 {
        let (z1, _) = self.arguments(t, radius);
        self.barrier.value(z1)
    }

    /// The symmetrized tilted branch.
    pub fn branch_two(&self, t: f64, radius: f64) -> f64 {
        let (z1, z2) = self.arguments(t, radius);
        self.psi(z1) + self.psi(z2)
    }

    /// Barrier value: the smaller of the two branches.
    pub fn value(&self, t: f64, radius: f64) -> f64 {
        self.branch_one(t, radius).min(self.branch_two(t, radius))
    }

    /// Access to the underlying planar profile.
    pub fn planar(&self) -> &ExponentialSupersolution {
        &self.barrier
    }
}

/// Abscissa where the decreasing profile crosses `level ∈ (0, 1)`.
fn level_crossing(barrier: &ExponentialSupersolution, level: f64) -> f64 {
    let mut hi = 1.0;
    while barrier.value(hi) > level {
        hi *= 2.0;
        assert!(hi < 1e9, "profile never drops below {level}");
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if barrier.value(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Build the retracting radial barrier for speed `c` above minimal,
/// center bound `lambda`, horizon `t_horizon`, in dimension `n_dim`.
///
/// The minimal speed is computed internally (tolerance `1e-3`); `c` must
/// exceed it.  Errors: [`FrontError::SpeedNotAboveMinimal`] when it does
/// not; [`FrontError::ParameterSearch`] when no positive tilt rate or no
/// linearization scale exists.
pub fn build_retracting_supersolution(
    f: &ReactionTerm,
    c: f64,
    lambda: f64,
    t_horizon: f64,
    n_dim: usize,
) -> Result<RetractingSupersolution, FrontError> {
    assert!(lambda > 0.0 && lambda < 1.0, "lambda must lie in (0, 1)");
    assert!(t_horizon > 0.0, "the time horizon must be positive");
    assert!(n_dim >= 1, "dimension must be at least 1");

    let c_star = minimal_speed(f, 1e-3)?.c_star;
    if c <= c_star {
        return Err(FrontError::SpeedNotAboveMinimal { c });
    }
    let delta = c - c_star;
    let c_prime = c_star + 2.0 * delta / 3.0;
    let c_second = c_star + delta / 3.0;

    let barrier = exponential_supersolution(f, c_second)?;
    let m = barrier.m;
    let span = c_prime - c_second;
    let kappa = span / (4.0 * m);

    // Largest grid prefix on which the reaction tracks its linearization.
    let slope_at_zero = f.derivative(0.0);
    let mut s_zero = 0.0;
    for k in 1..1000 {
        let s = k as f64 / 1000.0;
        if (f.evaluate(s) - slope_at_zero * s).abs() <= kappa * s {
            s_zero = s;
        } else {
            break;
        }
    }
    if s_zero == 0.0 {
        return Err(FrontError::ParameterSearch {
            why: "the reaction strays from its linearization at every sampled scale",
        });
    }

    let z_of_s_zero = level_crossing(&barrier, s_zero);

    // Decreasing search for the tilt rate: accept once the scalar slack is
    // strictly positive and the pointwise inequality holds on a dense grid.
    let mut beta = 0.99 * span / 3.0;
    loop {
        if beta < 1e-300 {
            return Err(FrontError::ParameterSearch {
                why: "the tilt-rate search underflowed before the slack turned positive",
            });
        }
        let slack = (span - 3.0 * beta) / m + beta * (c_prime - 2.0 * beta) - span / (2.0 * m);
        let pointwise = (0..=1000).all(|k| {
            let z = -20.0 + k as f64 * (barrier.z_end + 20.0) / 1000.0;
            let value = barrier.value(z);
            let gain = (span - 3.0 * beta) * (-barrier.slope(z));
            gain + beta * (c_prime - 2.0 * beta) * value - span / (2.0 * m) * value > 0.0
        });
        if slack > 0.0 && pointwise {
            break;
        }
        beta *= 0.8;
    }

    let z_of_lambda = level_crossing(&barrier, lambda);
    let l_offset = (z_of_s_zero + 2.0f64.ln() / beta)
        .max(barrier.b)
        .max(z_of_lambda)
        + 1.0;
    let r_prime = (n_dim - 1) as f64 / beta + 1.0;
    let r_total = r_prime + l_offset;

    Ok(RetractingSupersolution {
        c,
        c_prime,
        c_second,
        beta,
        s_zero,
        z_of_s_zero,
        l_offset,
        r_prime,
        r_total,
        t_horizon,
        lambda,
        n_dim,
        barrier,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_bounds_hold_everywhere() {
        let f = ReactionTerm::kpp();
        let barrier = exponential_supersolution(&f, 3.0).unwrap();
        assert!(barrier.m > 1.0);
        let z_hi = barrier.z_end + 5.0;
        for k in 0..=2000 {
            let z = -10.0 + k as f64 * (z_hi + 10.0) / 2000.0;
            let value = barrier.value(z);
            let slope = barrier.slope(z);
            assert!(value > 0.0 && slope < 0.0, "z = {z}");
            let ratio = -slope / value;
            assert!(ratio <= barrier.m * (1.0 + 1e-9), "z = {z}: ratio {ratio}");
            assert!(
                ratio >= (1.0f64 + 1e-9).recip() / barrier.m,
                "z = {z}: ratio {ratio}"
            );
        }
    }

    #[test]
    fn negative_side_matches_closed_form() {
        let f = ReactionTerm::kpp();
        let barrier = exponential_supersolution(&f, 3.0).unwrap();
        let a = barrier.a_coefficient;
        for k in 1..=600 {
            let z = -6.0 * k as f64 / 600.0;
            let closed = a * (-3.0 * z).exp() + 1.0 - a;
            assert!((barrier.value(z) - closed).abs() < 1e-8);
        }
        // The two sides join with matching value and slope.
        assert!((barrier.value(0.0) - 1.0).abs() < 1e-12);
        assert!((barrier.slope(-1e-9) - barrier.slope(1e-9)).abs() < 1e-6);
    }

    #[test]
    fn convex_beyond_onset() {
        let f = ReactionTerm::kpp();
        let barrier = exponential_supersolution(&f, 3.0).unwrap();
        assert!(barrier.b > 0.0);
        let z_hi = barrier.z_end + 10.0;
        for k in 0..=2000 {
            let z = barrier.b + k as f64 * (z_hi - barrier.b) / 2000.0;
            assert!(
                barrier.second_derivative(z) >= -1e-10,
                "curvature dips at z = {z}"
            );
        }
        // The curvature identity agrees with finite differences of the
        // evaluator itself.
        let h = 1e-3;
        for k in 0..50 {
            let z = barrier.b + 0.5 + k as f64 * 0.1;
            let fd = (barrier.value(z + h) - 2.0 * barrier.value(z) + barrier.value(z - h))
                / (h * h);
            assert!((fd - barrier.second_derivative(z)).abs() < 1e-3, "z = {z}");
        }
    }

    #[test]
    fn below_minimal_is_rejected() {
        let err = exponential_supersolution(&ReactionTerm::kpp(), 1.9).unwrap_err();
        assert!(matches!(err, FrontError::SpeedNotAboveMinimal { c } if c == 1.9));
    }

    #[test]
    fn profile_is_decreasing() {
        let f = ReactionTerm::bistable(0.25).unwrap();
        let barrier = exponential_supersolution(&f, 0.6).unwrap();
        let mut previous = f64::INFINITY;
        for k in 0..=1000 {
            let z = -8.0 + k as f64 * (barrier.z_end + 12.0) / 1000.0;
            let value = barrier.value(z);
            assert!(value < previous, "not decreasing at z = {z}");
            previous = value;
        }
    }

    fn kpp_retracting() -> RetractingSupersolution {
        build_retracting_supersolution(&ReactionTerm::kpp(), 3.0, 0.1, 10.0, 2).unwrap()
    }

    #[test]
    fn parameter_relations() {
        let f = ReactionTerm::kpp();
        let sup = kpp_retracting();
        assert!(sup.c > sup.c_prime && sup.c_prime > sup.c_second);
        assert!(sup.beta > 0.0 && sup.beta < sup.c_prime - sup.c_second);
        assert!(sup.s_zero > 0.0 && sup.s_zero < 1.0);

        // Near-linearity on a dense grid of (0, s_zero).
        let m = sup.planar().m;
        let kappa = (sup.c_prime - sup.c_second) / (4.0 * m);
        let slope_at_zero = f.derivative(0.0);
        for j in 1..=1000 {
            let s = sup.s_zero * j as f64 / 1000.0;
            assert!(
                (f.evaluate(s) - slope_at_zero * s).abs() <= kappa * s * (1.0 + 1e-12),
                "linearization bound fails at s = {s}"
            );
        }

        assert!((sup.planar().value(sup.z_of_s_zero) - sup.s_zero).abs() < 1e-9);
        assert!(sup.l_offset > sup.z_of_s_zero + 2.0f64.ln() / sup.beta);
        assert!(sup.l_offset > sup.planar().b);
        assert!(sup.planar().value(sup.l_offset) <= sup.lambda);
        assert!(sup.r_prime > (sup.n_dim - 1) as f64 / sup.beta);
        assert!((sup.r_total - (sup.r_prime + sup.l_offset)).abs() < 1e-12);
    }

    #[test]
    fn initially_above_one_far_out() {
        let sup = kpp_retracting();
        let start = sup.r_total + sup.c * sup.t_horizon;
        for k in 0..1000 {
            let radius = start + 40.0 * k as f64 / 1000.0;
            assert!(sup.value(0.0, radius) >= 1.0, "radius = {radius}");
        }
    }

    #[test]
    fn center_stays_below_lambda() {
        let sup = kpp_retracting();
        for k in 0..1000 {
            let t = sup.t_horizon * k as f64 / 1000.0;
            let center = sup.value(t, 0.0);
            assert!(center < sup.lambda, "t = {t}: center {center}");
            // The symmetrized branch is the one active at the center.
            assert!(sup.branch_two(t, 0.0) < sup.branch_one(t, 0.0));
        }
    }

    #[test]
    fn residual_nonnegative_on_active_branch() {
        let f = ReactionTerm::kpp();
        let sup = kpp_retracting();
        let n = sup.n_dim as f64;
        let delta = 1e-3;
        let r_hi = sup.r_total + sup.c * sup.t_horizon;
        for i in 0..12 {
            let t = 0.5 + 9.0 * i as f64 / 11.0;
            for j in 0..25 {
                let radius = sup.r_prime + 1.0 + (r_hi - sup.r_prime - 1.0) * j as f64 / 24.0;
                let one = sup.branch_one(t, radius);
                let two = sup.branch_two(t, radius);
                // Skip the kink neighborhood and values too large for
                // meaningful finite differences.
                if (one - two).abs() < 1e-6 * one.max(two) {
                    continue;
                }
                let value = one.min(two);
                if value > 1e3 {
                    continue;
                }
                let branch = |tt: f64, rr: f64| {
                    if one < two {
                        sup.branch_one(tt, rr)
                    } else {
                        sup.branch_two(tt, rr)
                    }
                };
                let dt = (branch(t + delta, radius) - branch(t - delta, radius)) / (2.0 * delta);
                let dr = (branch(t, radius + delta) - branch(t, radius - delta)) / (2.0 * delta);
                let drr = (branch(t, radius + delta) - 2.0 * value + branch(t, radius - delta))
                    / (delta * delta);
                let residual = dt - drr - (n - 1.0) / radius * dr - f.evaluate(value);
                assert!(
                    residual >= -1e-6,
                    "residual {residual} at t = {t}, radius = {radius}"
                );
            }
        }
    }

    #[test]
    fn one_dimensional_build() {
        let sup =
            build_retracting_supersolution(&ReactionTerm::kpp(), 3.0, 0.2, 5.0, 1).unwrap();
        assert!(sup.r_prime > 0.0);
        let start = sup.r_total + sup.c * sup.t_horizon;
        for k in 0..200 {
            let radius = start + 20.0 * k as f64 / 200.0;
            assert!(sup.value(0.0, radius) >= 1.0);
        }
        for k in 0..200 {
            let t = sup.t_horizon * k as f64 / 200.0;
            assert!(sup.value(t, 0.0) < sup.lambda);
        }
    }

    #[test]
    fn slow_speeds_are_rejected() {
        let err = build_retracting_supersolution(&ReactionTerm::kpp(), 1.5, 0.1, 10.0, 2)
            .unwrap_err();
        assert!(matches!(err, FrontError::SpeedNotAboveMinimal { .. }));
    }
}
