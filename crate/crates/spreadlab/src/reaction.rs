//! Reaction terms `f` and the sign hypotheses that make them invasive.
//!
//! The whole crate studies the semilinear equation
//!
//! ```text
//!     ∂t u = Δu + f(u),      u(0, ·) = 1_U,
//! ```
//!
//! where the reaction `f : [0, 1] → ℝ` is C¹ with `f(0) = f(1) = 0` and is
//! extended by zero outside `[0, 1]`.  Both `0` and `1` are then uniform
//! steady states, and the sign structure of `f` decides whether the state `1`
//! invades the state `0`.
//!
//! Two checkable conditions, together called the *invasion property*, drive
//! everything downstream (front construction, spreading-speed formulas):
//!
//! 1. there is a `θ ∈ (0, 1)` with `f > 0` on `[θ, 1)`, and
//! 2. every tail integral is positive: `∫ₜ¹ f(s) ds > 0` for all `t ∈ [0, 1)`.
//!
//! [`check_hypotheses`] evaluates both numerically and reports θ;
//! [`integral_sign`] classifies `∫₀¹ f`, whose sign is also the sign of the
//! bistable front speed.
//!
//! # Builtin families
//!
//! * `kpp` — the logistic nonlinearity `f(s) = s(1 − s)`, positive on the
//!   whole of `(0, 1)`.
//! * `ignition(alpha)` — `f = 0` on `[0, α]` and
//!   `f(s) = A (s − α)² (1 − s)` on `[α, 1]`, with `A = 27 / (16 (1 − α)³)`
//!   chosen so the peak value is `1/4`, matching the logistic peak.
//! * `bistable(a)` — the cubic `f(s) = s (1 − s)(s − a)`, negative on
//!   `(0, a)` and positive on `(a, 1)`; `∫₀¹ f = (1 − 2a) / 12`.
//! * `tristable(alpha, beta, gamma, amp1, amp2)` — a piecewise-quartic C¹
//!   term with sign pattern `(−, +, −, +)` on the intervals cut by
//!   `0 < α < β < γ < 1`.  It is a sum of four signed bumps
//!   `16 (s − l)² (r − s)² / (r − l)⁴` (each peaking at 1 with flat C¹
//!   ends); the two well depths are slaved to the crest amplitudes so that
//!   `∫₀^β f = (4/15) amp1 (β − α) > 0` and
//!   `∫_β^1 f = (4/15) amp2 (1 − γ) > 0`, which keeps every tail integral
//!   positive however the crests are scaled.
//!
//! Custom reactions are wrapped with [`ReactionTerm::custom`] from a value
//! closure and its exact derivative.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Number of uniform subintervals used by the grid scans and quadratures in
/// this module.  The reactions are smooth and desk-scale accuracy is the
/// goal, so a fixed fine grid beats adaptivity here.
const GRID: usize = 10_000;

/// `∫₀¹ f` values smaller than this in magnitude are reported as zero.
const INTEGRAL_DEAD_BAND: f64 = 1e-10;

/// A tail integral `∫ₜ¹ f` must exceed this to count as positive.
const TAIL_TOLERANCE: f64 = 1e-10;

/// Builtin reaction families, plus an escape hatch for user closures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReactionKind {
    /// Logistic `s (1 − s)`.
    Kpp,
    /// Zero up to a threshold α, positive bump on `(α, 1)`.
    Ignition,
    /// Cubic `s (1 − s)(s − a)` with a sign change at `a`.
    Bistable,
    /// Four alternating sign intervals `(−, +, −, +)`.
    Tristable,
    /// Arbitrary closure pair supplied by the caller.
    Custom,
}

/// Errors from builtin construction and id parsing.
#[derive(Debug, Error)]
pub enum ReactionError {
    /// A parameter value violates its range or ordering constraint.
    #[error("parameter `{name}` = {value} rejected: {constraint}")]
    InvalidParameter {
        /// Parameter name as used in ids, e.g. `a` or `alpha`.
        name: &'static str,
        /// Offending value.
        value: f64,
        /// Human-readable constraint, e.g. `must lie in (0, 1)`.
        constraint: &'static str,
    },
    /// A parameter name the kind does not understand.
    #[error("unknown parameter `{0}` for this reaction kind")]
    UnknownParameter(String),
    /// A required parameter was not supplied.
    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),
    /// Custom reactions carry closures and cannot come from `make_builtin`.
    #[error("custom reactions are constructed with ReactionTerm::custom, not make_builtin")]
    CustomKind,
    /// The string id could not be parsed.
    #[error("cannot parse reaction id `{0}`")]
    ParseError(String),
}

/// Sign of `∫₀¹ f`, with a dead band: magnitudes below `1e-10` are `Zero`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    /// `∫₀¹ f > 1e-10`.
    Positive,
    /// `|∫₀¹ f| ≤ 1e-10`.
    Zero,
    /// `∫₀¹ f < −1e-10`.
    Negative,
}

/// Outcome of the invasion-property checks for one reaction term.
#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisReport {
    /// Whether a `θ ∈ (0, 1)` with `f > 0` on `[θ, 1)` was found.
    pub has_theta: bool,
    /// The θ found, just right of the rightmost zero of `f` in `(0, 1)`;
    /// `1e-4` when `f > 0` on the whole interior grid.
    pub theta: Option<f64>,
    /// Whether `∫ₜ¹ f > 1e-10` at every grid point `t ∈ [0, 1)`.
    pub integral_positive_all_t: bool,
    /// Quadrature value of `∫₀¹ f`.
    pub integral_0_1: f64,
    /// Smallest tail integral seen over the `t` grid.
    pub min_tail_integral: f64,
    /// `has_theta && integral_positive_all_t`.
    pub invasion_property: bool,
}

/// C¹ bump on `[l, r]`: `16 (s − l)² (r − s)² / (r − l)⁴`.  Peaks at 1 in
/// the middle; value and slope vanish at both ends, so adjacent bumps join
/// C¹-smoothly.  `∫ₗʳ = 8 (r − l) / 15`.
fn bump(s: f64, l: f64, r: f64) -> f64 {
    if s <= l || s >= r {
        return 0.0;
    }
    let d = r - l;
    16.0 * (s - l).powi(2) * (r - s).powi(2) / d.powi(4)
}

/// Derivative of [`bump`] in `s`: `32 (s − l)(r − s)(l + r − 2s) / (r − l)⁴`.
fn bump_slope(s: f64, l: f64, r: f64) -> f64 {
    if s <= l || s >= r {
        return 0.0;
    }
    let d = r - l;
    32.0 * (s - l) * (r - s) * (l + r - 2.0 * s) / d.powi(4)
}

/// Tristable coefficients: crest amplitudes are free, well depths are slaved
/// so both half-integrals `∫₀^β f` and `∫_β^1 f` stay positive.
#[derive(Clone, Copy)]
struct TristableForm {
    alpha: f64,
    beta: f64,
    gamma: f64,
    amp1: f64,
    amp2: f64,
    /// Depth of the well on `(0, α)`: `amp1 (β − α) / (2α)`.
    down1: f64,
    /// Depth of the well on `(β, γ)`: `amp2 (1 − γ) / (2(γ − β))`.
    down2: f64,
}

impl TristableForm {
    fn eval(&self, s: f64) -> f64 {
        -self.down1 * bump(s, 0.0, self.alpha) + self.amp1 * bump(s, self.alpha, self.beta)
            - self.down2 * bump(s, self.beta, self.gamma)
            + self.amp2 * bump(s, self.gamma, 1.0)
    }

    fn slope(&self, s: f64) -> f64 {
        -self.down1 * bump_slope(s, 0.0, self.alpha)
            + self.amp1 * bump_slope(s, self.alpha, self.beta)
            - self.down2 * bump_slope(s, self.beta, self.gamma)
            + self.amp2 * bump_slope(s, self.gamma, 1.0)
    }
}

#[derive(Clone)]
enum Form {
    Kpp,
    Ignition { alpha: f64, amp: f64 },
    Bistable { a: f64 },
    Tristable(TristableForm),
    Custom {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        df: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

/// A reaction term `f` with its exact derivative, extended by zero outside
/// `[0, 1]`.
///
/// Values are immutable after construction and safe to share across threads.
/// The maximum of `|f′|` over `[0, 1]` is scanned once at construction and
/// cached; it bounds the Lipschitz constant of the extended reaction and
/// seeds speed brackets downstream.
#[derive(Clone)]
pub struct ReactionTerm {
    kind: ReactionKind,
    params: Vec<(String, f64)>,
    label: String,
    form: Form,
    max_abs_slope: f64,
}

impl ReactionTerm {
    /// The logistic term `f(s) = s (1 − s)`.
    pub fn kpp() -> Self {
        Self::finish(ReactionKind::Kpp, Vec::new(), "kpp".to_string(), Form::Kpp)
    }

    /// Ignition term with threshold `alpha ∈ (0, 1)`: zero on `[0, α]`, then
    /// `A (s − α)² (1 − s)` with `A` normalizing the peak to `1/4`.
    pub fn ignition(alpha: f64) -> Result<Self, ReactionError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(ReactionError::InvalidParameter {
                name: "alpha",
                value: alpha,
                constraint: "must lie in (0, 1)",
            });
        }
        let amp = 27.0 / (16.0 * (1.0 - alpha).powi(3));
        Ok(Self::finish(
            ReactionKind::Ignition,
            vec![("alpha".to_string(), alpha)],
            format!("ignition(alpha={alpha})"),
            Form::Ignition { alpha, amp },
        ))
    }

    /// Bistable cubic `f(s) = s (1 − s)(s − a)` with `a ∈ (0, 1)`.
    pub fn bistable(a: f64) -> Result<Self, ReactionError> {
        if !(a > 0.0 && a < 1.0) {
            return Err(ReactionError::InvalidParameter {
                name: "a",
                value: a,
                constraint: "must lie in (0, 1)",
            });
        }
        Ok(Self::finish(
            ReactionKind::Bistable,
            vec![("a".to_string(), a)],
            format!("bistable(a={a})"),
            Form::Bistable { a },
        ))
    }

    /// Tristable term with zeros at `0 < α < β < γ < 1` and sign pattern
    /// `(−, +, −, +)`.  `amp1` and `amp2` scale the two positive crests
    /// (both default to 1 in id parsing); the negative wells are slaved so
    /// that `∫₀^β f > 0` and `∫_β^1 f > 0` for any crest scaling, keeping
    /// the term invasive while the two crest speeds can be tuned against
    /// each other.
    pub fn tristable(
        alpha: f64,
        beta: f64,
        gamma: f64,
        amp1: f64,
        amp2: f64,
    ) -> Result<Self, ReactionError> {
        if alpha.is_nan() || alpha <= 0.0 || alpha >= 1.0 {
            return Err(ReactionError::InvalidParameter {
                name: "alpha",
                value: alpha,
                constraint: "must lie in (0, 1)",
            });
        }
        if beta.is_nan() || beta <= alpha || beta >= 1.0 {
            return Err(ReactionError::InvalidParameter {
                name: "beta",
                value: beta,
                constraint: "must lie in (alpha, 1)",
            });
        }
        if gamma.is_nan() || gamma <= beta || gamma >= 1.0 {
            return Err(ReactionError::InvalidParameter {
                name: "gamma",
                value: gamma,
                constraint: "must lie in (beta, 1)",
            });
        }
        if amp1.is_nan() || amp1 <= 0.0 {
            return Err(ReactionError::InvalidParameter {
                name: "amp1",
                value: amp1,
                constraint: "must be positive",
            });
        }
        if amp2.is_nan() || amp2 <= 0.0 {
            return Err(ReactionError::InvalidParameter {
                name: "amp2",
                value: amp2,
                constraint: "must be positive",
            });
        }
        let form = TristableForm {
            alpha,
            beta,
            gamma,
            amp1,
            amp2,
            down1: 0.5 * amp1 * (beta - alpha) / alpha,
            down2: 0.5 * amp2 * (1.0 - gamma) / (gamma - beta),
        };
        Ok(Self::finish(
            ReactionKind::Tristable,
            vec![
                ("alpha".to_string(), alpha),
                ("beta".to_string(), beta),
                ("gamma".to_string(), gamma),
                ("amp1".to_string(), amp1),
                ("amp2".to_string(), amp2),
            ],
            format!("tristable(alpha={alpha},beta={beta},gamma={gamma},amp1={amp1},amp2={amp2})"),
            Form::Tristable(form),
        ))
    }

    /// Wrap a user-supplied reaction.  `f` must satisfy `f(0) = f(1) = 0`
    /// and `df` must be its exact derivative on `[0, 1]`; both are only ever
    /// queried inside `[0, 1]` (the extension by zero is applied here).
    pub fn custom(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::finish(
            ReactionKind::Custom,
            Vec::new(),
            label.into(),
            Form::Custom {
                f: Arc::new(f),
                df: Arc::new(df),
            },
        )
    }

    fn finish(kind: ReactionKind, params: Vec<(String, f64)>, label: String, form: Form) -> Self {
        let mut term = ReactionTerm {
            kind,
            params,
            label,
            form,
            max_abs_slope: 0.0,
        };
        let mut max_slope = 0.0f64;
        for i in 0..=GRID {
            let s = i as f64 / GRID as f64;
            max_slope = max_slope.max(term.derivative(s).abs());
        }
        term.max_abs_slope = max_slope;
        term
    }

    /// `f(s)`, extended by zero outside `[0, 1]`.
    pub fn evaluate(&self, s: f64) -> f64 {
        if !(0.0..=1.0).contains(&s) {
            return 0.0;
        }
        match &self.form {
            Form::Kpp => s * (1.0 - s),
            Form::Ignition { alpha, amp } => {
                if s <= *alpha {
                    0.0
                } else {
                    amp * (s - alpha).powi(2) * (1.0 - s)
                }
            }
            Form::Bistable { a } => s * (1.0 - s) * (s - a),
            Form::Tristable(t) => t.eval(s),
            Form::Custom { f, .. } => f(s),
        }
    }

    /// `f′(s)` on `[0, 1]` (one-sided at the ends), zero outside.
    pub fn derivative(&self, s: f64) -> f64 {
        if !(0.0..=1.0).contains(&s) {
            return 0.0;
        }
        match &self.form {
            Form::Kpp => 1.0 - 2.0 * s,
            Form::Ignition { alpha, amp } => {
                if s <= *alpha {
                    0.0
                } else {
                    amp * (s - alpha) * (2.0 + alpha - 3.0 * s)
                }
            }
            Form::Bistable { a } => (s - a) * (1.0 - 2.0 * s) + s * (1.0 - s),
            Form::Tristable(t) => t.slope(s),
            Form::Custom { df, .. } => df(s),
        }
    }

    /// Cached `max_{[0,1]} |f′|`, scanned on the construction grid.
    pub fn max_abs_slope(&self) -> f64 {
        self.max_abs_slope
    }

    /// Which builtin family (or `Custom`) this term belongs to.
    pub fn kind(&self) -> ReactionKind {
        self.kind
    }

    /// Named parameters the term was built with (empty for `kpp`/custom).
    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    /// Canonical string id, parseable back by [`ReactionTerm::parse`] for
    /// builtins (custom terms show their label).
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Parse a string id: `kpp`, `ignition(alpha=..)`, `bistable(a=..)`, or
    /// `tristable(alpha=..,beta=..,gamma=..,amp1=..,amp2=..)` (amplitudes
    /// optional, defaulting to 1).
    ///
    /// # Examples
    ///
    /// ```
    /// use spreadlab::reaction::ReactionTerm;
    ///
    /// let f = ReactionTerm::parse("bistable(a=0.25)").unwrap();
    /// assert_eq!(f.evaluate(0.25), 0.0);
    /// ```
    pub fn parse(id: &str) -> Result<Self, ReactionError> {
        let id = id.trim();
        let (name, args) = match id.find('(') {
            None => (id, ""),
            Some(open) => {
                if !id.ends_with(')') {
                    return Err(ReactionError::ParseError(id.to_string()));
                }
                (&id[..open], &id[open + 1..id.len() - 1])
            }
        };
        let mut params: Vec<(&str, f64)> = Vec::new();
        for piece in args.split(',') {
            let piece = piece.trim();
            if piece.is_empty() {
                continue;
            }
            let (key, value) = piece
                .split_once('=')
                .ok_or_else(|| ReactionError::ParseError(id.to_string()))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| ReactionError::ParseError(id.to_string()))?;
            params.push((key.trim(), value));
        }
        let kind = match name.trim() {
            "kpp" => ReactionKind::Kpp,
            "ignition" => ReactionKind::Ignition,
            "bistable" => ReactionKind::Bistable,
            "tristable" => ReactionKind::Tristable,
            _ => return Err(ReactionError::ParseError(id.to_string())),
        };
        make_builtin(kind, &params)
    }
}

impl fmt::Display for ReactionTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

impl fmt::Debug for ReactionTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReactionTerm")
            .field("label", &self.label)
            .field("max_abs_slope", &self.max_abs_slope)
            .finish()
    }
}

/// Build a builtin reaction from its kind and named parameters.
///
/// Required parameters: `ignition` needs `alpha`; `bistable` needs `a`;
/// `tristable` needs `alpha`, `beta`, `gamma` and accepts optional `amp1`,
/// `amp2` (default 1).  Unknown names are rejected.
pub fn make_builtin(kind: ReactionKind, params: &[(&str, f64)]) -> Result<ReactionTerm, ReactionError> {
    let allowed: &[&str] = match kind {
        ReactionKind::Kpp => &[],
        ReactionKind::Ignition => &["alpha"],
        ReactionKind::Bistable => &["a"],
        ReactionKind::Tristable => &["alpha", "beta", "gamma", "amp1", "amp2"],
        ReactionKind::Custom => return Err(ReactionError::CustomKind),
    };
    for (name, _) in params {
        if !allowed.contains(name) {
            return Err(ReactionError::UnknownParameter((*name).to_string()));
        }
    }
    let lookup = |name: &'static str| -> Option<f64> {
        params
            .iter()
            .find(|(key, _)| *key == name)
            .map(|(_, value)| *value)
    };
    let require = |name: &'static str| -> Result<f64, ReactionError> {
        lookup(name).ok_or(ReactionError::MissingParameter(name))
    };
    match kind {
        ReactionKind::Kpp => Ok(ReactionTerm::kpp()),
        ReactionKind::Ignition => ReactionTerm::ignition(require("alpha")?),
        ReactionKind::Bistable => ReactionTerm::bistable(require("a")?),
        ReactionKind::Tristable => ReactionTerm::tristable(
            require("alpha")?,
            require("beta")?,
            require("gamma")?,
            lookup("amp1").unwrap_or(1.0),
            lookup("amp2").unwrap_or(1.0),
        ),
        ReactionKind::Custom => unreachable!("rejected above"),
    }
}

/// Cumulative Simpson quadrature of `f` on the module grid: entry `i` holds
/// `∫₀^{i/GRID} f`, using the three-point rule on each subinterval (exact
/// for cubics, so the builtin polynomial families integrate to rounding).
fn cumulative_integral(f: &ReactionTerm) -> Vec<f64> {
    let h = 1.0 / GRID as f64;
    let mut cumulative = Vec::with_capacity(GRID + 1);
    cumulative.push(0.0);
    let mut running = 0.0;
    for i in 0..GRID {
        let a = i as f64 * h;
        running += h / 6.0
            * (f.evaluate(a) + 4.0 * f.evaluate(a + 0.5 * h) + f.evaluate(a + h));
        cumulative.push(running);
    }
    cumulative
}

/// Check the two invasion-property conditions for `f`.
///
/// θ is located as the rightmost zero of `f` in `(0, 1)`: the interior grid
/// is scanned for the last point where `f ≤ 0`, then the sign change is
/// bisected to width `1e-12` and the positive side is returned.  When `f > 0`
/// on the whole interior grid, `θ = 1e-4` is reported (any small θ works).
/// When `f ≤ 0` at the last interior grid point there is no valid θ.
///
/// Tail positivity asks `∫ₜ¹ f > 1e-10` at every grid point `t < 1`.  The
/// tolerance means reactions with very flat contact at `s = 1` (cubic
/// tangency or worse at unit amplitude) are conservatively rejected even
/// though their exact tails are positive.
///
/// # Examples
///
/// ```
/// use spreadlab::reaction::{check_hypotheses, ReactionTerm};
///
/// assert!(check_hypotheses(&ReactionTerm::kpp()).invasion_property);
/// assert!(!check_hypotheses(&ReactionTerm::bistable(0.75).unwrap()).invasion_property);
/// ```
pub fn check_hypotheses(f: &ReactionTerm) -> HypothesisReport {
    let h = 1.0 / GRID as f64;
    let mut last_nonpositive: Option<usize> = None;
    for i in 1..GRID {
        if f.evaluate(i as f64 * h) <= 0.0 {
            last_nonpositive = Some(i);
        }
    }
    let (has_theta, theta) = match last_nonpositive {
        None => (true, Some(1e-4)),
        Some(i) if i == GRID - 1 => (false, None),
        Some(i) => {
            let mut lo = i as f64 * h;
            let mut hi = (i + 1) as f64 * h;
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                if f.evaluate(mid) <= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            (true, Some(hi))
        }
    };

    let cumulative = cumulative_integral(f);
    let total = cumulative[GRID];
    let mut min_tail = f64::INFINITY;
    for value in cumulative.iter().take(GRID) {
        min_tail = min_tail.min(total - value);
    }
    let integral_positive_all_t = min_tail > TAIL_TOLERANCE;

    HypothesisReport {
        has_theta,
        theta,
        integral_positive_all_t,
        integral_0_1: total,
        min_tail_integral: min_tail,
        invasion_property: has_theta && integral_positive_all_t,
    }
}

/// Sign of `∫₀¹ f` with the `1e-10` dead band.
///
/// # Examples
///
/// ```
/// use spreadlab::reaction::{integral_sign, ReactionTerm, Sign};
///
/// assert_eq!(integral_sign(&ReactionTerm::bistable(0.5).unwrap()), Sign::Zero);
/// ```
pub fn integral_sign(f: &ReactionTerm) -> Sign {
    let value = *cumulative_integral(f).last().expect("grid is nonempty");
    if value > INTEGRAL_DEAD_BAND {
        Sign::Positive
    } else if value < -INTEGRAL_DEAD_BAND {
        Sign::Negative
    } else {
        Sign::Zero
    }
}
