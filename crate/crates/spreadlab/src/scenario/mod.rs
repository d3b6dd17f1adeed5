//! Reproducible experiment harness: named scenario configurations, their
//! validation, and a registry of the quantitative claims they exercise.
//!
//! A scenario is a JSON document naming a reaction, a support set, an
//! optional grid and simulation window, a list of measurements, and a list
//! of expectations.  Each expectation compares one named measurement
//! against a pinned value through an explicit comparator and tolerance and
//! cites one registered claim, so every threshold lives in the scenario
//! file rather than in code, and every number a run asserts is traceable
//! to the statement it is supposed to witness.
//!
//! [`run::run_scenario`] executes a validated scenario and writes a
//! manifest, a measurement table, per-expectation verdicts, and CSV
//! artifacts under one output directory.  The pipeline is deterministic —
//! fixed traversal orders, no timestamps, shortest round-trip float
//! formatting — so rerunning a scenario rewrites bit-identical files.
//!
//! The built-in catalog ([`catalog`]) covers the main quantitative
//! behaviours of the solver: planar front speeds, directional spreading
//! from unbounded supports, Hausdorff convergence of rescaled level sets,
//! the dyadic-shell and pinched-slab sets on which convergence fails, a
//! two-speed terrace, and the radially retracting barrier.

pub mod run;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::front::FrontError;
use crate::geometry::{GeometryError, SupportSet};
use crate::metrics::MetricsError;
use crate::pde::{BoundaryCondition, Grid, PdeError};
use crate::reaction::{ReactionError, ReactionTerm};

/// One registered claim: a stable identifier plus the statement a
/// scenario expectation is allowed to cite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Claim {
    /// Stable kebab-case identifier used in scenario files.
    pub id: &'static str,
    /// The quantitative statement being witnessed.
    pub statement: &'static str,
}

/// The claim registry.  Every scenario claim and every expectation's
/// `claim` field must name one of these identifiers.
pub const CLAIMS: [Claim; 12] = [
    Claim {
        id: "kpp-minimal-speed",
        statement: "For the logistic reaction s(1-s), the minimal planar front \
                    speed equals 2.",
    },
    Claim {
        id: "bistable-exact-speed",
        statement: "For the cubic s(1-s)(s-a) with 0 < a < 1/2, the unique \
                    front speed equals (1-2a)/sqrt(2).",
    },
    Claim {
        id: "negative-mass-blocks-invasion",
        statement: "When the signed area of the reaction over (0,1) is \
                    negative, no front invading the zero state at positive \
                    speed exists.",
    },
    Claim {
        id: "compact-data-asymptotic-speed",
        statement: "A solution seeded on a bounded set invades at the minimal \
                    front speed: it tends to 1 inside balls growing slightly \
                    slower and to 0 outside balls growing slightly faster.",
    },
    Claim {
        id: "directional-envelope-formula",
        statement: "From an unbounded seed, the spreading speed in a direction \
                    equals the minimal front speed divided by the distance \
                    from that direction to the cone of rays along which the \
                    eroded seed stays at sublinear distance.",
    },
    Claim {
        id: "rescaled-level-sets-converge-locally",
        statement: "Super-level sets rescaled by time converge, in Hausdorff \
                    distance on bounded windows, to the envelope predicted by \
                    the directional speed formula.",
    },
    Claim {
        id: "thickened-support-tracks-globally",
        statement: "When every point of the seed lies within a bounded \
                    distance of its eroded core, super-level sets track the \
                    front-speed thickening of the seed uniformly, at an error \
                    sublinear in time.",
    },
    Claim {
        id: "dyadic-shells-oscillate",
        statement: "A union of shells at dyadic radii makes the rescaled \
                    super-level sets oscillate forever between a filled and a \
                    hollow regime, so no single spreading set describes them.",
    },
    Claim {
        id: "pinched-slab-breaks-envelope",
        statement: "A slab pinched to vanishing thickness separates the \
                    direction classification of the seed from that of its \
                    erosion; the solution spreads like a compactly seeded \
                    ball, not like the slab's envelope.",
    },
    Claim {
        id: "retracting-barrier-blocks-origin",
        statement: "A radially retracting barrier at any super-minimal speed \
                    dominates solutions seeded outside a large ball and keeps \
                    the origin below a prescribed level through the horizon.",
    },
    Claim {
        id: "tristable-terrace-speeds",
        statement: "An unbalanced two-hump reaction with a stable middle \
                    state develops a terrace: a faster front to the middle \
                    state trailed by a slower front to 1, with a plateau \
                    widening linearly between them.",
    },
    Claim {
        id: "geometry-identities",
        statement: "Randomized identities hold: order preservation of the \
                    discrete evolution, phase-plane trajectory ordering, the \
                    Hausdorff metric axioms, envelope/membership agreement, \
                    and the boundary-distance identity for recession cones.",
    },
];

/// Look up a registered claim statement.
pub fn claim_statement(id: &str) -> Option<&'static str> {
    CLAIMS
        .iter()
        .find(|claim| claim.id == id)
        .map(|claim| claim.statement)
}

/// Anything that can go wrong loading, validating, or running a scenario.
#[derive(Debug, Error)]
pub enum ScenarioError {
    /// The JSON did not deserialize into the scenario schema.
    #[error("scenario does not match the schema: {0}")]
    Json(#[from] serde_json::Error),
    /// A structural rule beyond raw deserialization failed.
    #[error("invalid scenario `{id}`: {why}")]
    Invalid {
        /// Offending scenario id (possibly empty when the id itself is bad).
        id: String,
        /// Violated rule.
        why: String,
    },
    /// An expectation or scenario cites an unregistered claim.
    #[error("unregistered claim `{id}`")]
    UnknownClaim {
        /// The unknown identifier.
        id: String,
    },
    /// A reaction string failed to parse.
    #[error(transparent)]
    Reaction(#[from] ReactionError),
    /// A support specification failed to build.
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    /// A front computation failed.
    #[error(transparent)]
    Front(#[from] FrontError),
    /// The simulation rejected its configuration.
    #[error(transparent)]
    Pde(#[from] PdeError),
    /// A measurement failed its preconditions.
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    /// Reading a config or writing an output failed.
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    /// A metric asked for a snapshot time the merged schedule lacks.
    #[error("no snapshot within 1e-6 of t = {time}")]
    MissingSnapshot {
        /// Requested time.
        time: f64,
    },
}

/// A named experiment: configuration only, no results.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Stable kebab-case identifier; also the output subdirectory name.
    pub id: String,
    /// One-paragraph description of what the scenario demonstrates.
    pub targets: String,
    /// Registered claim ids this scenario exercises.
    pub claims: Vec<String>,
    /// Reaction term, in `name(key=value,…)` form.
    pub reaction: String,
    /// Initial support set.
    pub support: SupportSpec,
    /// Finite-difference grid; required when any measurement consumes
    /// simulation snapshots.  A grid with an empty metrics list still
    /// simulates and writes snapshot artifacts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    /// Simulation window and trust region; present iff `grid` is.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimSpec>,
    /// Strictly increasing snapshot times; measurements may merge extra
    /// times into this schedule at run time.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshot_times: Vec<f64>,
    /// Measurements to take, in order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub metrics: Vec<MetricSpec>,
    /// Pinned comparisons against measurement results.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expectations: Vec<Expectation>,
}

/// Support-set specification.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportSpec {
    /// Shape name: `ball`, `radial-intervals`, `halfspace`, `shell-union`,
    /// `cone`, `sqrt-subgraph`, `gaussian-slab`, or `tube-plus-parabola`.
    pub shape: String,
    /// Scalar shape parameters (`radius`, `alpha`, …).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    /// Intervals for `radial-intervals`, as `[lo, hi]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<Vec<[f64; 2]>>,
    /// Ambient dimension.
    pub dim: usize,
    /// Optional erosion depth applied after construction.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub erosion: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl SupportSpec {
    /// Materialize the support set.
    pub fn build(&self) -> Result<SupportSet, ScenarioError> {
        let base = if self.shape == "radial-intervals" {
            let intervals = self.intervals.as_ref().ok_or_else(|| ScenarioError::Invalid {
                id: String::new(),
                why: "radial-intervals needs an `intervals` list".to_string(),
            })?;
            let pairs: Vec<(f64, f64)> = intervals.iter().map(|p| (p[0], p[1])).collect();
            SupportSet::radial_intervals("radial-intervals", pairs, self.dim)
        } else {
            let params: Vec<(String, f64)> = self
                .params
                .iter()
                .map(|(k, v)| (k.clone(), *v))
                .collect();
            SupportSet::parse(&self.shape, &params, self.dim)?
        };
        Ok(if self.erosion > 0.0 {
            base.erode(self.erosion)
        } else {
            base
        })
    }
}

/// Grid specification.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// `line`, `plane`, or `radial`.
    pub kind: String,
    /// Axis bounds: one `[lo, hi]` pair for `line`, two for `plane`, one
    /// `[0, r_max]` pair for `radial`.
    pub bounds: Vec<[f64; 2]>,
    /// Node spacing, which every axis length must divide into an integer
    /// number of cells.
    pub h: f64,
    /// Represented dimension for `radial` grids.
    #[serde(default, skip_serializing_if = "is_zero_usize")]
    pub n_dim: usize,
    /// `dirichlet-far-field` (default) or `neumann-zero`.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub boundary: String,
}

fn is_zero_usize(n: &usize) -> bool {
    *n == 0
}

impl GridSpec {
    /// Number of coordinates a point on this grid carries.
    pub fn coords(&self) -> usize {
        if self.kind == "plane" {
            2
        } else {
            1
        }
    }

    /// Materialize the grid.
    pub fn build(&self) -> Result<Grid, ScenarioError> {
        let invalid = |why: String| ScenarioError::Invalid {
            id: String::new(),
            why,
        };
        for pair in &self.bounds {
            let n = (pair[1] - pair[0]) / self.h;
            if (n - n.round()).abs() > 1e-6 || n <= 0.0 {
                return Err(invalid(format!(
                    "axis [{}, {}] is not a positive multiple of h = {}",
                    pair[0], pair[1], self.h
                )));
            }
        }
        let grid = match self.kind.as_str() {
            "line" => {
                if self.bounds.len() != 1 {
                    return Err(invalid("a line grid takes one bounds pair".to_string()));
                }
                Grid::line(self.bounds[0][0], self.bounds[0][1], self.h)
            }
            "plane" => {
                if self.bounds.len() != 2 {
                    return Err(invalid("a plane grid takes two bounds pairs".to_string()));
                }
                Grid::plane(
                    (self.bounds[0][0], self.bounds[0][1]),
                    (self.bounds[1][0], self.bounds[1][1]),
                    self.h,
                )
            }
            "radial" => {
                if self.bounds.len() != 1 || self.bounds[0][0] != 0.0 {
                    return Err(invalid(
                        "a radial grid takes one bounds pair starting at 0".to_string(),
                    ));
                }
                Grid::radial(self.n_dim, self.bounds[0][1], self.h)
            }
            other => return Err(invalid(format!("unknown grid kind `{other}`"))),
        };
        let boundary = match self.boundary.as_str() {
            "" | "dirichlet-far-field" => BoundaryCondition::DirichletFarField,
            "neumann-zero" => BoundaryCondition::NeumannZero,
            other => return Err(invalid(format!("unknown boundary `{other}`"))),
        };
        Ok(grid.with_boundary(boundary))
    }
}

/// Simulation window and trust region.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    /// Final time.
    pub t_final: f64,
    /// Speed bound used by the domain-margin preflight.
    pub c_max: f64,
    /// Radius within which snapshot values are trusted; every measurement
    /// ray must stay inside it.
    pub read_radius: f64,
    /// Sub-samples per axis for the cell-averaged initial indicator;
    /// 1 (default) samples node centers.
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub init_subsamples: usize,
}

fn one() -> usize {
    1
}

fn is_one(n: &usize) -> bool {
    *n == 1
}

/// One measurement.  `name` scopes the result keys: a metric producing a
/// single number stores it under `name`, one producing several stores
/// them under `name-<part>` (see [`MetricSpec::result_names`]).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MetricSpec {
    /// Minimal planar front speed of a reaction given by its own string.
    FrontSpeed {
        /// Result key.
        name: String,
        /// Reaction to analyze (independent of the scenario reaction).
        reaction: String,
        /// Bracket tolerance for the speed bisection.
        tol: f64,
    },
    /// Verify that a reaction admits no positively moving invasion front:
    /// `name` is 1 when the speed search reports exactly that, and
    /// `name-integral-sign` is the sign of the reaction's signed area.
    FrontBlocked {
        /// Result key prefix.
        name: String,
        /// Reaction expected to be blocked.
        reaction: String,
    },
    /// Two-front terrace speeds of the scenario's reaction:
    /// `name-c1` (lower front), `name-c2` (upper front), `name-gap`.
    TerraceSpeeds {
        /// Result key prefix.
        name: String,
    },
    /// Level-crossing speed along a ray: `name-fitted`, `name-inner-min`,
    /// `name-outer-sup`, `name-saturated`, plus a positions CSV.
    DirectionalSpeed {
        /// Result key prefix.
        name: String,
        /// Ray direction (unit vector, one coordinate per grid axis).
        direction: Vec<f64>,
        /// Threshold defining the tracked level.
        lambda: f64,
        /// Largest readable ray coordinate; must not exceed the trust
        /// radius.
        ray_limit: f64,
    },
    /// Directional speed predicted by the envelope formula:
    /// `name-sampled` from the sampled classification, `name-analytic`
    /// from closed-form direction metadata (NaN when the shape has none).
    FormulaSpeed {
        /// Result key prefix.
        name: String,
        /// Direction to evaluate.
        direction: [f64; 2],
    },
    /// 1 when every sampled direction is classified without ambiguity.
    HypCheck {
        /// Result key.
        name: String,
    },
    /// Whether the support stays within bounded distance of its eroded
    /// core: `name-holds` (1/0) and `name-bound` (the sampled sup).
    ErosionDistanceCheck {
        /// Result key prefix.
        name: String,
        /// Erosion depth.
        rho: f64,
        /// Farthest membership probe radius.
        probe_radius: f64,
    },
    /// Boundary-distance identity along one direction: `name-lhs`
    /// (sampled distance ratio), `name-rhs` (closed form), `name-gap`.
    EbIdentity {
        /// Result key prefix.
        name: String,
        /// Direction to evaluate.
        direction: [f64; 2],
    },
    /// Hausdorff distance between rescaled super-level sets and a
    /// prediction, on a bounded window: `name-early`, `name-late`,
    /// `name-delta` (late − early), `name-ratio` (early / late), plus a
    /// trace CSV.
    LocalHausdorff {
        /// Result key prefix.
        name: String,
        /// Level-set threshold.
        lambda: f64,
        /// Clipping radius of the comparison window.
        radius: f64,
        /// `support` (sampled classification), `support-base-ratios`
        /// (erosion-blind classification), or `ball` (minimal-speed ball).
        prediction: String,
        /// Early comparison time.
        t_early: f64,
        /// Late comparison time.
        t_late: f64,
    },
    /// Hausdorff distance between the super-level set and the boundary of
    /// the front-speed thickening of the seed, divided by time:
    /// `name-late`, plus a trace CSV.
    GlobalHausdorff {
        /// Result key prefix.
        name: String,
        /// Level-set threshold.
        lambda: f64,
        /// Comparison time.
        t_late: f64,
    },
    /// Extremal field value over a dilated point set `t·C` at one time:
    /// `name` is the min over the set when `take` is `min`, the max when
    /// `take` is `max`.
    DilatedProbe {
        /// Result key.
        name: String,
        /// Snapshot time (merged into the schedule).
        time: f64,
        /// Points of `C`, one coordinate per grid axis.
        points: Vec<Vec<f64>>,
        /// `min` or `max`.
        take: String,
    },
    /// Two-sided probes at dyadic scales `n = n_lo…n_hi`: for each `n`,
    /// read `u` at time `2^(n-2)/c*` and radius `3·2^n` (expected below
    /// `lambda`) and at time `2^(n-2)` and radius `2^n` (expected above
    /// `inner_level`).  Results: `name-detected` (1 when some `n` shows
    /// both), `name-min-outer`, `name-min-inner`, plus a per-`n` CSV.
    ShellOscillation {
        /// Result key prefix.
        name: String,
        /// Smallest dyadic index probed.
        n_lo: u32,
        /// Largest dyadic index probed.
        n_hi: u32,
        /// Outer threshold.
        lambda: f64,
        /// Inner threshold.
        inner_level: f64,
    },
    /// Largest deviation of the field from `level` on the radial band
    /// `[inner_factor·c2·t, outer_factor·c1·t]` between terrace fronts:
    /// `name-max-deviation`, `name-band-lo`, `name-band-hi`, plus a band
    /// profile CSV.
    PlateauBand {
        /// Result key prefix.
        name: String,
        /// Snapshot time (merged into the schedule).
        time: f64,
        /// Expected plateau level.
        level: f64,
        /// Multiplier on the slower speed for the inner band edge.
        inner_factor: f64,
        /// Multiplier on the faster speed for the outer band edge.
        outer_factor: f64,
    },
    /// Self-contained barrier audit: build the retracting radial barrier,
    /// check coverage at time zero and quietness at the origin on
    /// thousand-point grids, sample the interior equation residual on the
    /// active branch, and run an independent radial simulation seeded
    /// outside the covered ball.  Results: `name-coverage-min`,
    /// `name-origin-max`, `name-residual-min`, `name-sim-origin-max`,
    /// plus an origin-trace CSV.
    RetractingCheck {
        /// Result key prefix.
        name: String,
        /// Barrier speed (must exceed the minimal front speed).
        speed: f64,
        /// Level the origin must stay below.
        lambda: f64,
        /// Time horizon.
        t_horizon: f64,
        /// Ambient dimension of the radial Laplacian.
        n_dim: usize,
        /// Radial extent of the audit simulation.
        r_max: f64,
        /// Node spacing of the audit simulation.
        h: f64,
        /// Speed bound for the audit simulation's margin preflight.
        c_max: f64,
        /// Radial span of the time-zero coverage sweep.
        coverage_span: f64,
    },
    /// Write the sampled direction classification to CSV (no scalar
    /// results).
    DirectionSetsExport {
        /// Artifact name.
        name: String,
    },
    /// Write the predicted spreading-set boundary polyline to CSV (no
    /// scalar results).
    SpreadingSetExport {
        /// Artifact name.
        name: String,
        /// Cap on plotted radii, as a multiple of the front speed.
        cap_factor: f64,
    },
}

impl MetricSpec {
    /// The result-key prefix.
    pub fn name(&self) -> &str {
        match self {
            MetricSpec::FrontSpeed { name, .. }
            | MetricSpec::FrontBlocked { name, .. }
            | MetricSpec::TerraceSpeeds { name }
            | MetricSpec::DirectionalSpeed { name, .. }
            | MetricSpec::FormulaSpeed { name, .. }
            | MetricSpec::HypCheck { name }
            | MetricSpec::ErosionDistanceCheck { name, .. }
            | MetricSpec::EbIdentity { name, .. }
            | MetricSpec::LocalHausdorff { name, .. }
            | MetricSpec::GlobalHausdorff { name, .. }
            | MetricSpec::DilatedProbe { name, .. }
            | MetricSpec::ShellOscillation { name, .. }
            | MetricSpec::PlateauBand { name, .. }
            | MetricSpec::RetractingCheck { name, .. }
            | MetricSpec::DirectionSetsExport { name }
            | MetricSpec::SpreadingSetExport { name, .. } => name,
        }
    }

    /// Keys this metric will store in the result table.
    pub fn result_names(&self) -> Vec<String> {
        let name = self.name();
        let suffixed = |parts: &[&str]| -> Vec<String> {
            parts.iter().map(|p| format!("{name}-{p}")).collect()
        };
        match self {
            MetricSpec::FrontSpeed { .. }
            | MetricSpec::HypCheck { .. }
            | MetricSpec::DilatedProbe { .. } => vec![name.to_string()],
            MetricSpec::FrontBlocked { .. } => {
                let mut keys = vec![name.to_string()];
                keys.push(format!("{name}-integral-sign"));
                keys
            }
            MetricSpec::TerraceSpeeds { .. } => suffixed(&["c1", "c2", "gap"]),
            MetricSpec::DirectionalSpeed { .. } => {
                suffixed(&["fitted", "inner-min", "outer-sup", "saturated"])
            }
            MetricSpec::FormulaSpeed { .. } => suffixed(&["sampled", "analytic"]),
            MetricSpec::ErosionDistanceCheck { .. } => suffixed(&["holds", "bound"]),
            MetricSpec::EbIdentity { .. } => suffixed(&["lhs", "rhs", "gap"]),
            MetricSpec::LocalHausdorff { .. } => {
                suffixed(&["early", "late", "delta", "ratio"])
            }
            MetricSpec::GlobalHausdorff { .. } => suffixed(&["late"]),
            MetricSpec::ShellOscillation { .. } => {
                suffixed(&["detected", "min-outer", "min-inner"])
            }
            MetricSpec::PlateauBand { .. } => {
                suffixed(&["max-deviation", "band-lo", "band-hi"])
            }
            MetricSpec::RetractingCheck { .. } => suffixed(&[
                "coverage-min",
                "origin-max",
                "residual-min",
                "sim-origin-max",
            ]),
            MetricSpec::DirectionSetsExport { .. }
            | MetricSpec::SpreadingSetExport { .. } => Vec::new(),
        }
    }

    /// Does this metric read simulation snapshots?
    pub fn needs_snapshots(&self) -> bool {
        matches!(
            self,
            MetricSpec::DirectionalSpeed { .. }
                | MetricSpec::LocalHausdorff { .. }
                | MetricSpec::GlobalHausdorff { .. }
                | MetricSpec::DilatedProbe { .. }
                | MetricSpec::ShellOscillation { .. }
                | MetricSpec::PlateauBand { .. }
        )
    }

    /// Does this metric classify directions of the scenario support?
    fn needs_direction_sets(&self) -> bool {
        match self {
            MetricSpec::FormulaSpeed { .. }
            | MetricSpec::HypCheck { .. }
            | MetricSpec::EbIdentity { .. }
            | MetricSpec::DirectionSetsExport { .. }
            | MetricSpec::SpreadingSetExport { .. } => true,
            MetricSpec::LocalHausdorff { prediction, .. } => prediction != "ball",
            _ => false,
        }
    }
}

/// Comparison operator for expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparator {
    /// `|measured − value| ≤ tolerance`.
    Within,
    /// `measured < value`.
    LessThan,
    /// `measured > value`.
    GreaterThan,
}

impl Comparator {
    /// Evaluate the comparison.  Any NaN measurement fails.
    pub fn holds(&self, measured: f64, value: f64, tolerance: f64) -> bool {
        match self {
            Comparator::Within => (measured - value).abs() <= tolerance,
            Comparator::LessThan => measured < value,
            Comparator::GreaterThan => measured > value,
        }
    }
}

/// A pinned comparison against one measurement result.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    /// Result key to compare (one of some metric's
    /// [`MetricSpec::result_names`]).
    pub metric: String,
    /// Comparison operator.
    pub comparator: Comparator,
    /// Reference value.
    pub value: f64,
    /// Half-width for `within`; ignored by the strict comparators.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub tolerance: f64,
    /// Registered claim this comparison witnesses.
    pub claim: String,
}

impl Scenario {
    /// Parse and validate a scenario from JSON text.
    pub fn from_json(text: &str) -> Result<Scenario, ScenarioError> {
        let scenario: Scenario = serde_json::from_str(text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    /// Parse and validate a scenario from a JSON file.
    pub fn from_file(path: &Path) -> Result<Scenario, ScenarioError> {
        Scenario::from_json(&std::fs::read_to_string(path)?)
    }

    /// Does any measurement consume simulation snapshots?
    pub fn needs_sim(&self) -> bool {
        self.metrics.iter().any(MetricSpec::needs_snapshots)
    }

    /// Check every structural rule beyond raw deserialization.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let fail = |why: String| {
            Err(ScenarioError::Invalid {
                id: self.id.clone(),
                why,
            })
        };
        if self.id.is_empty()
            || !self
                .id
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-')
        {
            return fail("id must be nonempty kebab-case".to_string());
        }
        if self.targets.is_empty() {
            return fail("targets must describe the scenario".to_string());
        }
        if self.claims.is_empty() {
            return fail("a scenario must cite at least one claim".to_string());
        }
        let mut seen_claims = BTreeSet::new();
        for claim in &self.claims {
            if claim_statement(claim).is_none() {
                return Err(ScenarioError::UnknownClaim { id: claim.clone() });
            }
            if !seen_claims.insert(claim.as_str()) {
                return fail(format!("claim `{claim}` is listed twice"));
            }
        }
        ReactionTerm::parse(&self.reaction)?;
        self.support.build()?;

        if self.needs_sim() && self.grid.is_none() {
            return fail("snapshot-reading metrics require `grid` and `sim`".to_string());
        }
        if self.grid.is_some() {
            let (Some(grid), Some(sim)) = (&self.grid, &self.sim) else {
                return fail("a grid needs a matching `sim` block".to_string());
            };
            grid.build()?;
            if !(sim.t_final > 0.0 && sim.c_max > 0.0 && sim.read_radius >= 0.0) {
                return fail("sim window must be positive".to_string());
            }
            if sim.init_subsamples == 0 {
                return fail("init_subsamples must be at least 1".to_string());
            }
            if self.snapshot_times.is_empty() {
                return fail("simulated scenarios need snapshot times".to_string());
            }
            for pair in self.snapshot_times.windows(2) {
                if pair[1] <= pair[0] {
                    return fail("snapshot times must be strictly increasing".to_string());
                }
            }
            if self.snapshot_times[0] <= 0.0
                || *self.snapshot_times.last().unwrap() > sim.t_final + 1e-9
            {
                return fail("snapshot times must lie in (0, t_final]".to_string());
            }
        } else if self.sim.is_some() || !self.snapshot_times.is_empty() {
            return fail("sim settings or snapshot times given without a grid".to_string());
        }

        let mut result_names = BTreeSet::new();
        for metric in &self.metrics {
            self.validate_metric(metric)?;
            for key in metric.result_names() {
                if !result_names.insert(key.clone()) {
                    return fail(format!("result key `{key}` produced twice"));
                }
            }
        }
        for expectation in &self.expectations {
            if claim_statement(&expectation.claim).is_none() {
                return Err(ScenarioError::UnknownClaim {
                    id: expectation.claim.clone(),
                });
            }
            if !result_names.contains(&expectation.metric) {
                return fail(format!(
                    "expectation targets unknown result `{}`",
                    expectation.metric
                ));
            }
            if expectation.tolerance < 0.0 {
                return fail("tolerances must be nonnegative".to_string());
            }
            if expectation.comparator == Comparator::Within && expectation.tolerance == 0.0 {
                return fail(format!(
                    "`within` on `{}` needs a positive tolerance",
                    expectation.metric
                ));
            }
        }
        Ok(())
    }

    fn validate_metric(&self, metric: &MetricSpec) -> Result<(), ScenarioError> {
        let fail = |why: String| {
            Err(ScenarioError::Invalid {
                id: self.id.clone(),
                why,
            })
        };
        let name = metric.name();
        if name.is_empty()
            || !name
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-')
        {
            return fail("metric names must be nonempty kebab-case".to_string());
        }
        if metric.needs_direction_sets() && self.support.dim != 2 {
            return fail(format!(
                "`{name}` classifies directions, which needs a planar support"
            ));
        }
        let unit_interval = |lambda: f64, what: &str| {
            if lambda <= 0.0 || lambda >= 1.0 {
                fail(format!("`{name}`: {what} must lie in (0, 1)"))
            } else {
                Ok(())
            }
        };
        match metric {
            MetricSpec::FrontSpeed { reaction, tol, .. } => {
                ReactionTerm::parse(reaction)?;
                if *tol <= 0.0 {
                    return fail(format!("`{name}`: bisection tolerance must be positive"));
                }
            }
            MetricSpec::FrontBlocked { reaction, .. } => {
                ReactionTerm::parse(reaction)?;
            }
            MetricSpec::TerraceSpeeds { .. } => {}
            MetricSpec::DirectionalSpeed {
                direction,
                lambda,
                ray_limit,
                ..
            } => {
                unit_interval(*lambda, "lambda")?;
                let grid = self.grid.as_ref().expect("validated by needs_sim");
                let sim = self.sim.as_ref().expect("validated by needs_sim");
                if direction.len() != grid.coords() {
                    return fail(format!(
                        "`{name}`: direction needs {} coordinates",
                        grid.coords()
                    ));
                }
                let norm: f64 = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > 1e-9 {
                    return fail(format!("`{name}`: direction must be a unit vector"));
                }
                if *ray_limit > sim.read_radius + 1e-9 {
                    return fail(format!(
                        "`{name}`: ray limit {ray_limit} exceeds the trust radius {}",
                        sim.read_radius
                    ));
                }
                if self.snapshot_times.len() < 8 {
                    return fail(format!(
                        "`{name}`: speed fitting needs at least 8 snapshots"
                    ));
                }
            }
            MetricSpec::FormulaSpeed { direction, .. }
            | MetricSpec::EbIdentity { direction, .. } => {
                let norm = (direction[0] * direction[0] + direction[1] * direction[1]).sqrt();
                if (norm - 1.0).abs() > 1e-9 {
                    return fail(format!("`{name}`: direction must be a unit vector"));
                }
            }
            MetricSpec::HypCheck { .. } => {}
            MetricSpec::ErosionDistanceCheck {
                rho, probe_radius, ..
            } => {
                if *rho <= 0.0 || *probe_radius <= *rho {
                    return fail(format!(
                        "`{name}`: need 0 < rho < probe_radius"
                    ));
                }
            }
            MetricSpec::LocalHausdorff {
                lambda,
                radius,
                prediction,
                t_early,
                t_late,
                ..
            } => {
                unit_interval(*lambda, "lambda")?;
                if *radius <= 0.0 {
                    return fail(format!("`{name}`: window radius must be positive"));
                }
                if !matches!(
                    prediction.as_str(),
                    "support" | "support-base-ratios" | "ball"
                ) {
                    return fail(format!(
                        "`{name}`: unknown prediction `{prediction}`"
                    ));
                }
                if !(*t_early > 0.0 && t_late > t_early) {
                    return fail(format!("`{name}`: need 0 < t_early < t_late"));
                }
            }
            MetricSpec::GlobalHausdorff { lambda, t_late, .. } => {
                unit_interval(*lambda, "lambda")?;
                if *t_late <= 0.0 {
                    return fail(format!("`{name}`: comparison time must be positive"));
                }
            }
            MetricSpec::DilatedProbe {
                time, points, take, ..
            } => {
                if *time <= 0.0 {
                    return fail(format!("`{name}`: probe time must be positive"));
                }
                if points.is_empty() {
                    return fail(format!("`{name}`: the probe set is empty"));
                }
                let coords = self.grid.as_ref().expect("validated by needs_sim").coords();
                if points.iter().any(|p| p.len() != coords) {
                    return fail(format!("`{name}`: points need {coords} coordinates"));
                }
                if take != "min" && take != "max" {
                    return fail(format!("`{name}`: take must be `min` or `max`"));
                }
            }
            MetricSpec::ShellOscillation {
                n_lo,
                n_hi,
                lambda,
                inner_level,
                ..
            } => {
                unit_interval(*lambda, "lambda")?;
                unit_interval(*inner_level, "inner_level")?;
                if n_lo > n_hi || *n_lo < 1 || *n_hi > 16 {
                    return fail(format!("`{name}`: need 1 ≤ n_lo ≤ n_hi ≤ 16"));
                }
            }
            MetricSpec::PlateauBand {
                time,
                level,
                inner_factor,
                outer_factor,
                ..
            } => {
                unit_interval(*level, "level")?;
                if *time <= 0.0 || *inner_factor <= 0.0 || *outer_factor <= 0.0 {
                    return fail(format!("`{name}`: times and factors must be positive"));
                }
            }
            MetricSpec::RetractingCheck {
                speed,
                lambda,
                t_horizon,
                n_dim,
                r_max,
                h,
                c_max,
                coverage_span,
                ..
            } => {
                unit_interval(*lambda, "lambda")?;
                if !(*speed > 0.0
                    && *t_horizon > 0.0
                    && *r_max > 0.0
                    && *h > 0.0
                    && *c_max > *speed
                    && *coverage_span > 0.0)
                {
                    return fail(format!("`{name}`: barrier audit parameters must be positive, with c_max above the barrier speed"));
                }
                if !(1..=3).contains(n_dim) {
                    return fail(format!("`{name}`: the radial audit supports 1 ≤ n_dim ≤ 3"));
                }
            }
            MetricSpec::DirectionSetsExport { .. } | MetricSpec::SpreadingSetExport { .. } => {}
        }
        Ok(())
    }
}

/// Raw catalog entries as `(id, json)` pairs, compiled into the binary.
pub fn catalog_entries() -> &'static [(&'static str, &'static str)] {
    &[
        (
            "kpp-compact-1d",
            include_str!("configs/kpp-compact-1d.json"),
        ),
        (
            "front-speeds-table",
            include_str!("configs/front-speeds-table.json"),
        ),
        (
            "halfspace-fg-2d",
            include_str!("configs/halfspace-fg-2d.json"),
        ),
        ("cone-fg-2d", include_str!("configs/cone-fg-2d.json")),
        (
            "theorem4-global-1d",
            include_str!("configs/theorem4-global-1d.json"),
        ),
        ("ce1-shells-1d", include_str!("configs/ce1-shells-1d.json")),
        (
            "ce1bis-tube-2d",
            include_str!("configs/ce1bis-tube-2d.json"),
        ),
        (
            "ce2-gaussian-slab-2d",
            include_str!("configs/ce2-gaussian-slab-2d.json"),
        ),
        (
            "ce3-sqrt-graph-2d",
            include_str!("configs/ce3-sqrt-graph-2d.json"),
        ),
        (
            "tristable-terrace-1d",
            include_str!("configs/tristable-terrace-1d.json"),
        ),
        (
            "retracting-supersolution-check",
            include_str!("configs/retracting-supersolution-check.json"),
        ),
    ]
}

/// Parse and validate the built-in catalog.  Panics on an invalid entry:
/// the catalog is compiled in and covered by tests, so an invalid entry
/// is a build defect, not an input error.
pub fn catalog() -> Vec<Scenario> {
    catalog_entries()
        .iter()
        .map(|(id, text)| {
            let scenario = Scenario::from_json(text)
                .unwrap_or_else(|e| panic!("catalog entry `{id}` is invalid: {e}"));
            assert_eq!(
                scenario.id, *id,
                "catalog entry `{id}` declares mismatched id `{}`",
                scenario.id
            );
            scenario
        })
        .collect()
}

/// Fetch one catalog scenario by id.
pub fn catalog_scenario(id: &str) -> Option<Scenario> {
    catalog_entries()
        .iter()
        .find(|(entry_id, _)| *entry_id == id)
        .map(|(entry_id, text)| {
            Scenario::from_json(text)
                .unwrap_or_else(|e| panic!("catalog entry `{entry_id}` is invalid: {e}"))
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_parses_and_validates() {
        let scenarios = catalog();
        assert_eq!(scenarios.len(), 11);
        let ids: Vec<&str> = scenarios.iter().map(|s| s.id.as_str()).collect();
        assert_eq!(
            ids,
            [
                "kpp-compact-1d",
                "front-speeds-table",
                "halfspace-fg-2d",
                "cone-fg-2d",
                "theorem4-global-1d",
                "ce1-shells-1d",
                "ce1bis-tube-2d",
                "ce2-gaussian-slab-2d",
                "ce3-sqrt-graph-2d",
                "tristable-terrace-1d",
                "retracting-supersolution-check",
            ]
        );
    }

    #[test]
    fn every_catalog_entry_cites_registered_claims() {
        for scenario in catalog() {
            assert!(!scenario.claims.is_empty(), "{} cites nothing", scenario.id);
            for claim in &scenario.claims {
                assert!(
                    claim_statement(claim).is_some(),
                    "{}: unregistered claim {claim}",
                    scenario.id
                );
            }
            for expectation in &scenario.expectations {
                assert!(
                    claim_statement(&expectation.claim).is_some(),
                    "{}: expectation on {} cites unregistered {}",
                    scenario.id,
                    expectation.metric,
                    expectation.claim
                );
            }
        }
    }

    #[test]
    fn registry_ids_are_unique() {
        let mut seen = BTreeSet::new();
        for claim in CLAIMS {
            assert!(seen.insert(claim.id), "duplicate claim id {}", claim.id);
            assert!(!claim.statement.is_empty());
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{
            "id": "x", "targets": "t", "claims": ["kpp-minimal-speed"],
            "reaction": "kpp",
            "support": {"shape": "ball", "dim": 1},
            "surprise": 1
        }"#;
        assert!(matches!(
            Scenario::from_json(text),
            Err(ScenarioError::Json(_))
        ));
    }

    #[test]
    fn expectations_must_target_produced_results() {
        let text = r#"{
            "id": "x", "targets": "t", "claims": ["kpp-minimal-speed"],
            "reaction": "kpp",
            "support": {"shape": "ball", "dim": 1},
            "metrics": [{"kind": "front-speed", "name": "kpp", "reaction": "kpp", "tol": 0.001}],
            "expectations": [{"metric": "typo", "comparator": "within",
                              "value": 2.0, "tolerance": 0.001,
                              "claim": "kpp-minimal-speed"}]
        }"#;
        let err = Scenario::from_json(text).unwrap_err();
        assert!(err.to_string().contains("unknown result"), "{err}");
    }

    #[test]
    fn unregistered_claims_are_rejected() {
        let text = r#"{
            "id": "x", "targets": "t", "claims": ["made-up"],
            "reaction": "kpp",
            "support": {"shape": "ball", "dim": 1}
        }"#;
        assert!(matches!(
            Scenario::from_json(text),
            Err(ScenarioError::UnknownClaim { .. })
        ));
    }

    #[test]
    fn snapshot_metrics_require_a_grid() {
        let text = r#"{
            "id": "x", "targets": "t", "claims": ["kpp-minimal-speed"],
            "reaction": "kpp",
            "support": {"shape": "ball", "dim": 1},
            "metrics": [{"kind": "directional-speed", "name": "s",
                         "direction": [1.0], "lambda": 0.5, "ray_limit": 10.0}]
        }"#;
        let err = Scenario::from_json(text).unwrap_err();
        assert!(err.to_string().contains("require `grid`"), "{err}");
    }

    #[test]
    fn ray_limits_must_stay_inside_the_trust_radius() {
        let text = r#"{
            "id": "x", "targets": "t", "claims": ["kpp-minimal-speed"],
            "reaction": "kpp",
            "support": {"shape": "ball", "dim": 1},
            "grid": {"kind": "line", "bounds": [[-100.0, 100.0]], "h": 0.5},
            "sim": {"t_final": 10.0, "c_max": 2.3, "read_radius": 30.0},
            "snapshot_times": [1,2,3,4,5,6,7,8,9,10],
            "metrics": [{"kind": "directional-speed", "name": "s",
                         "direction": [1.0], "lambda": 0.5, "ray_limit": 50.0}]
        }"#;
        let err = Scenario::from_json(text).unwrap_err();
        assert!(err.to_string().contains("trust radius"), "{err}");
    }

    #[test]
    fn radial_interval_supports_build_from_specs() {
        let spec = SupportSpec {
            shape: "radial-intervals".to_string(),
            params: BTreeMap::new(),
            intervals: Some(vec![[40.0, 60.0]]),
            dim: 1,
            erosion: 0.0,
        };
        let set = spec.build().unwrap();
        assert!(set.contains(&[50.0]) && !set.contains(&[30.0]));
    }
}
