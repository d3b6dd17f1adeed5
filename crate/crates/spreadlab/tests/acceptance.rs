// Acceptance checklist for the laboratory: one test per criterion. Each
// test computes its measurements first, prints a single PASS/FAIL line
// with the numbers, and only then asserts, so a run with `--nocapture`
// reads as a checklist and a failing criterion still reports what it
// measured. Every threshold is fixed here, in code.
//
// Two probes are known to sit outside their targets at the resolutions
// used and fail honestly rather than being retuned:
//   - criterion 04: the minimum of `u` over the closed ball of radius
//     `1.8t` reaches only ≈ 0.875 by `t = 60` — the value profile behind
//     the front converges to 1 on a slower timescale than the front
//     position converges to `2t`.
//   - criterion 06: on an `h = 0.5` plane the discrete front runs ≈ 4%
//     below the continuum speed, leaving a fixed offset between the
//     measured and predicted envelopes that rescaling cannot remove, so
//     the early/late contraction ratio stalls near 2 instead of 3.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spreadlab::front::{minimal_speed, shoot, FrontError};
use spreadlab::geometry::{
    check_eB_identity, check_hyp_U, direction_sets, dyadic_ladder, hausdorff,
    spreading_set_contains, spreading_speed, spreading_speed_analytic, DirectionLabel,
    SpreadingPrediction, SupportSet, BOUNDED_TOL, UNBOUNDED_TOL,
};
use spreadlab::metrics::{directional_speed, hausdorff_trace};
use spreadlab::pde::{simulate, BoundaryCondition, Field, Grid, SimOptions};
use spreadlab::reaction::{integral_sign, ReactionTerm, Sign};
use spreadlab::scenario::catalog_scenario;
use spreadlab::scenario::run::{run_scenario, Report};

/// Front speed of the logistic reaction, exact.
const LOGISTIC_SPEED: f64 = 2.0;

fn verdict(tag: &str, pass: bool, detail: &str) -> bool {
    println!("{} {tag} — {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

/// Measured logistic front speed, shared across criteria that feed it to
/// the envelope formula.
fn logistic_speed_measured() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        minimal_speed(&ReactionTerm::kpp(), 1e-3)
            .expect("logistic front")
            .c_star
    })
}

/// The cone plane run shared by criteria 05 and 06, with its wall time.
fn cone_run() -> &'static (Vec<Field>, Duration) {
    static RUN: OnceLock<(Vec<Field>, Duration)> = OnceLock::new();
    RUN.get_or_init(|| {
        let grid = Grid::plane((-260.0, 260.0), (-260.0, 260.0), 0.5)
            .with_boundary(BoundaryCondition::NeumannZero);
        let seed = SupportSet::cone_subgraph(-1.0);
        let times: Vec<f64> = (1..=8).map(|k| 5.0 * k as f64).collect();
        let start = Instant::now();
        let snapshots = simulate(
            &grid,
            &seed,
            &ReactionTerm::kpp(),
            40.0,
            &times,
            &SimOptions::new(3.0, 120.0),
        )
        .expect("cone plane run");
        (snapshots, start.elapsed())
    })
}

fn run_catalog(id: &str) -> Report {
    let scenario = catalog_scenario(id).expect("catalog id");
    let out = std::env::temp_dir().join(format!("spreadlab-acceptance-{id}"));
    let _ = std::fs::remove_dir_all(&out);
    run_scenario(&scenario, &out).expect("scenario run")
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (st, sp) = points
        .iter()
        .fold((0.0, 0.0), |(st, sp), (t, p)| (st + t, sp + p));
    let (tbar, pbar) = (st / n, sp / n);
    let (num, den) = points.iter().fold((0.0, 0.0), |(num, den), (t, p)| {
        (num + (t - tbar) * (p - pbar), den + (t - tbar) * (t - tbar))
    });
    num / den
}

#[test]
fn criterion_01_logistic_front_speed() {
    let start = Instant::now();
    let front = minimal_speed(&ReactionTerm::kpp(), 1e-3).expect("logistic front");
    let elapsed = start.elapsed();

    let err = (front.c_star - 2.0).abs();
    let pass = err <= 1e-3 && elapsed <= Duration::from_secs(1);
    let detail = format!(
        "c* = {:.9} (|c* − 2| = {err:.2e}, tol 1e-3) in {elapsed:.2?} (limit 1 s)",
        front.c_star
    );
    assert!(
        verdict("criterion 01 — logistic front speed", pass, &detail),
        "{detail}"
    );
}

#[test]
fn criterion_02_cubic_front_speed_formula() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for a in [0.1, 0.25, 0.4] {
        let f = ReactionTerm::bistable(a).expect("cubic reaction");
        let c = minimal_speed(&f, 1e-3).expect("cubic front").c_star;
        let exact = (1.0 - 2.0 * a) / 2f64.sqrt();
        worst = worst.max((c - exact).abs());
        rows.push(format!("a = {a}: {c:.6} vs {exact:.6}"));
    }
    let elapsed = start.elapsed();

    let pass = worst <= 1e-3 && elapsed <= Duration::from_secs(5);
    let detail = format!(
        "{} — worst error {worst:.2e} (tol 1e-3) in {elapsed:.2?} (limit 5 s)",
        rows.join("; ")
    );
    assert!(
        verdict("criterion 02 — cubic front speed formula", pass, &detail),
        "{detail}"
    );
}

#[test]
fn criterion_03_negative_mass_blocks_positive_fronts() {
    let f = ReactionTerm::bistable(0.75).expect("cubic reaction");
    let sign = integral_sign(&f);
    let outcome = minimal_speed(&f, 1e-3);
    let blocked = matches!(outcome, Err(FrontError::NoPositiveFront { .. }));

    let pass = blocked && matches!(sign, Sign::Negative);
    let detail = format!(
        "minimal_speed → {}, ∫₀¹ f sign {sign:?} (want no-positive-front and Negative)",
        if blocked {
            "no-positive-front".to_string()
        } else {
            format!("{outcome:?}")
        }
    );
    assert!(
        verdict("criterion 03 — speed-sign law", pass, &detail),
        "{detail}"
    );
}

#[test]
fn criterion_04_compact_seed_line_spreading() {
    let start = Instant::now();
    let grid = Grid::line(-300.0, 300.0, 0.1);
    let seed = SupportSet::ball(1.0, 1);
    let times: Vec<f64> = (1..=12).map(|k| 5.0 * k as f64).collect();
    let snapshots = simulate(
        &grid,
        &seed,
        &ReactionTerm::kpp(),
        60.0,
        &times,
        &SimOptions::new(2.3, 140.0),
    )
    .expect("line run");
    let elapsed = start.elapsed();

    let track = directional_speed(&snapshots, &[1.0], 0.5, 140.0).expect("level track");
    let late: Vec<(f64, f64)> = track
        .times
        .iter()
        .copied()
        .zip(track.level_positions.iter().copied())
        .filter(|(t, _)| *t >= 30.0 - 1e-9)
        .collect();
    let slope = least_squares_slope(&late);

    let last = snapshots.last().expect("final snapshot");
    let (lo, _) = last.grid().bounds()[0];
    let h = last.grid().spacing();
    let (mut inner_min, mut outer_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, &u) in last.values().iter().enumerate() {
        let x = lo + i as f64 * h;
        if x.abs() <= 1.8 * 60.0 + 1e-9 {
            inner_min = inner_min.min(u);
        }
        if x.abs() > 2.2 * 60.0 + 1e-9 {
            outer_max = outer_max.max(u);
        }
    }

    let slope_ok = (slope - 2.0).abs() <= 0.1;
    let inner_ok = inner_min > 0.99;
    let outer_ok = outer_max < 0.01;
    let time_ok = elapsed <= Duration::from_secs(120);
    let pass = slope_ok && inner_ok && outer_ok && time_ok;
    let detail = format!(
        "mid-level slope over t ∈ [30, 60] = {slope:.4} (want 2 ± 0.1), \
         min u on |x| ≤ 108 at t = 60 = {inner_min:.10} (want > 0.99), \
         max u on |x| > 132 = {outer_max:.2e} (want < 0.01), {elapsed:.2?} (limit 2 min)"
    );
    assert!(
        verdict("criterion 04 — compact-seed line spreading", pass, &detail),
        "known deficit: the interior minimum sits at the ball edge |x| = 1.8t and \
         the value profile there converges to 1 more slowly than the front position \
         converges to 2t; the target is kept as stated rather than retuned. {detail}"
    );
}

#[test]
fn criterion_05_cone_directional_speeds() {
    let (snapshots, took) = cone_run();
    let up = directional_speed(snapshots, &[0.0, 1.0], 0.5, 100.0).expect("up ray");
    let side = directional_speed(snapshots, &[1.0, 0.0], 0.5, 120.0).expect("side ray");
    let sqrt8 = 8f64.sqrt();
    let formula = spreading_speed_analytic(
        &SupportSet::cone_subgraph(-1.0),
        logistic_speed_measured(),
        [1.0, 0.0],
    )
    .expect("finite sideways prediction");

    let up_ok = (up.fitted_speed - 2.0).abs() <= 0.2;
    let side_ok = (side.fitted_speed - sqrt8).abs() <= 0.1 * sqrt8;
    let formula_ok = (formula - sqrt8).abs() <= 0.01 * sqrt8;
    let time_ok = *took <= Duration::from_secs(600);
    let pass = up_ok && side_ok && formula_ok && time_ok;
    let detail = format!(
        "fitted up = {:.4} (want 2 ± 0.2), fitted sideways = {:.4} (want 2√2 ± 10%), \
         formula sideways = {formula:.6} (want 2√2 ± 1%), run {took:.2?} (limit 10 min)",
        up.fitted_speed, side.fitted_speed
    );
    assert!(
        verdict("criterion 05 — cone directional speeds", pass, &detail),
        "{detail}"
    );
}

#[test]
fn criterion_06_cone_local_envelope_contraction() {
    let (snapshots, _) = cone_run();
    let cone = SupportSet::cone_subgraph(-1.0);
    let dirs = direction_sets(&cone, 0.5, 720, &dyadic_ladder());
    let prediction = SpreadingPrediction::new(dirs, logistic_speed_measured());
    let trace = hausdorff_trace(snapshots, &prediction, &cone, 0.5, 3.0 * LOGISTIC_SPEED);
    let at = |t: f64| -> f64 {
        trace
            .times
            .iter()
            .position(|&s| (s - t).abs() < 1e-9)
            .map(|i| trace.local_dH[i])
            .expect("snapshot time")
    };
    let early = at(10.0);
    let late = at(40.0);
    let ratio = early / late;

    let ratio_ok = ratio >= 3.0;
    let late_ok = late < 0.25 * LOGISTIC_SPEED;
    let pass = ratio_ok && late_ok;
    let detail = format!(
        "rescaled dH on the 6-ball: {early:.4} at t = 10 → {late:.4} at t = 40, \
         ratio {ratio:.4} (want ≥ 3), endpoint (want < 0.5)"
    );
    assert!(
        verdict("criterion 06 — cone local envelope contraction", pass, &detail),
        "known floor: the discrete front on this h = 0.5 plane runs ≈ 4% below the \
         continuum speed, so the rescaled distance keeps a fixed offset that the \
         late-time term cannot shrink and the ratio stalls near 2; the target is \
         kept as stated rather than retuned. {detail}"
    );
}

#[test]
fn criterion_07_two_interval_global_tracking() {
    let grid = Grid::line(-310.0, 310.0, 0.1);
    let seed = SupportSet::radial_intervals("two-intervals", vec![(40.0, 60.0)], 1);
    let times: Vec<f64> = (1..=10).map(|k| 5.0 * k as f64).collect();
    let snapshots = simulate(
        &grid,
        &seed,
        &ReactionTerm::kpp(),
        50.0,
        &times,
        &SimOptions::new(2.3, 170.0),
    )
    .expect("line run");

    let ball = direction_sets(&SupportSet::ball(1.0, 2), 0.5, 720, &dyadic_ladder())
        .labeled_all_bounded();
    let prediction = SpreadingPrediction::new(ball, logistic_speed_measured());
    let trace = hausdorff_trace(&snapshots, &prediction, &seed, 0.5, 1.0);
    let last = *trace.global_dH_over_t.last().expect("trace");

    let pass = last < 0.15 * LOGISTIC_SPEED;
    let detail = format!("global dH/t at t = 50 is {last:.4} (want < 0.3)");
    assert!(
        verdict("criterion 07 — two-interval global tracking", pass, &detail),
        "{detail}"
    );
}

#[test]
fn criterion_08_dyadic_shells_oscillate() {
    // Shells |x| ∈ [2ⁿ − 1, 2ⁿ + 1] for n = 1..9; the first two touch at
    // x = 3 and are written merged.
    let mut shells = vec![(1.0, 5.0)];
    shells.extend((3..=9).map(|n| {
        let center = 2f64.powi(n);
        (center - 1.0, center + 1.0)
    }));
    let seed = SupportSet::radial_intervals("dyadic-shells", shells, 1);
    let grid = Grid::line(-2000.0, 2000.0, 0.1);
    let times = [4.0, 8.0, 16.0, 32.0, 64.0];
    let snapshots = simulate(
        &grid,
        &seed,
        &ReactionTerm::kpp(),
        64.0,
        &times,
        &SimOptions::new(2.3, 770.0),
    )
    .expect("long line run");
    let at = |t: f64| -> &Field {
        snapshots
            .iter()
            .find(|s| (s.time() - t).abs() < 1e-9)
            .expect("snapshot")
    };

    // At τₙ = 2ⁿ⁻³ (a quarter of the time the front needs to cross to the
    // next shell) the point 3·2ⁿ still sits in the unfilled gap, while the
    // shell center 2ⁿ has long saturated by t = 2ⁿ⁻².
    let mut hits = Vec::new();
    let mut rows = Vec::new();
    for n in 5..=8i32 {
        let tau = 2f64.powi(n - 3);
        let far = 3.0 * 2f64.powi(n);
        let gap_value = at(tau).sample(&[far]);
        let settle_time = 2f64.powi(n - 2);
        let settle_value = at(settle_time).sample(&[2f64.powi(n)]);
        if gap_value < 0.5 && settle_value > 0.99 {
            hits.push(n);
        }
        rows.push(format!(
            "n = {n}: u({tau}, {far}) = {gap_value:.2e}, u({settle_time}, {}) = {settle_value:.6}",
            2f64.powi(n)
        ));
    }

    let pass = !hits.is_empty();
    let detail = format!(
        "{} — oscillation detected for n ∈ {hits:?} (want at least one of 5..8)",
        rows.join("; ")
    );
    assert!(
        verdict("criterion 08 — dyadic shells oscillate", pass, &detail),
        "{detail}"
    );
}

#[test]
fn criterion_09_pinched_slab_breaks_the_envelope() {
    // Direction classification: the slab hugs the axis at sublinear
    // distance while its erosion is compact, so the axis verdict must be
    // ambiguous and the hypothesis check must fail.
    let slab = SupportSet::gaussian_slab();
    let dirs = direction_sets(&slab, 0.5, 720, &dyadic_ladder());
    let axis = dirs.nearest_index([1.0, 0.0]);
    let liminf = dirs.liminf_ratio[axis];
    let eroded = dirs.limsup_eroded_ratio[axis];
    let label = dirs.labels[axis];
    let hyp = check_hyp_U(&dirs);
    let class_ok = liminf <= UNBOUNDED_TOL
        && eroded > BOUNDED_TOL
        && matches!(label, DirectionLabel::Ambiguous)
        && !hyp;

    // Simulated dichotomy: the rescaled level set never approaches the
    // naive slab envelope but does converge to the front-speed ball.
    let report = run_catalog("ce2-gaussian-slab-2d");
    let strip_late = report.results["strip-late"];
    let strip_ratio = report.results["strip-ratio"];
    let ball_late = report.results["ball-late"];
    let ball_ratio = report.results["ball-ratio"];
    let slab_stalls = strip_late > 1.0 && strip_ratio < 1.5;
    let ball_converges = ball_late < 0.5 && ball_ratio > 2.5;

    let pass = class_ok && slab_stalls && ball_converges && report.all_passed();
    let detail = format!(
        "axis ratios: liminf {liminf:.4} (≤ {UNBOUNDED_TOL}), eroded {eroded:.4} \
         (> {BOUNDED_TOL}), label {label:?}, hypothesis check {hyp}; \
         slab prediction dH {strip_late:.4} at t = 40 with early/late ratio {strip_ratio:.4} \
         (want > 1.0 and < 1.5), ball prediction dH {ball_late:.4} with ratio {ball_ratio:.4} \
         (want < 0.5 and > 2.5)"
    );
    assert!(
        verdict("criterion 09 — pinched slab breaks the envelope", pass, &detail),
        "{detail}"
    );
}

#[test]
fn criterion_10_retracting_barrier_blocks_the_origin() {
    let report = run_catalog("retracting-supersolution-check");
    let coverage = report.results["barrier-coverage-min"];
    let origin = report.results["barrier-origin-max"];
    let residual = report.results["barrier-residual-min"];
    let sim_origin = report.results["barrier-sim-origin-max"];

    let pass = report.all_passed() && sim_origin < 0.15;
    let detail = format!(
        "exterior coverage min {coverage:.9} (want ≥ 1), barrier origin max {origin:.2e} \
         (want < 0.1), interior residual min {residual:.2e} (want ≥ 0), \
         simulated origin max {sim_origin:.4} (want < 0.15)"
    );
    assert!(
        verdict("criterion 10 — retracting barrier blocks the origin", pass, &detail),
        "{detail}"
    );
}

#[test]
fn criterion_11_tristable_terrace() {
    let report = run_catalog("tristable-terrace-1d");
    let c1 = report.results["terrace-c1"];
    let c2 = report.results["terrace-c2"];
    let plateau = report.results["plateau-max-deviation"];

    let pass = c1 > c2 && plateau < 0.05 && report.all_passed();
    let detail = format!(
        "terrace speeds c1 = {c1:.6}, c2 = {c2:.6} (want c1 > c2); \
         max |u − 0.5| on radii ∈ [1.1·c2·t, 0.9·c1·t] at t = 40 is {plateau:.2e} (want < 0.05)"
    );
    assert!(
        verdict("criterion 11 — tristable terrace", pass, &detail),
        "{detail}"
    );
}

#[test]
fn criterion_12_randomized_structure_suites() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let f = ReactionTerm::kpp();

    // (a) Discrete comparison principle: nested seeds stay ordered.
    let grid = Grid::line(-25.0, 25.0, 0.1);
    let opts = SimOptions::new(2.3, 0.0);
    let mut comparison_ok = true;
    for _ in 0..20 {
        let a: f64 = rng.random_range(1.0..4.0);
        let b = a + rng.random_range(0.5..3.0);
        let d1: f64 = rng.random_range(0.0..1.0);
        let d2: f64 = rng.random_range(0.0..1.0);
        let inner = SupportSet::radial_intervals("inner", vec![(a, b)], 1);
        let outer = SupportSet::radial_intervals("outer", vec![(a - d1, b + d2)], 1);
        let times = [0.75, 1.5];
        let small = simulate(&grid, &inner, &f, 1.5, &times, &opts).expect("inner run");
        let large = simulate(&grid, &outer, &f, 1.5, &times, &opts).expect("outer run");
        for (u, v) in small.iter().zip(&large) {
            for (x, y) in u.values().iter().zip(v.values()) {
                if *x > *y + 1e-9 {
                    comparison_ok = false;
                }
            }
        }
    }

    // (b) Phase-plane orbits launched at a higher speed stay above lower
    // ones on their shared grid.
    let mut ordering_ok = true;
    let mut shared_samples = 0usize;
    for _ in 0..10 {
        let c_lo: f64 = rng.random_range(0.3..2.8);
        let c_hi = c_lo + rng.random_range(0.1..1.2);
        let slow = shoot(&f, c_lo, 1e-3).expect("slow orbit");
        let fast = shoot(&f, c_hi, 1e-3).expect("fast orbit");
        let n = slow.q_samples.len().min(fast.q_samples.len());
        for i in 0..n {
            if (slow.q_samples[i] - fast.q_samples[i]).abs() > 1e-12 {
                break;
            }
            shared_samples += 1;
            if fast.w_samples[i] < slow.w_samples[i] - 1e-10 {
                ordering_ok = false;
            }
        }
    }

    // (c) Hausdorff distance is a metric on point clouds.
    let clouds: Vec<Vec<[f64; 2]>> = (0..100)
        .map(|_| {
            let n: usize = rng.random_range(1..=8);
            (0..n)
                .map(|_| [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)])
                .collect()
        })
        .collect();
    let mut metric_ok = true;
    for cloud in &clouds {
        if hausdorff(cloud, cloud) != 0.0 {
            metric_ok = false;
        }
    }
    for pair in clouds.windows(2) {
        let d_ab = hausdorff(&pair[0], &pair[1]);
        let d_ba = hausdorff(&pair[1], &pair[0]);
        if d_ab != d_ba || d_ab < 0.0 {
            metric_ok = false;
        }
    }
    for triple in clouds.windows(3) {
        let d_ac = hausdorff(&triple[0], &triple[2]);
        let through = hausdorff(&triple[0], &triple[1]) + hausdorff(&triple[1], &triple[2]);
        if d_ac > through + 1e-12 {
            metric_ok = false;
        }
    }

    // (d) Membership in the predicted spreading set agrees with the
    // directional-speed view of the same envelope.
    let supports = [
        SupportSet::ball(2.0, 2),
        SupportSet::halfspace(2),
        SupportSet::cone_subgraph(-1.0),
        SupportSet::sqrt_subgraph(),
        SupportSet::tube_plus_parabola(),
    ];
    let mut agreement_ok = true;
    let mut skipped = 0usize;
    for support in &supports {
        let dirs = direction_sets(support, 0.5, 720, &dyadic_ladder());
        for _ in 0..10_000 {
            let x: [f64; 2] = [rng.random_range(-8.0..8.0), rng.random_range(-8.0..8.0)];
            let r = x[0].hypot(x[1]);
            if r < 1e-9 {
                skipped += 1;
                continue;
            }
            let w = spreading_speed(&dirs, 2.0, [x[0] / r, x[1] / r]);
            if (r - w).abs() <= 1e-9 {
                skipped += 1;
                continue;
            }
            if spreading_set_contains(&dirs, 2.0, x) != (r < w) {
                agreement_ok = false;
            }
        }
    }

    // (e) Boundary-distance identity along a bounded direction.
    let mut identity_ok = true;
    let mut gaps = Vec::new();
    for (name, support) in [
        ("halfspace", SupportSet::halfspace(2)),
        ("cone", SupportSet::cone_subgraph(-1.0)),
    ] {
        let dirs = direction_sets(&support, 0.5, 720, &dyadic_ladder());
        let (lhs, rhs) = check_eB_identity(&support, &dirs, [0.0, 1.0]).expect("bounded probe");
        let gap = (lhs - rhs).abs();
        if gap > 0.05 {
            identity_ok = false;
        }
        gaps.push(format!("{name} {gap:.2e}"));
    }

    let pass = comparison_ok && ordering_ok && metric_ok && agreement_ok && identity_ok;
    let detail = format!(
        "comparison principle on 20 nested pairs: {}; orbit ordering over {shared_samples} \
         shared samples: {}; metric axioms on 100 clouds: {}; envelope membership on \
         5 × 10⁴ points ({skipped} boundary skips): {}; boundary identity gaps {} (≤ 0.05): {}",
        comparison_ok, ordering_ok, metric_ok, agreement_ok,
        gaps.join(", "), identity_ok
    );
    assert!(
        verdict("criterion 12 — randomized structure suites", pass, &detail),
        "{detail}"
    );
}
