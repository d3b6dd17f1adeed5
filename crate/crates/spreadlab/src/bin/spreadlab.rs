//! Command-line driver: run catalog or file scenarios, list the catalog,
//! and query front speeds, direction classifications, and predicted
//! spreading sets directly.
//!
//! Exit status: 0 when everything ran and every expectation held, 1 when
//! a scenario ran but some expectation failed, 2 on any error (bad
//! arguments, invalid scenario, runtime failure).
//!
//! Output files land under `--out` when given, else `$SPREADLAB_OUT`,
//! else `./spreadlab-out`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spreadlab::front::{minimal_speed, tristable_terrace_speeds};
use spreadlab::geometry::{
    check_hyp_U, direction_sets, dyadic_ladder, DirectionLabel, SpreadingPrediction, SupportSet,
};
use spreadlab::reaction::{ReactionKind, ReactionTerm};
use spreadlab::scenario::run::{default_out_root, run_scenario, Report};
use spreadlab::scenario::{catalog, catalog_scenario, Comparator, Scenario};

#[derive(Parser)]
#[command(
    name = "spreadlab",
    about = "Numerical laboratory for reaction-diffusion spreading speeds and spreading sets",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario: a catalog id or a path to a scenario JSON file.
    Run {
        /// Catalog id (see `list`) or path to a `.json` scenario.
        scenario: String,
        /// Output root directory (default: $SPREADLAB_OUT or ./spreadlab-out).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the scenario catalog with the claims each entry cites.
    List,
    /// Compute the minimal planar front speed of a reaction.
    FrontSpeed {
        /// Reaction in `name(key=value,…)` form, e.g. `bistable(a=0.25)`.
        reaction: String,
        /// Bracket tolerance of the speed bisection.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Classify directions of a support set and write the table to CSV.
    DirectionSets {
        /// Support shape name, e.g. `cone`, `gaussian-slab`.
        support: String,
        /// Shape parameters as `key=value`, repeatable.
        #[arg(long = "param", value_parser = parse_key_value)]
        params: Vec<(String, f64)>,
        /// Ambient dimension.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Erosion depth for the unbounded test.
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
        /// Number of sampled directions.
        #[arg(long, default_value_t = 720)]
        samples: usize,
        /// Output root directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Predict the spreading set of a support under a reaction and write
    /// the boundary polyline to CSV.
    SpreadingSet {
        /// Support shape name.
        support: String,
        /// Shape parameters as `key=value`, repeatable.
        #[arg(long = "param", value_parser = parse_key_value)]
        params: Vec<(String, f64)>,
        /// Ambient dimension.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Reaction in `name(key=value,…)` form.
        #[arg(long, default_value = "kpp")]
        reaction: String,
        /// Cap on plotted radii, as a multiple of the front speed.
        #[arg(long, default_value_t = 3.0)]
        cap_factor: f64,
        /// Output root directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_key_value(s: &str) -> Result<(String, f64), String> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| format!("`{s}` is not of the form key=value"))?;
    let value: f64 = value
        .parse()
        .map_err(|_| format!("`{value}` is not a number"))?;
    Ok((key.to_string(), value))
}

fn out_root(flag: Option<PathBuf>) -> PathBuf {
    flag.unwrap_or_else(default_out_root)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Run { scenario, out } => run_command(&scenario, out),
        Command::List => {
            list_command();
            Ok(ExitCode::SUCCESS)
        }
        Command::FrontSpeed { reaction, tol } => front_speed_command(&reaction, tol),
        Command::DirectionSets {
            support,
            params,
            dim,
            rho,
            samples,
            out,
        } => direction_sets_command(&support, &params, dim, rho, samples, out),
        Command::SpreadingSet {
            support,
            params,
            dim,
            reaction,
            cap_factor,
            out,
        } => spreading_set_command(&support, &params, dim, &reaction, cap_factor, out),
    }
}

fn load_scenario(arg: &str) -> Result<Scenario, String> {
    if arg.ends_with(".json") || Path::new(arg).exists() {
        Scenario::from_file(Path::new(arg)).map_err(|e| format!("loading `{arg}`: {e}"))
    } else {
        catalog_scenario(arg)
            .ok_or_else(|| format!("`{arg}` is neither a catalog id nor a scenario file"))
    }
}

fn run_command(arg: &str, out: Option<PathBuf>) -> Result<ExitCode, String> {
    let scenario = load_scenario(arg)?;
    let root = out_root(out);
    let report = run_scenario(&scenario, &root).map_err(|e| format!("running `{arg}`: {e}"))?;
    print_report(&report);
    Ok(if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn print_report(report: &Report) {
    println!("scenario {}", report.id);
    println!("  wrote {} files under {}", report.artifacts.len(), report.out_dir.display());
    if !report.results.is_empty() {
        println!("  results:");
        for (name, value) in &report.results {
            println!("    {name} = {value}");
        }
    }
    for verdict in &report.verdicts {
        let op = match verdict.comparator {
            Comparator::Within => format!("within {} +/- {}", verdict.value, verdict.tolerance),
            Comparator::LessThan => format!("< {}", verdict.value),
            Comparator::GreaterThan => format!("> {}", verdict.value),
        };
        println!(
            "  {} {} = {} (want {}) [{}]",
            if verdict.pass { "PASS" } else { "FAIL" },
            verdict.metric,
            verdict.measured,
            op,
            verdict.claim
        );
    }
    let failed = report.verdicts.iter().filter(|v| !v.pass).count();
    if failed > 0 {
        println!("  {failed} expectation(s) failed");
    }
}

fn list_command() {
    for scenario in catalog() {
        println!("{}", scenario.id);
        println!("  claims: {}", scenario.claims.join(", "));
        println!("  {}", scenario.targets);
    }
}

fn front_speed_command(reaction: &str, tol: f64) -> Result<ExitCode, String> {
    let f = ReactionTerm::parse(reaction).map_err(|e| e.to_string())?;
    if f.kind() == ReactionKind::Tristable {
        let (c1, c2) = tristable_terrace_speeds(&f).map_err(|e| e.to_string())?;
        println!("terrace speeds for {reaction}:");
        println!("  lower front (0 -> middle): c1 = {c1}");
        println!("  upper front (middle -> 1): c2 = {c2}");
        return Ok(ExitCode::SUCCESS);
    }
    let result = minimal_speed(&f, tol).map_err(|e| e.to_string())?;
    println!(
        "minimal front speed for {reaction}: {} (bracket [{}, {}])",
        result.c_star, result.bracket.0, result.bracket.1
    );
    Ok(ExitCode::SUCCESS)
}

fn build_support(
    support: &str,
    params: &[(String, f64)],
    dim: usize,
) -> Result<SupportSet, String> {
    SupportSet::parse(support, params, dim).map_err(|e| e.to_string())
}

fn direction_sets_command(
    support: &str,
    params: &[(String, f64)],
    dim: usize,
    rho: f64,
    samples: usize,
    out: Option<PathBuf>,
) -> Result<ExitCode, String> {
    if dim != 2 {
        return Err("direction classification samples the plane; use --dim 2".to_string());
    }
    let set = build_support(support, params, dim)?;
    let dirs = direction_sets(&set, rho, samples, &dyadic_ladder());
    let mut counts = [0usize; 3];
    let mut csv = String::from("index,ex,ey,liminf_ratio,eroded_ratio,label\n");
    for i in 0..dirs.directions.len() {
        match dirs.labels[i] {
            DirectionLabel::Bounded => counts[0] += 1,
            DirectionLabel::Unbounded => counts[1] += 1,
            DirectionLabel::Ambiguous => counts[2] += 1,
        }
        csv.push_str(&format!(
            "{i},{},{},{},{},{}\n",
            dirs.directions[i][0],
            dirs.directions[i][1],
            dirs.liminf_ratio[i],
            dirs.limsup_eroded_ratio[i],
            dirs.labels[i]
        ));
    }
    let root = out_root(out);
    std::fs::create_dir_all(&root).map_err(|e| e.to_string())?;
    let path = root.join(format!("direction-sets-{}.csv", set.label().replace(' ', "-")));
    std::fs::write(&path, csv).map_err(|e| e.to_string())?;
    println!(
        "{}: {} bounded, {} unbounded, {} ambiguous (of {})",
        set.label(),
        counts[0],
        counts[1],
        counts[2],
        dirs.directions.len()
    );
    println!(
        "  every direction classified: {}",
        if check_hyp_U(&dirs) { "yes" } else { "no" }
    );
    println!("  wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn spreading_set_command(
    support: &str,
    params: &[(String, f64)],
    dim: usize,
    reaction: &str,
    cap_factor: f64,
    out: Option<PathBuf>,
) -> Result<ExitCode, String> {
    if dim != 2 {
        return Err("spreading-set prediction samples the plane; use --dim 2".to_string());
    }
    let set = build_support(support, params, dim)?;
    let f = ReactionTerm::parse(reaction).map_err(|e| e.to_string())?;
    let c_star = minimal_speed(&f, 1e-3).map_err(|e| e.to_string())?.c_star;
    let dirs = direction_sets(&set, 0.5, 720, &dyadic_ladder());
    let prediction = SpreadingPrediction::new(dirs, c_star);
    let mut csv = String::from("x,y\n");
    for p in prediction.boundary_polyline(cap_factor * c_star) {
        csv.push_str(&format!("{},{}\n", p[0], p[1]));
    }
    let root = out_root(out);
    std::fs::create_dir_all(&root).map_err(|e| e.to_string())?;
    let path = root.join(format!("spreading-set-{}.csv", set.label().replace(' ', "-")));
    std::fs::write(&path, csv).map_err(|e| e.to_string())?;
    println!("predicted spreading set for {} under {reaction}:", set.label());
    for (tag, e) in [
        ("+x", [1.0, 0.0]),
        ("-x", [-1.0, 0.0]),
        ("+y", [0.0, 1.0]),
        ("-y", [0.0, -1.0]),
    ] {
        println!("  speed along {tag}: {}", prediction.speed(e));
    }
    println!("  wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}
