//! `rconvex`: r-convex hulls, shape-condition checks, shape sampling,
//! excess-mass level sets and seeded experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rconvex_core::excess_mass::{
    default_bandwidth, default_family, default_lambda_grid, lambda_sweep, parse_lambda_grid, split_sample,
    DensityModel, DEFAULT_SWEEP_STEPS,
};
use rconvex_core::experiments::{render_svg, run, ExperimentConfig, SvgObject};
use rconvex_core::geom::{write_points_csv, PointSet};
use rconvex_core::hull::{build_hull, write_arcs_csv};
use rconvex_core::raster::{ilc_check, rconvexity_check, read_pbm, rolling_check, write_pbm, DEFAULT_BAND};
use rconvex_core::shapes::{catalog_text, sample_points, SampleRequest, ShapeSpec};
use rconvex_core::Error;

#[derive(Parser)]
#[command(name = "rconvex", version, about = "r-convex hulls and set estimation in the plane")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the r-convex hull of a point CSV.
    Hull(HullArgs),
    /// Test a PBM mask for r-convexity, the rolling condition or ILC.
    Check(CheckArgs),
    /// Draw uniform points on a catalog shape.
    Sample(SampleArgs),
    /// Excess-mass level-set estimate and lambda sweep.
    Levelset(LevelsetArgs),
    /// Run an experiment from a JSON config.
    Run(RunArgs),
}

#[derive(Args)]
struct HullArgs {
    /// CSV with header `x,y`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    r: f64,
    /// Boundary arcs CSV.
    #[arg(long)]
    out_arcs: Option<PathBuf>,
    /// SVG with the hull, isolated points and the sample.
    #[arg(long)]
    out_svg: Option<PathBuf>,
    /// Leave the sample out of the SVG.
    #[arg(long)]
    no_sample: bool,
    /// Print L(S_n) to stdout.
    #[arg(long)]
    length: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Rconvex,
    Rolling,
    Ilc,
}

#[derive(Args)]
struct CheckArgs {
    /// Mask in the P1 text format with an origin/h comment line.
    #[arg(long)]
    input: PathBuf,
    /// Radius r; for `ilc` the ball radius alpha.
    #[arg(long)]
    r: f64,
    #[arg(long, value_enum)]
    test: CheckKind,
    /// Band in cells allowed between the mask and its closing (`rconvex`).
    #[arg(long, default_value_t = DEFAULT_BAND)]
    band: f64,
    /// Slack for `rolling`; defaults to two cells.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct SampleArgs {
    /// Print the shape catalog and exit.
    #[arg(long)]
    list: bool,
    #[arg(long, required_unless_present = "list")]
    shape: Option<String>,
    /// Parameters as `k=v,...`.
    #[arg(long, default_value = "")]
    params: String,
    #[arg(long, required_unless_present = "list")]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LevelsetArgs {
    /// CSV with header `x,y`.
    #[arg(long)]
    input: PathBuf,
    /// Single lambda.
    #[arg(long, conflicts_with = "lambda_grid")]
    lambda: Option<f64>,
    /// `a:b:steps`; defaults to 20 values in (0, 1.2 max KDE].
    #[arg(long)]
    lambda_grid: Option<String>,
    /// Closing radius applied to each KDE upper-level set.
    #[arg(long)]
    r: f64,
    /// KDE bandwidth or `auto`.
    #[arg(long, default_value = "auto")]
    bandwidth: String,
    /// Report CSV (lambda, candidate_id, h_emp, h_model, d_mu, sup_dev).
    #[arg(long)]
    out_report: Option<PathBuf>,
    /// Mask of the estimate at the first lambda.
    #[arg(long)]
    out_mask: Option<PathBuf>,
    /// Uniform model shape for h_model, d_mu and sup_dev.
    #[arg(long)]
    model_shape: Option<String>,
    #[arg(long, default_value = "", requires = "model_shape")]
    model_params: String,
    /// Build and score the family on the full sample instead of splitting
    /// it into a pilot half and an evaluation half.
    #[arg(long)]
    no_split: bool,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
}

/// Exit code for a failed check.
const EXIT_CHECK_FAILED: u8 = 3;
const EXIT_ERROR: u8 = 2;
const EXIT_NUMERIC: u8 = 4;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Numeric(_) | Error::ChainClosure { .. } => EXIT_NUMERIC,
        _ => EXIT_ERROR,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Hull(a) => hull(a),
        Command::Check(a) => check(a),
        Command::Sample(a) => sample(a),
        Command::Levelset(a) => levelset(a),
        Command::Run(a) => run_config(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn hull(a: HullArgs) -> Result<u8, Error> {
    let pts = PointSet::read_csv(&a.input)?;
    let hull = build_hull(&pts, a.r)?;
    log::info!(
        "{} points, {} arcs in {} chains, {} isolated",
        pts.len(),
        hull.boundary.arcs.len(),
        hull.boundary.chains.len(),
        hull.isolated.len()
    );
    if let Some(p) = &a.out_arcs {
        write_arcs_csv(&hull, p)?;
    }
    if let Some(p) = &a.out_svg {
        render_svg(&SvgObject::Hull { hull: &hull, show_sample: !a.no_sample }, p)?;
    }
    if a.length {
        println!("{}", hull.boundary_length());
    }
    Ok(0)
}

fn check(a: CheckArgs) -> Result<u8, Error> {
    let mask = read_pbm(&a.input)?;
    let pass = match a.test {
        CheckKind::Rconvex => rconvexity_check(&mask, a.r, a.band)?,
        CheckKind::Rolling => rolling_check(&mask, a.r, a.tol.unwrap_or(2.0 * mask.h()))?,
        CheckKind::Ilc => ilc_check(&mask, a.r)?,
    };
    println!("{}", if pass { "pass" } else { "fail" });
    Ok(if pass { 0 } else { EXIT_CHECK_FAILED })
}

fn sample(a: SampleArgs) -> Result<u8, Error> {
    if a.list {
        print!("{}", catalog_text());
        return Ok(0);
    }
    let shape = ShapeSpec::parse(a.shape.as_deref().unwrap_or_default(), &a.params)?;
    let pts = sample_points(&SampleRequest {
        shape,
        n: a.n.unwrap_or_default(),
        seed: a.seed,
    })?;
    match &a.out {
        Some(p) => write_points_csv(p, &pts)?,
        None => {
            let mut s = String::from("x,y\n");
            for p in &pts {
                s.push_str(&format!("{},{}\n", p.x, p.y));
            }
            print!("{s}");
        }
    }
    Ok(0)
}

fn levelset(a: LevelsetArgs) -> Result<u8, Error> {
    let pts = PointSet::read_csv(&a.input)?;
    let (pilot, eval) = if a.no_split { (pts.clone(), pts) } else { split_sample(&pts)? };
    let b = match a.bandwidth.as_str() {
        "auto" => default_bandwidth(&pilot)?,
        s => s
            .parse::<f64>()
            .map_err(|_| Error::Domain(format!("bandwidth must be a number or `auto`, got `{s}`")))?,
    };
    let family = default_family(&pilot, a.r, b)?;
    let lambdas = match (a.lambda, &a.lambda_grid) {
        (Some(l), _) => vec![l],
        (None, Some(g)) => parse_lambda_grid(g)?,
        (None, None) => default_lambda_grid(1.2 * family.kde_max, DEFAULT_SWEEP_STEPS),
    };
    let model = match &a.model_shape {
        Some(name) => Some(DensityModel::uniform(ShapeSpec::parse(name, &a.model_params)?)?),
        None => None,
    };
    let report = lambda_sweep(&eval, model.as_ref(), &family, &lambdas)?;
    for row in &report.rows {
        println!("lambda={} candidate={} h_emp={}", row.lambda, row.candidate_id, row.h_emp);
    }
    if let Some(t) = report.transition_lambda() {
        println!("transition_lambda={t}");
    }
    if let Some(p) = &a.out_report {
        report.write_csv(p)?;
    }
    if let Some(p) = &a.out_mask {
        write_pbm(&family.candidates[report.rows[0].candidate_id], p)?;
    }
    Ok(0)
}

fn run_config(a: RunArgs) -> Result<u8, Error> {
    let cfg = ExperimentConfig::load(&a.config)?;
    let out = run(&cfg)?;
    for f in &out.files {
        println!("{}", f.display());
    }
    Ok(0)
}
