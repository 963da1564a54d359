//! Subcommand implementations. Exit codes: 0 success, 1 input error,
//! 2 solver finished without meeting the convergence tolerances.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use branchhull::dict::{DictKind, DictionarySpec};
use branchhull::imaging::{flatten_image, FlattenOptions};
use branchhull::proj::{project2_with_case, project3_with_case, HyperbolaBranch};
use branchhull::{
    run_phase_grid, solve, Mode, Operator, PMatrixSpec, ProblemInstance, SolverConfig,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::formats;

#[derive(Parser)]
#[command(
    name = "branchhull",
    about = "Convex recovery of two sparse signals from their entrywise product",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Solve one instance from matrix files and write the recovered factors.
    Solve(SolveArgs),
    /// Run the empirical success-rate grid and write its CSV table.
    Phase(PhaseArgs),
    /// Remove a smooth multiplicative distortion from a PGM image.
    Flatten(FlattenArgs),
    /// Project a point onto one measurement's feasible set (debug tool).
    Project(ProjectArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Noiseless,
    Robust,
    Tv,
}

#[derive(Args)]
pub struct SolveArgs {
    /// Dictionary B (L x K matrix file).
    #[arg(long)]
    b: PathBuf,
    /// Dictionary C (L x N matrix file).
    #[arg(long)]
    c: PathBuf,
    /// Measurements y (length-L vector file); signs s are derived from it.
    #[arg(long)]
    y: PathBuf,
    /// Branch signs t (length-L vector file of -1/+1).
    #[arg(long)]
    t: PathBuf,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Slack penalty (robust and tv modes).
    #[arg(long, default_value_t = 1e3)]
    lambda: f64,
    /// ADMM step size.
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long = "iters", default_value_t = 10_000)]
    iters: usize,
    /// Primal and dual residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Image rows for tv mode (default: square, if L is a perfect square).
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long = "out-h")]
    out_h: PathBuf,
    #[arg(long = "out-m")]
    out_m: PathBuf,
    #[arg(long = "out-xi")]
    out_xi: Option<PathBuf>,
}

#[derive(Args)]
pub struct PhaseArgs {
    /// Comma-separated signal sizes N (K = N per cell).
    #[arg(long = "n-list", value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    /// Comma-separated measurement counts L.
    #[arg(long = "l-list", value_delimiter = ',', required = true)]
    l_list: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Success threshold on the distance to the balanced ground truth.
    #[arg(long, default_value_t = 1e-6)]
    threshold: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Reference-line constant recorded in the CSV trailer.
    #[arg(long = "line-c", default_value_t = 0.25)]
    line_c: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct FlattenArgs {
    /// Input image (PGM, P2 or P5).
    #[arg(long = "in")]
    input: PathBuf,
    /// Distortion dictionary: `dct:<n>`, `bessel:<n>` or `file:<path>`.
    #[arg(long)]
    dict: String,
    #[arg(long, default_value_t = 1e3)]
    lambda: f64,
    /// Step size, in the units of the internally normalized measurements.
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    #[arg(long = "iters", default_value_t = 2000)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Recovered image (PGM, P5).
    #[arg(long)]
    out: PathBuf,
    #[arg(long = "out-m")]
    out_m: Option<PathBuf>,
    #[arg(long = "out-xi")]
    out_xi: Option<PathBuf>,
}

#[derive(Args)]
pub struct ProjectArgs {
    /// Measurement value.
    #[arg(long)]
    y: f64,
    /// Optional sign of y; must equal sign(y) when given.
    #[arg(long, allow_hyphen_values = true)]
    s: Option<i32>,
    /// Branch sign (+1 or -1).
    #[arg(long, allow_hyphen_values = true)]
    t: i32,
    /// Comma-separated point: x,w (slack-free) or x,w,xi.
    #[arg(long)]
    point: String,
}

pub fn run(command: Command) -> Result<i32> {
    match command {
        Command::Solve(args) => run_solve(args),
        Command::Phase(args) => run_phase(args),
        Command::Flatten(args) => run_flatten(args),
        Command::Project(args) => run_project(args),
    }
}

fn run_solve(args: SolveArgs) -> Result<i32> {
    let b = formats::read_matrix(&args.b)?;
    let c = formats::read_matrix(&args.c)?;
    let y = formats::read_vector(&args.y)?;
    let t = formats::read_vector(&args.t)?;
    let l = y.len();
    let (mode, p_matrix) = match args.mode {
        ModeArg::Noiseless => (Mode::Noiseless, PMatrixSpec::Identity),
        ModeArg::Robust => (Mode::Robust, PMatrixSpec::Identity),
        ModeArg::Tv => {
            let rows = match args.rows {
                Some(r) => r,
                None => {
                    let r = (l as f64).sqrt().round() as usize;
                    if r * r != l {
                        bail!("L = {l} is not square; pass --rows for tv mode");
                    }
                    r
                }
            };
            if rows == 0 || l % rows != 0 {
                bail!("--rows {rows} does not divide L = {l}");
            }
            (Mode::Tv, PMatrixSpec::TvOfB { rows, cols: l / rows })
        }
    };
    let instance = ProblemInstance::new(Operator::Dense(b), Operator::Dense(c), y, t, None)?;
    let config = SolverConfig {
        mode,
        lambda: args.lambda,
        rho: args.rho,
        max_iters: args.iters,
        tol_primal: args.tol,
        tol_dual: args.tol,
        p_matrix,
    };
    let sol = solve(&instance, &config)?;
    formats::write_vector(&args.out_h, &sol.h_hat)?;
    formats::write_vector(&args.out_m, &sol.m_hat)?;
    if let Some(path) = &args.out_xi {
        formats::write_vector(path, &sol.xi_hat)?;
    }
    println!("objective={:.16e}", sol.objective);
    println!("iters={}", sol.iters_used);
    println!("primal_residual={:.16e}", sol.primal_residual);
    println!("dual_residual={:.16e}", sol.dual_residual);
    println!("converged={}", sol.converged);
    Ok(if sol.converged { 0 } else { 2 })
}

fn run_phase(args: PhaseArgs) -> Result<i32> {
    let cells = run_phase_grid(
        &args.n_list,
        &args.l_list,
        args.trials,
        args.rho,
        args.threshold,
        args.seed,
    )?;
    formats::write_phase_csv(&args.out, &cells, args.line_c)?;
    for cell in &cells {
        println!(
            "N={} L={} rate={:.3}",
            cell.n,
            cell.l,
            cell.success_rate()
        );
    }
    Ok(0)
}

fn parse_dict(spec: &str) -> Result<DictionarySpec> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("dictionary spec {spec:?} is not kind:value"))?;
    let kind = match kind {
        "dct" => DictKind::PartialDct {
            n_cols: rest.parse().context("bad dct column count")?,
            include_ones_column: true,
        },
        "bessel" => DictKind::Bessel {
            n_cols: rest.parse().context("bad bessel column count")?,
            include_ones_column: true,
        },
        "file" => DictKind::Explicit(formats::read_matrix(rest.as_ref())?),
        other => bail!("unknown dictionary kind {other:?}"),
    };
    Ok(DictionarySpec::normalized(kind))
}

fn run_flatten(args: FlattenArgs) -> Result<i32> {
    let img = formats::read_pgm(&args.input)?;
    let mut opts = FlattenOptions::new(parse_dict(&args.dict)?);
    opts.lambda = args.lambda;
    opts.rho = args.rho;
    opts.max_iters = args.iters;
    opts.seed = args.seed;
    let out = flatten_image(&img, &opts)?;
    formats::write_pgm(&args.out, &out.recovered)?;
    if let Some(path) = &args.out_m {
        formats::write_vector(path, &out.m_hat)?;
    }
    if let Some(path) = &args.out_xi {
        formats::write_vector(path, &out.xi_hat)?;
    }
    println!("objective={:.16e}", out.solution.objective);
    println!("iters={}", out.solution.iters_used);
    println!("converged={}", out.solution.converged);
    Ok(0)
}

fn run_project(args: ProjectArgs) -> Result<i32> {
    if let Some(s) = args.s {
        let expect = if args.y == 0.0 {
            0
        } else if args.y > 0.0 {
            1
        } else {
            -1
        };
        if s != expect {
            bail!("--s {s} does not match sign(y) = {expect}");
        }
    }
    let branch = HyperbolaBranch::new(args.y, args.t as f64)?;
    let coords: Vec<f64> = args
        .point
        .split(',')
        .map(|v| v.trim().parse::<f64>().context("bad point coordinate"))
        .collect::<Result<_>>()?;
    match coords.as_slice() {
        [x, w] => {
            let ((px, pw), case) = project2_with_case((*x, *w), &branch)?;
            println!("projection=({px:.6}, {pw:.6})");
            println!("case={}", case.number());
        }
        [x, w, xi] => {
            let ((px, pw, pxi), case) = project3_with_case((*x, *w, *xi), &branch)?;
            println!("projection=({px:.6}, {pw:.6}, {pxi:.6})");
            println!("case={}", case.number());
        }
        _ => bail!("--point needs 2 or 3 comma-separated coordinates"),
    }
    Ok(0)
}
