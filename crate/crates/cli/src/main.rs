// `!(x > 0.0)` guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use tpms_oh::mesher::{build_octagon, check_cell, check_octagon, extend_cell, set_worker_limit, ExportFormat};
use tpms_oh::periods::solve_rho;
use tpms_oh::solver::{
    balance_solve, h_family, h_family_valid_branch, intersection_locus, isosum_beta_max, isosum_point,
    nondegeneracy_check, solve_t, theta_star, traizet_locus, write_locus_csv, LocusPoint,
};
use tpms_oh::verify::run_all;
use tpms_oh::weierstrass_data::{simplify, SurfaceParams};
use tpms_oh::Error;

mod config;

#[derive(Parser, Debug)]
#[command(name = "tpms-oh", version, about = "Period problem, degenerate limits and meshes of oH surfaces")]
struct Cli {
    /// Flat key = value file; command-line flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (default: TPMS_OH_JOBS, else all cores). Output does not depend on it.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file (default: stdout). Required for `mesh`.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Largest accepted residual of any solved point; larger ones fail the run.
    #[arg(long, global = true, default_value_t = 1e-10)]
    max_residual: f64,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
#[command(args_override_self = true)]
enum Cmd {
    /// Solve Q(a, b; t) = 0 for t.
    #[command(args_override_self = true)]
    SolveT {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
    },
    /// Intersection-limit locus tau(alpha) as CSV.
    #[command(args_override_self = true)]
    LocusIntersection {
        #[arg(long, default_value_t = 0.1)]
        alpha_min: f64,
        #[arg(long, default_value_t = 6.0)]
        alpha_max: f64,
        #[arg(long, default_value_t = 200)]
        n: usize,
    },
    /// Traizet-limit locus tau(beta) as CSV.
    #[command(args_override_self = true)]
    LocusTraizet {
        #[arg(long, default_value_t = 0.1)]
        beta_min: f64,
        #[arg(long, default_value_t = 6.0)]
        beta_max: f64,
        #[arg(long, default_value_t = 200)]
        n: usize,
    },
    /// Diagonal balance configuration on the rhombic torus of angle theta.
    #[command(args_override_self = true)]
    Balance {
        #[arg(long)]
        theta: f64,
    },
    /// Angle at which the x = 1/2 balance configuration degenerates.
    #[command(args_override_self = true)]
    ThetaStar,
    /// One point of the explicit H-family curve, or its admissible t-range when --t is absent.
    #[command(args_override_self = true)]
    HFamily {
        #[arg(long)]
        t: Option<f64>,
    },
    /// Roots tau(beta) along alpha + beta = epsilon as CSV.
    #[command(args_override_self = true)]
    Isosum {
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 200)]
        n: usize,
        /// Upper end of the beta range (default: largest solvable, capped at 1e3).
        #[arg(long)]
        beta_max: Option<f64>,
    },
    /// Fundamental octagon (or the 8-copy symmetry cell) as OBJ or CSV points.
    #[command(args_override_self = true)]
    Mesh {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        /// Default: solved from (a, b).
        #[arg(long)]
        t: Option<f64>,
        /// Default: solved from (a, b, t).
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long, value_enum, default_value_t = Format::Obj)]
        format: Format,
        /// Export the symmetry cell instead of one octagon.
        #[arg(long)]
        cell: bool,
    },
    /// Run the acceptance suite; writes a JSON report and the locus CSVs into --out-dir.
    #[command(args_override_self = true)]
    Verify {
        #[arg(long, default_value = "verify-out")]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Obj,
    Csv,
}

/// Failure classes mapped onto exit codes.
enum Fail {
    Config(String),
    Solver(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. } | Error::Ordering(_) => Fail::Config(e.to_string()),
            _ => Fail::Solver(e.to_string()),
        }
    }
}

impl From<io::Error> for Fail {
    fn from(e: io::Error) -> Self {
        Fail::Solver(format!("i/o error: {e}"))
    }
}

type Params = Vec<(&'static str, String)>;

fn provenance(command: &str, params: &Params, max_residual: f64) -> Vec<String> {
    let mut h = vec![format!("tpms-oh {} {command}", env!("CARGO_PKG_VERSION"))];
    h.extend(params.iter().map(|(k, v)| format!("{k}={v}")));
    h.push(format!("max_residual={max_residual:e}"));
    h
}

fn sink(output: &Option<PathBuf>) -> Result<Box<dyn Write>, Fail> {
    Ok(match output {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(cli: &Cli, command: &str, params: &Params, result: &T) -> Result<(), Fail> {
    let doc = json!({
        "provenance": provenance(command, params, cli.max_residual),
        "result": result,
    });
    let mut w = sink(&cli.output)?;
    serde_json::to_writer_pretty(&mut w, &doc).map_err(|e| Fail::Solver(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn check_residual(what: &str, residual: f64, max: f64) -> Result<(), Fail> {
    if residual.is_finite() && residual <= max {
        Ok(())
    } else {
        Err(Fail::Solver(format!("{what}: residual {residual:e} exceeds max_residual {max:e}")))
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, Fail> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) || n < 2 {
        return Err(Fail::Config(format!("need min < max and n >= 2 (got [{lo}, {hi}], n = {n})")));
    }
    Ok((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect())
}

/// Solves every sample in parallel; rows keep the input order.
fn solve_rows(xs: &[f64], f: impl Fn(f64) -> tpms_oh::Result<LocusPoint> + Sync) -> Result<Vec<LocusPoint>, Fail> {
    xs.par_iter()
        .map(|&x| f(x).map_err(|e| (x, e)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|(x, e)| Fail::from(e).at(x))
}

impl Fail {
    fn at(self, x: f64) -> Self {
        match self {
            Fail::Config(m) => Fail::Config(format!("at {x}: {m}")),
            Fail::Solver(m) => Fail::Solver(format!("at {x}: {m}")),
        }
    }
}

fn write_locus(
    cli: &Cli,
    command: &str,
    params: &Params,
    names: (&str, &str),
    rows: &[LocusPoint],
) -> Result<(), Fail> {
    for r in rows {
        check_residual(&format!("{} = {}", names.0, r.primary_param), r.residual, cli.max_residual)?;
    }
    let mut w = sink(&cli.output)?;
    write_locus_csv(&mut w, &provenance(command, params, cli.max_residual), names, rows)?;
    w.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Fail> {
    if !(cli.max_residual > 0.0) {
        return Err(Fail::Config(format!("max_residual must be positive (got {})", cli.max_residual)));
    }
    match &cli.command {
        Cmd::SolveT { a, b } => {
            let p = solve_t(*a, *b)?;
            check_residual("solve-t", p.residual, cli.max_residual)?;
            write_json(cli, "solve-t", &vec![("a", a.to_string()), ("b", b.to_string())], &p)
        }
        Cmd::LocusIntersection { alpha_min, alpha_max, n } => {
            let rows = solve_rows(&linspace(*alpha_min, *alpha_max, *n)?, intersection_locus)?;
            let params =
                vec![("alpha_min", alpha_min.to_string()), ("alpha_max", alpha_max.to_string()), ("n", n.to_string())];
            write_locus(cli, "locus-intersection", &params, ("alpha", "tau"), &rows)
        }
        Cmd::LocusTraizet { beta_min, beta_max, n } => {
            let rows = solve_rows(&linspace(*beta_min, *beta_max, *n)?, traizet_locus)?;
            let params =
                vec![("beta_min", beta_min.to_string()), ("beta_max", beta_max.to_string()), ("n", n.to_string())];
            write_locus(cli, "locus-traizet", &params, ("beta", "tau"), &rows)
        }
        Cmd::Balance { theta } => {
            let cfg = balance_solve(*theta)?;
            check_residual("balance", cfg.residual, cli.max_residual)?;
            let nd = nondegeneracy_check(&cfg)?;
            write_json(
                cli,
                "balance",
                &vec![("theta", theta.to_string())],
                &json!({ "config": cfg, "nondegeneracy": nd }),
            )
        }
        Cmd::ThetaStar => {
            let th = theta_star()?;
            write_json(cli, "theta-star", &vec![], &json!({ "theta_star": th, "degrees": th.to_degrees() }))
        }
        Cmd::HFamily { t: None } => write_json(cli, "h-family", &vec![], &h_family_valid_branch()),
        Cmd::HFamily { t: Some(t) } => {
            let h = h_family(*t)?;
            check_residual("h-family Q", h.q.abs(), cli.max_residual)?;
            write_json(cli, "h-family", &vec![("t", t.to_string())], &h)
        }
        Cmd::Isosum { epsilon, n, beta_max } => {
            if !(*epsilon > 0.0) {
                return Err(Fail::Config(format!("epsilon must be positive (got {epsilon})")));
            }
            let hi = match beta_max {
                Some(b) => *b,
                None => isosum_beta_max(*epsilon)?,
            };
            let rows = solve_rows(&linspace(0.5 * epsilon, hi, *n)?, |beta| isosum_point(*epsilon, beta))?;
            let params = vec![("epsilon", epsilon.to_string()), ("beta_max", hi.to_string()), ("n", n.to_string())];
            write_locus(cli, "isosum", &params, ("beta", "tau"), &rows)
        }
        Cmd::Mesh { a, b, t, rho, resolution, format, cell } => {
            mesh(cli, *a, *b, *t, *rho, *resolution, *format, *cell)
        }
        Cmd::Verify { out_dir } => verify(cli, out_dir),
    }
}

#[allow(clippy::too_many_arguments)]
fn mesh(
    cli: &Cli,
    a: f64,
    b: f64,
    t: Option<f64>,
    rho: Option<f64>,
    resolution: usize,
    format: Format,
    cell: bool,
) -> Result<(), Fail> {
    let path = cli.output.as_ref().ok_or_else(|| Fail::Config("mesh needs --output".into()))?;
    let t = match t {
        Some(t) => t,
        None if a == b => return Err(Fail::Config("a = b closes for every t; give --t".into())),
        None => solve_t(a, b)?.solved_param,
    };
    let mut p = SurfaceParams::new(a, b, t, 1.0)?;
    p.rho = match rho {
        Some(r) => r,
        None => solve_rho(&simplify(&p)?)?,
    };
    let m = build_octagon(&p, resolution)?;
    let report = check_octagon(&m)?;
    let params: Params = vec![
        ("a", a.to_string()),
        ("b", b.to_string()),
        ("t", t.to_string()),
        ("rho", p.rho.to_string()),
        ("resolution", resolution.to_string()),
        ("cell", cell.to_string()),
    ];
    let header = provenance("mesh", &params, cli.max_residual);
    let fmt = match format {
        Format::Obj => ExportFormat::Obj,
        Format::Csv => ExportFormat::CsvPoints,
    };
    let summary = if cell {
        let c = extend_cell(&m);
        let cr = check_cell(&c);
        c.to_trimesh().export(fmt, path, &header)?;
        json!({ "octagon": report, "cell": cr, "lattice": c.lattice })
    } else {
        m.to_trimesh().export(fmt, path, &header)?;
        json!({ "octagon": report })
    };
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &summary).map_err(|e| Fail::Solver(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn verify(cli: &Cli, out_dir: &Path) -> Result<(), Fail> {
    std::fs::create_dir_all(out_dir)?;
    let reports = run_all(out_dir);
    let json_path = out_dir.join("verify_report.json");
    let mut f = BufWriter::new(File::create(&json_path)?);
    serde_json::to_writer_pretty(&mut f, &reports).map_err(|e| Fail::Solver(e.to_string()))?;
    f.flush()?;

    let mut w = sink(&cli.output)?;
    for r in &reports {
        writeln!(w, "{}", r.summary_line())?;
        for c in &r.checks {
            let mark = if c.pass { "ok  " } else { "FAIL" };
            writeln!(w, "    {mark} {:<64} {:>10.3e} <= {:.1e}", c.name, c.value, c.tol)?;
        }
    }
    let failed: Vec<usize> = reports.iter().filter(|r| !r.pass()).map(|r| r.id).collect();
    writeln!(w, "report: {}", json_path.display())?;
    w.flush()?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Fail::Solver(format!("failed criteria: {failed:?}")))
    }
}

fn init_pool(jobs: Option<usize>) -> Result<(), Fail> {
    let jobs = match jobs {
        Some(j) => Some(j),
        None => match std::env::var("TPMS_OH_JOBS") {
            Ok(s) => {
                Some(s.trim().parse().map_err(|_| Fail::Config(format!("TPMS_OH_JOBS must be an integer, got {s}")))?)
            }
            Err(_) => None,
        },
    };
    if let Some(j) = jobs {
        if j == 0 {
            return Err(Fail::Config("jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().map_err(|e| Fail::Config(e.to_string()))?;
        set_worker_limit(j);
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = match config::merge(&Cli::command(), std::env::args().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    // clap exits with status 2 on invalid flags
    let cli = Cli::parse_from(args);
    match init_pool(cli.jobs).and_then(|()| run(&cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Config(msg)) => {
            eprintln!("invalid configuration: {msg}");
            ExitCode::from(2)
        }
        Err(Fail::Solver(msg)) => {
            eprintln!("solver failure: {msg}");
            ExitCode::from(1)
        }
    }
}
