//! `dompole` — dominant poles of descriptor systems from the command line.
//!
//! Subcommands: `solve` (subspace iteration), `oracle` (dense ground truth),
//! `verify` (solve vs. oracle agreement), `sweep` (σ-max frequency response
//! data), `reduce` (modal reduced-order model with error bound).
//!
//! Exit codes: 0 success/converged, 1 hard error, 2 not converged,
//! 3 verification mismatch.

mod output;
mod recipe;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dompole::framework::{oracle_dominant_poles, solve, SolveOutcome, SolverConfig};
use dompole::system::{generate_random_system, load_system, DescriptorSystem, SystemPaths};
use dompole::transfer::{frequency_sweep, modal_error_bound, modal_reduce, PoleData};
use num_complex::Complex64;
use recipe::{parse_complex, parse_generator_spec, GridSpec};

const DEFAULT_DENSE_LIMIT: usize = 2000;

#[derive(Parser)]
#[command(name = "dompole", version, about = "Dominant poles of descriptor systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the subspace iteration and write poles.csv/poles.json/report.json.
    Solve(SolveArgs),
    /// Dense-eigendecomposition ground truth; writes oracle.csv/oracle.json.
    Oracle(CommonArgs),
    /// Run solve and oracle, then compare the returned pole sets.
    Verify(SolveArgs),
    /// σ-max sweep data (sweep.csv, and sweep_red.csv/marks.csv with --kappa).
    Sweep(SweepArgs),
    /// Modal reduced-order model with its error bound (modal.json).
    Reduce(ReduceArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Matrix Market file for A (the system source, together with --mat-*).
    #[arg(long, value_name = "A.mtx", conflicts_with = "generate")]
    system: Option<PathBuf>,

    /// Matrix Market file for E (defaults to identity).
    #[arg(long, value_name = "E.mtx")]
    mat_e: Option<PathBuf>,

    /// Matrix Market file for B (defaults to a single all-ones column).
    #[arg(long, value_name = "B.mtx")]
    mat_b: Option<PathBuf>,

    /// Matrix Market file for C (defaults to a single all-ones row).
    #[arg(long, value_name = "C.mtx")]
    mat_c: Option<PathBuf>,

    /// Matrix Market file for D (defaults to zero).
    #[arg(long, value_name = "D.mtx")]
    mat_d: Option<PathBuf>,

    /// Generator recipe, e.g. "n=200,m=2,p=2,poles=-0.05+2i;-0.1+30i".
    #[arg(long, value_name = "RECIPE")]
    generate: Option<String>,

    /// Seed for --generate.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Number of dominant poles.
    #[arg(long, default_value_t = 5)]
    kappa: usize,

    /// Conjugate-pair handling: auto (from the data), on, or off.
    #[arg(long, value_name = "auto|on|off", default_value = "auto")]
    real_mode: String,

    /// Output directory (created if absent).
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Interpolation parameter (chain length per point).
    #[arg(long, default_value_t = 1)]
    q: usize,

    /// Residual tolerance.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,

    /// Maximum number of subspace passes.
    #[arg(long, default_value_t = 30)]
    max_iter: usize,

    /// File of initial interpolation points, one "re im" pair per line.
    #[arg(long, value_name = "FILE")]
    init_points: Option<PathBuf>,

    /// Number of seed poles interpolated by the bootstrap initialization.
    #[arg(long, default_value_t = 10)]
    init_count: usize,

    /// Subspace dimension cap.
    #[arg(long, default_value_t = 600)]
    max_subspace_dim: usize,

    /// Enforce q >= 2 on rectangular systems instead of warning.
    #[arg(long)]
    strict_q: bool,

    /// One-sided variant stub (not implemented; errors out).
    #[arg(long)]
    one_sided: bool,

    /// Grid "lo:hi:count:log|lin" for the bootstrap σ-max sweep.
    #[arg(long, value_name = "GRID")]
    grid: Option<String>,

    /// Write measured wall-clock timings into report.json (breaks
    /// byte-for-byte determinism of the report across runs).
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Clone)]
struct SweepArgs {
    #[command(flatten)]
    solve: SolveArgs,

    /// Also run the solver and write marks.csv plus sweep_red.csv.
    #[arg(long)]
    with_solve: bool,
}

#[derive(Args, Clone)]
struct ReduceArgs {
    #[command(flatten)]
    solve: SolveArgs,

    /// Number of poles retained in the modal model (default: kappa).
    #[arg(long)]
    retain: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            1
        }
    };
    ExitCode::from(code)
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Oracle(args) => cmd_oracle(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Reduce(args) => cmd_reduce(&args),
    }
}

fn dense_limit() -> usize {
    match std::env::var("DOMPOLE_DENSE_LIMIT") {
        Ok(text) => text.parse().unwrap_or_else(|_| {
            log::warn!("ignoring unparsable DOMPOLE_DENSE_LIMIT '{text}'");
            DEFAULT_DENSE_LIMIT
        }),
        Err(_) => DEFAULT_DENSE_LIMIT,
    }
}

fn load_or_generate(args: &CommonArgs) -> Result<DescriptorSystem, String> {
    match (&args.system, &args.generate) {
        (Some(a_path), None) => {
            let paths = SystemPaths {
                a: a_path.clone(),
                e: args.mat_e.clone(),
                b: args.mat_b.clone(),
                c: args.mat_c.clone(),
                d: args.mat_d.clone(),
                name: None,
            };
            let (system, metadata) = load_system(&paths).map_err(|e| e.to_string())?;
            log::info!(
                "loaded {} (n = {}, m = {}, p = {}, nnz A = {})",
                metadata.name,
                metadata.n,
                metadata.m,
                metadata.p,
                metadata.nnz_a
            );
            Ok(system)
        }
        (None, Some(recipe_text)) => {
            let spec = parse_generator_spec(recipe_text)?;
            generate_random_system(spec.n, spec.m, spec.p, args.seed, &spec.recipe)
                .map_err(|e| e.to_string())
        }
        (None, None) => Err("exactly one of --system or --generate is required".into()),
        (Some(_), Some(_)) => unreachable!("clap rejects this combination"),
    }
}

fn resolve_real_mode(setting: &str, system: &DescriptorSystem) -> Result<bool, String> {
    match setting {
        "auto" => Ok(system.is_real()),
        "on" => Ok(true),
        "off" => Ok(false),
        other => Err(format!("--real-mode must be auto, on, or off, got '{other}'")),
    }
}

fn read_init_points(path: &Path) -> Result<Vec<Complex64>, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut points = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() == 2 {
            let re: f64 = parts[0].parse().map_err(|_| format!("bad point '{line}'"))?;
            let im: f64 = parts[1].parse().map_err(|_| format!("bad point '{line}'"))?;
            points.push(Complex64::new(re, im));
        } else if parts.len() == 1 {
            points.push(parse_complex(parts[0])?);
        } else {
            return Err(format!("bad init point line '{line}'"));
        }
    }
    Ok(points)
}

fn build_config(args: &SolveArgs, system: &DescriptorSystem) -> Result<SolverConfig, String> {
    let mut config = SolverConfig {
        kappa: args.common.kappa,
        q: args.q,
        tol: args.tol,
        max_iter: args.max_iter,
        init_count: args.init_count,
        max_subspace_dim: args.max_subspace_dim,
        real_mode: resolve_real_mode(&args.common.real_mode, system)?,
        strict_q: args.strict_q,
        one_sided: args.one_sided,
        ..Default::default()
    };
    if let Some(path) = &args.init_points {
        config.init_points = Some(read_init_points(path)?);
    }
    if let Some(grid_text) = &args.grid {
        let grid = GridSpec::parse(grid_text)?;
        if !grid.logarithmic {
            log::warn!("initialization sweep grids are logarithmic; using log spacing");
        }
        config.init_grid = (grid.lo.max(f64::MIN_POSITIVE), grid.hi, grid.count);
    }
    Ok(config)
}

fn ensure_out_dir(dir: &Path) -> Result<(), String> {
    std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))
}

fn run_solver(args: &SolveArgs) -> Result<(DescriptorSystem, SolveOutcome), String> {
    let system = load_or_generate(&args.common)?;
    let config = build_config(args, &system)?;
    let outcome = solve(&system, &config).map_err(|e| e.to_string())?;
    Ok((system, outcome))
}

fn write_solve_outputs(args: &SolveArgs, outcome: &SolveOutcome) -> Result<(), String> {
    let dir = &args.common.out;
    ensure_out_dir(dir)?;
    output::write_text(&dir.join("poles.csv"), &output::estimates_csv(&outcome.estimates))?;
    output::write_text(
        &dir.join("poles.json"),
        &serde_json::to_string_pretty(&output::estimates_json(&outcome.estimates)).unwrap(),
    )?;
    output::write_text(
        &dir.join("report.json"),
        &serde_json::to_string_pretty(&output::report_json(&outcome.report, args.timings))
            .unwrap(),
    )?;
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> Result<u8, String> {
    let (_, outcome) = run_solver(args)?;
    write_solve_outputs(args, &outcome)?;
    let block: Vec<(Complex64, f64)> = outcome
        .estimates
        .iter()
        .map(|e| (e.lambda, e.dominance))
        .collect();
    output::print_pole_block("dominant pole estimates (dominance):", &block);
    output::print_counters(&outcome.report);
    for warning in &outcome.report.warnings {
        eprintln!("warning: {warning}");
    }
    Ok(if outcome.report.converged { 0 } else { 2 })
}

fn cmd_oracle(args: &CommonArgs) -> Result<u8, String> {
    let system = load_or_generate(args)?;
    let real_mode = resolve_real_mode(&args.real_mode, &system)?;
    let poles = oracle_dominant_poles(&system, args.kappa, real_mode, dense_limit())
        .map_err(|e| e.to_string())?;
    ensure_out_dir(&args.out)?;
    output::write_text(&args.out.join("oracle.csv"), &output::poles_csv(&poles))?;
    output::write_text(
        &args.out.join("oracle.json"),
        &serde_json::to_string_pretty(&output::poles_json(&poles)).unwrap(),
    )?;
    let block: Vec<(Complex64, f64)> = poles.iter().map(|p| (p.lambda, p.dominance)).collect();
    output::print_pole_block("oracle dominant poles (dominance):", &block);
    Ok(0)
}

fn cmd_verify(args: &SolveArgs) -> Result<u8, String> {
    let (system, outcome) = run_solver(args)?;
    write_solve_outputs(args, &outcome)?;
    let real_mode = resolve_real_mode(&args.common.real_mode, &system)?;
    let oracle = oracle_dominant_poles(&system, args.common.kappa, real_mode, dense_limit())
        .map_err(|e| e.to_string())?;

    let mut all_matched = outcome.estimates.len() >= oracle.len();
    println!("verification against the dense oracle:");
    let mut rows = Vec::new();
    for target in &oracle {
        let best = outcome
            .estimates
            .iter()
            .map(|e| (e.lambda, (e.lambda - target.lambda).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        let (found, dist) = match best {
            Some(pair) => pair,
            None => (Complex64::new(f64::NAN, f64::NAN), f64::INFINITY),
        };
        let tol = 1e-6 * (1.0 + target.lambda.norm());
        let ok = dist <= tol;
        all_matched &= ok;
        println!(
            "  oracle {:>12.6e}{:+.6e}i   solver {:>12.6e}{:+.6e}i   dist {:.3e}   {}",
            target.lambda.re,
            target.lambda.im,
            found.re,
            found.im,
            dist,
            if ok { "ok" } else { "MISMATCH" }
        );
        rows.push(serde_json::json!({
            "oracle_re": target.lambda.re,
            "oracle_im": target.lambda.im,
            "solver_re": found.re,
            "solver_im": found.im,
            "distance": dist,
            "matched": ok,
        }));
    }
    ensure_out_dir(&args.common.out)?;
    output::write_text(
        &args.common.out.join("verify.json"),
        &serde_json::to_string_pretty(&serde_json::json!({
            "all_matched": all_matched,
            "pairs": rows,
        }))
        .unwrap(),
    )?;
    Ok(if all_matched { 0 } else { 3 })
}

fn cmd_sweep(args: &SweepArgs) -> Result<u8, String> {
    let system = load_or_generate(&args.solve.common)?;
    // for this command --grid is the output grid, not the bootstrap grid
    let grid_text = args.solve.grid.as_deref().unwrap_or("1e-2:1e4:200:log");
    let grid = GridSpec::parse(grid_text)?;
    let omegas = grid.points();
    let dir = &args.solve.common.out;
    ensure_out_dir(dir)?;

    let sweep = frequency_sweep(&system, &omegas).map_err(|e| e.to_string())?;
    output::write_text(&dir.join("sweep.csv"), &sweep.to_csv())?;

    if args.with_solve {
        let mut sub_args = args.solve.clone();
        sub_args.grid = None;
        let config = build_config(&sub_args, &system)?;
        let outcome = solve(&system, &config).map_err(|e| e.to_string())?;
        output::write_text(&dir.join("marks.csv"), &output::marks_csv(&outcome.estimates))?;
        let red_sweep = frequency_sweep(&outcome.reduced, &omegas).map_err(|e| e.to_string())?;
        output::write_text(&dir.join("sweep_red.csv"), &red_sweep.to_csv())?;
        output::print_counters(&outcome.report);
        if !outcome.report.converged {
            return Ok(2);
        }
    }
    Ok(0)
}

fn cmd_reduce(args: &ReduceArgs) -> Result<u8, String> {
    let (system, outcome) = run_solver(&args.solve)?;
    if !outcome.report.converged {
        eprintln!("solver did not converge; no modal model written");
        return Ok(2);
    }
    let retain = args.retain.unwrap_or(args.solve.common.kappa);
    let real_mode = resolve_real_mode(&args.solve.common.real_mode, &system)?;
    let (head, tail, covers_all) =
        modal_tail_bound_sources(&system, &outcome, retain, real_mode, dense_limit())
            .map_err(|e| e.to_string())?;
    let model = modal_reduce(&head, system.d().clone()).map_err(|e| e.to_string())?;
    let bound = modal_error_bound(&tail).map_err(|e| e.to_string())?;

    ensure_out_dir(&args.solve.common.out)?;
    output::write_text(
        &args.solve.common.out.join("modal.json"),
        &serde_json::to_string_pretty(&output::modal_json(
            &model.poles,
            &model.constant,
            bound,
            covers_all,
        ))
        .unwrap(),
    )?;
    println!(
        "modal model with {} poles written; error bound {:.6e}{}",
        model.order(),
        bound,
        if covers_all { "" } else { " (computed poles only)" }
    );
    Ok(0)
}

/// Retained poles come from the solver run; the bound's tail comes from the
/// dense oracle when the system is small enough (covering every dropped
/// pole), otherwise only from the dropped computed poles, with the lifted
/// left and right eigenvectors of the final reduction supplying the residue
/// factors.
#[allow(clippy::type_complexity)]
fn modal_tail_bound_sources(
    system: &DescriptorSystem,
    outcome: &SolveOutcome,
    retain: usize,
    real_mode: bool,
    limit: usize,
) -> dompole::Result<(Vec<PoleData>, Vec<PoleData>, bool)> {
    if system.order() <= limit {
        let all = oracle_dominant_poles(system, usize::MAX, real_mode, limit)?;
        let head: Vec<PoleData> = all.iter().take(retain).cloned().collect();
        let tail: Vec<PoleData> = all.iter().skip(retain).cloned().collect();
        Ok((head, tail, true))
    } else {
        let reduced_poles = dompole::framework::reduced_dominant_poles(
            &outcome.reduced,
            outcome.estimates.len(),
            real_mode,
        )?;
        let v_mat = outcome.pair.v().columns();
        let w_mat = outcome.pair.w().columns();
        let mut lifted = Vec::with_capacity(reduced_poles.len());
        for rp in &reduced_poles {
            let v_full = v_mat * &rp.v;
            let w_full = w_mat * &rp.w;
            lifted.push(dompole::transfer::pole_data_from_eigentriple(
                system, rp.lambda, &v_full, &w_full,
            )?);
        }
        let head: Vec<PoleData> = lifted.iter().take(retain).cloned().collect();
        let tail: Vec<PoleData> = lifted.iter().skip(retain).cloned().collect();
        Ok((head, tail, false))
    }
}
