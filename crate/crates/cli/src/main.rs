use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use biquad::bounds::is_diagonally_dominated;
use biquad::experiments::{self, COVARIANCE_SHAPES, RANDOM_BOUNDS_SHAPES};
use biquad::io::{self, TensorFormat};
use biquad::oracle::{grid_max, grid_min, GridSpec};
use biquad::stats::{covariance_tensor, simulate, verify_psd, SampleBatch, SampleDistribution};
use biquad::structured::{classify_m_tensor, decompose_b0, sos_certificate};
use biquad::{gershgorin_intervals, BiquadError, BiquadraticTensor, ExtremeMode, MultiStartReport, SolverConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "biquad", version, about = "M-eigenvalues and structure of biquadratic tensors")]
struct Cli {
    /// Print machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Number of random starts.
    #[arg(long, default_value_t = 20)]
    starts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    k_max: usize,
    /// Run starts one after another instead of on the thread pool.
    #[arg(long)]
    sequential: bool,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig {
            n_starts: self.starts,
            seed: self.seed,
            k_max: self.k_max,
            parallel: !self.sequential,
            ..SolverConfig::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Min,
    Max,
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    #[value(name = "7.1")]
    Elasticity,
    #[value(name = "7.2-bounds")]
    RandomBounds,
    #[value(name = "7.3")]
    Covariance,
}

#[derive(Subcommand)]
enum Command {
    /// Extreme M-eigenvalue by multi-start Riemannian LBFGS.
    Eig {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "min")]
        mode: Mode,
        #[command(flatten)]
        solver: SolverArgs,
        /// Cross-check against the brute-force grid (m, n <= 4).
        #[arg(long)]
        oracle: bool,
        /// Write the best run's iteration trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Report wall-clock times (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Gershgorin-type inclusion intervals.
    Bounds {
        #[arg(long)]
        input: PathBuf,
    },
    /// Z, B0, B and M membership.
    Classify {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Nested decomposition of a symmetric B0 tensor.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        /// Write the decomposition as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sum-of-squares certificate from the square unfolding.
    Sos {
        #[arg(long)]
        input: PathBuf,
    },
    /// Covariance tensor of matrix samples and its PSD check.
    Cov {
        /// CSV batch: `m,n` header, dimension record, one flattened sample per row.
        #[arg(long, conflicts_with = "simulate", required_unless_present = "simulate")]
        samples: Option<PathBuf>,
        /// Simulate T samples of size m x n.
        #[arg(long, num_args = 3, value_names = ["T", "M", "N"])]
        simulate: Option<Vec<usize>>,
        #[arg(long, default_value = "uniform:0,10")]
        dist: String,
        /// Write the covariance tensor.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Regenerate one of the reference experiments.
    Reproduce {
        #[arg(value_enum)]
        example: Example,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for the report JSON and trace CSVs.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Random tensors per shape (7.2-bounds).
        #[arg(long, default_value_t = 100)]
        repeats: usize,
        /// Samples per covariance estimate (7.3).
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
}

/// Failure carrying the exit code and an optional partial report.
struct Failure {
    code: u8,
    message: String,
    partial: Option<Value>,
}

impl From<BiquadError> for Failure {
    fn from(e: BiquadError) -> Self {
        let code = match &e {
            BiquadError::Parse(_)
            | BiquadError::InvalidDimensions { .. }
            | BiquadError::NonFinite(_)
            | BiquadError::IndexOutOfRange { .. } => 2,
            BiquadError::NoConvergence { .. } => 3,
            BiquadError::Precondition(_)
            | BiquadError::OracleTooLarge { .. }
            | BiquadError::InvalidConfig(_)
            | BiquadError::TooFewSamples { .. }
            | BiquadError::DimensionMismatch { .. } => 4,
            _ => 1,
        };
        let partial = match &e {
            BiquadError::NoConvergence { best_lambda, trace } => Some(json!({
                "converged": false,
                "best_lambda": best_lambda,
                "iterations": trace.iterations,
                "stop_reason": trace.stop_reason,
            })),
            _ => None,
        };
        Failure { code, message: e.to_string(), partial }
    }
}

type CmdResult = Result<Output, Failure>;

/// A report in both renderings.
struct Output {
    table: String,
    json: Value,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("json"));
            } else {
                print!("{}", out.table);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            if let Some(p) = f.partial {
                if cli.json {
                    println!("{}", serde_json::to_string_pretty(&p).expect("json"));
                } else {
                    println!("partial report: {p}");
                }
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Eig { input, mode, solver, oracle, trace, timing } => {
            eig(&input, mode, &solver.config(), oracle, trace.as_deref(), timing)
        }
        Command::Bounds { input } => bounds(&io::read_tensor(&input)?),
        Command::Classify { input, solver } => classify(&io::read_tensor(&input)?, &solver.config()),
        Command::Decompose { input, out } => decompose(&io::read_tensor(&input)?, out.as_deref()),
        Command::Sos { input } => sos(&io::read_tensor(&input)?),
        Command::Cov { samples, simulate: sim, dist, out, solver } => {
            let batch = match (samples, sim) {
                (Some(path), _) => io::read_samples(&path)?,
                (None, Some(v)) => {
                    let dist: SampleDistribution = dist.parse()?;
                    simulate(v[0], v[1], v[2], dist, solver.seed)?
                }
                (None, None) => unreachable!("clap requires one source"),
            };
            cov(&batch, out.as_deref(), &solver.config())
        }
        Command::Reproduce { example, seed, out_dir, repeats, samples } => {
            reproduce(example, seed, out_dir.as_deref(), repeats, samples)
        }
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure {
        code: 1,
        message: format!("{}: {e}", path.display()),
        partial: None,
    })
}

fn eig_summary(rep: &MultiStartReport) -> (String, Value) {
    let mut t = String::new();
    t += &format!("lambda        {:.10}\n", rep.best.lambda);
    t += &format!("x             {}\n", fmt_vec(&rep.best.x));
    t += &format!("y             {}\n", fmt_vec(&rep.best.y));
    t += &format!("residual      {:.3e}\n", rep.best.residual);
    t += &format!("success rate  {:.0}% ({} of {} starts converged)\n", 100.0 * rep.success_rate, rep.converged_count(), rep.runs.len());
    t += &format!("iterations    {:.2} (mean)\n", rep.mean_iterations());
    t += &format!("res           {:.3e} (mean)\n", rep.mean_residual());
    t += "stationary values\n";
    for s in &rep.stationary {
        t += &format!("  {:.10}  x={} y={}\n", s.lambda, fmt_vec(&s.x), fmt_vec(&s.y));
    }
    let j = json!({
        "mode": rep.mode,
        "lambda": rep.best.lambda,
        "x": rep.best.x,
        "y": rep.best.y,
        "residual": rep.best.residual,
        "best_start": rep.best_index,
        "success_rate": rep.success_rate,
        "starts": rep.runs.len(),
        "converged": rep.converged_count(),
        "mean_iterations": rep.mean_iterations(),
        "mean_residual": rep.mean_residual(),
        "stationary": rep.stationary,
    });
    (t, j)
}

fn eig(input: &Path, mode: Mode, config: &SolverConfig, oracle: bool, trace: Option<&Path>, timing: bool) -> CmdResult {
    let a = io::read_tensor(input)?;
    let mode = match mode {
        Mode::Min => ExtremeMode::Min,
        Mode::Max => ExtremeMode::Max,
    };
    let t0 = Instant::now();
    let rep = biquad::solve_extreme(&a, mode, config)?;
    let elapsed = t0.elapsed().as_secs_f64();
    let (mut table, mut j) = eig_summary(&rep);
    if let Some(path) = trace {
        let best = &rep.runs[rep.best_index];
        write_file(path, &io::trace_to_csv(&best.trace))?;
    }
    if oracle {
        let spec = GridSpec { parallel: config.parallel, ..GridSpec::default() };
        let est = match mode {
            ExtremeMode::Min => grid_min(&a, &spec)?,
            ExtremeMode::Max => grid_max(&a, &spec)?,
        };
        let gap = (est.lambda - rep.best.lambda).abs();
        table += &format!("oracle        {:.10} (|solver - oracle| = {gap:.3e}, {} samples)\n", est.lambda, est.samples);
        j["oracle"] = json!({ "lambda": est.lambda, "gap": gap, "samples": est.samples });
    }
    if timing {
        let per_start: f64 = rep.runs.iter().map(|r| r.seconds).sum::<f64>() / rep.runs.len() as f64;
        table += &format!("time (s)      {elapsed:.3e} total, {per_start:.3e} per start\n");
        j["seconds"] = json!({ "total": elapsed, "per_start": per_start });
    }
    Ok(Output { table, json: j })
}

fn bounds(a: &BiquadraticTensor) -> CmdResult {
    let g = gershgorin_intervals(a);
    let mut t = format!("global interval  [{}, {}]\n", g.global_interval.lo, g.global_interval.hi);
    t += &format!("diagonally dominated: {} (strict: {})\n", g.diagonally_dominated, g.strictly_dominated);
    t += "(i, j)  a_ijij  r_ij\n";
    for i in 0..a.m() {
        for j in 0..a.n() {
            t += &format!("({}, {})  {}  {}\n", i + 1, j + 1, a.get(i, j, i, j), g.radii[(i, j)]);
        }
    }
    let j = json!({
        "global_interval": g.global_interval,
        "row_intervals": g.row_intervals,
        "col_intervals": g.col_intervals,
        "radii": io::matrix_rows(&g.radii),
        "diagonally_dominated": g.diagonally_dominated,
        "strictly_dominated": g.strictly_dominated,
    });
    Ok(Output { table: t, json: j })
}

fn classify(a: &BiquadraticTensor, config: &SolverConfig) -> CmdResult {
    let rep = classify_m_tensor(a, config)?;
    let (dd, strict) = is_diagonally_dominated(a);
    let mut t = String::new();
    t += &format!("symmetric             {}\n", a.is_symmetric());
    t += &format!("weakly symmetric      {}\n", a.is_weakly_symmetric());
    t += &format!("diagonally dominated  {dd} (strict: {strict})\n");
    t += &format!("Z                     {}\n", rep.is_z);
    t += &format!("B0                    {}\n", rep.is_b0);
    t += &format!("B                     {}\n", rep.is_b);
    t += &format!("M status              {}\n", rep.m_status.as_str());
    if let Some(ev) = &rep.evidence {
        t += &format!("  alpha               {}\n", ev.alpha);
        t += &format!("  lambda_max(B) <=    {:e}\n", ev.lambda_max_upper);
        t += &format!("  lambda_max(B) >=    {:e}\n", ev.lambda_max_estimate);
        if let Some((d, f)) = &ev.scaling {
            t += &format!("  scaling d           {}\n  scaling f           {}\n", fmt_vec(d), fmt_vec(f));
        }
    }
    let j = json!({
        "symmetric": a.is_symmetric(),
        "weakly_symmetric": a.is_weakly_symmetric(),
        "diagonally_dominated": dd,
        "strictly_dominated": strict,
        "report": rep,
    });
    Ok(Output { table: t, json: j })
}

fn decompose(b: &BiquadraticTensor, out: Option<&Path>) -> CmdResult {
    let dec = decompose_b0(b)?;
    let j = io::decomposition_to_json(&dec);
    if let Some(path) = out {
        write_file(path, &(serde_json::to_string_pretty(&j).expect("json") + "\n"))?;
    }
    let mut t = format!("{} correction(s)\n", dec.corrections.len());
    for (k, c) in dec.corrections.iter().enumerate() {
        let pairs: Vec<String> = c.support.iter().map(|p| format!("({},{})", p.i + 1, p.j + 1)).collect();
        t += &format!("  h_{} = {}  J = {{{}}}\n", k + 1, c.h, pairs.join(" "));
    }
    t += &format!("m_part dominated: {}\n", is_diagonally_dominated(&dec.m_part).0);
    Ok(Output { table: t, json: j })
}

fn sos(a: &BiquadraticTensor) -> CmdResult {
    Ok(match sos_certificate(a)? {
        Some(cert) => Output {
            table: format!(
                "certificate: {} factor(s), smallest unfolding eigenvalue {:e}\n",
                cert.factors.len(),
                cert.min_eigenvalue
            ),
            json: json!({ "certified": true, "certificate": io::sos_to_json(&cert) }),
        },
        None => Output {
            table: "no certificate: the symmetrized unfolding is indefinite\n".into(),
            json: json!({ "certified": false }),
        },
    })
}

fn cov(batch: &SampleBatch, out: Option<&Path>, config: &SolverConfig) -> CmdResult {
    let c = covariance_tensor(batch, config.parallel)?;
    if let Some(path) = out {
        io::write_tensor(path, &c, TensorFormat::Dense)?;
    }
    let psd = verify_psd(&c, config)?;
    let certified = sos_certificate(&c)?.is_some();
    let mut t = format!("samples {} of size {}x{}\n", batch.t_count(), batch.m(), batch.n());
    t += &format!("weakly symmetric  {}\n", c.is_weakly_symmetric());
    t += &format!("smallest lambda   {:.10}\n", psd.min_lambda);
    t += &format!("PSD (numerical)   {}\n", psd.psd);
    t += &format!("SOS certificate   {certified}\n");
    let j = json!({
        "t": batch.t_count(),
        "m": batch.m(),
        "n": batch.n(),
        "weakly_symmetric": c.is_weakly_symmetric(),
        "psd": psd,
        "sos_certified": certified,
    });
    Ok(Output { table: t, json: j })
}

fn reproduce(example: Example, seed: u64, out_dir: Option<&Path>, repeats: usize, samples: usize) -> CmdResult {
    let config = SolverConfig { seed, ..SolverConfig::default() };
    let mut files: Vec<(String, String)> = Vec::new();
    let (table, j) = match example {
        Example::Elasticity => {
            let rows = experiments::elasticity_intervals();
            let mut t = String::from("inclusion intervals\n");
            for r in &rows {
                t += &format!("  {:<20} [{}, {}]\n", r.label, r.interval.lo, r.interval.hi);
            }
            let rep = experiments::elasticity_eigenpairs(&config)?;
            let (s, ej) = eig_summary(&rep);
            t += "smallest M-eigenvalue of A\n";
            t += &s;
            files.push(("trace_7.1.csv".into(), io::trace_to_csv(&rep.runs[rep.best_index].trace)));
            (t, json!({ "intervals": rows, "eigen": ej }))
        }
        Example::RandomBounds => {
            let rows = experiments::random_bounds(&RANDOM_BOUNDS_SHAPES, repeats, seed);
            let mut t = format!("mean inclusion interval over {repeats} tensors\n  m   n   lower        upper\n");
            for r in &rows {
                t += &format!("  {:<3} {:<3} {:<12.2} {:.2}\n", r.m, r.n, r.mean_lower, r.mean_upper);
            }
            (t, json!({ "rows": rows }))
        }
        Example::Covariance => {
            let rows = experiments::covariance_table(&COVARIANCE_SHAPES, samples, seed, &config)?;
            let mut t = format!("covariance tensors of {samples} uniform[0,10] samples\n  m   n   lambda      rate   iter    res\n");
            for r in &rows {
                t += &format!(
                    "  {:<3} {:<3} {:<11.4} {:<6} {:<7.2} {:.2e}\n",
                    r.m,
                    r.n,
                    r.lambda,
                    format!("{:.0}%", 100.0 * r.success_rate),
                    r.mean_iterations,
                    r.mean_residual
                );
                let best = &r.report.runs[r.report.best_index];
                files.push((format!("trace_7.3_{}x{}.csv", r.m, r.n), io::trace_to_csv(&best.trace)));
            }
            (t, json!({ "samples": samples, "rows": rows }))
        }
    };
    let mut table = table;
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Failure { code: 1, message: format!("{}: {e}", dir.display()), partial: None })?;
        write_file(&dir.join("report.json"), &(serde_json::to_string_pretty(&j).expect("json") + "\n"))?;
        for (name, body) in &files {
            write_file(&dir.join(name), body)?;
        }
        table += &format!("wrote report.json and {} trace file(s) to {}\n", files.len(), dir.display());
    }
    Ok(Output { table, json: j })
}
