//! The subcommands. Each run is computed in memory first, then written out,
//! so that `replay` can compare a rerun against the files on disk.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::Args;
use portsolve::circuit::{solve_naive, solve_nested};
use portsolve::mixed::{mmdr, scan_period, vdp_period, vdp_solve, VdpParams, TRIVIAL_NORM};
use portsolve::netlist::{self, Problem};
use portsolve::operators::{check_monotone, Monotonicity, RandomSignals, Verdict};
use portsolve::signal::{norm, write_csv, Signal};
use portsolve::splitting::{SolveResult, SolverConfig};
use portsolve::Error;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::manifest::{ConfigRecord, RunManifest, RunSpec, SolverKind};

pub const EXIT_INPUT: u8 = 1;
pub const EXIT_SOLVER: u8 = 2;
pub const EXIT_NOT_CONVERGED: u8 = 3;
pub const EXIT_VIOLATION: u8 = 4;
pub const EXIT_MISMATCH: u8 = 5;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidConfig(_)
            | Error::InvalidSignal(_)
            | Error::Csv(_)
            | Error::Io(_)
            | Error::NotMonotone(_)
            | Error::NotLinear(_)
            | Error::PoleOnGrid { .. }
            | Error::ZeroDivision
            | Error::NoBackwardChild
            | Error::LengthMismatch { .. }
            | Error::PeriodMismatch { .. } => EXIT_INPUT,
            Error::InnerSolveFailed { .. } | Error::TrivialFixedPoint { .. } => EXIT_NOT_CONVERGED,
            Error::NonFinite { .. }
            | Error::BracketFailure { .. }
            | Error::ResolventSingular { .. }
            | Error::DomainViolation(_) => EXIT_SOLVER,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// A finished run that has not been written yet.
pub struct Produced {
    pub files: Vec<(PathBuf, Vec<u8>)>,
    pub manifest_path: PathBuf,
    pub manifest: RunManifest,
    pub summary: String,
    /// 0, or [`EXIT_NOT_CONVERGED`] when the iteration budget ran out.
    pub code: u8,
}

impl Produced {
    fn write(&self) -> Result<(), Failure> {
        let io = |path: &Path, e: std::io::Error| Failure::input(format!("{}: {e}", path.display()));
        for (path, bytes) in &self.files {
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
            }
            std::fs::write(path, bytes).map_err(|e| io(path, e))?;
        }
        self.manifest
            .save(&self.manifest_path)
            .map_err(|e| io(&self.manifest_path, e))
    }
}

fn absolute(path: &Path) -> Result<PathBuf, Failure> {
    std::path::absolute(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn csv_bytes(signal: &Signal) -> Result<Vec<u8>, Failure> {
    let mut out = Vec::new();
    write_csv(signal, &mut out)?;
    Ok(out)
}

fn residual_bytes(residuals: &[f64]) -> Vec<u8> {
    let mut out = String::from("iteration,residual\n");
    for (k, r) in residuals.iter().enumerate() {
        let _ = writeln!(out, "{},{r}", k + 1);
    }
    out.into_bytes()
}

fn format_residual(r: Option<f64>) -> String {
    r.map_or_else(|| "n/a".to_string(), |r| format!("{r:.3e}"))
}

fn summary(result: &SolveResult) -> String {
    format!(
        "converged={} iters={} residual={}",
        result.converged,
        result.iterations,
        format_residual(result.fixed_point_residual)
    )
}

fn not_converged_code(result: &SolveResult) -> u8 {
    if result.converged {
        0
    } else {
        EXIT_NOT_CONVERGED
    }
}

// solve -----------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Netlist file.
    pub netlist: PathBuf,
    /// Solve every inner inverse problem fully before each outer step.
    #[arg(long)]
    pub naive: bool,
    /// Amplitude of the starting sinusoid `a·sin(2πt/T)` for mixed topologies.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    pub init_amplitude: f64,
    /// Directory for the outputs; defaults to the netlist's directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

pub fn cmd_solve(args: &SolveArgs) -> Result<u8, Failure> {
    let input = absolute(&args.netlist)?;
    let out_dir = match &args.out_dir {
        Some(d) => absolute(d)?,
        None => input.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    let produced = execute_solve(&input, args.naive, args.init_amplitude, None, &out_dir)?;
    produced.write()?;
    println!("{}", produced.summary);
    if produced.code == EXIT_NOT_CONVERGED {
        eprintln!(
            "error: no convergence within {} iterations",
            produced.manifest.config.max_iter
        );
    }
    Ok(produced.code)
}

fn execute_solve(
    input: &Path,
    naive: bool,
    init_amplitude: f64,
    config: Option<&ConfigRecord>,
    out_dir: &Path,
) -> Result<Produced, Failure> {
    let text = std::fs::read_to_string(input).map_err(|e| Failure::input(format!("{}: {e}", input.display())))?;
    let doc = netlist::parse(&text).map_err(|d| Failure::input(format!("{}:{d}", input.display())))?;
    let base = input.parent().unwrap_or(Path::new("."));
    let start = Instant::now();
    let (result, cfg, solver, trivial) = match doc.build(base)? {
        Problem::Tree {
            tree,
            drive,
            config: parsed,
        } => {
            let cfg = config.map_or(parsed, ConfigRecord::to_config);
            let result = if naive {
                solve_naive(&tree, &drive, &cfg)?
            } else {
                solve_nested(&tree, &drive, &cfg)?
            };
            let solver = if naive { SolverKind::Naive } else { SolverKind::Nested };
            (result, cfg, solver, false)
        }
        Problem::Mixed {
            problem,
            config: parsed,
        } => {
            let cfg = config.map_or(parsed, ConfigRecord::to_config);
            let drive = &problem.drive;
            let x1 = Signal::sinusoid(drive.len(), drive.period(), init_amplitude, 1)?;
            let result = mmdr(&problem, &x1, &cfg)?;
            let trivial = result.converged && drive.max_abs() == 0.0 && norm(&result.solution) < TRIVIAL_NORM;
            (result, cfg, SolverKind::Mmdr, trivial)
        }
    };
    let duration = start.elapsed().as_secs_f64();
    if trivial {
        return Err(Error::TrivialFixedPoint {
            norm: norm(&result.solution),
        }
        .into());
    }
    let stem = input
        .file_stem()
        .map_or("run".into(), |s| s.to_string_lossy().into_owned());
    let out = out_dir.join(format!("{stem}_out.csv"));
    let residuals = out_dir.join(format!("{stem}_residuals.csv"));
    let files = vec![
        (out.clone(), csv_bytes(&result.solution)?),
        (residuals.clone(), residual_bytes(&result.residuals)),
    ];
    Ok(Produced {
        summary: summary(&result),
        code: not_converged_code(&result),
        manifest_path: out_dir.join(format!("{stem}_manifest.json")),
        manifest: RunManifest {
            run: RunSpec::Solve {
                input: input.to_path_buf(),
                naive,
                init_amplitude,
            },
            config: ConfigRecord::from_config(&cfg),
            solver,
            outputs: vec![out, residuals],
            iterations: result.iterations,
            converged: result.converged,
            residual: result.fixed_point_residual,
            duration_secs: duration,
        },
        files,
    })
}

// vdp -------------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct VdpArgs {
    /// Damping parameters; one solve per value.
    #[arg(long, num_args = 1.., default_values_t = [0.0002, 1.5, 10.0])]
    pub mu: Vec<f64>,
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    pub eps: f64,
    /// Samples per period.
    #[arg(long, default_value_t = 5000)]
    pub steps: usize,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
    /// Period to solve on, for every μ. Defaults to the limit-cycle period
    /// from a time-domain integration.
    #[arg(long, allow_negative_numbers = true)]
    pub period: Option<f64>,
    /// Search ±20% around the period for the smallest fixed-point residual.
    #[arg(long)]
    pub scan_period: bool,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Also write a gnuplot script `vdp.gp` that plots the waveforms.
    #[arg(long)]
    pub gnuplot: bool,
}

pub fn cmd_vdp(args: &VdpArgs) -> Result<u8, Failure> {
    let cfg = SolverConfig::new(args.alpha, args.eps, args.max_iter);
    cfg.validate()?;
    if args.mu.is_empty() {
        return Err(Failure::input("no mu values given"));
    }
    let out_dir = absolute(&args.out_dir)?;
    let n = args.mu.len();
    let threads = std::env::var("PORTSOLVE_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or(n)
        .min(n);
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<Produced, Failure>>>> = (0..n).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let run = execute_vdp(args.mu[i], args.period, args.scan_period, args.steps, &cfg, &out_dir);
                *slots[i].lock().unwrap() = Some(run);
            });
        }
    });

    let mut code = 0;
    let mut plotted = Vec::new();
    for (mu, slot) in args.mu.iter().zip(slots) {
        match slot.into_inner().unwrap().expect("every slot is filled") {
            Ok(p) => {
                p.write()?;
                println!("{}", p.summary);
                if p.code != 0 {
                    eprintln!("error: mu={mu}: no convergence within {} iterations", cfg.max_iter);
                }
                code = code.max(p.code);
                plotted.push((*mu, p.files[0].0.clone()));
            }
            Err(f) => {
                eprintln!("error: mu={mu}: {}", f.message);
                code = code.max(f.code);
            }
        }
    }
    if args.gnuplot && !plotted.is_empty() {
        let path = out_dir.join("vdp.gp");
        std::fs::write(&path, gnuplot_script(&plotted))
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    }
    Ok(code)
}

/// Iteration budget of each trial run in a period scan.
const SCAN_BUDGET: usize = 2000;

fn execute_vdp(
    mu: f64,
    period: Option<f64>,
    scan: bool,
    steps: usize,
    cfg: &SolverConfig,
    out_dir: &Path,
) -> Result<Produced, Failure> {
    let start = Instant::now();
    let guess = match period {
        Some(t) => t,
        None => vdp_period(mu)?,
    };
    let params = VdpParams::new(mu, guess, steps);
    params.validate()?;
    let period = if scan {
        // Off-cycle periods never converge, so trial runs get a short budget.
        let trial = SolverConfig::new(cfg.alpha, cfg.epsilon, cfg.max_iter.min(SCAN_BUDGET));
        scan_period(&params, &trial, 0.8 * guess, 1.2 * guess, 20)?.0
    } else {
        guess
    };
    let result = vdp_solve(&VdpParams::new(mu, period, steps), cfg)?;
    let duration = start.elapsed().as_secs_f64();
    let csv = out_dir.join(format!("vdp_{mu}.csv"));
    Ok(Produced {
        summary: format!(
            "mu={mu} T={period:.4} {} peak={:.4}",
            summary(&result),
            result.solution.max_abs()
        ),
        code: not_converged_code(&result),
        manifest_path: out_dir.join(format!("vdp_{mu}.json")),
        manifest: RunManifest {
            run: RunSpec::Vdp { mu, period, steps },
            config: ConfigRecord::from_config(cfg),
            solver: SolverKind::Mmdr,
            outputs: vec![csv.clone()],
            iterations: result.iterations,
            converged: result.converged,
            residual: result.fixed_point_residual,
            duration_secs: duration,
        },
        files: vec![(csv, csv_bytes(&result.solution)?)],
    })
}

fn gnuplot_script(series: &[(f64, PathBuf)]) -> String {
    let mut s =
        String::from("set datafile separator ','\nset key autotitle columnhead\nset xlabel 't'\nset ylabel 'v'\nplot ");
    let plots: Vec<String> = series
        .iter()
        .map(|(mu, path)| {
            let name = path
                .file_name()
                .map_or_else(String::new, |n| n.to_string_lossy().into_owned());
            format!("'{name}' using 1:2 with lines title 'mu = {mu}'")
        })
        .collect();
    s.push_str(&plots.join(", \\\n     "));
    s.push('\n');
    s
}

// check -----------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Netlist file.
    pub netlist: PathBuf,
    /// Input pairs per element.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Scale of the random test signals.
    #[arg(long, default_value_t = 2.0)]
    pub amplitude: f64,
}

/// Audits every element against the sign its role in the topology needs.
pub fn cmd_check(args: &CheckArgs) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(&args.netlist)
        .map_err(|e| Failure::input(format!("{}: {e}", args.netlist.display())))?;
    let doc = netlist::parse(&text).map_err(|d| Failure::input(format!("{}:{d}", args.netlist.display())))?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let (n, period) = (doc.space.n_samples, doc.space.period);
    let mut violations = 0;
    for (name, sign) in doc.expected_signs() {
        let op = doc.operator(&name)?;
        let (audited, label) = match sign {
            Monotonicity::AntiMonotone => (op.negated(), "anti-monotone"),
            _ => (op, "monotone"),
        };
        let sampler = RandomSignals::for_operator(&audited, n, period, args.amplitude);
        let report = check_monotone(&audited, || sampler.sample_pair(&mut rng), args.trials);
        let verdict = match report.verdict {
            Verdict::MonotoneConsistent => "ok",
            Verdict::ViolationFound => {
                violations += 1;
                "VIOLATION"
            }
        };
        println!(
            "{name}: expected {label}, tested={} inconclusive={} min_pairing={:.3e} {verdict}",
            report.tested_pairs, report.inconclusive, report.min_pairing
        );
    }
    Ok(if violations > 0 { EXIT_VIOLATION } else { 0 })
}

// replay ----------------------------------------------------------------------

#[derive(Args, Debug)]
pub struct ReplayArgs {
    /// Manifest written by `solve` or `vdp`.
    pub manifest: PathBuf,
}

/// Reruns a manifest's run in memory and compares it with the recorded
/// outputs byte for byte. Nothing is written.
pub fn cmd_replay(args: &ReplayArgs) -> Result<u8, Failure> {
    let m =
        RunManifest::load(&args.manifest).map_err(|e| Failure::input(format!("{}: {e}", args.manifest.display())))?;
    let out_dir = m
        .outputs
        .first()
        .and_then(|p| p.parent())
        .ok_or_else(|| Failure::input("manifest lists no outputs"))?;
    let produced = match &m.run {
        RunSpec::Solve {
            input,
            naive,
            init_amplitude,
        } => execute_solve(input, *naive, *init_amplitude, Some(&m.config), out_dir)?,
        RunSpec::Vdp { mu, period, steps } => {
            execute_vdp(*mu, Some(*period), false, *steps, &m.config.to_config(), out_dir)?
        }
    };
    let mut mismatches = 0;
    for (path, bytes) in &produced.files {
        let status = match std::fs::read(path) {
            Ok(recorded) if recorded == *bytes => "identical",
            Ok(_) => "differs",
            Err(_) => "missing",
        };
        if status != "identical" {
            mismatches += 1;
        }
        println!("{}: {status}", path.display());
    }
    println!("{}", produced.summary);
    Ok(if mismatches > 0 { EXIT_MISMATCH } else { produced.code })
}
