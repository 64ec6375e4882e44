use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use spdkit::divergences::DivergenceKind;
use spdkit::kernels::{gram_matrix, search_indefinite, GramSpec, GramVariant};
use spdkit::laws::{run_law, LawId, LawReport, LawSpec, DEFAULT_CONDS, DEFAULT_SLACK};
use spdkit::means::{geodesic_point, karcher_mean, le_mean, s_mean, MeanProblem, MeanReport, SolverConfig};
use spdkit::{Error, MatrixBundle, Result, SpdMatrix};

use crate::bench::{run_bench, write_csv, BenchConfig, BenchOp};
use crate::{exit, exit_code, format_value};

#[derive(Debug, Parser)]
#[command(name = "spdkit", version, about = "S-divergence geometry of SPD matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance or divergence between two single-matrix bundles.
    Dist {
        /// sdiv, sdelta, riem, logeuclid, thompson, stein_loss, vonneumann, frobenius_sq or jensen_f.
        metric: String,
        file_a: PathBuf,
        file_b: PathBuf,
    },
    /// Mean of a bundle, written as a single-matrix bundle.
    Mean {
        kind: MeanKind,
        bundle: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long = "max-iters", default_value_t = 1000)]
        max_iters: usize,
        /// Output bundle; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gram matrix `det(X_i + X_j)^(-beta)` of a bundle and its PSD verdict.
    Kernel {
        bundle: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value = "det_sum")]
        variant: String,
    },
    /// Random search for a bundle with an indefinite Gram matrix.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, env = "SPDKIT_SEED", default_value_t = 0)]
        seed: u64,
        /// Where to write a witness bundle, if one is found.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        threads: u16,
    },
    /// Randomized verification of the registered laws.
    Laws {
        /// A registered law name, or `all`.
        #[arg(long, default_value = "all")]
        law: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, env = "SPDKIT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [2, 3, 5, 10])]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_CONDS)]
        conds: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_SLACK)]
        slack: f64,
        /// Machine-readable reports, including worst-case witnesses.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        threads: u16,
    },
    /// Timing of distances and means, as CSV.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "dist_sdiv,dist_riem,dist_logeuclid,mean_sdiv,mean_karcher,mean_logeuclid")]
        op: Vec<String>,
        #[arg(long, value_delimiter = ',', default_values_t = [16, 32, 64, 128])]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [10])]
        m: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        #[arg(long, env = "SPDKIT_SEED", default_value_t = 0)]
        seed: u64,
        /// CSV file; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeanKind {
    Sdiv,
    Karcher,
    Logeuclid,
    Gm2,
}

/// Failure of a command: an exit code and a message for stderr.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: exit::INPUT,
            message: format!("io error: {e}"),
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        code: exit::INPUT,
        message: message.into(),
    }
}

type Outcome = std::result::Result<u8, Failure>;

/// Runs a parsed command and returns its exit code.
pub fn run(cli: Cli) -> u8 {
    let outcome = match cli.command {
        Command::Dist { metric, file_a, file_b } => dist(&metric, &file_a, &file_b),
        Command::Mean {
            kind,
            bundle,
            tol,
            max_iters,
            out,
        } => mean(kind, &bundle, tol, max_iters, out.as_deref()),
        Command::Kernel { bundle, beta, variant } => kernel(&bundle, beta, &variant),
        Command::Search {
            n,
            beta,
            budget,
            seed,
            out,
            threads,
        } => in_pool(threads, || search(n, beta, budget, seed, out.as_deref())),
        Command::Laws {
            law,
            trials,
            seed,
            dims,
            conds,
            slack,
            json,
            threads,
        } => {
            let config = LawsConfig {
                law,
                trials,
                seed,
                dims,
                conds,
                slack,
            };
            in_pool(threads, || laws(&config, json.as_deref()))
        }
        Command::Bench {
            op,
            dims,
            m,
            reps,
            seed,
            out,
        } => bench(&op, dims, m, reps, seed, out.as_deref()),
    };
    match outcome {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn in_pool(threads: u16, f: impl FnOnce() -> Outcome + Send) -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads as usize)
        .build()
        .map_err(|e| input_error(format!("cannot start {threads} threads: {e}")))?;
    pool.install(f)
}

fn single_matrix(path: &Path) -> std::result::Result<SpdMatrix, Failure> {
    let bundle = MatrixBundle::read(path)?;
    if bundle.len() != 1 {
        return Err(input_error(format!(
            "{}: expected a single-matrix bundle, found {} items",
            path.display(),
            bundle.len()
        )));
    }
    Ok(bundle.items()[0].1.clone())
}

fn dist(metric: &str, file_a: &Path, file_b: &Path) -> Outcome {
    let kind: DivergenceKind = metric.parse()?;
    let a = single_matrix(file_a)?;
    let b = single_matrix(file_b)?;
    println!("{}", format_value(kind.eval(&a, &b)?));
    Ok(exit::OK)
}

fn print_report(report: &MeanReport) {
    println!("iterations: {}", report.iterations);
    println!("residual: {:e}", report.residual);
    println!("converged: {}", report.converged);
}

fn mean(kind: MeanKind, path: &Path, tol: f64, max_iters: usize, out: Option<&Path>) -> Outcome {
    let bundle = MatrixBundle::read(path)?;
    let problem = MeanProblem::from_bundle(&bundle)?;
    let config = SolverConfig {
        tol,
        max_iters,
        ..SolverConfig::default()
    };
    let (mean, converged) = match kind {
        MeanKind::Sdiv | MeanKind::Karcher => {
            let report = if kind == MeanKind::Sdiv {
                s_mean(&problem, &config)?
            } else {
                karcher_mean(&problem, &config)?
            };
            print_report(&report);
            (report.mean, report.converged)
        }
        MeanKind::Logeuclid => {
            println!("closed form");
            (le_mean(&problem)?, true)
        }
        MeanKind::Gm2 => {
            if problem.len() != 2 {
                return Err(input_error(format!("gm2 needs exactly 2 matrices, found {}", problem.len())));
            }
            // Weighted two-point mean: the geodesic point at the second weight.
            let m = problem.matrices();
            println!("closed form");
            (geodesic_point(&m[0], &m[1], problem.weights()[1])?, true)
        }
    };
    let result = MatrixBundle::new(vec![("mean".to_string(), mean)], None)?;
    match out {
        Some(p) => result.write(p)?,
        None => print!("{}", result.to_json_string()),
    }
    if converged {
        Ok(exit::OK)
    } else {
        eprintln!("error: mean did not converge within {max_iters} iterations");
        Ok(exit::NON_CONVERGENCE)
    }
}

fn kernel(path: &Path, beta: f64, variant: &str) -> Outcome {
    let variant: GramVariant = variant.parse()?;
    let bundle = MatrixBundle::read(path)?;
    let (m, n) = (bundle.len(), bundle.dim());
    let report = gram_matrix(&GramSpec { bundle, beta, variant })?;
    println!("m: {m}");
    println!("n: {n}");
    println!("beta: {beta}");
    println!("variant: {variant}");
    println!("min_eig: {}", format_value(report.min_eig));
    println!("max_eig: {}", format_value(report.max_eig));
    println!("psd: {}", report.psd);
    println!("beta_admissible: {}", report.beta_admissible);
    Ok(if report.psd { exit::OK } else { exit::INDEFINITE })
}

fn search(n: usize, beta: f64, budget: usize, seed: u64, out: Option<&Path>) -> Outcome {
    match search_indefinite(n, beta, budget, seed)? {
        None => {
            println!("no indefinite Gram matrix in {budget} trials (inconclusive)");
            Ok(exit::OK)
        }
        Some(w) => {
            println!("trial: {}", w.trial);
            println!("min_eig: {}", format_value(w.min_eig));
            println!("max_eig: {}", format_value(w.max_eig));
            match out {
                Some(p) => w.bundle.write(p)?,
                None => print!("{}", w.bundle.to_json_string()),
            }
            Ok(exit::INDEFINITE)
        }
    }
}

struct LawsConfig {
    law: String,
    trials: usize,
    seed: u64,
    dims: Vec<usize>,
    conds: Vec<f64>,
    slack: f64,
}

fn laws(config: &LawsConfig, json: Option<&Path>) -> Outcome {
    let selected: Vec<LawId> = if config.law == "all" {
        LawId::ALL.to_vec()
    } else {
        vec![config.law.parse()?]
    };
    let mut reports: Vec<LawReport> = Vec::with_capacity(selected.len());
    println!(
        "{:<28} {:>8} {:>10} {:>8} {:>22}  status",
        "law", "trials", "violations", "errored", "worst_margin"
    );
    for law in selected {
        let spec = LawSpec {
            cond_targets: config.conds.clone(),
            slack: config.slack,
            ..LawSpec::new(law, config.trials, config.seed, config.dims.clone())
        };
        let r = run_law(&spec)?;
        println!(
            "{:<28} {:>8} {:>10} {:>8} {:>22}  {}",
            law.name(),
            r.trials_run,
            r.violations,
            r.errored,
            r.worst_margin.map_or_else(|| "-".to_string(), |m| format!("{m:.6e}")),
            if r.passed { "pass" } else { "FAIL" }
        );
        reports.push(r);
    }
    let failed: Vec<&LawReport> = reports.iter().filter(|r| !r.passed).collect();
    match json {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            serde_json::to_writer_pretty(&mut w, &reports).map_err(io::Error::from)?;
            w.write_all(b"\n")?;
            w.flush()?;
        }
        None => {
            for r in &failed {
                if let Some(w) = &r.witness {
                    println!("witness for {}:\n{}", r.law, w.to_json());
                }
            }
        }
    }
    if failed.is_empty() {
        Ok(exit::OK)
    } else {
        Ok(exit::VIOLATION)
    }
}

fn bench(ops: &[String], dims: Vec<usize>, ms: Vec<usize>, reps: usize, seed: u64, out: Option<&Path>) -> Outcome {
    let ops = ops.iter().map(|s| s.parse()).collect::<Result<Vec<BenchOp>>>()?;
    let rows = run_bench(&BenchConfig {
        ops,
        dims,
        ms,
        reps,
        seed,
    })?;
    let written = match out {
        Some(p) => write_csv(&rows, File::create(p)?),
        None => write_csv(&rows, io::stdout().lock()),
    };
    written.map_err(|e| input_error(format!("csv: {e}")))?;
    Ok(exit::OK)
}
