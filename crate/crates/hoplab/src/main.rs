//! `hoplab` command line: instance generation, solver runs, bench
//! sweeps, verification suites, and log-log exponent fits.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hoplab::geom::{gen_instance, Instance};
use hoplab::harness::{
    bench, fit_csv, render_fit_svg, run_algo, run_suites, write_csv, BenchConfig,
};

#[derive(Parser)]
#[command(name = "hoplab", version, about = "Hopcroft's-problem laboratory", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a deterministic instance and print (or save) its JSON.
    Gen {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        planted: usize,
        #[arg(long, default_value_t = 1 << 10)]
        coord_bound: i64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one solver on an instance file and print the result JSON.
    Run {
        #[arg(long)]
        algo: String,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 64)]
        walk_samples: usize,
        /// Group size for the warm-up solver (defaults to n^(3/4)).
        #[arg(long)]
        k: Option<usize>,
        /// Also print the charge trace tree.
        #[arg(long, default_value_t = false)]
        trace: bool,
    },
    /// Sweep sizes × trials × algos into a CSV of bench rows.
    Bench {
        /// Comma-separated solver names.
        #[arg(long, value_delimiter = ',', default_value = "algo1,algo2")]
        algos: Vec<String>,
        /// Comma-separated square sizes (n = m).
        #[arg(long, value_delimiter = ',', default_value = "256,512,1024")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        walk_samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the property suites; exit 1 on any failure.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, value_delimiter = ',', default_value = "4,16,64")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Corrupt a structure on purpose and demonstrate detection
        /// (the run then fails).
        #[arg(long, default_value_t = false)]
        fault_injection: bool,
    },
    /// Least-squares fit of log2(y) against log2(x) over CSV columns.
    Fit {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value = "n")]
        x: String,
        #[arg(long, default_value = "charge")]
        y: String,
        /// Keep only rows where column=value (e.g. algo=algo2).
        #[arg(long)]
        filter: Option<String>,
        /// Divide y by (log2 x)^k before fitting.
        #[arg(long, default_value_t = 0)]
        per_log: u32,
        /// Write a static SVG of the fit.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Gen {
            d,
            n,
            m,
            planted,
            coord_bound,
            seed,
            out,
        } => {
            let inst = gen_instance(d, n, m, planted, coord_bound, seed)?;
            let text = inst.to_json();
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => println!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Run {
            algo,
            input,
            walk_samples,
            k,
            trace,
        } => {
            let text = std::fs::read_to_string(&input)?;
            let inst = Instance::from_json(&text)?;
            match run_algo(&algo, &inst, walk_samples, k) {
                Ok(res) => {
                    println!("{}", serde_json::to_string_pretty(&res.to_json())?);
                    if trace {
                        println!("{}", serde_json::to_string_pretty(&res.trace)?);
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(hoplab::harness::HarnessError::UnknownAlgo(a)) => {
                    eprintln!("usage error: unknown algorithm `{a}`");
                    Ok(ExitCode::from(2))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Bench {
            algos,
            sizes,
            trials,
            seed,
            walk_samples,
            out,
        } => {
            let cfg = BenchConfig {
                algos,
                sizes,
                trials,
                seed,
                walk_samples,
            };
            let rows = bench(&cfg)?;
            match out {
                Some(path) => {
                    write_csv(&path, &rows)?;
                    eprintln!("wrote {} rows to {}", rows.len(), path.display());
                }
                None => {
                    let mut w = csv::Writer::from_writer(std::io::stdout());
                    for row in &rows {
                        w.serialize(row)?;
                    }
                    w.flush()?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            suite,
            sizes,
            seed,
            fault_injection,
        } => {
            match run_suites(&suite, seed, &sizes, fault_injection) {
                Ok(reports) => {
                    let mut all_pass = true;
                    for rep in &reports {
                        println!(
                            "suite {}: {}",
                            rep.name,
                            if rep.pass { "PASS" } else { "FAIL" }
                        );
                        for line in &rep.lines {
                            println!("{line}");
                        }
                        all_pass &= rep.pass;
                    }
                    Ok(if all_pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    })
                }
                Err(hoplab::harness::HarnessError::UnknownSuite(s)) => {
                    eprintln!("usage error: unknown suite `{s}`");
                    Ok(ExitCode::from(2))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Fit {
            csv,
            x,
            y,
            filter,
            per_log,
            svg,
        } => {
            let filter_pair = filter.as_deref().map(|f| {
                f.split_once('=')
                    .map(|(a, b)| (a.to_string(), b.to_string()))
                    .unwrap_or((f.to_string(), String::new()))
            });
            let filter_ref = filter_pair.as_ref().map(|(a, b)| (a.as_str(), b.as_str()));
            let (fit, points) = fit_csv(&csv, &x, &y, filter_ref, per_log)?;
            println!(
                "slope {:.6} intercept {:.6} r2 {:.6} points {}",
                fit.slope, fit.intercept, fit.r2, fit.points
            );
            if let Some(path) = svg {
                std::fs::write(&path, render_fit_svg(&points, &fit, &x, &y, per_log))?;
                eprintln!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
