use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qqcm::config::ExperimentConfig;
use qqcm::experiment::{self, LindleyOutput};
use qqcm::output::{self, to_bytes, write_file};
use qqcm::plot::{plot_table, PlotKind};
use qqcm::{Error, Result};

#[derive(Parser)]
#[command(name = "qqcm", version, about = "Queued quantum collision model experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (defaults to all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// One trajectory as CSV.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Also write the queue trace here.
        #[arg(long)]
        queue_out: Option<PathBuf>,
        /// Also write every full density matrix here.
        #[arg(long)]
        states_out: Option<PathBuf>,
    },
    /// Long-run E(C), Var(C) over the configured sweep.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Waiting- and idle-time CDFs; the idle file gets an `_idle` suffix.
    Lindley {
        #[command(flatten)]
        common: Common,
    },
    /// Steady state of the averaged map.
    FixedPoint {
        #[arg(long)]
        config: PathBuf,
        /// Optional CSV copy of the report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// SVG plot of a CSV written by the other commands.
    Plot {
        #[arg(long)]
        input: PathBuf,
        /// trajectory | queue | sweep | cdf | comparison; guessed from the
        /// header when omitted.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.base_seed = seed;
    }
    Ok(cfg)
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}{suffix}"),
    };
    path.with_file_name(name)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate {
            common,
            queue_out,
            states_out,
        } => {
            let cfg = load(&common)?;
            let (trace, record) = experiment::with_threads(common.threads, || experiment::simulate(&cfg))??;
            write_file(&common.out, &to_bytes(|b| output::write_trajectory(b, &record))?)?;
            if let Some(path) = queue_out {
                write_file(&path, &to_bytes(|b| output::write_queue_trace(b, &trace))?)?;
            }
            if let Some(path) = states_out {
                let states = record.samples.iter().map(|s| (s.n, s.state.clone()));
                write_file(&path, &to_bytes(|b| output::write_states(b, states))?)?;
            }
            println!("wrote {} collisions to {}", record.len(), common.out.display());
        }
        Command::Sweep { common } => {
            let cfg = load(&common)?;
            let (axis, points) = experiment::with_threads(common.threads, || experiment::sweep(&cfg))??;
            write_file(&common.out, &to_bytes(|b| output::write_sweep(b, axis, &points))?)?;
            for p in &points {
                println!(
                    "{}={} E(C)={:.6} Var(C)={:.3e} stderr(naive)={:.2e}",
                    axis.column(),
                    p.value,
                    p.mean,
                    p.variance,
                    p.naive_stderr
                );
            }
        }
        Command::Lindley { common } => {
            let cfg = load(&common)?;
            let idle_path = with_suffix(&common.out, "_idle");
            match experiment::with_threads(common.threads, || experiment::lindley(&cfg))?? {
                LindleyOutput::Comparison(report) => {
                    write_file(
                        &common.out,
                        &to_bytes(|b| output::write_comparison(b, &report.waiting))?,
                    )?;
                    write_file(&idle_path, &to_bytes(|b| output::write_comparison(b, &report.idle))?)?;
                    println!(
                        "waiting: F(0) numeric {:.6} empirical {:.6}, sup-norm {:.6}",
                        report.waiting.numeric.atom_at_zero(),
                        report.waiting.empirical.atom_at_zero(),
                        report.waiting.sup_distance
                    );
                    println!(
                        "idle: G(0) numeric {:.6} empirical {:.6}, sup-norm {:.6}",
                        report.idle.numeric.atom_at_zero(),
                        report.idle.empirical.atom_at_zero(),
                        report.idle.sup_distance
                    );
                    println!("{} iterations, final change {:.2e}", report.iterations, report.residual);
                }
                LindleyOutput::Transient(f, g) => {
                    write_file(&common.out, &to_bytes(|b| output::write_cdf(b, &f))?)?;
                    write_file(&idle_path, &to_bytes(|b| output::write_cdf(b, &g))?)?;
                    println!("F(0) = {:.6}, G(0) = {:.6}", f.atom_at_zero(), g.atom_at_zero());
                }
            }
        }
        Command::FixedPoint { config, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let report = experiment::fixed_point(&cfg)?;
            let m = report.fixed_point.state.matrix();
            println!("rho00 = {:.12}", m[(0, 0)].re);
            println!("rho01 = {:.12} {:+.12}i", m[(0, 1)].re, m[(0, 1)].im);
            println!("rho11 = {:.12}", m[(1, 1)].re);
            println!("C = {:.12}", report.coherence);
            println!("residual = {:.2e}", report.fixed_point.residual);
            if let Some(path) = out {
                write_file(&path, &to_bytes(|b| output::write_fixed_point(b, &report))?)?;
            }
        }
        Command::Plot { input, kind, out } => {
            let table = output::read_table(&input)?;
            let kind = match kind {
                Some(k) => k.parse()?,
                None => PlotKind::detect(&table.headers)
                    .ok_or_else(|| Error::Malformed("cannot tell the plot kind from the header; pass --kind".into()))?,
            };
            let svg = plot_table(&table, kind)?;
            write_file(&out, svg.as_bytes())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
