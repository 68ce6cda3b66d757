use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kokonet::geometry::{export_obj, EdgeLengths, FlexionBundle};
use kokonet::kinematics::DihedralState;
use kokonet::qsnet::Sign;
use kokonet::search::{SearchConfig, SeedMode};
use kokonet::Error;
use kokonet_cli::angle::{parse_angles, Angle};
use kokonet_cli::commands::{
    read_json, run_check, run_classify, run_flex, run_qs, run_search_report, to_json, ClassifyRequest, FlexRequest,
    NetInput, QsRequest,
};

/// Construct, classify, search and flex 3x3 Kokotsakis nets.
///
/// Angles accept a `deg` (default) or `rad` suffix. JSON files store radians.
/// Exit codes: 0 success, 2 domain rejection, 3 numeric failure, 4 I/O.
#[derive(Parser)]
#[command(name = "kokonet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a quasi-symmetric net from three seed angles and write its flexion.
    Qs {
        #[arg(long)]
        alpha: Angle,
        #[arg(long)]
        beta: Angle,
        #[arg(long)]
        gamma: Angle,
        /// Branch of the closed-form flexion, `+` or `-`.
        #[arg(long, default_value = "+", allow_hyphen_values = true)]
        branch: Sign,
        /// Number of parameter samples.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Edge lengths JSON file. Without it all edges are 1, except that
        /// wings are refitted where unit wings give a non-convex side quad.
        #[arg(long)]
        lengths: Option<PathBuf>,
        /// Output directory for bundle.json and one OBJ per sample.
        #[arg(long, default_value = "kokonet-qs")]
        out: PathBuf,
        /// Skip the OBJ files.
        #[arg(long)]
        no_obj: bool,
    },
    /// Check the equimodularity conditions of a net file and print the report.
    Classify {
        /// Net JSON: `{"vertices": [...]}` in radians, `{"angles_deg": [[...]]}`, or any file with a `net` field.
        net: PathBuf,
        /// Tolerance of every condition.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Multi-start search for equimodular nets with given deltas and state.
    Search {
        /// Search configuration, JSON or TOML.
        config: PathBuf,
        #[arg(long)]
        seeds: Option<usize>,
        #[arg(long)]
        rng_seed: Option<u64>,
        #[arg(long, value_enum)]
        seed_mode: Option<SeedModeArg>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace the flexion of a net from a closing state.
    Flex {
        net: PathBuf,
        /// Four dihedral angles, comma separated.
        #[arg(long, value_parser = parse_angles::<4>)]
        start: [Angle; 4],
        /// Final value of cot(theta_1 / 2).
        #[arg(long, allow_hyphen_values = true)]
        t_end: f64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long)]
        lengths: Option<PathBuf>,
        #[arg(long, default_value = "bundle.json")]
        out: PathBuf,
    },
    /// Re-measure a bundle and report self-intersections.
    Check { bundle: PathBuf },
    /// Serve the JSON API on localhost.
    Serve {
        #[arg(long, default_value_t = 8787)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SeedModeArg {
    Parameters,
    Angles,
    Closing,
}

impl From<SeedModeArg> for SeedMode {
    fn from(m: SeedModeArg) -> Self {
        match m {
            SeedModeArg::Parameters => SeedMode::Parameters,
            SeedModeArg::Angles => SeedMode::Angles,
            SeedModeArg::Closing => SeedMode::Closing,
        }
    }
}

enum Failure {
    Kokonet(Error),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Kokonet(e)
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|source| Error::Io { path: path.into(), source })
}

fn lengths_from(path: Option<&Path>) -> Result<Option<EdgeLengths>, Error> {
    path.map(read_json).transpose()
}

/// Writes to stdout; a closed pipe ends output quietly.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Qs { alpha, beta, gamma, branch, samples, lengths, out, no_obj } => {
            let req = QsRequest { alpha, beta, gamma, branch, samples, lengths: lengths_from(lengths.as_deref())? };
            let res = run_qs(&req)?;
            std::fs::create_dir_all(&out).map_err(|source| Error::Io { path: out.clone(), source })?;
            res.bundle.write(&out.join("bundle.json"))?;
            if !no_obj {
                for (k, s) in res.bundle.samples.iter().enumerate() {
                    let e = res.bundle.embedded(k);
                    export_obj(
                        &e,
                        &res.bundle.net,
                        &DihedralState::new(s.theta),
                        &out.join(format!("sample_{k:03}.obj")),
                    )?;
                }
            }
            emit(&to_json(&res.report));
            eprintln!("wrote {} samples to {}", res.bundle.samples.len(), out.display());
        }
        Command::Classify { net, tol } => {
            let net: NetInput = read_json(&net)?;
            emit(&to_json(&run_classify(&ClassifyRequest { net, tol })?));
        }
        Command::Search { config, seeds, rng_seed, seed_mode, out } => {
            let mut cfg = SearchConfig::from_path(&config)?;
            cfg.seed_count = seeds.unwrap_or(cfg.seed_count);
            cfg.rng_seed = rng_seed.unwrap_or(cfg.rng_seed);
            cfg.seed_mode = seed_mode.map_or(cfg.seed_mode, Into::into);
            let report = run_search_report(&cfg)?;
            let s = &report.stats;
            eprintln!(
                "{} seeds, sampler acceptance {:.4}, {} verified",
                s.seeds,
                s.sampler_accepted as f64 / s.sampler_drawn.max(1) as f64,
                s.verified
            );
            let text = to_json(&report);
            match out {
                Some(path) => write_text(&path, &text)?,
                None => emit(&text),
            }
        }
        Command::Flex { net, start, t_end, samples, lengths, out } => {
            let net: NetInput = read_json(&net)?;
            let req = FlexRequest { net, start, t_end, samples, lengths: lengths_from(lengths.as_deref())? };
            let res = run_flex(&req)?;
            res.bundle.write(&out)?;
            if let Some(d) = &res.diagnostic {
                eprintln!("trace stopped early: {d}");
            }
            eprintln!("wrote {} samples to {}", res.bundle.samples.len(), out.display());
        }
        Command::Check { bundle } => {
            let report = run_check(&FlexionBundle::read(&bundle)?);
            emit(&to_json(&report));
            eprintln!("{}", report.summary());
            if !report.valid {
                return Err(Failure::Numeric(report.summary()));
            }
        }
        Command::Serve { port, host } => {
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Numeric(e.to_string()))?;
            rt.block_on(kokonet_cli::serve::serve(&host, port))
                .map_err(|source| Error::Io { path: format!("{host}:{port}").into(), source })?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: NumericFailure: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Kokonet(e)) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(match e {
                Error::Io { .. } | Error::Json { .. } => 4,
                ref e if e.is_domain_rejection() => 2,
                _ => 3,
            })
        }
    }
}
