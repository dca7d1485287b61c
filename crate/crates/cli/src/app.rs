use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use levyfluct::identities::{
    inverse_local_time_exponent, local_time_jump_rate, lower_passage_transform, two_sided_exit,
    upper_passage_transform, TransformQuery,
};
use levyfluct::sim::{
    estimate_passage_functional, estimate_two_sided_exit, simulate_with, McEstimate, Mode, Passage,
    RngNoise, Stop,
};
use levyfluct::{Backend, ProcessSpec, ScaleEvaluator};

use crate::config::{parse_config_file, ConfigError, RunConfig};
use crate::report::ReportError;
use crate::suite::{default_suite, SuiteParams};
use crate::{EXIT_OK, EXIT_USAGE, EXIT_VALIDATION_FAILED};

const THREADS_VAR: &str = "LEVYFLUCT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "levyfluct",
    version,
    about = "Fluctuation identities for reflected spectrally negative Levy processes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ConfigArg {
    /// Process configuration (JSON).
    #[arg(long)]
    config: PathBuf,
}

#[derive(Debug, Args)]
struct QueryArgs {
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// `closed-form` or `numeric-inversion`.
    #[arg(long)]
    backend: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Laplace exponent phi(alpha), or its derivative.
    Exponent {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        derivative: bool,
    },
    /// Right inverse Phi(q).
    PhiInverse {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        q: Option<f64>,
    },
    /// Table of W^(q), its right derivative and Z^(q)(alpha, .) on (0, x_max].
    Scale {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        x_max: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long)]
        backend: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One fluctuation identity.
    Transform {
        which: TransformKind,
        #[command(flatten)]
        config: ConfigArg,
        #[command(flatten)]
        query: QueryArgs,
    },
    /// Simulate one reflected path, or estimate a passage functional.
    Simulate {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        x0: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        /// `upper`, `lower`, `either`, `u=<level>` or `t=<horizon>`.
        #[arg(long)]
        stop: Option<String>,
        /// Euler step; exact simulation when absent.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        estimate: Option<EstimateKind>,
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare identities with simulation and write a report.
    Validate {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value = "default")]
        suite: String,
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        query: QueryArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TransformKind {
    Upper,
    Lower,
    Exit,
    Exponent,
    Rate,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EstimateKind {
    Upper,
    Lower,
    Exit,
}

#[derive(Debug, thiserror::Error)]
enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] levyfluct::Error),
    #[error("I/O: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Report(#[from] ReportError),
}

type AppResult<T> = Result<T, AppError>;

/// Runs the command line and returns the process exit status.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn configure_threads() -> AppResult<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        AppError::Usage(format!(
            "{THREADS_VAR} must be a positive integer, got {raw:?}"
        ))
    })?;
    // a pool installed earlier in this process wins
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn need<T>(flag: Option<T>, config: Option<T>, name: &str) -> AppResult<T> {
    flag.or(config)
        .ok_or_else(|| AppError::Usage(format!("missing --{name} (or run.{name} in the config)")))
}

fn backend(flag: Option<&str>, cfg: &RunConfig) -> AppResult<Backend> {
    match flag {
        Some(s) => Ok(s.parse()?),
        None => Ok(cfg.run.backend.unwrap_or(Backend::ClosedForm)),
    }
}

fn mode(spec: &ProcessSpec<f64>, dt: Option<f64>) -> AppResult<Mode> {
    match dt {
        Some(dt) => Ok(Mode::EulerGrid(dt)),
        None if spec.is_bounded_variation() => Ok(Mode::EventExact),
        None => Err(AppError::Usage("--dt is required when sigma2 > 0".into())),
    }
}

fn parse_stop(s: &str) -> AppResult<Stop> {
    let level = |v: &str| -> AppResult<f64> {
        v.parse()
            .map_err(|_| AppError::Usage(format!("bad number in --stop {s:?}")))
    };
    match s {
        "upper" => Ok(Stop::FirstUpperPassage),
        "lower" => Ok(Stop::FirstLowerPassage),
        "either" => Ok(Stop::EitherPassage),
        _ => match s.split_once('=') {
            Some(("u", v)) => Ok(Stop::UpperLocalTime(level(v)?)),
            Some(("t", v)) => Ok(Stop::Horizon(level(v)?)),
            _ => Err(AppError::Usage(format!("unknown --stop {s:?}"))),
        },
    }
}

fn output(path: Option<&PathBuf>) -> AppResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_estimate(e: &McEstimate) {
    let json = serde_json::json!({ "mean": e.mean, "std_error": e.std_error, "n": e.n });
    println!("{json}");
}

fn dispatch(command: Command) -> AppResult<i32> {
    match command {
        Command::Exponent {
            config,
            alpha,
            derivative,
        } => {
            let cfg = parse_config_file(&config.config)?;
            let alpha = need(alpha, cfg.run.alpha, "alpha")?;
            let v = if derivative {
                cfg.process.phi_prime(alpha)?
            } else {
                cfg.process.phi(alpha)?
            };
            println!("{v:?}");
        }
        Command::PhiInverse { config, q } => {
            let cfg = parse_config_file(&config.config)?;
            let q = need(q, cfg.run.q, "q")?;
            println!("{:?}", cfg.process.right_inverse(q)?);
        }
        Command::Scale {
            config,
            q,
            alpha,
            x_max,
            points,
            backend: b,
            out,
        } => {
            let cfg = parse_config_file(&config.config)?;
            let q = need(q, cfg.run.q, "q")?;
            let ev = ScaleEvaluator::new(&cfg.process, q, backend(b.as_deref(), &cfg)?)?;
            let alpha = alpha.or(cfg.run.alpha).unwrap_or(ev.phi_q());
            if !(x_max > 0.0 && x_max.is_finite()) || points == 0 {
                return Err(AppError::Usage("need --x-max > 0 and --points >= 1".into()));
            }
            let mut w = output(out.as_ref().or(cfg.run.out.as_ref()))?;
            writeln!(w, "x,w_q,w_q_prime,z_q_alpha")?;
            for i in 1..=points {
                let x = x_max * i as f64 / points as f64;
                writeln!(
                    w,
                    "{x:.16e},{:.16e},{:.16e},{:.16e}",
                    ev.w_q(x)?,
                    ev.w_q_right_derivative(x)?,
                    ev.z_q(alpha, x)?
                )?;
            }
            w.flush()?;
        }
        Command::Transform {
            which,
            config,
            query,
        } => {
            let cfg = parse_config_file(&config.config)?;
            let r = &cfg.run;
            let q = need(query.q, r.q, "q")?;
            let ev =
                ScaleEvaluator::new(&cfg.process, q, backend(query.backend.as_deref(), &cfg)?)?;
            let b = need(query.b, r.b, "b")?;
            let value = match which {
                TransformKind::Rate => local_time_jump_rate(&ev, b)?,
                TransformKind::Exponent => {
                    inverse_local_time_exponent(&ev, need(query.alpha, r.alpha, "alpha")?, b)?
                }
                TransformKind::Exit => {
                    let x0 = need(query.x0, r.x0, "x0")?;
                    if !(0.0..=b).contains(&x0) {
                        return Err(AppError::Usage(format!("x0 = {x0} outside [0, {b}]")));
                    }
                    two_sided_exit(&ev, x0, b - x0)?
                }
                TransformKind::Upper | TransformKind::Lower => {
                    let tq = TransformQuery::new(
                        q,
                        need(query.alpha, r.alpha, "alpha")?,
                        query.theta.or(r.theta).unwrap_or(0.0),
                        need(query.x0, r.x0, "x0")?,
                        b,
                    );
                    if matches!(which, TransformKind::Upper) {
                        upper_passage_transform(&ev, &tq)?.value
                    } else {
                        lower_passage_transform(&ev, &tq)?.value
                    }
                }
            };
            println!("{value:?}");
        }
        Command::Simulate {
            config,
            x0,
            b,
            stop,
            dt,
            seed,
            estimate,
            paths,
            q,
            alpha,
            theta,
            out,
        } => {
            let cfg = parse_config_file(&config.config)?;
            let r = &cfg.run;
            let x0 = need(x0, r.x0, "x0")?;
            let b = need(b, r.b, "b")?;
            let seed = seed.or(r.seed).unwrap_or(0);
            let mode = mode(&cfg.process, dt.or(r.dt))?;
            match estimate {
                None => {
                    let stop =
                        parse_stop(&stop.ok_or_else(|| AppError::Usage("missing --stop".into()))?)?;
                    let path = simulate_with(
                        &cfg.process,
                        x0,
                        b,
                        mode,
                        stop,
                        &mut RngNoise::for_path(seed, 0),
                    )?;
                    let mut w = output(out.as_ref().or(r.out.as_ref()))?;
                    path.write_csv(&mut w)?;
                    w.flush()?;
                }
                Some(kind) => {
                    let n = need(paths, r.n_paths, "paths")?;
                    let q = q.or(r.q).unwrap_or(0.0);
                    let est = match kind {
                        EstimateKind::Exit => {
                            if !(0.0..=b).contains(&x0) {
                                return Err(AppError::Usage(format!("x0 = {x0} outside [0, {b}]")));
                            }
                            estimate_two_sided_exit(&cfg.process, q, x0, b - x0, n, seed, mode)?
                        }
                        EstimateKind::Upper | EstimateKind::Lower => {
                            let tq = TransformQuery::new(
                                q,
                                alpha.or(r.alpha).unwrap_or(0.0),
                                theta.or(r.theta).unwrap_or(0.0),
                                x0,
                                b,
                            );
                            let which = if matches!(kind, EstimateKind::Upper) {
                                Passage::Upper
                            } else {
                                Passage::Lower
                            };
                            estimate_passage_functional(&cfg.process, &tq, which, n, seed, mode)?
                        }
                    };
                    print_estimate(&est);
                }
            }
        }
        Command::Validate {
            config,
            suite,
            paths,
            seed,
            dt,
            out,
            query,
        } => {
            if suite != "default" {
                return Err(AppError::Usage(format!(
                    "unknown suite {suite:?}; available: default"
                )));
            }
            let cfg = parse_config_file(&config.config)?;
            let r = &cfg.run;
            let params = SuiteParams {
                q: query.q.or(r.q).unwrap_or(0.1),
                alpha: query.alpha.or(r.alpha),
                theta: query.theta.or(r.theta).unwrap_or(0.3),
                x0: query.x0.or(r.x0).unwrap_or(1.0),
                b: query.b.or(r.b).unwrap_or(2.0),
                n_paths: paths.or(r.n_paths).unwrap_or(10_000),
                seed: seed.or(r.seed).unwrap_or(0),
                mode: mode(&cfg.process, dt.or(r.dt))?,
                backend: backend(query.backend.as_deref(), &cfg)?,
            };
            let report = default_suite(&cfg.process, &params)?;
            let w = output(out.as_ref().or(r.out.as_ref()))?;
            report.write_csv(w)?;
            let passed = report.rows.iter().filter(|row| row.pass).count();
            eprintln!(
                "validation: {passed}/{} rows within 3 standard errors",
                report.rows.len()
            );
            if !report.all_pass() {
                return Ok(EXIT_VALIDATION_FAILED);
            }
        }
    }
    Ok(EXIT_OK)
}
