use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use biquad::convert::{to_game, GameReport};
use biquad::optimize::{evaluate_surface, optimize, write_surface_csv, OptimizeConfig};
use biquad::oracle::{brute_force_value, OracleReport};
use biquad::output::to_json;
use biquad::state::{extract_state, StateReport};
use biquad::tilted::{TiltedParams, TiltedReport};
use biquad::{AnticommPoint, BiasPolynomial, Error, ErrorClass};
use clap::{Args, Parser, Subcommand};

const THREADS_ENV: &str = "BIQUAD_THREADS";

#[derive(Parser)]
#[command(
    name = "biquad",
    version,
    about = "Maximal biases of two-player binary games via 2x2 anticommutation representations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximal bias, best anticommutation points and best-set segments.
    Value {
        #[command(flatten)]
        input: PolyInput,
        #[command(flatten)]
        search: SearchArgs,
        /// Include the coarse surface in the JSON output.
        #[arg(long)]
        with_grid: bool,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Norm surface on a uniform grid as CSV (s,t,norm).
    Surface {
        #[command(flatten)]
        input: PolyInput,
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Optimal state, Schmidt data and moments at the best point.
    State {
        #[command(flatten)]
        input: PolyInput,
        #[command(flatten)]
        search: SearchArgs,
        /// Evaluate at this anticommutation point instead of the best one.
        #[arg(long, value_name = "S,T", value_parser = parse_point, allow_hyphen_values = true)]
        at: Option<(f64, f64)>,
        /// Longest word per side in the moment table.
        #[arg(long, default_value_t = 2)]
        max_len: usize,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Closed forms for the tilted CHSH family.
    Tilted {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Shift a bias polynomial into a positive game polynomial.
    Convert {
        #[command(flatten)]
        input: PolyInput,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Brute-force lower bound from sampled qubit strategies.
    Oracle {
        #[command(flatten)]
        input: PolyInput,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[command(flatten)]
        output: OutputArg,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct PolyInput {
    /// Bias polynomial JSON file.
    #[arg(short, long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Inline bias polynomial JSON.
    #[arg(long, value_name = "JSON")]
    poly: Option<String>,
}

impl PolyInput {
    fn load(&self) -> Result<BiasPolynomial, Error> {
        let text = match (&self.input, &self.poly) {
            (Some(path), _) => fs::read_to_string(path)?,
            (None, Some(inline)) => inline.clone(),
            (None, None) => unreachable!("clap enforces one input source"),
        };
        BiasPolynomial::from_json(&text)
    }
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 101)]
    grid: usize,
    #[arg(long, default_value_t = 6)]
    refine: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

impl SearchArgs {
    fn config(&self) -> OptimizeConfig {
        OptimizeConfig {
            grid_n: self.grid,
            refine_iters: self.refine,
            tol: self.tol,
        }
    }
}

#[derive(Args)]
struct OutputArg {
    /// Write the artifact here instead of stdout.
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
}

impl OutputArg {
    fn emit(&self, text: &str) -> Result<(), Error> {
        match &self.output {
            Some(path) => fs::write(path, text)?,
            None => io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn parse_point(text: &str) -> Result<(f64, f64), String> {
    let (s, t) = text
        .split_once(',')
        .ok_or_else(|| format!("expected S,T but got {text:?}"))?;
    let parse = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
    Ok((parse(s)?, parse(t)?))
}

fn json_line<T: serde::Serialize>(value: &T) -> Result<String, Error> {
    Ok(to_json(value)? + "\n")
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Value {
            input,
            search,
            with_grid,
            output,
        } => {
            let result = optimize(&input.load()?, &search.config())?;
            let result = if with_grid {
                result
            } else {
                result.without_grid()
            };
            output.emit(&json_line(&result)?)
        }
        Command::Surface {
            input,
            grid,
            output,
        } => {
            let samples = evaluate_surface(&input.load()?, grid)?;
            let mut buf = Vec::new();
            write_surface_csv(&samples, &mut buf)?;
            output.emit(&String::from_utf8(buf).expect("CSV is ASCII"))
        }
        Command::State {
            input,
            search,
            at,
            max_len,
            output,
        } => {
            let poly = input.load()?;
            let point = match at {
                Some((s, t)) => AnticommPoint::new(s, t)?,
                None => optimize(&poly, &search.config())?.best_points[0],
            };
            let state = extract_state(&poly, point)?;
            output.emit(&json_line(&StateReport::new(&state, max_len)?)?)
        }
        Command::Tilted {
            alpha,
            beta,
            output,
        } => {
            if !(alpha.is_finite() && beta.is_finite()) {
                return Err(Error::Config("alpha and beta must be finite".into()));
            }
            output.emit(&json_line(&TiltedReport::new(TiltedParams::new(
                alpha, beta,
            )))?)
        }
        Command::Convert { input, output } => {
            let game = to_game(&input.load()?)?;
            output.emit(&json_line(&GameReport::from(&game))?)
        }
        Command::Oracle {
            input,
            samples,
            seed,
            output,
        } => {
            let best = brute_force_value(&input.load()?, samples, seed)?;
            output.emit(&json_line(&OracleReport::from(&best))?)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer (got {raw:?})"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error [config]: {msg}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error [{}]: {err}", err.contract());
            match err.class() {
                ErrorClass::Input | ErrorClass::Io => ExitCode::from(2),
                ErrorClass::Precondition => ExitCode::from(3),
            }
        }
    }
}
