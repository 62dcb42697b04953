use anyhow::{bail, Context};
use clap::Parser;
use gstensor::groupscheme::TensorConfig;
use gstensor_cli::{evaluate, parse, Config, EvalError};
use std::io::Read;
use std::process::ExitCode;

/// Tensor products of finite commutative group schemes over finite fields.
#[derive(Parser, Debug)]
#[command(name = "gstensor", version)]
struct Cli {
    /// Expression such as `tensor(Z/(2), mu(2)) @ F(2,1)`; read from stdin when absent.
    expr: Option<String>,
    /// Support bound B for the unipotent sequences.
    #[arg(long, default_value_t = 8)]
    trunc: usize,
    /// Tower cap: field levels for pairings and truncations of towers.
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// Emit the JSON report instead of text.
    #[arg(long)]
    json: bool,
    /// Print growth profiles even when everything stabilized.
    #[arg(long)]
    profile: bool,
}

const EXIT_USAGE: u8 = 1;
const EXIT_NON_STABILIZING: u8 = 2;

fn precision_override() -> anyhow::Result<Option<u32>> {
    match std::env::var("DK_PRECISION") {
        Ok(s) => {
            let n: u32 = s.trim().parse().with_context(|| format!("DK_PRECISION={s:?} is not a precision"))?;
            if n == 0 {
                bail!("DK_PRECISION must be positive");
            }
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

fn caret(input: &str, line: usize, col: usize) -> String {
    let text = input.lines().nth(line - 1).unwrap_or("");
    format!("  {text}\n  {}^", " ".repeat(col.saturating_sub(1)))
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let input = match cli.expr {
        Some(s) => s,
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).context("reading the expression from stdin")?;
            s
        }
    };
    let cfg = Config {
        tensor: TensorConfig { bound: cli.trunc, levels: cli.levels },
        precision: precision_override()?,
    };
    let expr = match parse(&input) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}\n{}", caret(&input, e.pos.line, e.pos.col));
            return Ok(ExitCode::from(EXIT_USAGE));
        }
    };
    let value = match evaluate(&expr, &cfg) {
        Ok(v) => v,
        Err(e @ EvalError::NonStabilizing(_)) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(EXIT_NON_STABILIZING));
        }
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(EXIT_USAGE));
        }
    };
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&value.to_json())?);
    } else {
        print!("{}", value.render_text(cli.profile));
    }
    Ok(if value.stabilized() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_NON_STABILIZING) })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
