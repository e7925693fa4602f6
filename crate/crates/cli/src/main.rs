use clap::{Parser, Subcommand, ValueEnum};
use monodromic::cli::{emit_report, parse_input, run_with_jobs, Mode, ReportFormat};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "monodromic", version, about = "Center-focus analysis of monodromic singularities")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Ascending,
    Descending,
    Oracle,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Analyze the vector field described in FILE.
    Analyze {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        /// weight vector `p,q`
        #[arg(long, value_parser = parse_pair::<u32>)]
        weights: Option<(u32, u32)>,
        #[arg(long)]
        max_order: Option<usize>,
        /// leading-index scan window `a,b`
        #[arg(long, value_parser = parse_pair::<i64>, allow_hyphen_values = true)]
        m_window: Option<(i64, i64)>,
        #[arg(long)]
        tol_zero: Option<f64>,
        #[arg(long, value_enum, default_value = "json")]
        report: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// worker threads for sweeps (default: MONODROMIC_JOBS, else all cores)
        #[arg(long)]
        jobs: Option<usize>,
        /// skip the return-map oracle
        #[arg(long)]
        no_oracle: bool,
    },
}

fn parse_pair<T: std::str::FromStr>(s: &str) -> Result<(T, T), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let p = |x: &str| x.trim().parse::<T>().map_err(|_| format!("bad number `{x}`"));
    Ok((p(a)?, p(b)?))
}

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MONODROMIC_LOG", "warn")).init();
    let Cmd::Analyze { file, mode, weights, max_order, m_window, tol_zero, report, out, jobs, no_oracle } = Cli::parse().cmd;

    let text = match std::fs::read_to_string(&file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", file.display());
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let mut spec = match parse_input(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{}:{e}", file.display());
            return ExitCode::from(EXIT_INPUT);
        }
    };
    spec.set_mode(match mode {
        ModeArg::Auto => Mode::Auto,
        ModeArg::Ascending => Mode::AscendingOnly,
        ModeArg::Descending => Mode::DescendingOnly,
        ModeArg::Oracle => Mode::OracleOnly,
    });
    if weights.is_some() {
        spec.set_weights(weights);
    }
    if let Some(n) = max_order {
        spec.settings.expansion.max_order = n;
    }
    if let Some((a, b)) = m_window {
        if a > b {
            eprintln!("--m-window: {a} > {b}");
            return ExitCode::from(EXIT_INPUT);
        }
        spec.settings.expansion.m_min = a;
        spec.settings.expansion.m_max = b;
    }
    if let Some(t) = tol_zero {
        spec.settings.expansion.tol_zero = t;
    }
    if no_oracle {
        spec.settings.oracle = None;
    }
    let jobs = jobs
        .or_else(|| std::env::var("MONODROMIC_JOBS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    log::info!("analyzing {} with {jobs} workers", file.display());

    let rep = match run_with_jobs(&spec, jobs) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("worker pool: {e}");
            return ExitCode::from(EXIT_NUMERIC);
        }
    };
    let bytes = emit_report(
        &rep,
        match report {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Text => ReportFormat::Text,
        },
    );
    let written = match &out {
        Some(p) => std::fs::write(p, &bytes),
        None => std::io::Write::write_all(&mut std::io::stdout(), &bytes),
    };
    if let Err(e) = written {
        eprintln!("writing report: {e}");
        return ExitCode::from(EXIT_INPUT);
    }
    for (i, s) in rep.samples.iter().enumerate() {
        if let Some(e) = &s.error {
            log::warn!("sample {i}: {e}");
        }
    }
    if rep.all_failed() {
        ExitCode::from(EXIT_NUMERIC)
    } else {
        ExitCode::SUCCESS
    }
}
