use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use tmngbs::compare_engines;
use tmngbs::sweep::{
    all_specs, prepare_fixed, report_line, reproduce_figures, run_sweep, table1_report, PGrid, StateFamily,
    SweepConfig, SweepError, Table1Grid, REPORT_HEADER,
};

#[derive(Parser)]
#[command(
    name = "tmngbs",
    version,
    about = "Moments and nonclassicality witnesses of two-mode generalized binomial states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep witnesses over a p grid and write sweep.csv (and SVG plots).
    Sweep(SweepArgs),
    /// Regenerate all figure panels and the engine discrepancy report.
    Figures {
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify every criterion as present or absent over a parameter grid.
    Table1 {
        /// Comma-separated total photon numbers.
        #[arg(long = "M", value_name = "LIST")]
        m: Option<String>,
        /// Comma-separated q values.
        #[arg(long, allow_hyphen_values = true, value_name = "LIST")]
        q: Option<String>,
        /// p grid as start:end:steps.
        #[arg(long, value_name = "GRID")]
        p: Option<String>,
    },
    /// Print both engines' values for every moment up to --max-order as CSV.
    Compare {
        #[arg(long, default_value = "ngbs")]
        state: String,
        #[arg(long = "M")]
        m: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        q: f64,
        #[arg(long, default_value_t = 4)]
        max_order: u32,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// key = value file; flags given alongside override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// ngbs, binomial, fock or coherent.
    #[arg(long)]
    state: Option<String>,
    #[arg(long = "M")]
    m: Option<String>,
    /// Comma-separated q values.
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// p grid as start:end:steps.
    #[arg(long)]
    p: Option<String>,
    /// Witness such as hoa:9,1, sx, sy, ssd:pi/6, sv, epr:literal, su11, cs.
    /// Repeatable, or comma-separated.
    #[arg(long)]
    witness: Vec<String>,
    /// paper, oracle or both.
    #[arg(long)]
    engine: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or svg+csv.
    #[arg(long)]
    format: Option<String>,
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, SweepError> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| SweepError::Config(format!("bad {what} '{x}'"))))
        .collect()
}

fn sweep_config(args: SweepArgs) -> Result<SweepConfig, SweepError> {
    let mut pairs = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| SweepError::Io {
                path: path.clone(),
                source: e,
            })?;
            SweepConfig::parse_file_text(&text)?
        }
        None => BTreeMap::new(),
    };
    let mut set = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            pairs.insert(k.to_string(), v);
        }
    };
    set("state", args.state);
    set("M", args.m);
    set("q", args.q);
    set("p", args.p);
    set("engine", args.engine);
    set("out", args.out.map(|p| p.display().to_string()));
    set("format", args.format);
    if !args.witness.is_empty() {
        pairs.remove("witnesses");
        pairs.insert("witness".into(), args.witness.join(","));
    }
    SweepConfig::from_pairs(&pairs)
}

fn run(cmd: Command) -> Result<(), SweepError> {
    match cmd {
        Command::Sweep(args) => {
            let cfg = sweep_config(args)?;
            let out = run_sweep(&cfg)?;
            println!("{} rows", out.rows.len());
            for f in out.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Figures { out } => {
            for f in reproduce_figures(&out)? {
                println!("wrote {}", f.display());
            }
        }
        Command::Table1 { m, q, p } => {
            let mut grid = Table1Grid::default();
            if let Some(m) = m {
                grid.ms = parse_list(&m, "M")?;
            }
            if let Some(q) = q {
                grid.qs = parse_list(&q, "q")?;
            }
            if let Some(p) = p {
                grid.p = p.parse::<PGrid>()?;
            }
            if grid.ms.is_empty() || grid.qs.is_empty() {
                return Err(SweepError::Config("empty M or q list".into()));
            }
            println!("{}", table1_report(&grid));
        }
        Command::Compare {
            state,
            m,
            p,
            q,
            max_order,
        } => {
            let family: StateFamily = state.parse().map_err(SweepError::Config)?;
            let st = prepare_fixed(family, m, p, q)?;
            let mut text = format!("{REPORT_HEADER}\n");
            for r in compare_engines(&st, &all_specs(max_order)) {
                text.push_str(&report_line(&r));
                text.push('\n');
            }
            // a closed pipe downstream is not an error
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
