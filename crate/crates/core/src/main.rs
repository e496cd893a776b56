use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use aswl::cli::commands::{self, DworkOptions, Outcome};
use aswl::cli::render::Format;
use aswl::cli::report;
use aswl::cli::spec::parse_spec;
use aswl::Error;

#[derive(Parser)]
#[command(name = "aswl", version, about = "L-functions and Newton polygons of Z_p-towers over P^1")]
struct Cli {
    /// Tower spec (JSON)
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Directory for the report and plot files; the report goes to stdout otherwise
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct DworkArgs {
    /// Initial matrix dimension
    #[arg(long = "dim", value_parser = clap::value_parser!(u64).range(1..))]
    dim: Option<u64>,
    /// p-adic working precision in digits
    #[arg(long = "prec", value_parser = clap::value_parser!(u32).range(1..))]
    prec: Option<u32>,
    /// Largest dimension the doubling loop may reach
    #[arg(long, default_value_t = 512, value_parser = clap::value_parser!(u64).range(1..))]
    max_dim: u64,
    /// Precision for the trace-formula check
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    trace_prec: u32,
}

impl DworkArgs {
    fn options(&self) -> DworkOptions {
        DworkOptions {
            dim: self.dim.map(|d| d as usize),
            prec: self.prec,
            max_dim: self.max_dim as usize,
            trace_prec: self.trace_prec,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotFormat {
    Svg,
    Ascii,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Invariants, conductor and degree tables, stability constants
    Info {
        #[arg(long, default_value_t = 3)]
        m_chi_max: u32,
    },
    /// Exact L-function by the Euler product, with all polygon checks
    Lfun {
        #[arg(long)]
        m_chi: u32,
    },
    /// L* through the Dwork trace formula, with cross checks
    Dwork {
        #[arg(long)]
        m_chi: u32,
        #[command(flatten)]
        dwork: DworkArgs,
    },
    /// All checks for every conductor up to the given one
    Verify {
        #[arg(long)]
        m_chi_max: u32,
        #[command(flatten)]
        dwork: DworkArgs,
    },
    /// Compare C*-polygons with another spec
    Compare {
        #[arg(long)]
        other: PathBuf,
        #[arg(long, default_value_t = 2)]
        m_chi: u32,
    },
    /// Polygon plot with the bound overlays
    Plot {
        #[arg(long, default_value_t = 1)]
        m_chi: u32,
        #[arg(long, value_enum, default_value_t = PlotFormat::Both)]
        format: PlotFormat,
        #[command(flatten)]
        dwork: DworkArgs,
    },
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Info { .. } => "info",
        Command::Lfun { .. } => "lfun",
        Command::Dwork { .. } => "dwork",
        Command::Verify { .. } => "verify",
        Command::Compare { .. } => "compare",
        Command::Plot { .. } => "plot",
    }
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let path = cli
        .spec
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("--spec is required".into()))?;
    let spec = parse_spec(path)?;
    match &cli.command {
        Command::Info { m_chi_max } => commands::info(&spec, *m_chi_max),
        Command::Lfun { m_chi } => commands::lfun_cmd(&spec, *m_chi),
        Command::Dwork { m_chi, dwork } => commands::dwork_cmd(&spec, *m_chi, &dwork.options()),
        Command::Verify { m_chi_max, dwork } => commands::verify(&spec, *m_chi_max, &dwork.options()),
        Command::Compare { other, m_chi } => {
            let b = parse_spec(other)?;
            commands::compare(&spec, &b, *m_chi)
        }
        Command::Plot { m_chi, format, dwork } => {
            let formats = match format {
                PlotFormat::Svg => vec![Format::Svg],
                PlotFormat::Ascii => vec![Format::Ascii],
                PlotFormat::Both => vec![Format::Svg, Format::Ascii],
            };
            commands::plot(&spec, *m_chi, &formats, &dwork.options())
        }
    }
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn emit(cli: &Cli, name: &str, value: &serde_json::Value, files: &[(String, String)]) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).expect("report serializes") + "\n";
    match &cli.out {
        Some(dir) => {
            write_file(dir, &format!("{name}.json"), &text)?;
            for (n, body) in files {
                write_file(dir, n, body)?;
            }
        }
        None => {
            print!("{text}");
            for (n, body) in files {
                if n.ends_with(".txt") {
                    print!("{body}");
                }
            }
        }
    }
    Ok(())
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("ASWL_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::InvalidArgument(format!("ASWL_THREADS={v:?} is not a positive integer")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    let result = configure_threads().and_then(|_| run(&cli));
    let code = match result {
        Ok(outcome) => match emit(&cli, name, &outcome.report, &outcome.files) {
            Ok(()) => {
                if outcome.pass {
                    0
                } else {
                    1
                }
            }
            Err(e) => {
                eprintln!("{e}");
                e.exit_code()
            }
        },
        Err(e) => {
            let v = report::error(&e);
            if emit(&cli, name, &v, &[]).is_err() {
                println!("{}", serde_json::to_string_pretty(&v).unwrap());
            }
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
