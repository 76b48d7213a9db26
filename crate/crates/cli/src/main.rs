use clap::{Parser, Subcommand};
use opverify::chain::{homology, ChainComplex};
use opverify::error::Error;
use opverify::report::{emit_report, parse_report, run_suite, Config, Format};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "opverify", version, about = "Exact homology checks for operads, coalgebras and their realizations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct Opts {
    /// key = value config file, overridden by the flags below
    #[arg(long)]
    config: Option<String>,
    #[arg(long)]
    arity: Option<usize>,
    /// lo,hi
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long)]
    smax: Option<usize>,
    /// comma-separated stage orders
    #[arg(long)]
    stages: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// write the report here instead of stdout
    #[arg(long)]
    out: Option<String>,
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a suite: coalgebra, symseq, operad, barcobar, theorem-a, resolution, transfer or all
    Verify {
        suite: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Print the homology of a chain complex in text form
    Homology { file: String },
    /// Re-emit a saved JSON report
    Report {
        file: String,
        #[arg(long, default_value = "markdown")]
        format: String,
        #[arg(long)]
        out: Option<String>,
    },
}

fn config(o: &Opts) -> Result<Config, Error> {
    let mut c = match &o.config {
        Some(p) => Config::from_text(&read(p)?)?,
        None => Config::default(),
    };
    if let Some(a) = o.arity {
        c.arity = a;
    }
    if let Some(w) = &o.window {
        c.set("window", w)?;
    }
    if let Some(s) = o.smax {
        c.s_max = s;
    }
    if let Some(s) = &o.stages {
        c.set("stages", s)?;
    }
    if let Some(s) = o.seed {
        c.seed = s;
    }
    c.validate()?;
    Ok(c)
}

fn read(p: &str) -> Result<String, Error> {
    std::fs::read_to_string(p).map_err(|e| Error::Usage(format!("{p}: {e}")))
}

fn write(out: &Option<String>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Usage(format!("{p}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.cmd {
        Cmd::Verify { suite, opts } => {
            let cfg = config(&opts)?;
            let fmt: Format = opts.format.parse()?;
            let r = run_suite(&suite, &cfg)?;
            write(&opts.out, &emit_report(&r, fmt))?;
            for c in r.checks() {
                eprintln!("{:<13} {}", c.verdict.to_string(), c.name);
            }
            Ok(r.exit_code())
        }
        Cmd::Homology { file } => {
            let c = ChainComplex::from_text(&read(&file)?)?;
            for (n, k) in homology(&c).nonzero() {
                println!("H{n} = {k}");
            }
            Ok(0)
        }
        Cmd::Report { file, format, out } => {
            let r = parse_report(&read(&file)?)?;
            let fmt: Format = format.parse()?;
            write(&out, &emit_report(&r, fmt))?;
            Ok(r.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(Error::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
