use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use gwrecon::job::{run, to_csv, Job};
use gwrecon::{selftest, Error};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Reconstruct J-functions, S-matrices and invariants from a JSON job file.
#[derive(Parser, Debug)]
#[command(version)]
struct Args {
    /// job file (JSON)
    #[arg(long, required_unless_present = "selftest")]
    job: Option<PathBuf>,
    /// output file; stdout if absent
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// run the acceptance suite and report one line per criterion
    #[arg(long, conflicts_with = "job")]
    selftest: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Validation(_) => 2,
        _ => 3,
    }
}

fn execute(args: &Args) -> Result<(String, bool), Error> {
    let path = args.job.as_ref().expect("clap enforces --job");
    let text = std::fs::read_to_string(path).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
    let job = Job::parse(&text)?;
    let outcome = run(&job)?;
    let body = match args.format {
        Format::Json => serde_json::to_string_pretty(&outcome.document).expect("serializable") + "\n",
        Format::Csv => to_csv(&job, &outcome.document)?,
    };
    Ok((body, outcome.ok))
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(k) = args.threads {
        if k == 0 {
            eprintln!("error: --threads must be ≥ 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global().expect("thread pool set once");
    }

    if args.selftest {
        let results = selftest::run(None);
        for c in &results {
            println!("{c}");
        }
        let passed = results.iter().filter(|c| c.passed).count();
        println!("{passed}/{} criteria passed", results.len());
        return if passed == results.len() { ExitCode::SUCCESS } else { ExitCode::from(3) };
    }

    let (body, ok) = match execute(&args) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    match &args.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &body) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(3);
            }
        }
        None => print!("{body}"),
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: a consistency check failed; see \"ok\" in the output");
        ExitCode::from(3)
    }
}
