use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::Args;
use intentnav_core::metrics::{aggregate, score_trial, write_report, LogBase};
use intentnav_core::TrialLog;

use crate::options::write_atomic;
use crate::Failure;

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Directory holding `.jsonl` trial logs.
    pub log_dir: PathBuf,
    /// Report path; the CSV goes to stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Logarithm base for log-loss.
    #[arg(long, value_enum, default_value = "e")]
    pub log_base: BaseArg,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum BaseArg {
    E,
    #[value(name = "2")]
    Two,
}

pub fn eval(args: EvalArgs) -> Result<(), Failure> {
    let base = match args.log_base {
        BaseArg::E => LogBase::E,
        BaseArg::Two => LogBase::Two,
    };
    let entries = std::fs::read_dir(&args.log_dir)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", args.log_dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    paths.sort();

    let mut scores = Vec::new();
    let mut valid = 0usize;
    for path in &paths {
        let parsed = File::open(path)
            .map_err(|e| e.to_string())
            .and_then(|f| TrialLog::read_jsonl(BufReader::new(f)).map_err(|e| e.to_string()));
        let parsed = match parsed {
            Ok(p) => p,
            Err(e) => {
                log::warn!("skipping {}: {e}", path.display());
                continue;
            }
        };
        if !parsed.skipped_lines.is_empty() {
            log::warn!(
                "{}: skipped corrupt lines {:?}",
                path.display(),
                parsed.skipped_lines
            );
        }
        if !parsed.log.is_complete() {
            log::warn!("{}: trial did not reach its goal", path.display());
        }
        match score_trial(&parsed.log, base) {
            Ok(s) => {
                scores.extend(s);
                valid += 1;
            }
            Err(e) => log::warn!("skipping {}: {e}", path.display()),
        }
    }
    if valid == 0 {
        return Err(Failure::Runtime(format!(
            "no valid logs in {}",
            args.log_dir.display()
        )));
    }
    let rows = aggregate(&scores).map_err(|e| Failure::Runtime(e.to_string()))?;
    match &args.report {
        Some(path) => {
            write_atomic(path, |f| {
                write_report(&rows, BufWriter::new(f)).map_err(std::io::Error::other)
            })
            .map_err(|e| Failure::Runtime(format!("writing {}: {e}", path.display())))?;
            eprintln!("{valid} logs, {} report rows -> {}", rows.len(), path.display());
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_report(&rows, &mut lock).map_err(|e| Failure::Runtime(e.to_string()))?;
            lock.flush().map_err(|e| Failure::Runtime(e.to_string()))?;
        }
    }
    Ok(())
}
