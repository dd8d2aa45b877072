use std::io::BufWriter;
use std::path::PathBuf;

use clap::Args;
use intentnav_core::run_scripted_trial;
use rayon::prelude::*;

use crate::options::{write_atomic, ModelArgs};
use crate::{Failure, LOG_DIR_ENV};

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of trials.
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    /// Output directory for trial logs.
    #[arg(long, env = LOG_DIR_ENV, default_value = "logs")]
    pub out: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

pub fn run(args: RunArgs) -> Result<(), Failure> {
    if args.trials == 0 {
        return Err(Failure::Usage("trials must be ≥ 1".into()));
    }
    let scenario = args.model.scenario()?;
    let config = args.model.config()?;
    let methods = args.model.methods();
    std::fs::create_dir_all(&args.out).map_err(|e| {
        Failure::Runtime(format!("cannot create {}: {e}", args.out.display()))
    })?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| Failure::Runtime(e.to_string()))?;

    let written: Result<Vec<PathBuf>, Failure> = pool.install(|| {
        (0..args.trials)
            .into_par_iter()
            .map(|i| {
                let seed = args.model.seed.wrapping_add(i);
                let log = run_scripted_trial(&scenario, &methods, &config, seed)
                    .map_err(|e| Failure::Runtime(format!("trial {i} (seed {seed}): {e}")))?;
                if !log.is_complete() {
                    log::warn!("trial {i} (seed {seed}) ran out of ticks before capture");
                }
                let path = args
                    .out
                    .join(format!("{}-trial{i:04}-seed{seed}.jsonl", scenario.id));
                write_atomic(&path, |f| log.write_jsonl(BufWriter::new(f)))
                    .map_err(|e| Failure::Runtime(format!("writing {}: {e}", path.display())))?;
                Ok(path)
            })
            .collect()
    });
    let written = written?;
    println!(
        "wrote {} logs for scenario {} to {}",
        written.len(),
        scenario.id,
        args.out.display()
    );
    Ok(())
}
