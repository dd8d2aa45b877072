use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;

use clap::Args;
use intentnav_session::{ServiceConfig, SessionOptions};

use crate::options::ModelArgs;
use crate::{Failure, LOG_DIR_ENV};

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 8090)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: IpAddr,
    /// Directory of console assets served at `/`.
    #[arg(long)]
    pub assets: Option<PathBuf>,
    /// Where session logs are written.
    #[arg(long, env = LOG_DIR_ENV, default_value = "logs")]
    pub log_dir: PathBuf,
}

pub fn serve(args: ServeArgs) -> Result<(), Failure> {
    let scenario = args.model.scenario()?;
    let config = args.model.config()?;
    if let Some(dir) = &args.assets {
        if !dir.is_dir() {
            return Err(Failure::Usage(format!(
                "assets directory {} does not exist",
                dir.display()
            )));
        }
    }
    let mut service = ServiceConfig::new(
        scenario,
        SessionOptions {
            methods: args.model.methods(),
            config,
            seed: args.model.seed,
            log_dir: Some(args.log_dir.clone()),
        },
    );
    service.assets = args.assets.clone();

    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Runtime(e.to_string()))?;
    runtime.block_on(async move {
        let addr = SocketAddr::new(args.host, args.port);
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| Failure::Runtime(format!("cannot listen on {addr}: {e}")))?;
        let local = listener
            .local_addr()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
        eprintln!("listening on ws://{local}/session");
        intentnav_session::serve(listener, service, async {
            let _ = tokio::signal::ctrl_c().await;
            eprintln!("shutting down");
        })
        .await
        .map_err(|e| Failure::Runtime(e.to_string()))
    })
}
