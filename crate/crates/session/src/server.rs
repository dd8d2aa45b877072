//! HTTP side: the `/session` websocket and optional static assets.
//!
//! One session at a time. A second upgrade request while a session runs is
//! answered with 409. The tick loop owns all simulation state; the socket
//! reader only forwards decoded frames through a channel that is drained at
//! each tick boundary.

use std::future::Future;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use futures::stream::SplitSink;
use futures::{SinkExt, StreamExt};
use intentnav_core::Scenario;
use tokio::net::TcpListener;
use tokio::sync::{mpsc, watch, Mutex, OwnedMutexGuard};
use tokio::time::MissedTickBehavior;
use tower_http::services::ServeDir;

use crate::protocol::{decode, encode, ClientMessage, ErrorReply, ServerMessage, MALFORMED};
use crate::session::{SessionCore, SessionOptions};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub scenario: Scenario,
    pub session: SessionOptions,
    /// Wall-clock length of one tick. Defaults to `1 / tick_rate`.
    pub tick_period: Duration,
    /// Directory served at `/` for the browser console.
    pub assets: Option<PathBuf>,
}

impl ServiceConfig {
    pub fn new(scenario: Scenario, session: SessionOptions) -> Self {
        let tick_period = Duration::from_secs_f64(1.0 / session.config.tick_rate());
        Self {
            scenario,
            session,
            tick_period,
            assets: None,
        }
    }
}

#[derive(Clone)]
struct AppState {
    config: Arc<ServiceConfig>,
    slot: Arc<Mutex<()>>,
    shutdown: watch::Receiver<bool>,
}

fn router(state: AppState) -> Router {
    let assets = state.config.assets.clone();
    let router = Router::new().route("/session", get(upgrade));
    let router = match assets {
        Some(dir) => router.fallback_service(ServeDir::new(dir)),
        None => router,
    };
    router.with_state(state)
}

/// Serves until `shutdown` resolves, then stops the running session (its
/// log is flushed) and returns.
pub async fn serve(
    listener: TcpListener,
    config: ServiceConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let (stop, stopped) = watch::channel(false);
    let slot = Arc::new(Mutex::new(()));
    let app = router(AppState {
        config: Arc::new(config),
        slot: slot.clone(),
        shutdown: stopped,
    });
    axum::serve(listener, app)
        .with_graceful_shutdown(async move {
            shutdown.await;
            let _ = stop.send(true);
        })
        .await?;
    let _ = slot.lock().await;
    Ok(())
}

async fn upgrade(ws: WebSocketUpgrade, State(state): State<AppState>) -> Response {
    let Ok(guard) = state.slot.clone().try_lock_owned() else {
        return (StatusCode::CONFLICT, "a session is already running").into_response();
    };
    ws.on_upgrade(move |socket| run_session(socket, state, guard))
}

type Sink = SplitSink<WebSocket, Message>;

async fn send(sink: &mut Sink, msg: &ServerMessage) -> bool {
    sink.send(Message::Text(encode(msg).into())).await.is_ok()
}

enum Inbound {
    Message(ClientMessage),
    Rejected(ErrorReply),
}

async fn run_session(socket: WebSocket, state: AppState, _slot: OwnedMutexGuard<()>) {
    let config = &state.config;
    let mut core = match SessionCore::new(config.scenario.clone(), config.session.clone()) {
        Ok(core) => core,
        Err(e) => {
            log::error!("cannot start session: {e}");
            return;
        }
    };
    let (mut sink, mut stream) = socket.split();
    let (inbox_tx, mut inbox) = mpsc::unbounded_channel();
    let reader = tokio::spawn(async move {
        while let Some(Ok(frame)) = stream.next().await {
            let item = match frame {
                Message::Text(text) => match decode(text.as_str()) {
                    Ok(msg) => Inbound::Message(msg),
                    Err(reply) => Inbound::Rejected(reply),
                },
                Message::Binary(_) => {
                    Inbound::Rejected(ErrorReply::new(MALFORMED, "binary frames are not supported"))
                }
                Message::Close(_) => break,
                _ => continue,
            };
            if inbox_tx.send(item).is_err() {
                break;
            }
        }
    });

    log::info!("session started on scenario {}", config.scenario.id);
    let mut shutdown = state.shutdown.clone();
    let mut connected = send(&mut sink, &core.map_snapshot()).await;
    let mut ticks = tokio::time::interval(config.tick_period);
    ticks.set_missed_tick_behavior(MissedTickBehavior::Burst);
    while connected {
        tokio::select! {
            _ = ticks.tick() => {
                let mut out = Vec::new();
                loop {
                    match inbox.try_recv() {
                        Ok(Inbound::Message(msg)) => match core.handle(msg) {
                            Ok(replies) => out.extend(replies),
                            Err(reply) => out.push(ServerMessage::Error(reply)),
                        },
                        Ok(Inbound::Rejected(reply)) => out.push(ServerMessage::Error(reply)),
                        Err(mpsc::error::TryRecvError::Empty) => break,
                        Err(mpsc::error::TryRecvError::Disconnected) => {
                            connected = false;
                            break;
                        }
                    }
                }
                if !connected {
                    break;
                }
                match core.tick() {
                    Ok(msgs) => out.extend(msgs),
                    Err(e) => {
                        log::error!("session tick failed: {e}");
                        break;
                    }
                }
                for msg in &out {
                    if !send(&mut sink, msg).await {
                        connected = false;
                        break;
                    }
                }
            }
            _ = shutdown.changed() => break,
        }
    }
    reader.abort();
    match core.close() {
        Ok(Some(end)) => {
            if let Some(path) = &end.log_file {
                log::info!("session log written to {path}");
            }
            if connected {
                send(&mut sink, &ServerMessage::TrialEnd(end)).await;
            }
        }
        Ok(None) => {}
        Err(e) => log::error!("cannot flush session log: {e}"),
    }
    let _ = sink.close().await;
    log::info!("session closed");
}
