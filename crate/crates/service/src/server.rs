//! HTTP front end.
//!
//! `POST /v1/classify` takes a [`ClassifyRequest`] and answers with a
//! [`ClassifyReply`]; `GET /v1/health` answers `{"status":"ok"}`. Every
//! body is a single JSON line.

use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use axum::extract::State;
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use tokio::sync::oneshot;

use crate::config::{RateLimit, ServerConfig};
use crate::error::{Result, ServiceError};
use crate::handler::{handle_classify, Backend, Service};
use crate::limiter::SlidingLog;
use crate::wire::{to_line, ClassifyRequest, ErrorReply, Health};

pub struct AppState {
    service: Service,
    limiter: SlidingLog,
    next_query: AtomicU64,
}

impl AppState {
    pub fn new(service: Service, limit: &RateLimit) -> Self {
        Self {
            service,
            limiter: SlidingLog::new(limit),
            next_query: AtomicU64::new(0),
        }
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/v1/classify", post(classify))
        .route("/v1/health", get(health))
        .with_state(state)
}

fn json_line(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn error(status: StatusCode, msg: impl Into<String>) -> Response {
    json_line(
        status,
        to_line(&ErrorReply {
            error: msg.into(),
            retry_after_ms: None,
        }),
    )
}

async fn health() -> Response {
    json_line(StatusCode::OK, to_line(&Health { status: "ok".into() }))
}

async fn classify(State(state): State<Arc<AppState>>, body: String) -> Response {
    let req: ClassifyRequest = match serde_json::from_str(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("malformed request: {e}")),
    };
    if let Err(wait) = state.limiter.check(&req.client_id) {
        let ms = wait.as_millis().max(1) as u64;
        let mut resp = json_line(
            StatusCode::TOO_MANY_REQUESTS,
            to_line(&ErrorReply {
                error: "rate limit exceeded".into(),
                retry_after_ms: Some(ms),
            }),
        );
        let secs = ms.div_ceil(1000);
        resp.headers_mut().insert(header::RETRY_AFTER, HeaderValue::from(secs));
        return resp;
    }
    let id = state.next_query.fetch_add(1, Ordering::Relaxed);
    match handle_classify(&req, &state.service, id) {
        Ok(reply) => {
            tracing::debug!(query_id = id, client = %req.client_id, decision = %reply.decision, "classified");
            json_line(StatusCode::OK, to_line(&reply))
        }
        Err(ServiceError::BadRequest(msg)) => error(StatusCode::BAD_REQUEST, msg),
        Err(e) => {
            tracing::error!(query_id = id, "classify failed: {e}");
            error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
        }
    }
}

/// A server running on its own runtime thread.
pub struct ServerHandle {
    addr: SocketAddr,
    stop: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<std::io::Result<()>>>,
}

impl ServerHandle {
    /// Binds `listen` (port 0 picks a free port) and starts serving.
    pub fn spawn(service: Service, limit: &RateLimit, listen: &str) -> Result<Self> {
        limit.validate()?;
        let std_listener = std::net::TcpListener::bind(listen)?;
        std_listener.set_nonblocking(true)?;
        let addr = std_listener.local_addr()?;
        let app = router(Arc::new(AppState::new(service, limit)));
        let (stop, stopped) = oneshot::channel::<()>();
        let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
        let thread = std::thread::spawn(move || {
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::from_std(std_listener)?;
                axum::serve(listener, app)
                    .with_graceful_shutdown(async {
                        let _ = stopped.await;
                    })
                    .await
            })
        });
        Ok(Self {
            addr,
            stop: Some(stop),
            thread: Some(thread),
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Stops accepting connections and waits for in-flight requests.
    pub fn shutdown(mut self) -> Result<()> {
        self.stop_and_join()
    }

    fn stop_and_join(&mut self) -> Result<()> {
        if let Some(stop) = self.stop.take() {
            let _ = stop.send(());
        }
        match self.thread.take().map(JoinHandle::join) {
            Some(Ok(r)) => Ok(r?),
            Some(Err(_)) => Err(ServiceError::Config("server thread panicked".into())),
            None => Ok(()),
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        let _ = self.stop_and_join();
    }
}

/// Loads the configured backend and serves until interrupted.
pub fn run(cfg: &ServerConfig) -> Result<()> {
    cfg.rate_limit.validate()?;
    let service = Service::new(Backend::load(&cfg.backend)?, cfg.mode);
    let listen = cfg.listen_addr();
    let app = router(Arc::new(AppState::new(service, &cfg.rate_limit)));
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&listen).await?;
        tracing::info!(addr = %listener.local_addr()?, mode = ?cfg.mode, "listening");
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
    })?;
    Ok(())
}
