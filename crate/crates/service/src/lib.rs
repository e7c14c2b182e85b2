//! Remote classify-and-explain service.
//!
//! The server answers each query with a decision and an explanation. In
//! honest mode the explanation is the model's own reasoning; in
//! `pr_attack` mode it comes from a legitimate surrogate built for that
//! query alone. [`RemoteOracle`] is the user side: it checks each reply for
//! internal consistency and records a transcript that the audits in
//! `bouncer_core::audit` can search for incoherent pairs.

pub mod client;
pub mod config;
pub mod error;
pub mod handler;
pub mod limiter;
pub mod server;
pub mod wire;

pub use client::RemoteOracle;
pub use config::{BackendConfig, Mode, RateLimit, ServerConfig, LISTEN_ENV};
pub use error::{Result, ServiceError};
pub use handler::{handle_classify, Backend, Service};
pub use limiter::SlidingLog;
pub use server::{router, run, AppState, ServerHandle};
pub use wire::{ClassifyReply, ClassifyRequest, ErrorReply, Health};
