use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ServiceError};

/// Environment variable that overrides the configured listen address.
pub const LISTEN_ENV: &str = "BOUNCER_LISTEN";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Explain with the model that made the decision.
    Honest,
    /// Explain with a per-query legitimate surrogate.
    PrAttack,
}

impl std::str::FromStr for Mode {
    type Err = ServiceError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "honest" => Ok(Mode::Honest),
            "pr_attack" | "pr-attack" | "attack" => Ok(Mode::PrAttack),
            other => Err(ServiceError::Config(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackendConfig {
    Tree { path: PathBuf },
    Mlp { path: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateLimit {
    pub max_queries: u32,
    pub window_secs: f64,
}

impl RateLimit {
    pub fn validate(&self) -> Result<()> {
        if self.max_queries == 0 || !(self.window_secs > 0.0 && self.window_secs.is_finite()) {
            return Err(ServiceError::Config(
                "rate limit needs a positive query budget and window".into(),
            ));
        }
        Ok(())
    }

    pub fn window(&self) -> Duration {
        Duration::from_secs_f64(self.window_secs)
    }
}

impl Default for RateLimit {
    fn default() -> Self {
        Self {
            max_queries: 10,
            window_secs: 60.0,
        }
    }
}

fn default_listen() -> String {
    "127.0.0.1:8080".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ServerConfig {
    pub mode: Mode,
    pub backend: BackendConfig,
    #[serde(default)]
    pub rate_limit: RateLimit,
    #[serde(default = "default_listen")]
    pub listen: String,
}

impl ServerConfig {
    /// Parses TOML; relative backend paths resolve against `base`.
    pub fn from_toml(doc: &str, base: Option<&Path>) -> Result<Self> {
        let mut cfg: Self = toml::from_str(doc)?;
        cfg.rate_limit.validate()?;
        if let Some(base) = base {
            let path = match &mut cfg.backend {
                BackendConfig::Tree { path } | BackendConfig::Mlp { path } => path,
            };
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let doc = std::fs::read_to_string(path)?;
        Self::from_toml(&doc, path.parent())
    }

    /// The listen address, honoring [`LISTEN_ENV`].
    pub fn listen_addr(&self) -> String {
        std::env::var(LISTEN_ENV).unwrap_or_else(|_| self.listen.clone())
    }
}
