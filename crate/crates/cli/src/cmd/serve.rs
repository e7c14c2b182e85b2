use bouncer_service::{BackendConfig, Mode, RateLimit, ServerConfig, ServiceError};

use crate::exit::{usage, NetworkError};
use crate::{BackendKind, ServeArgs};

pub fn run(args: &ServeArgs) -> anyhow::Result<()> {
    let cfg = config(args)?;
    match bouncer_service::run(&cfg) {
        Err(ServiceError::Io(e)) => Err(NetworkError(format!("cannot serve on {}: {e}", cfg.listen_addr())).into()),
        other => Ok(other?),
    }
}

fn config(args: &ServeArgs) -> anyhow::Result<ServerConfig> {
    let mut cfg = match (&args.config, args.backend, &args.model) {
        (Some(path), None, None) => ServerConfig::load(path)?,
        (None, Some(kind), Some(model)) => {
            let path = model.clone();
            ServerConfig {
                mode: Mode::Honest,
                backend: match kind {
                    BackendKind::Tree => BackendConfig::Tree { path },
                    BackendKind::Mlp => BackendConfig::Mlp { path },
                },
                rate_limit: RateLimit::default(),
                listen: "127.0.0.1:8080".into(),
            }
        }
        _ => return Err(usage("give either --config or both --backend and --model")),
    };
    if let Some(m) = args.mode {
        cfg.mode = m.into();
    }
    if let Some(l) = &args.listen {
        cfg.listen = l.clone();
    }
    if let Some(n) = args.max_queries {
        cfg.rate_limit.max_queries = n;
    }
    if let Some(w) = args.window_secs {
        cfg.rate_limit.window_secs = w;
    }
    cfg.rate_limit.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}
