//! Process exit codes: 0 success, 1 usage, 2 data, 3 network.

use bouncer_core::{Error, OracleError};
use bouncer_service::ServiceError;

pub const USAGE: i32 = 1;
pub const DATA: i32 = 2;
pub const NETWORK: i32 = 3;

/// A bad combination of flags that the parser cannot catch.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Marks a failure to reach or bind a network endpoint.
#[derive(Debug)]
pub struct NetworkError(pub String);

impl std::fmt::Display for NetworkError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NetworkError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn oracle_code(e: &OracleError) -> i32 {
    match e {
        OracleError::Network(_) | OracleError::RateLimited(_) => NETWORK,
        OracleError::Protocol(_) | OracleError::Rejected(_) => DATA,
    }
}

fn core_code(e: &Error) -> i32 {
    match e {
        Error::Oracle(o) => oracle_code(o),
        Error::InvalidArgument(_) => USAGE,
        _ => DATA,
    }
}

/// Maps an error to its exit code by the first recognized cause.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return USAGE;
        }
        if cause.is::<NetworkError>() {
            return NETWORK;
        }
        if let Some(e) = cause.downcast_ref::<OracleError>() {
            return oracle_code(e);
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return core_code(e);
        }
        if let Some(ServiceError::Core(e)) = cause.downcast_ref::<ServiceError>() {
            return core_code(e);
        }
    }
    DATA
}
