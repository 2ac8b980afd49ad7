//! Blocking HTTP helpers shared by the remote OCR and chat clients.

use std::time::Duration;

/// How one failed attempt should be treated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Failure {
    /// Network errors, 408, 429 and 5xx.
    Transient(String),
    /// Auth failures and other 4xx responses; retrying will not help.
    Permanent(String),
}

/// Body of a successful exchange.
pub(crate) struct Reply {
    pub body: String,
}

pub(crate) fn is_retryable_status(status: u16) -> bool {
    matches!(status, 408 | 429) || (500..600).contains(&status)
}

/// Delay before retry number `retry` (0-based): `base × 2^retry`.
pub(crate) fn backoff_delay(base: Duration, retry: u32) -> Duration {
    base.saturating_mul(1u32.checked_shl(retry.min(20)).unwrap_or(u32::MAX))
}

/// Runs `attempt` until it succeeds, fails permanently, or `retry_limit`
/// retries are spent. Returns the attempt count alongside any final failure.
pub(crate) fn with_retries<T>(
    retry_limit: u32,
    base: Duration,
    mut attempt: impl FnMut() -> Result<T, Failure>,
) -> Result<T, (u32, String)> {
    let mut attempts = 0;
    loop {
        attempts += 1;
        match attempt() {
            Ok(v) => return Ok(v),
            Err(Failure::Permanent(reason)) => return Err((attempts, reason)),
            Err(Failure::Transient(reason)) => {
                if attempts > retry_limit {
                    return Err((attempts, reason));
                }
                let delay = backoff_delay(base, attempts - 1);
                log::warn!("attempt {attempts} failed ({reason}), retrying in {delay:?}");
                std::thread::sleep(delay);
            }
        }
    }
}

pub(crate) fn agent(timeout: Duration) -> ureq::Agent {
    let config = ureq::Agent::config_builder().timeout_global(Some(timeout)).http_status_as_error(false).build();
    ureq::Agent::new_with_config(config)
}

/// Classifies a finished exchange: 2xx passes through, everything else becomes a [`Failure`].
pub(crate) fn classify(result: Result<ureq::http::Response<ureq::Body>, ureq::Error>) -> Result<Reply, Failure> {
    let mut response = result.map_err(|e| Failure::Transient(e.to_string()))?;
    let status = response.status().as_u16();
    let body = response.body_mut().read_to_string().map_err(|e| Failure::Transient(e.to_string()))?;
    if (200..300).contains(&status) {
        Ok(Reply { body })
    } else if is_retryable_status(status) {
        Err(Failure::Transient(format!("HTTP {status}")))
    } else {
        Err(Failure::Permanent(format!("HTTP {status}: {}", body.chars().take(200).collect::<String>())))
    }
}
