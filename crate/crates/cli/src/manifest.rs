use std::time::{Duration, SystemTime, UNIX_EPOCH};

use lambdaset::PrecisionConfig;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::args::Cli;

/// Provenance of one run. Printed on stderr so that stdout stays a pure,
/// reproducible payload; `output_sha256` is a digest of stdout.
#[derive(Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub parameters: serde_json::Value,
    pub precision: PrecisionConfig,
    pub library_version: &'static str,
    pub started_unix_ms: u128,
    pub wall_time_ms: f64,
    pub output_sha256: String,
    pub exit_code: u8,
    pub notes: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl RunManifest {
    pub fn new(
        cli: &Cli,
        cfg: &PrecisionConfig,
        output: &str,
        elapsed: Duration,
        exit_code: u8,
        notes: Vec<String>,
    ) -> Self {
        let mut parameters = serde_json::to_value(&cli.command).unwrap_or_default();
        if let (Some(p), Ok(g)) = (
            parameters.as_object_mut(),
            serde_json::to_value(&cli.global),
        ) {
            p.insert("global".into(), g);
        }
        let started = SystemTime::now()
            .checked_sub(elapsed)
            .and_then(|t| t.duration_since(UNIX_EPOCH).ok())
            .map_or(0, |d| d.as_millis());
        RunManifest {
            command: cli.command.name(),
            parameters,
            precision: cfg.clone(),
            library_version: env!("CARGO_PKG_VERSION"),
            started_unix_ms: started,
            wall_time_ms: elapsed.as_secs_f64() * 1e3,
            output_sha256: sha256_hex(output.as_bytes()),
            exit_code,
            notes,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
