//! Run manifests: enough metadata to re-run a command and check that the
//! outputs reproduce bit-identically.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Written next to every output file as `<out>.manifest.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Full argument vector (program name excluded); `rerun` replays it.
    pub argv: Vec<String>,
    pub duration_seconds: f64,
    pub outputs: Vec<OutputDigest>,
}

impl RunManifest {
    pub fn new(command: &str, argv: &[String], duration_seconds: f64) -> Self {
        Self {
            tool: "pulse-sir".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            argv: argv.to_vec(),
            duration_seconds,
            outputs: Vec::new(),
        }
    }

    pub fn record(&mut self, path: &std::path::Path, contents: &[u8]) {
        self.outputs.push(OutputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(contents),
            bytes: contents.len() as u64,
        });
    }
}

pub fn sha256_hex(data: &[u8]) -> String {
    let digest = Sha256::digest(data);
    let mut out = String::with_capacity(64);
    for byte in digest {
        use std::fmt::Write;
        let _ = write!(out, "{byte:02x}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn manifest_round_trips_through_json() {
        let mut m = RunManifest::new("simulate", &["simulate".into(), "--p".into()], 0.25);
        m.record(std::path::Path::new("out.csv"), b"t,S\n");
        let text = serde_json::to_string(&m).unwrap();
        let back: RunManifest = serde_json::from_str(&text).unwrap();
        assert_eq!(back.outputs[0].sha256, m.outputs[0].sha256);
        assert_eq!(back.argv, m.argv);
    }
}
