//! Run manifests and the output directory.

use std::fs;
use std::path::{Path, PathBuf};

use planarlab_core::{Error, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub params: Value,
    pub seeds: Vec<u64>,
    pub started_at: String,
    pub finished_at: Option<String>,
    /// "running", "ok" or "error".
    pub status: String,
    pub exit_code: Option<i32>,
    pub error: Option<String>,
    pub inputs: Vec<InputDigest>,
    pub result_summary: Option<Value>,
    /// SHA-256 of the compact serialisation of `result_summary`.
    pub result_digest: Option<String>,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn start(subcommand: &str, params: Value, seed: u64) -> Self {
        RunManifest {
            tool: "planarlab".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: subcommand.into(),
            params,
            seeds: vec![seed],
            started_at: now(),
            finished_at: None,
            status: "running".into(),
            exit_code: None,
            error: None,
            inputs: Vec::new(),
            result_summary: None,
            result_digest: None,
            outputs: Vec::new(),
        }
    }

    pub fn finish(&mut self, summary: Option<&Value>, exit_code: i32, error: Option<String>) {
        self.finished_at = Some(now());
        self.status = if exit_code == 0 { "ok" } else { "error" }.into();
        self.exit_code = Some(exit_code);
        self.error = error;
        if let Some(s) = summary {
            self.result_digest = Some(sha256_hex(canonical(s).as_bytes()));
            self.result_summary = Some(s.clone());
        }
    }
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

pub fn canonical(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values serialise")
}

/// Everything a subcommand reads or writes goes through here, so inputs are
/// digested and outputs stay inside `--out`.
pub struct Session {
    out: Option<PathBuf>,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
}

impl Session {
    pub fn new(out: Option<PathBuf>) -> Result<Self> {
        if let Some(d) = &out {
            fs::create_dir_all(d).map_err(|e| Error::Resource(format!("cannot create {}: {e}", d.display())))?;
        }
        Ok(Session { out, inputs: Vec::new(), outputs: Vec::new() })
    }

    pub fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(InputDigest { path: path.display().to_string(), sha256: sha256_hex(&bytes), bytes: bytes.len() });
        String::from_utf8(bytes).map_err(|_| Error::Parse(format!("{} is not UTF-8", path.display())))
    }

    pub fn read_json(&mut self, path: &Path) -> Result<Value> {
        let text = self.read(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    /// Writes `name` (a bare file name) into the output directory, if any.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        debug_assert!(!name.contains(['/', '\\']));
        let Some(d) = &self.out else { return Ok(()) };
        fs::write(d.join(name), contents).map_err(|e| Error::Resource(format!("cannot write {name}: {e}")))?;
        if !self.outputs.iter().any(|o| o == name) {
            self.outputs.push(name.to_string());
        }
        Ok(())
    }

    pub fn write_manifest(&self, m: &RunManifest) -> Result<()> {
        let Some(d) = &self.out else { return Ok(()) };
        let text = serde_json::to_string_pretty(m).expect("manifest serialises");
        fs::write(d.join("manifest.json"), text + "\n").map_err(|e| Error::Resource(format!("cannot write manifest: {e}")))
    }
}
