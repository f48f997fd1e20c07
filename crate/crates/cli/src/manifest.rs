use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use scs_core::transforms::SystemSpec;
use scs_core::Result;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RESOLVED_SPEC_FILE: &str = "spec.json";

/// Record of one invocation, written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name, with `--spec` pointing at the
    /// resolved spec saved alongside.
    pub args: Vec<String>,
    /// Spec after flag overrides.
    pub spec: SystemSpec,
    pub methods: Vec<String>,
    pub outputs: Vec<PathBuf>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub eta: Vec<f64>,
    pub tool_version: String,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(MANIFEST_FILE);
        std::fs::write(&path, serde_json::to_string_pretty(self)?)?;
        Ok(path)
    }
}

/// Replace the value of `--flag` (either `--flag v` or `--flag=v`), or
/// append it.
pub fn set_flag(args: &mut Vec<String>, flag: &str, value: &str) {
    let eq = format!("{flag}=");
    if let Some(i) = args.iter().position(|a| a == flag) {
        if i + 1 < args.len() {
            args[i + 1] = value.to_string();
            return;
        }
    }
    if let Some(i) = args.iter().position(|a| a.starts_with(&eq)) {
        args[i] = format!("{eq}{value}");
        return;
    }
    args.push(flag.to_string());
    args.push(value.to_string());
}
