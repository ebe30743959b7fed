//! Output plumbing shared by all subcommands: atomic file writes, the
//! fixed JSON envelope, and deterministic CSV assembly.

use crate::Failure;
use serde_json::{json, Value};
use std::io::Write;
use std::path::Path;

/// Writes bytes atomically: the content lands in a temporary file in the
/// destination directory and is renamed into place, so an interrupted run
/// never leaves a truncated file behind.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::Domain(format!("creating {}: {e}", dir.display())))?;
    }
    let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))
        .map_err(|e| Failure::Domain(format!("creating temp file near {}: {e}", path.display())))?;
    tmp.write_all(bytes)
        .map_err(|e| Failure::Domain(format!("writing {}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| Failure::Domain(format!("renaming into {}: {e}", path.display())))?;
    Ok(())
}

/// The fixed top-level JSON schema `{config, results, versions, seed}`.
/// `config` echoes every effective parameter so each output file carries
/// its own provenance.
pub fn envelope(config: Value, results: Value, seed: u64) -> Value {
    json!({
        "config": config,
        "results": results,
        "versions": {
            "frontier-cli": env!("CARGO_PKG_VERSION"),
            "frontier-core": frontier_core_version(),
        },
        "seed": seed,
    })
}

fn frontier_core_version() -> &'static str {
    // The workspace pins both crates to one version.
    env!("CARGO_PKG_VERSION")
}

/// Pretty JSON with a trailing newline (serde_json maps are sorted, so
/// the bytes are deterministic).
pub fn json_bytes(value: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("JSON serialization cannot fail");
    s.push('\n');
    s.into_bytes()
}

/// Emits JSON to `--out` when given, otherwise to stdout.
pub fn emit_json(value: &Value, out: Option<&Path>) -> Result<(), Failure> {
    let bytes = json_bytes(value);
    match out {
        Some(path) => atomic_write(path, &bytes),
        None => {
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| Failure::Domain(format!("writing stdout: {e}")))?;
            Ok(())
        }
    }
}

/// Builds a CSV document: `#`-prefixed provenance lines, one header row,
/// then data rows. Floats use Rust's shortest round-trip formatting.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(provenance: &[String], header: &[&str]) -> Self {
        let mut buf = String::new();
        for line in provenance {
            buf.push_str("# ");
            buf.push_str(line);
            buf.push('\n');
        }
        buf.push_str(&header.join(","));
        buf.push('\n');
        Csv { buf }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn bytes(self) -> Vec<u8> {
        self.buf.into_bytes()
    }

    /// Emits to `--out`/`--csv` when given, otherwise to stdout.
    pub fn emit(self, out: Option<&Path>) -> Result<(), Failure> {
        let bytes = self.bytes();
        match out {
            Some(path) => atomic_write(path, &bytes),
            None => {
                std::io::stdout()
                    .write_all(&bytes)
                    .map_err(|e| Failure::Domain(format!("writing stdout: {e}")))?;
                Ok(())
            }
        }
    }
}

/// Shortest round-trip decimal for a float field.
pub fn fmt(v: f64) -> String {
    format!("{v}")
}
