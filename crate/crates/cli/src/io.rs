use std::fs;
use std::path::Path;

use anyhow::Context;
use serde::de::DeserializeOwned;
use serde::Serialize;
use tuniv::format::to_canonical;

pub fn read_text(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path)
        .map_err(|e| tuniv::Error::Usage(format!("cannot read {}: {e}", path.display())).into())
}

/// Parses a JSON file; parse failures surface as format errors (exit 3).
pub fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| tuniv::Error::Format(format!("{}: {e}", path.display())).into())
}

pub fn write_canonical<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = to_canonical(value)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
