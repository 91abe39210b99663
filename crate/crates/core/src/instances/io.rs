//! Instance persistence: human-diffable JSON with strict validation on load.
//!
//! The on-disk form is the [`Instance`](super::Instance) enum: an object with a
//! `"type"` tag (`"set_cover"`, `"smc"`, `"fl"`) and the instance fields
//! inline. Finite costs are plain numbers; infinite connection costs are the
//! literal string `"inf"`. Loading validates structure *and* satisfiability:
//! an instance containing a request that can never be served (an element no
//! set covers, a client with no finite edge) is rejected outright, while
//! generators repair such defects instead.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

use super::Instance;

/// Parse and fully validate an instance from a JSON string. `origin` names the
/// source in error messages (a path, or e.g. `"<stdin>"`).
pub fn instance_from_json(json: &str, origin: &str) -> Result<Instance> {
    let mut instance: Instance = serde_json::from_str(json).map_err(|source| Error::Parse {
        path: origin.to_string(),
        source,
    })?;
    instance.validate(true)?;
    Ok(instance)
}

/// Serialize an instance to pretty JSON (stable field order, trailing newline).
pub fn instance_to_json(instance: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(instance).expect("instances always serialize");
    s.push('\n');
    s
}

/// Load and validate an instance file.
pub fn load_instance<P: AsRef<Path>>(path: P) -> Result<Instance> {
    let path = path.as_ref();
    let json = fs::read_to_string(path)?;
    instance_from_json(&json, &path.display().to_string())
}

/// Write an instance file.
pub fn save_instance<P: AsRef<Path>>(path: P, instance: &Instance) -> Result<()> {
    fs::write(path.as_ref(), instance_to_json(instance))?;
    Ok(())
}
