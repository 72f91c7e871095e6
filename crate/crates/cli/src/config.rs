use crate::{config_err, CliError, CliResult};
use cavityj::dielectric::DielectricModel;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use std::path::{Path, PathBuf};

const GOLD: &str = include_str!("../presets/gold.json");
const SRTIO3: &str = include_str!("../presets/srtio3.json");

/// Keys a config file may carry besides the command options.
#[derive(Debug, Default)]
pub struct GlobalKeys {
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
}

pub fn read_config(path: Option<&Path>) -> CliResult<Map<String, Value>> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(CliError::Config(format!("{} must hold a JSON object", path.display()))),
        Err(e) => Err(CliError::Config(format!("{}: {e}", path.display()))),
    }
}

/// Split off global keys, then overlay explicit flags on the file values.
pub fn merge<T: Serialize + DeserializeOwned>(
    flags: &T,
    mut file: Map<String, Value>,
) -> CliResult<(T, GlobalKeys)> {
    let mut globals = GlobalKeys::default();
    if let Some(v) = file.remove("output") {
        let s = v.as_str().ok_or_else(|| CliError::Config("`output` must be a string".into()))?;
        globals.output = Some(PathBuf::from(s));
    }
    if let Some(v) = file.remove("threads") {
        let n = v.as_u64().ok_or_else(|| CliError::Config("`threads` must be a positive integer".into()))?;
        globals.threads = Some(n as usize);
    }
    let over = serde_json::to_value(flags).map_err(|e| CliError::Config(e.to_string()))?;
    if let Value::Object(o) = over {
        for (k, v) in o {
            file.insert(k, v);
        }
    }
    let merged = serde_json::from_value(Value::Object(file)).map_err(|e| CliError::Config(e.to_string()))?;
    Ok((merged, globals))
}

/// Built-in preset name or path to a preset JSON file.
pub fn load_substrate(spec: &str) -> CliResult<DielectricModel> {
    let text = match spec.to_ascii_lowercase().as_str() {
        "gold" | "au" => GOLD.to_string(),
        "srtio3" | "sto" => SRTIO3.to_string(),
        _ => std::fs::read_to_string(spec)
            .map_err(|e| CliError::Config(format!("substrate '{spec}' is neither a preset nor a readable file: {e}")))?,
    };
    DielectricModel::from_preset_json(&text).map_err(config_err)
}

pub fn require<T>(v: Option<T>, key: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Config(format!("missing required option `{key}`")))
}
