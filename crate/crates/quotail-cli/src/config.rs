//! Config-file loading and content digests.

use std::path::Path;

use quotail_core::model::{PriceFunction, QuotientModel};
use quotail_core::pricepath::PathConfig;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Read a file whole, tagging I/O errors with the path.
pub fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(CliError::io(path.display().to_string()))
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path, bytes: &[u8]) -> Result<T, CliError> {
    serde_json::from_slice(bytes).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Load and validate a quotient model.
pub fn load_model(path: &Path) -> Result<QuotientModel, CliError> {
    let bytes = read_bytes(path)?;
    let model: QuotientModel = parse(path, &bytes)?;
    model.validate()?;
    Ok(model)
}

/// Load and validate a price-path configuration.
pub fn load_path_config(path: &Path) -> Result<PathConfig, CliError> {
    let bytes = read_bytes(path)?;
    let config: PathConfig = parse(path, &bytes)?;
    config.validate()?;
    Ok(config)
}

/// Load and validate a price function.
pub fn load_price_function(path: &Path) -> Result<PriceFunction, CliError> {
    let bytes = read_bytes(path)?;
    let pf: PriceFunction = parse(path, &bytes)?;
    pf.validate()?;
    Ok(pf)
}

/// Lowercase hex SHA-256 of raw file bytes.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Digest of the config file backing a run, for its manifest.
pub fn file_digest(path: &Path) -> Result<String, CliError> {
    Ok(sha256_hex(&read_bytes(path)?))
}
