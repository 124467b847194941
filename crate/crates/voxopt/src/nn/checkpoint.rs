//! Model checkpointing: a raw little-endian `f64` parameter file plus a JSON
//! sidecar (`<file>.json`) holding the architecture and a SHA-256 checksum of
//! the parameter bytes.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::VoxError;
use crate::nn::{MlpModel, OutputHead};

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    layer_sizes: Vec<usize>,
    output_head: String,
    param_count: usize,
    checksum: String,
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".json");
    os.into()
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Writes `<path>` (flat little-endian f64 parameters) and `<path>.json`.
pub fn save_model(model: &MlpModel, path: &Path) -> Result<(), VoxError> {
    let mut bytes = Vec::with_capacity(model.param_count() * 8);
    for &p in model.params() {
        bytes.extend_from_slice(&p.to_le_bytes());
    }
    let sidecar = Sidecar {
        layer_sizes: model.layer_sizes().to_vec(),
        output_head: model.output_head().tag().to_string(),
        param_count: model.param_count(),
        checksum: sha256_hex(&bytes),
    };
    fs::write(path, &bytes)?;
    let json = serde_json::to_string_pretty(&sidecar)
        .map_err(|e| VoxError::Format(format!("sidecar encode: {e}")))?;
    fs::write(sidecar_path(path), json)?;
    Ok(())
}

/// Loads a model saved by [`save_model`], verifying the checksum and shape.
pub fn load_model(path: &Path) -> Result<MlpModel, VoxError> {
    let json = fs::read_to_string(sidecar_path(path))?;
    let sidecar: Sidecar = serde_json::from_str(&json)
        .map_err(|e| VoxError::Format(format!("sidecar decode: {e}")))?;
    let bytes = fs::read(path)?;
    if bytes.len() % 8 != 0 {
        return Err(VoxError::Format(format!(
            "parameter file length {} is not a multiple of 8",
            bytes.len()
        )));
    }
    let checksum = sha256_hex(&bytes);
    if checksum != sidecar.checksum {
        return Err(VoxError::Format(format!(
            "checksum mismatch: sidecar has {}, file hashes to {checksum}",
            sidecar.checksum
        )));
    }
    let params: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if params.len() != sidecar.param_count {
        return Err(VoxError::LengthMismatch {
            expected: sidecar.param_count,
            got: params.len(),
        });
    }
    let head = OutputHead::from_tag(&sidecar.output_head)?;
    MlpModel::from_parts(&sidecar.layer_sizes, head, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_preserves_parameters_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.bin");
        let model = MlpModel::new(&[5, 16, 3], OutputHead::Sigmoid, 42);
        save_model(&model, &path).unwrap();
        let loaded = load_model(&path).unwrap();
        assert_eq!(loaded.layer_sizes(), model.layer_sizes());
        assert_eq!(loaded.output_head(), model.output_head());
        assert_eq!(loaded.params(), model.params());
    }

    #[test]
    fn roundtrip_preserves_linear_head() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("critic.bin");
        let model = MlpModel::new(&[4, 8, 1], OutputHead::Linear, 1);
        save_model(&model, &path).unwrap();
        assert_eq!(load_model(&path).unwrap().output_head(), OutputHead::Linear);
    }

    #[test]
    fn corrupted_parameter_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.bin");
        let model = MlpModel::new(&[3, 4, 1], OutputHead::Sigmoid, 7);
        save_model(&model, &path).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes[3] ^= 0xFF;
        fs::write(&path, &bytes).unwrap();
        let err = load_model(&path).unwrap_err();
        assert!(matches!(err, VoxError::Format(msg) if msg.contains("checksum")));
    }

    #[test]
    fn truncated_parameter_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.bin");
        let model = MlpModel::new(&[3, 4, 1], OutputHead::Sigmoid, 7);
        save_model(&model, &path).unwrap();
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() - 4]).unwrap();
        assert!(load_model(&path).is_err());
    }

    #[test]
    fn tampered_sidecar_architecture_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.bin");
        let model = MlpModel::new(&[3, 4, 1], OutputHead::Sigmoid, 7);
        save_model(&model, &path).unwrap();
        let sc = sidecar_path(&path);
        let tampered = fs::read_to_string(&sc)
            .unwrap()
            .replace("\"sigmoid\"", "\"softmax\"");
        fs::write(&sc, tampered).unwrap();
        assert!(load_model(&path).is_err());
    }

    #[test]
    fn missing_sidecar_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.bin");
        let model = MlpModel::new(&[2, 2], OutputHead::Linear, 0);
        save_model(&model, &path).unwrap();
        fs::remove_file(sidecar_path(&path)).unwrap();
        assert!(matches!(load_model(&path).unwrap_err(), VoxError::Io(_)));
    }
}
