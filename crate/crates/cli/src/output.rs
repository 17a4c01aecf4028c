use std::fs;
use std::io::Write;
use std::path::Path;

use contextlab::linalg::ComplexMatrix;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::CliError;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    let m: ComplexMatrix = read_json(path)?;
    Ok(m)
}

pub fn json_text<T: Serialize + ?Sized>(value: &T) -> String {
    contextlab::json::to_string(value).expect("reports serialize")
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), CliError> {
    write_file(path, &json_text(value))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::parse(format!("{}: {e}", dir.display())))
}

/// To `out` when given, stdout otherwise.
pub fn emit(out: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, contents),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::parse(format!("stdout: {e}")))
        }
    }
}
