//! Artifact writing. Every file starts with a header naming the tool
//! version, the config hash and the seed: a `#` line for CSV and TOML, a
//! `header` object for JSON.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::CliError;

pub const TOOL: &str = "coolplan";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub config: String,
    pub seed: u64,
}

impl Header {
    pub fn new(cfg: &RunConfig) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            config: cfg.hash(),
            seed: cfg.seed,
        }
    }

    pub fn comment_line(&self) -> String {
        format!("# {} v{} config={} seed={}\n", self.tool, self.version, self.config, self.seed)
    }
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    header: &'a Header,
    data: &'a T,
}

#[derive(Deserialize)]
struct OwnedEnvelope<T> {
    #[allow(dead_code)]
    header: Header,
    data: T,
}

/// Writes artifacts under one directory.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub dir: PathBuf,
    pub header: Header,
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::input(format!("{}: {e}", path.display()))
}

impl Artifacts {
    pub fn new(dir: impl Into<PathBuf>, cfg: &RunConfig) -> Self {
        Self {
            dir: dir.into(),
            header: Header::new(cfg),
        }
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.dir.join(rel)
    }

    fn write_bytes(&self, rel: &str, body: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.path(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
        }
        std::fs::write(&path, body).map_err(|e| io_err(&path, e))?;
        Ok(path)
    }

    /// Header comment followed by whatever `body` writes.
    pub fn write_csv<F>(&self, rel: &str, body: F) -> Result<PathBuf, CliError>
    where
        F: FnOnce(&mut Vec<u8>) -> coolplan::Result<()>,
    {
        let mut buf = self.header.comment_line().into_bytes();
        body(&mut buf)?;
        self.write_bytes(rel, &buf)
    }

    pub fn write_json<T: Serialize>(&self, rel: &str, data: &T) -> Result<PathBuf, CliError> {
        let env = Envelope {
            header: &self.header,
            data,
        };
        let mut text = serde_json::to_string_pretty(&env).map_err(|e| CliError::input(e.to_string()))?;
        text.push('\n');
        self.write_bytes(rel, text.as_bytes())
    }

    pub fn write_text(&self, rel: &str, text: &str) -> Result<PathBuf, CliError> {
        let mut buf = self.header.comment_line();
        buf.push_str(text);
        self.write_bytes(rel, buf.as_bytes())
    }
}

pub fn open(path: &Path) -> Result<std::fs::File, CliError> {
    std::fs::File::open(path).map_err(|e| io_err(path, e))
}

/// Reads the `data` member of a JSON artifact.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let env: OwnedEnvelope<T> =
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(env.data)
}
