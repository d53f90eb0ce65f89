use std::io;

use bec_core::BecError;

use crate::config::ConfigError;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error at {0}")]
    Config(#[from] ConfigError),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("{stage}: {source}")]
    Core {
        stage: &'static str,
        #[source]
        source: BecError,
    },
    #[error("{0}")]
    Other(String),
}

pub(crate) trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, RunError>;
}

impl<T> Stage<T> for bec_core::Result<T> {
    fn stage(self, stage: &'static str) -> Result<T, RunError> {
        self.map_err(|source| RunError::Core { stage, source })
    }
}
