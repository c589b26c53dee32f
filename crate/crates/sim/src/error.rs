use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Core(#[from] allreduce_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad configuration: {0}")]
    Config(String),
    #[error("rank thread panicked")]
    Panicked,
}

pub type Result<T> = std::result::Result<T, SimError>;
