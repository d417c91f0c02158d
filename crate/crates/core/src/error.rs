use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("supertile level {level} exceeds substitution depth {depth}")]
    LevelTooDeep { level: usize, depth: usize },
    #[error("odd cycle through vertex {0}: graph is not bipartite")]
    OddCycle(u32),
    #[error("inadmissible configuration: edge ({0}, {1}) has both ends occupied")]
    Inadmissible(u32, u32),
    #[error("vertex {0} has a complete star that matches no atlas class")]
    UnknownStar(u32),
    #[error("invalid tiling: {0}")]
    InvalidTiling(String),
    #[error("partition failure: {0}")]
    Partition(String),
    #[error("invalid contour: {0}")]
    InvalidContour(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
