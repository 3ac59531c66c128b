use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid dimensions must be at least 1x1, got {width}x{height}")]
    EmptyGrid { width: usize, height: usize },
    #[error("expected {expected} cells, got {actual}")]
    CellCountMismatch { expected: usize, actual: usize },
    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },
    #[error("invalid classifier thresholds: occupied {occupied} must be below unexplained {unexplained}")]
    InvalidThresholds { occupied: u8, unexplained: u8 },
    #[error("degenerate segment at ({x}, {y})")]
    DegenerateSegment { x: usize, y: usize },
    #[error("segment is not axis-aligned")]
    NotAxisAligned,
    #[error("invalid rectangle ({0}, {1})-({2}, {3})")]
    InvalidRect(usize, usize, usize, usize),
    #[error("room exceeds the {width}x{height} grid")]
    OutOfBounds { width: usize, height: usize },
    #[error("unknown room id {0}")]
    UnknownRoom(u32),
    #[error("unknown door id {0}")]
    UnknownDoor(u32),
    #[error("door does not lie on both host walls")]
    DoorOffWall,
    #[error("door span shorter than the minimum door length")]
    DoorTooShort,
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("candidate set is empty")]
    EmptyCandidateSet,
    #[error("sub-area arrangement yields {count} rectangles, above the cap of {cap}")]
    CandidateExplosion { count: usize, cap: usize },
    #[error("invalid synthetic world: {0}")]
    InvalidSpec(&'static str),
    #[error("incremental score diverged from full evaluation at iteration {iteration} (delta {delta:e})")]
    ScoreDivergence { iteration: u64, delta: f64 },
}
