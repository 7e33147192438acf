use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("window {start}+{width} is not contained in the slot set")]
    WindowNotContained { start: u32, width: u32 },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("invalid modulation table: {0}")]
    InvalidTable(String),
    #[error("invalid demand: {0}")]
    InvalidDemand(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
