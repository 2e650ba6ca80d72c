use thiserror::Error;

/// Crate-wide error type. Variants carry enough context to diagnose the
/// failing tensor, shape, or file offset without a debugger.
#[derive(Error, Debug)]
pub enum Error {
    #[error("shape mismatch in {op}: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    Shape {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("{0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("eigensolver did not converge: off-diagonal residual {residual:.3e} after {sweeps} sweeps")]
    Convergence { residual: f64, sweeps: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("degenerate batch: no unmasked target positions")]
    DegenerateBatch,

    #[error("training diverged (loss is NaN) at step {step}")]
    Diverged { step: usize },

    #[error("calibration error: {0}")]
    Calibration(String),

    #[error("protected bundle error: {0}")]
    Bundle(String),

    #[error("scale recovery failed: no usable entries in layer {layer}, head {head}, row {row}")]
    UnrecoverableRow {
        layer: usize,
        head: usize,
        row: usize,
    },

    #[error("degenerate PCA: all anchors identical")]
    DegeneratePca,

    #[error("file format error: {0}")]
    Format(String),

    #[error("corrupt file: {reason} at byte offset {offset}")]
    Corrupt { reason: String, offset: u64 },

    #[error("missing artifact: {0}")]
    Staging(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
