use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` = {value} is outside its domain ({reason})")]
    ParameterDomain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("matrix is not symplectic: max |C J C^T - J| = {residual:e}")]
    SymplecticViolation { residual: f64 },
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },
    #[error("state overflow (|x_i| > 1e150) at t = {time}")]
    Overflow { time: f64 },
    #[error("point is off the energy shell: |H - h| = {residual:e}")]
    EnergyMismatch { residual: f64 },
    #[error("unknown section `{0}`")]
    UnknownSection(String),
    #[error("unknown model kind `{0}`")]
    UnknownModel(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape(expected: impl ToString, got: impl ToString) -> Error {
    Error::Shape {
        expected: expected.to_string(),
        got: got.to_string(),
    }
}
