use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{field} = {value} is outside {range}")]
    OutOfRange {
        field: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("structuring element size must be odd and positive, got {0}")]
    EvenKernel(usize),
    #[error("output size must be non-zero, got {width}x{height}")]
    EmptyOutput { width: usize, height: usize },
}
