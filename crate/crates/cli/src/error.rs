use std::fmt;

use qrc_core::Error as CoreError;

/// Malformed command-line input detected after parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// 2 for argument errors, 3 for a non-unitary input, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<CoreError>() {
        Some(CoreError::NotUnitary { .. }) => 3,
        Some(
            CoreError::Parse(_)
            | CoreError::ParamOutOfRange(_)
            | CoreError::ConfigInvalid(_)
            | CoreError::AlphaOutOfRange { .. }
            | CoreError::DeltaInfeasible { .. }
            | CoreError::DimNotPower { .. }
            | CoreError::DimensionMismatch { .. }
            | CoreError::OutOfRange { .. }
            | CoreError::Io(_),
        ) => 2,
        _ => 1,
    }
}
