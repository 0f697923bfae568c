use polecert_core::Error;

/// Command failure carrying the process exit code.
///
/// Contract: 1 input error, 2 dominance refuted, 3 prescribed rate
/// unreachable, 4 solver failure. Code 2 is decided at the command level
/// from the certification verdict, never from an `Error`.
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidInput(_)
            | Error::StepTooLarge { .. }
            | Error::WindowTooShort
            | Error::ThirdRealRootPresent => 1,
            Error::NoStabilizingTau | Error::RateUnreachable => 3,
            Error::RootOnBoundary { .. }
            | Error::SubdivisionDepthExceeded { .. }
            | Error::Solver(_) => 4,
        };
        Failure { code, message: e.to_string() }
    }
}

pub fn input_err(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

pub type CmdResult = Result<i32, Failure>;
