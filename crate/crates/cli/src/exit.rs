//! Process exit codes.

pub const OK: u8 = 0;
/// Verification found a counterexample, or a generator filter had no instance.
pub const FAILED: u8 = 1;
pub const BUDGET_EXHAUSTED: u8 = 2;
pub const INVARIANT_VIOLATION: u8 = 3;
/// Bad flags, malformed or invalid configuration.
pub const INPUT_REJECTED: u8 = 4;
/// The run ended without gathering: the adversary ran out of commands or no
/// robot would act again.
pub const NOT_GATHERED: u8 = 5;
pub const IO_ERROR: u8 = 6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: INPUT_REJECTED, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Failure { code: IO_ERROR, message: message.into() }
    }
}
