pub mod error;
pub mod format;
pub mod report;
pub mod sweep;
pub mod verify;
