//! Executable model of luminous robots gathering on a circle.
//!
//! Robots see everything except their antipodal point, carry a light that
//! only others can read, and run Look-Compute-Move cycles under an
//! asynchronous adversary with non-rigid movement. All geometry is exact.

pub mod angles;
pub mod configuration;
pub mod exact;
pub mod leadership;
pub mod oracle;
pub mod protocol;
pub mod runconfig;
pub mod simulator;
