//! IO companion to `galekit-core`: bitstream file formats, CSV trace
//! export, and JSON report shapes shared by the `galekit` CLI.

pub mod format;
pub mod report;

pub use format::{read_bits, write_bits, BitFormat};
