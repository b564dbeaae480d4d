//! Library surface of the command-line tool: the file format, the export
//! serialisers, and the error taxonomy. The binary in `main.rs` is a thin
//! adapter over these and the core crate; integration tests compare its
//! output byte for byte against direct calls.

pub mod error;
pub mod export;
pub mod format;
