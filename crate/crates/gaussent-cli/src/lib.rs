//! Library surface of the CLI crate: the state-file format, shared with
//! the binary and its integration tests.

pub mod statefile;
