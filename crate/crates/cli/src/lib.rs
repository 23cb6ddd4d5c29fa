//! Library side of the `mrkit` command-line tool: configuration loading,
//! JSON emission and the verification suites.

pub mod config;
pub mod emit;
pub mod verify;
