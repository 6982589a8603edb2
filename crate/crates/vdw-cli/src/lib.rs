//! Library behind the `vdw` batch CLI: configuration parsing, scan
//! execution and report rendering.

pub mod config;
pub mod kernel_check;
pub mod output;
pub mod scenario;
