//! Library side of the `gzz-forge` command line: benchmark harness and
//! circuit timing.

pub mod bench;
pub mod timing;
