//! Holds the end-to-end `acceptance` test target. It drives the library and the
//! `p3hc` binary built from `crates/cli`.
