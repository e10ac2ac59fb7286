//! End-to-end acceptance suite for forestkit. The checks live in
//! `tests/acceptance.rs` and print one PASS or FAIL line per criterion.
