//! Library surface of the `torik` command-line tool: built-in fixtures
//! with frozen expected values, and rendering helpers. The binary in
//! `main.rs` is a thin dispatcher over this and `torik-core`.

pub mod fixtures;
pub mod render;
