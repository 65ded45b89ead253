//! Library side of the `trijord` command-line tool: instance-file
//! parsing and lowering, the embedded preset gallery, and the JSON
//! report builders. The binary in `main.rs` is a thin dispatcher over
//! these modules, and the integration tests drive them directly.

pub mod instance;
pub mod presets;
pub mod report;
