//! Experiment scripts for blow-up computations: the script language, the
//! replay engine with its reports, the fixture corpus and the search harness.

pub mod dsl;
pub mod error;
pub mod fixtures;
pub mod harness;
pub mod replay;
pub mod report;

pub use dsl::{parse_script, Script};
pub use error::LabError;
