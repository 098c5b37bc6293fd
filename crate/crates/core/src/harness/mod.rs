//! Instance files, generators, reports and diagram rendering.

pub mod format;
pub mod generate;
pub mod render;
pub mod report;
