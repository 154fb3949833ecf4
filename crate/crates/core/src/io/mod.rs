//! File formats: cube volumes, final-state tables, scenario configuration
//! and result export.

pub mod config;
pub mod cube;
pub mod export;
pub mod table;
