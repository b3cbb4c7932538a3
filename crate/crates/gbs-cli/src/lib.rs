//! File format and reporting for the `gbs` command-line tool.

pub mod doc;
pub mod report;
