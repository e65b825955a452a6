//! Tower files, reports and the `toeplitz` command line.

pub mod commands;
pub mod format;
pub mod generate;
pub mod report;

pub use commands::{corpus_report, run_command, verdict_exit_code};
pub use format::{parse_tower_document, parse_tower_file, serialize_tower, TowerFile};
pub use generate::{generate_paper_example, generate_random};
pub use report::Report;
