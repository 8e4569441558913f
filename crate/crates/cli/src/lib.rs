//! File formats, Gantt rendering, the benchmark harness and the command-line
//! front end for [`taskga_core`].

pub mod bench;
pub mod commands;
pub mod format;
pub mod gantt;
pub mod history;
