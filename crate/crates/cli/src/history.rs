//! Per-generation GA history as CSV.

use std::io::Write;

use serde::Serialize;
use taskga_core::GenerationStats;

pub const HISTORY_HEADER: &str = "generation,best_ft,mean_ft,cmax";

#[derive(Serialize)]
struct Row {
    generation: usize,
    best_ft: u64,
    mean_ft: f64,
    cmax: u64,
}

pub fn write_history<W: Write>(history: &[GenerationStats], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for s in history {
        writer.serialize(Row {
            generation: s.generation,
            best_ft: s.best_makespan,
            mean_ft: s.mean_makespan,
            cmax: s.cmax,
        })?;
    }
    writer.flush()?;
    Ok(())
}
