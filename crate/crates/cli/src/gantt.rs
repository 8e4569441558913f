//! Text and SVG Gantt charts.

use std::fmt::Write;

use taskga_core::{GanttChart, TaskId};

pub const IDLE: char = '.';

/// One row per processor, one cell per time unit: `Some(task)` while a task
/// runs, `None` while the processor idles. Every row spans the makespan.
pub fn cell_grid(chart: &GanttChart) -> Vec<Vec<Option<TaskId>>> {
    let width = chart.makespan() as usize;
    let mut rows = vec![vec![None; width]; chart.processor_count()];
    for (task, slot) in chart.slots().iter().enumerate() {
        for cell in &mut rows[slot.processor][slot.start as usize..slot.finish as usize] {
            *cell = Some(task);
        }
    }
    rows
}

/// Fixed-width text rendering, e.g. for a chain `0 -> 1` split over two
/// processors:
///
/// ```text
///     0
/// P1 | 0 0 . . . |
/// P2 | . . 1 1 1 |
/// makespan 5
/// ```
///
/// The header marks every fifth time unit.
pub fn render_text(chart: &GanttChart) -> String {
    let grid = cell_grid(chart);
    let task_width = chart.slots().len().saturating_sub(1).to_string().len();
    let label_width = chart.processor_count().to_string().len() + 1;
    let cell = task_width.max(1);

    // header: every fifth time unit, labels may run into the following cells
    let prefix = label_width + 2;
    let mut header = vec![b' '; prefix + grid.first().map_or(0, Vec::len) * (cell + 1) + 8];
    let mut free_from = 0;
    for t in (0..chart.makespan() as usize).step_by(5) {
        let label = t.to_string();
        let col = prefix + t * (cell + 1) + cell - label.len().min(cell);
        if col >= free_from {
            header[col..col + label.len()].copy_from_slice(label.as_bytes());
            free_from = col + label.len() + 1;
        }
    }
    let mut out = String::from_utf8(header)
        .expect("ascii")
        .trim_end()
        .to_string();
    out.push('\n');

    for (p, row) in grid.iter().enumerate() {
        let _ = write!(out, "{:<label_width$} |", format!("P{}", p + 1));
        for c in row {
            match c {
                Some(t) => {
                    let _ = write!(out, " {t:>cell$}");
                }
                None => {
                    let _ = write!(out, " {IDLE:>cell$}");
                }
            }
        }
        out.push_str(" |\n");
    }
    let _ = writeln!(out, "makespan {}", chart.makespan());
    out
}

const UNIT_PX: u64 = 24;
const ROW_PX: u64 = 32;
const BAR_PX: u64 = 24;
const LEFT_PX: u64 = 48;
const TOP_PX: u64 = 28;

/// SVG rendering: one horizontal bar per task, positioned by start and
/// finish, one lane per processor.
pub fn render_svg(chart: &GanttChart) -> String {
    let lanes = chart.processor_count() as u64;
    let width = LEFT_PX + chart.makespan() * UNIT_PX + 16;
    let height = TOP_PX + lanes * ROW_PX + 24;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    out.push_str(
        "<style>text { font-family: monospace; font-size: 11px; } .task { fill: #9ecae1; stroke: #08519c; } .lane { fill: #f4f4f4; } .label { text-anchor: middle; dominant-baseline: middle; }</style>\n",
    );
    let _ = writeln!(
        out,
        r#"<text x="{LEFT_PX}" y="16">makespan {}</text>"#,
        chart.makespan()
    );

    for p in 0..lanes {
        let y = TOP_PX + p * ROW_PX;
        let _ = writeln!(
            out,
            r#"<rect class="lane" x="{LEFT_PX}" y="{y}" width="{}" height="{BAR_PX}"/>"#,
            chart.makespan() * UNIT_PX
        );
        let _ = writeln!(
            out,
            r#"<text x="8" y="{}">P{}</text>"#,
            y + BAR_PX / 2 + 4,
            p + 1
        );
    }

    for (task, slot) in chart.slots().iter().enumerate() {
        let x = LEFT_PX + slot.start * UNIT_PX;
        let y = TOP_PX + slot.processor as u64 * ROW_PX;
        let w = (slot.finish - slot.start) * UNIT_PX;
        let _ = writeln!(
            out,
            r#"<rect class="task" x="{x}" y="{y}" width="{w}" height="{BAR_PX}"><title>task {task}: {}..{}</title></rect>"#,
            slot.start, slot.finish
        );
        let _ = writeln!(
            out,
            r#"<text class="label" x="{}" y="{}">{task}</text>"#,
            x + w / 2,
            y + BAR_PX / 2
        );
    }

    let axis_y = TOP_PX + lanes * ROW_PX + 12;
    for t in (0..=chart.makespan()).step_by(5) {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{axis_y}">{t}</text>"#,
            LEFT_PX + t * UNIT_PX
        );
    }
    out.push_str("</svg>\n");
    out
}
