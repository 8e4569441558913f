//! JSON file formats for task graphs and schedules.
//!
//! Graph files:
//!
//! ```text
//! {"tasks":[{"id":0,"et":3},{"id":1,"et":2}],"edges":[[0,1]]}
//! ```
//!
//! Schedule files (list index = processor index):
//!
//! ```text
//! {"procs":[[0,1],[]]}
//! ```
//!
//! Serialization is canonical: compact, tasks sorted by id, edges sorted
//! lexicographically, no trailing newline. Parsing accepts any whitespace and
//! task order.

use serde::{Deserialize, Serialize};
use taskga_core::schedule::check_feasible;
use taskga_core::{Chromosome, GraphError, ScheduleError, TaskGraph, TaskId, Time};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("task ids must be exactly 0..{count}: {detail}")]
    TaskIds { count: usize, detail: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        let message = e.to_string();
        // serde_json appends " at line L column C"; keep only the message part
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        FormatError::Syntax {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskEntry {
    id: TaskId,
    et: Time,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    tasks: Vec<TaskEntry>,
    edges: Vec<(TaskId, TaskId)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleFile {
    procs: Vec<Vec<TaskId>>,
}

pub fn parse_graph(text: &str) -> Result<TaskGraph, FormatError> {
    let mut file: GraphFile = serde_json::from_str(text)?;
    let count = file.tasks.len();
    file.tasks.sort_by_key(|t| t.id);
    for (expected, task) in file.tasks.iter().enumerate() {
        if task.id != expected {
            let detail = if task.id < expected {
                format!("id {} appears more than once", task.id)
            } else {
                format!("id {expected} is missing")
            };
            return Err(FormatError::TaskIds { count, detail });
        }
    }
    let exec_time = file.tasks.iter().map(|t| t.et).collect();
    Ok(TaskGraph::new(exec_time, file.edges)?)
}

pub fn serialize_graph(graph: &TaskGraph) -> String {
    let file = GraphFile {
        tasks: graph
            .exec_times()
            .iter()
            .enumerate()
            .map(|(id, &et)| TaskEntry { id, et })
            .collect(),
        edges: graph.edges().to_vec(),
    };
    serde_json::to_string(&file).expect("graph serialization is infallible")
}

/// Parses a schedule and checks it against `graph`: every task exactly once
/// and an execution order that cannot deadlock.
pub fn parse_schedule(text: &str, graph: &TaskGraph) -> Result<Chromosome, FormatError> {
    let file: ScheduleFile = serde_json::from_str(text)?;
    let chromosome = Chromosome::new(file.procs);
    check_feasible(graph, &chromosome).map_err(|violations| ScheduleError { violations })?;
    Ok(chromosome)
}

pub fn serialize_schedule(chromosome: &Chromosome) -> String {
    let file = ScheduleFile {
        procs: chromosome.processors().to_vec(),
    };
    serde_json::to_string(&file).expect("schedule serialization is infallible")
}
