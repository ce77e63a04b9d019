use std::fmt;
use std::io;
use std::str::FromStr;

use rand::Rng;

use super::{Record, SynthError};
use crate::kb::KbIndex;
use crate::seed;

/// Stream id that keeps baseline seeds apart from graph-corpus seeds.
const BASELINE_STREAM: u64 = 1 << 32;

/// Single-triple prediction tasks used as a pre-training baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineTask {
    /// `predict relation: head | tail` -> relation, in compact spelling
    Link,
    /// `predict tail: head | relation` -> tail
    Tail,
}

impl BaselineTask {
    pub fn as_str(self) -> &'static str {
        match self {
            BaselineTask::Link => "link",
            BaselineTask::Tail => "tail",
        }
    }
}

impl fmt::Display for BaselineTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BaselineTask {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "link" => Ok(BaselineTask::Link),
            "tail" => Ok(BaselineTask::Tail),
            _ => Err(SynthError::InvalidParams(format!("unknown baseline task '{s}'"))),
        }
    }
}

/// One baseline record from a uniformly drawn KB triple.
pub fn baseline_record(index: &KbIndex, task: BaselineTask, id: u64, seed_value: u64) -> Record {
    let mut rng = seed::rng(seed_value);
    let t = index.triple(rng.gen_range(0..index.triple_count() as u32));
    let (input, target) = match task {
        BaselineTask::Link => (
            format!("predict relation: {} | {}", t.head, t.tail),
            t.relation.compact(),
        ),
        BaselineTask::Tail => (
            format!("predict tail: {} | {}", t.head, t.relation.compact()),
            t.tail.to_string(),
        ),
    };
    Record {
        id,
        difficulty: task.as_str().to_string(),
        input,
        target,
        seed: seed_value,
    }
}

/// Emits `total` records, cycling through `tasks` by record id.
pub fn emit_baseline<F>(
    index: &KbIndex,
    tasks: &[BaselineTask],
    total: usize,
    run_seed: u64,
    mut sink: F,
) -> Result<usize, SynthError>
where
    F: FnMut(&Record) -> io::Result<()>,
{
    if tasks.is_empty() {
        return Err(SynthError::InvalidParams("no baseline tasks selected".into()));
    }
    for id in 0..total as u64 {
        let task = tasks[(id % tasks.len() as u64) as usize];
        let record = baseline_record(index, task, id, seed::derive(run_seed, BASELINE_STREAM, id));
        sink(&record).map_err(|e| SynthError::Io(e.to_string()))?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Triple;

    #[test]
    fn tail_prediction_shape() {
        let t = Triple::parse("attention", "causes", "make_people_laugh").unwrap();
        let idx = KbIndex::from_triples(&[t]).unwrap();
        let r = baseline_record(&idx, BaselineTask::Tail, 0, 3);
        assert_eq!(r.input, "predict tail: attention | causes");
        assert_eq!(r.target, "make_people_laugh");
        let r = baseline_record(&idx, BaselineTask::Link, 1, 3);
        assert_eq!(r.input, "predict relation: attention | make_people_laugh");
        assert_eq!(r.target, "causes");
    }

    #[test]
    fn tasks_alternate() {
        let t = Triple::parse("a", "used_for", "b").unwrap();
        let idx = KbIndex::from_triples(&[t]).unwrap();
        assert_eq!(baseline_record(&idx, BaselineTask::Link, 0, 0).target, "usedfor");
        let mut names = Vec::new();
        emit_baseline(&idx, &[BaselineTask::Link, BaselineTask::Tail], 4, 0, |r| {
            names.push(r.difficulty.clone());
            Ok(())
        })
        .unwrap();
        assert_eq!(names, ["link", "tail", "link", "tail"]);
    }
}
