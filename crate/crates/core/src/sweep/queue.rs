use std::collections::{BTreeMap, VecDeque};

use crate::cluster::ExecError;
use crate::eval::Value;
use crate::expr::Expr;

pub type TaskResult = Result<Value, ExecError>;

/// Work queue for one sweep. Every task index is in exactly one of the
/// pending, in-flight and completed sets.
#[derive(Debug)]
pub struct TaskQueue {
    tasks: Vec<Expr>,
    pending: VecDeque<usize>,
    /// Index to the attempt number currently running.
    in_flight: BTreeMap<usize, u32>,
    completed: BTreeMap<usize, TaskResult>,
    requeues: Vec<u32>,
    max_requeues: u32,
}

impl TaskQueue {
    pub fn new(tasks: Vec<Expr>, max_requeues: u32) -> Self {
        let n = tasks.len();
        TaskQueue {
            tasks,
            pending: (0..n).collect(),
            in_flight: BTreeMap::new(),
            completed: BTreeMap::new(),
            requeues: vec![0; n],
            max_requeues,
        }
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn pending(&self) -> usize {
        self.pending.len()
    }

    pub fn in_flight(&self) -> usize {
        self.in_flight.len()
    }

    pub fn completed(&self) -> usize {
        self.completed.len()
    }

    pub fn requeues(&self, index: usize) -> u32 {
        self.requeues[index]
    }

    pub fn is_done(&self) -> bool {
        self.completed.len() == self.tasks.len()
    }

    /// Takes the next pending task and marks it in flight.
    pub fn take(&mut self) -> Option<(usize, Expr)> {
        let i = self.pending.pop_front()?;
        self.in_flight.insert(i, self.requeues[i] + 1);
        Some((i, self.tasks[i].clone()))
    }

    /// Records a final result. Panics if `index` is not in flight.
    pub fn complete(&mut self, index: usize, result: TaskResult) {
        assert!(self.in_flight.remove(&index).is_some(), "task {index} is not in flight");
        self.completed.insert(index, result);
    }

    /// Puts a task that failed in transit back at the end of the queue, or
    /// completes it with `error` once its requeues are used up. Returns
    /// whether it was requeued.
    pub fn fail(&mut self, index: usize, error: ExecError) -> bool {
        assert!(self.in_flight.remove(&index).is_some(), "task {index} is not in flight");
        if self.requeues[index] < self.max_requeues {
            self.requeues[index] += 1;
            self.pending.push_back(index);
            true
        } else {
            self.completed.insert(index, Err(error));
            false
        }
    }

    /// Results in index order. Panics unless every task has completed.
    pub fn into_results(self) -> Vec<TaskResult> {
        assert!(self.is_done(), "sweep still has unfinished tasks");
        self.completed.into_values().collect()
    }
}
