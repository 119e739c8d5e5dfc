//! Parametric sweeps: one template expression evaluated for many values of
//! a parameter, fanned out through an [`RExecutor`] from a task queue that
//! requeues work lost in transit.

mod bench;
mod mandel;
mod queue;

use futures::stream::{FuturesUnordered, StreamExt};
use thiserror::Error;

use crate::cluster::{ExecError, RExecutor, TransportError};
use crate::eval::{builtin_table, Fuel};
use crate::expr::{substitute, Expr, Ident, Lift, UnliftableValue};

pub use bench::{bench_csv, spin_job, BenchRow};
pub use mandel::{mandel_row_expr, mandel_task_fuel, ppm_bytes, render_mandel, MandelSpec};
pub use queue::{TaskQueue, TaskResult};

pub const DEFAULT_MAX_REQUEUES: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SweepError {
    #[error("template has free variable {0} besides the parameter")]
    FreeVariable(Ident),
    #[error("a sweep needs at least one value")]
    NoValues,
    #[error(transparent)]
    Unliftable(#[from] UnliftableValue),
    #[error("invalid mandelbrot spec: {0}")]
    InvalidSpec(String),
    #[error("no healthy workers remain")]
    NoHealthyWorkers,
    #[error("task {index} failed: {error}")]
    Task { index: usize, error: ExecError },
    #[error("task {index} returned an unexpected value: {detail}")]
    BadResult { index: usize, detail: String },
}

/// A template plus the values to splice into its parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepJob {
    template: Expr,
    param: Ident,
    values: Vec<Expr>,
    tasks: Vec<Expr>,
    /// Per-task budget; `None` uses the worker default.
    pub fuel: Option<Fuel>,
    pub max_requeues: u32,
}

impl SweepJob {
    pub fn template(&self) -> &Expr {
        &self.template
    }

    pub fn param(&self) -> &Ident {
        &self.param
    }

    /// The lifted parameter values.
    pub fn values(&self) -> &[Expr] {
        &self.values
    }

    /// Task `i` is the template with `values[i]` substituted for the
    /// parameter.
    pub fn tasks(&self) -> &[Expr] {
        &self.tasks
    }

    pub fn with_fuel(mut self, fuel: Fuel) -> Self {
        self.fuel = Some(fuel);
        self
    }

    pub fn with_max_requeues(mut self, n: u32) -> Self {
        self.max_requeues = n;
        self
    }
}

/// Builds a sweep job, checking that the template mentions no free
/// variable other than `param` and the builtins.
pub fn make_sweep<T: Lift>(template: &Expr, param: &Ident, values: &[T]) -> Result<SweepJob, SweepError> {
    let builtins = builtin_table();
    if let Some(v) = template
        .free_vars()
        .into_iter()
        .find(|v| v != param && !builtins.contains_key(v.as_str()))
    {
        return Err(SweepError::FreeVariable(v));
    }
    if values.is_empty() {
        return Err(SweepError::NoValues);
    }
    let values = values.iter().map(Lift::lift).collect::<Result<Vec<_>, _>>()?;
    let tasks = values.iter().map(|v| substitute(template, param, v)).collect();
    Ok(SweepJob {
        template: template.clone(),
        param: param.clone(),
        values,
        tasks,
        fuel: None,
        max_requeues: DEFAULT_MAX_REQUEUES,
    })
}

/// Runs every task of `job`; result `i` belongs to `job.values()[i]`.
pub async fn run_sweep(job: &SweepJob, x: &RExecutor) -> Result<Vec<TaskResult>, SweepError> {
    run_tasks(job.tasks.clone(), job.fuel, job.max_requeues, x).await
}

/// Drains a task queue through `x`, keeping up to `x.window()` tasks in
/// flight. Transport failures are requeued; a pool with no healthy
/// worker left fails the whole run.
pub async fn run_tasks(
    tasks: Vec<Expr>,
    fuel: Option<Fuel>,
    max_requeues: u32,
    x: &RExecutor,
) -> Result<Vec<TaskResult>, SweepError> {
    let mut queue = TaskQueue::new(tasks, max_requeues);
    let fuel = fuel.or(x.fuel());
    let mut running = FuturesUnordered::new();
    loop {
        while running.len() < x.window() {
            let Some((i, e)) = queue.take() else { break };
            running.push(async move { (i, x.eval_with(&e, fuel).await) });
        }
        let Some((i, result)) = running.next().await else { break };
        match result {
            Err(ExecError::Transport(TransportError::NoHealthyWorkers)) => {
                return Err(SweepError::NoHealthyWorkers)
            }
            Err(e @ ExecError::Transport(_)) => {
                if queue.fail(i, e.clone()) {
                    tracing::info!(task = i, error = %e, "requeued task");
                }
            }
            other => queue.complete(i, other),
        }
    }
    Ok(queue.into_results())
}
