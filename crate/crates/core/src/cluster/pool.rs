use thiserror::Error;

/// Index of a worker in the pool's ordered list.
pub type WorkerId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no healthy workers")]
pub struct NoHealthyWorkers;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkerSlot {
    pub addr: String,
    pub healthy: bool,
    pub in_flight: usize,
    /// Requests assigned to this worker so far.
    pub dispatched: u64,
}

/// Scheduling state for a fixed, ordered worker list.
///
/// The cursor names the worker picked last; [`PoolState::schedule`] picks
/// the next healthy one after it.
#[derive(Debug, Clone)]
pub struct PoolState {
    workers: Vec<WorkerSlot>,
    cursor: usize,
}

impl PoolState {
    /// All workers start healthy. The cursor starts on the last worker so
    /// the first pick is worker 0.
    pub fn new<S: Into<String>>(addrs: impl IntoIterator<Item = S>) -> Self {
        let workers: Vec<_> = addrs
            .into_iter()
            .map(|a| WorkerSlot { addr: a.into(), healthy: true, in_flight: 0, dispatched: 0 })
            .collect();
        let cursor = workers.len().saturating_sub(1);
        PoolState { workers, cursor }
    }

    pub fn len(&self) -> usize {
        self.workers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.workers.is_empty()
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    /// Panics if `cursor` is out of range.
    pub fn set_cursor(&mut self, cursor: usize) {
        assert!(cursor < self.workers.len(), "cursor {cursor} out of range");
        self.cursor = cursor;
    }

    pub fn workers(&self) -> &[WorkerSlot] {
        &self.workers
    }

    pub fn addr(&self, w: WorkerId) -> &str {
        &self.workers[w].addr
    }

    pub fn set_healthy(&mut self, w: WorkerId, healthy: bool) {
        self.workers[w].healthy = healthy;
    }

    pub fn healthy_count(&self) -> usize {
        self.workers.iter().filter(|w| w.healthy).count()
    }

    pub fn unhealthy(&self) -> Vec<WorkerId> {
        (0..self.workers.len()).filter(|&i| !self.workers[i].healthy).collect()
    }

    /// Round-robin over healthy workers: returns the first healthy worker
    /// after the cursor and moves the cursor onto it.
    pub fn schedule(&mut self) -> Result<WorkerId, NoHealthyWorkers> {
        let n = self.workers.len();
        let pick = (1..=n)
            .map(|step| (self.cursor + step) % n)
            .find(|&i| self.workers[i].healthy)
            .ok_or(NoHealthyWorkers)?;
        self.cursor = pick;
        self.workers[pick].dispatched += 1;
        Ok(pick)
    }

    pub fn begin(&mut self, w: WorkerId) {
        self.workers[w].in_flight += 1;
    }

    pub fn end(&mut self, w: WorkerId) {
        self.workers[w].in_flight = self.workers[w].in_flight.saturating_sub(1);
    }
}
