//! Fixed-size worker pool with a static task-to-worker assignment.
//!
//! Every task set is split over the workers by index only, so both the
//! results and the per-worker solve tallies are deterministic for a given
//! worker count. Each worker accumulates into a private [`Tally`] that is
//! merged into the shared [`SolveCounter`] after the join.

use std::thread;

use crate::error::{Error, Result};
use crate::metrics::{SolveCounter, Tally};

/// How task indices map onto workers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    /// Task `i` runs on worker `i mod W`.
    RoundRobin,
    /// Contiguous chunks of `ceil(n / W)` tasks per worker.
    Chunked,
}

/// Worker index, its tally and its `(task, result)` pairs.
type WorkerOutput<T> = (usize, Tally, Vec<(usize, Result<T>)>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorkerPool {
    workers: usize,
}

impl Default for WorkerPool {
    fn default() -> Self {
        Self { workers: 1 }
    }
}

impl WorkerPool {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::InvalidArgument("worker count must be positive".into()));
        }
        Ok(Self { workers })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn counter(&self) -> SolveCounter {
        SolveCounter::new(self.workers)
    }

    pub fn owner(&self, task: usize, num_tasks: usize, schedule: Schedule) -> usize {
        match schedule {
            Schedule::RoundRobin => task % self.workers,
            Schedule::Chunked => {
                let chunk = num_tasks.div_ceil(self.workers).max(1);
                task / chunk
            }
        }
    }

    /// Run `f(i, tally)` for `i in 0..num_tasks` and return the results in
    /// task order. On failure the error of the lowest failing index wins.
    pub fn map<T, F>(
        &self,
        num_tasks: usize,
        schedule: Schedule,
        counter: &mut SolveCounter,
        f: F,
    ) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize, &mut Tally) -> Result<T> + Sync,
    {
        assert_eq!(
            counter.workers(),
            self.workers,
            "counter and pool disagree on the worker count"
        );
        let mut assignment: Vec<Vec<usize>> = vec![Vec::new(); self.workers];
        for i in 0..num_tasks {
            assignment[self.owner(i, num_tasks, schedule)].push(i);
        }

        let busy = assignment.iter().filter(|a| !a.is_empty()).count();
        let per_worker: Vec<WorkerOutput<T>> = if busy <= 1 {
            assignment
                .iter()
                .enumerate()
                .filter(|(_, tasks)| !tasks.is_empty())
                .map(|(w, tasks)| {
                    let mut tally = Tally::default();
                    let out = tasks.iter().map(|&i| (i, f(i, &mut tally))).collect();
                    (w, tally, out)
                })
                .collect()
        } else {
            let f = &f;
            thread::scope(|scope| {
                let handles: Vec<_> = assignment
                    .iter()
                    .enumerate()
                    .filter(|(_, tasks)| !tasks.is_empty())
                    .map(|(w, tasks)| {
                        scope.spawn(move || {
                            let mut tally = Tally::default();
                            let out: Vec<_> =
                                tasks.iter().map(|&i| (i, f(i, &mut tally))).collect();
                            (w, tally, out)
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("worker thread panicked"))
                    .collect()
            })
        };

        let mut slots: Vec<Option<Result<T>>> = (0..num_tasks).map(|_| None).collect();
        for (w, tally, out) in per_worker {
            counter.worker(w).merge(&tally);
            for (i, r) in out {
                slots[i] = Some(r);
            }
        }
        slots
            .into_iter()
            .map(|s| s.expect("every task is assigned to exactly one worker"))
            .collect()
    }
}
