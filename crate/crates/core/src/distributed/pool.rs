//! Persistent worker threads driven in barrier-synchronized rounds.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::thread;

use crossbeam_channel::{bounded, unbounded, Receiver, Sender};

use crate::error::{Error, Result};

pub(crate) struct Workers<J> {
    jobs: Vec<Sender<J>>,
    results: Receiver<(usize, Result<super::GradientMessage>)>,
}

impl<J: Send> Workers<J> {
    pub(crate) fn len(&self) -> usize {
        self.jobs.len()
    }

    /// Sends `jobs[s]` to worker `s` and waits for every reply. Replies are
    /// returned in worker order regardless of arrival order.
    pub(crate) fn round(&self, jobs: Vec<J>) -> Result<Vec<super::GradientMessage>> {
        assert_eq!(jobs.len(), self.jobs.len());
        for (tx, job) in self.jobs.iter().zip(jobs) {
            tx.send(job)
                .map_err(|_| Error::Wire("worker exited before the round".into()))?;
        }
        let mut slots: Vec<Option<Result<super::GradientMessage>>> =
            (0..self.jobs.len()).map(|_| None).collect();
        for _ in 0..self.jobs.len() {
            let (s, reply) = self
                .results
                .recv()
                .map_err(|_| Error::Wire("worker exited during the round".into()))?;
            slots[s] = Some(reply);
        }
        slots
            .into_iter()
            .map(|r| r.expect("every worker replied"))
            .collect()
    }
}

/// Runs `body` with one thread per handler. Threads stop when `body`
/// returns.
pub(crate) fn with_workers<J, H, B, T>(handlers: Vec<H>, body: B) -> T
where
    J: Send,
    H: FnMut(J) -> Result<super::GradientMessage> + Send,
    B: FnOnce(&Workers<J>) -> T,
{
    thread::scope(|scope| {
        let (result_tx, results) = unbounded();
        let mut jobs = Vec::with_capacity(handlers.len());
        for (s, mut handler) in handlers.into_iter().enumerate() {
            let (tx, rx) = bounded::<J>(1);
            let result_tx = result_tx.clone();
            jobs.push(tx);
            scope.spawn(move || {
                for job in rx {
                    let reply = catch_unwind(AssertUnwindSafe(|| handler(job)))
                        .unwrap_or_else(|_| Err(Error::Wire(format!("worker {s} panicked"))));
                    if result_tx.send((s, reply)).is_err() {
                        break;
                    }
                }
            });
        }
        drop(result_tx);
        let workers = Workers { jobs, results };
        let out = body(&workers);
        drop(workers);
        out
    })
}
