use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use super::{transcribe, translate, AsrBackend, AsrRequest, AsrResult, BackendError, MtBackend, MtRequest, MtResult};

/// Applies `f` to every item with at most `max_in_flight` calls running at
/// once and returns the results in item order.
pub fn ordered_parallel_map<T, R, F>(items: &[T], max_in_flight: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = max_in_flight.max(1).min(items.len());
    if workers <= 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let done: Mutex<Vec<(usize, R)>> = Mutex::new(Vec::with_capacity(items.len()));
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                let r = f(item);
                done.lock().unwrap().push((i, r));
            });
        }
    });
    let mut done = done.into_inner().unwrap();
    done.sort_by_key(|(i, _)| *i);
    done.into_iter().map(|(_, r)| r).collect()
}

/// Per-item outcomes of a batch, in request order. A failing item never
/// affects the others.
#[derive(Debug, Clone)]
pub struct BatchOutcome<R> {
    pub results: Vec<Result<R, BackendError>>,
}

impl<R> BatchOutcome<R> {
    pub fn failures(&self) -> Vec<&BackendError> {
        self.results.iter().filter_map(|r| r.as_ref().err()).collect()
    }

    pub fn successes(&self) -> impl Iterator<Item = &R> {
        self.results.iter().filter_map(|r| r.as_ref().ok())
    }

    pub fn is_complete(&self) -> bool {
        self.results.iter().all(Result::is_ok)
    }
}

pub fn batch<Req, Res, F>(requests: &[Req], max_in_flight: usize, call: F) -> BatchOutcome<Res>
where
    Req: Sync,
    Res: Send,
    F: Fn(&Req) -> Result<Res, BackendError> + Sync,
{
    assert!(max_in_flight >= 1, "max_in_flight must be at least 1");
    BatchOutcome {
        results: ordered_parallel_map(requests, max_in_flight, call),
    }
}

pub fn batch_transcribe(
    requests: &[AsrRequest],
    backend: &dyn AsrBackend,
    max_in_flight: usize,
) -> BatchOutcome<AsrResult> {
    batch(requests, max_in_flight, |r| transcribe(r, backend))
}

pub fn batch_translate(
    requests: &[MtRequest],
    backend: &dyn MtBackend,
    max_in_flight: usize,
) -> BatchOutcome<MtResult> {
    batch(requests, max_in_flight, |r| translate(r, backend))
}
