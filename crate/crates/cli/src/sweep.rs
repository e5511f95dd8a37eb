//! Order-preserving parallel map over sweep points.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
#[error("point {index}: {source}")]
pub struct SweepError<E: std::error::Error + 'static> {
    pub index: usize,
    #[source]
    pub source: E,
}

/// Evaluates `worker` on every point with `workers` threads and returns the
/// results in point order. After a failure, points with a larger index are
/// skipped; the error reported is always the one with the smallest index,
/// whatever the scheduling.
pub fn sweep_parallel<P, R, E>(
    points: &[P],
    workers: usize,
    worker: impl Fn(&P) -> Result<R, E> + Sync,
) -> Result<Vec<R>, SweepError<E>>
where
    P: Sync,
    R: Send,
    E: std::error::Error + Send + 'static,
{
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let first_failure = AtomicUsize::new(usize::MAX);
    let run = || {
        points
            .par_iter()
            .enumerate()
            .map(|(i, p)| {
                if i > first_failure.load(Ordering::Relaxed) {
                    return None;
                }
                let r = worker(p);
                if r.is_err() {
                    first_failure.fetch_min(i, Ordering::Relaxed);
                }
                Some(r)
            })
            .collect::<Vec<_>>()
    };
    let results = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool")
        .install(run);
    let mut out = Vec::with_capacity(points.len());
    for (index, r) in results.into_iter().enumerate() {
        match r {
            Some(Ok(x)) => out.push(x),
            Some(Err(source)) => return Err(SweepError { index, source }),
            None => unreachable!("points are skipped only after an earlier failure"),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Error, PartialEq)]
    #[error("bad point {0}")]
    struct Bad(usize);

    #[test]
    fn keeps_order_for_any_worker_count() {
        let pts: Vec<usize> = (0..50).collect();
        let one = sweep_parallel(&pts, 1, |&i| Ok::<_, Bad>(i * i)).unwrap();
        let many = sweep_parallel(&pts, 4, |&i| Ok::<_, Bad>(i * i)).unwrap();
        assert_eq!(one, many);
        assert_eq!(one[7], 49);
    }

    #[test]
    fn empty_input() {
        let r = sweep_parallel(&[] as &[u8], 3, |_| Ok::<u8, Bad>(0)).unwrap();
        assert!(r.is_empty());
    }

    #[test]
    fn reports_smallest_failing_index() {
        let pts: Vec<usize> = (0..20).collect();
        for workers in [1, 3] {
            let e = sweep_parallel(&pts, workers, |&i| if i == 3 || i == 11 { Err(Bad(i)) } else { Ok(i) })
                .unwrap_err();
            assert_eq!(e.index, 3);
            assert_eq!(e.source, Bad(3));
        }
    }
}
