//! Scoped-thread executor for word-tree enumerations.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use ule_core::exec::Executor;

/// Runs tasks on up to `threads` scoped worker threads. Results are returned
/// in task order, so output does not depend on the thread count.
#[derive(Debug, Clone, Copy)]
pub struct Threaded {
    pub threads: usize,
}

impl Executor for Threaded {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        let workers = self.threads.clamp(1, n.max(1));
        if workers == 1 {
            return (0..n).map(f).collect();
        }
        let next = AtomicUsize::new(0);
        let slots: Mutex<Vec<Option<T>>> = Mutex::new((0..n).map(|_| None).collect());
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= n {
                        break;
                    }
                    let r = f(i);
                    slots.lock().expect("worker panicked")[i] = Some(r);
                });
            }
        });
        slots
            .into_inner()
            .expect("worker panicked")
            .into_iter()
            .map(|r| r.expect("every task ran"))
            .collect()
    }
}

/// Worker count from `ULE_THREADS`, defaulting to 1.
pub fn from_env() -> Result<Threaded, String> {
    match std::env::var("ULE_THREADS") {
        Err(_) => Ok(Threaded { threads: 1 }),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Threaded { threads: n }),
            _ => Err(format!("ULE_THREADS must be a positive integer, got {v:?}")),
        },
    }
}
