//! Pluggable task execution for word-tree enumerations.
//!
//! Enumerations split their work by first symbol and merge in symbol order,
//! so results do not depend on how an executor schedules the tasks.

use alloc::vec::Vec;

use crate::error::{Error, Result};

pub trait Executor: Sync {
    /// Evaluates `f(0), ..., f(n - 1)` and returns the results in index order.
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync;
}

/// Runs every task on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        (0..n).map(f).collect()
    }
}


/// Depth-first walk over the words of length `1..=max_len` that start with
/// `first`. `step(state, symbol)` extends the running state of a word by one
/// symbol and returns `None` to prune the subtree; `visit` sees every
/// surviving word with its state. Returns the number of visited words, or a
/// resource error once that number exceeds `cap`.
pub(crate) fn walk_words<S, St, Vi>(
    k: usize,
    first: usize,
    max_len: usize,
    root: S,
    step: &St,
    visit: &mut Vi,
    cap: u64,
) -> Result<u64>
where
    St: Fn(&S, usize) -> Option<S>,
    Vi: FnMut(&[usize], &S),
{
    fn rec<S, St, Vi>(
        k: usize,
        max_len: usize,
        word: &mut Vec<usize>,
        state: &S,
        step: &St,
        visit: &mut Vi,
        count: &mut u64,
        cap: u64,
    ) -> Result<()>
    where
        St: Fn(&S, usize) -> Option<S>,
        Vi: FnMut(&[usize], &S),
    {
        *count += 1;
        if *count > cap {
            return Err(Error::Resource {
                what: "word enumeration nodes",
                needed: *count as u128,
                cap: cap as u128,
            });
        }
        visit(word, state);
        if word.len() == max_len {
            return Ok(());
        }
        for s in 0..k {
            if let Some(next) = step(state, s) {
                word.push(s);
                rec(k, max_len, word, &next, step, visit, count, cap)?;
                word.pop();
            }
        }
        Ok(())
    }
    let mut count = 0;
    if max_len == 0 {
        return Ok(0);
    }
    let mut word = alloc::vec![first];
    rec(k, max_len, &mut word, &root, step, visit, &mut count, cap)?;
    Ok(count)
}

/// Merges per-partition results of [`walk_words`], enforcing the cap on the
/// total node count.
pub(crate) fn merge_counts<T>(parts: Vec<Result<(u64, T)>>, cap: u64) -> Result<Vec<T>> {
    let mut total: u64 = 0;
    let mut out = Vec::with_capacity(parts.len());
    for p in parts {
        let (n, t) = p?;
        total += n;
        out.push(t);
    }
    if total > cap {
        return Err(Error::Resource {
            what: "word enumeration nodes",
            needed: total as u128,
            cap: cap as u128,
        });
    }
    Ok(out)
}
