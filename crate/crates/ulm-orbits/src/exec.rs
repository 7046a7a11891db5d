//! Uniform map/fold over an index space.
//!
//! With the default `parallel` feature these fan out over rayon's thread
//! pool; with `--no-default-features` they run as plain sequential loops.
//! Callers are written against one signature, so the two builds differ only
//! in scheduling, never in results.

/// Applies `f` to every index in `0..count`, preserving order.
#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

/// Applies `f` to every index in `0..count`, preserving order.
#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..count).map(f).collect()
}

/// Folds the index space `0..count` into an accumulator.  `merge` must be
/// associative and consistent with `step` so that any partition of the index
/// space gives the same answer.
#[cfg(feature = "parallel")]
pub(crate) fn fold_indexed<A, Init, Step, Merge>(
    count: u64,
    init: Init,
    step: Step,
    merge: Merge,
) -> A
where
    A: Send,
    Init: Fn() -> A + Sync + Send,
    Step: Fn(A, u64) -> A + Sync + Send,
    Merge: Fn(A, A) -> A + Sync + Send,
{
    use rayon::prelude::*;
    (0..count)
        .into_par_iter()
        .fold(&init, |acc, i| step(acc, i))
        .reduce(&init, |a, b| merge(a, b))
}

/// Folds the index space `0..count` into an accumulator.
#[cfg(not(feature = "parallel"))]
pub(crate) fn fold_indexed<A, Init, Step, Merge>(
    count: u64,
    init: Init,
    step: Step,
    merge: Merge,
) -> A
where
    A: Send,
    Init: Fn() -> A + Sync + Send,
    Step: Fn(A, u64) -> A + Sync + Send,
    Merge: Fn(A, A) -> A + Sync + Send,
{
    let _ = &merge;
    (0..count).fold(init(), step)
}

/// Which scheduling this build uses; handy for benchmark and report labels.
pub fn execution_mode() -> &'static str {
    if cfg!(feature = "parallel") {
        "parallel"
    } else {
        "sequential"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_index_order() {
        let out = map_indexed(10, |i| i * i);
        assert_eq!(out, vec![0, 1, 4, 9, 16, 25, 36, 49, 64, 81]);
    }

    #[test]
    fn fold_agrees_with_a_plain_sum() {
        let total = fold_indexed(1000, || 0u64, |acc, i| acc + i, |a, b| a + b);
        assert_eq!(total, 999 * 1000 / 2);
    }
}
