//! Batch evaluation over grids of inputs and splitters.
//!
//! With the `parallel` feature (on by default) batches fan out over rayon's
//! global pool; without it, or with [`Execution::Sequential`], they run on the
//! calling thread. Results are identical either way: every item is computed
//! independently and reductions happen sequentially afterwards.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::Result;
use crate::feynman::{
    two_input_distribution, two_input_distribution_streamlined, FockPair, Formula,
    OutputDistribution,
};
use crate::oracle::expand_output_state;
use crate::splitter::SymmetricSplitter;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

fn map_items<T, R, F>(items: &[T], exec: Execution, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}

/// Worst case found by a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepStats {
    pub cases: usize,
    pub max_deviation: f64,
    /// Input and splitter index of the worst case.
    pub worst: Option<(FockPair, usize)>,
}

fn reduce(cases: &[(FockPair, usize)], deviations: Vec<Result<f64>>) -> Result<SweepStats> {
    let mut stats = SweepStats { cases: cases.len(), max_deviation: 0.0, worst: None };
    for (case, dev) in cases.iter().zip(deviations) {
        let dev = dev?;
        if stats.worst.is_none() || dev > stats.max_deviation {
            stats.max_deviation = dev;
            stats.worst = Some(*case);
        }
    }
    Ok(stats)
}

fn grid(max_n1: u32, max_n2: u32, splitters: usize) -> Result<Vec<(FockPair, usize)>> {
    let mut cases = Vec::new();
    for n1 in 0..=max_n1 {
        for n2 in 0..=max_n2 {
            let pair = FockPair::new(n1, n2)?;
            cases.extend((0..splitters).map(|k| (pair, k)));
        }
    }
    Ok(cases)
}

pub fn distribution(
    formula: Formula,
    input: FockPair,
    s: &SymmetricSplitter,
) -> Result<OutputDistribution> {
    match formula {
        Formula::PathCount => two_input_distribution(input, s),
        Formula::Streamlined => two_input_distribution_streamlined(input, s),
    }
}

/// Distributions for a batch of (input, splitter) pairs.
pub fn distributions(
    inputs: &[(FockPair, SymmetricSplitter)],
    formula: Formula,
    exec: Execution,
) -> Vec<Result<OutputDistribution>> {
    map_items(inputs, exec, |(pair, s)| distribution(formula, *pair, s))
}

/// Largest |sum_m |A(m)|^2 - 1| over n1 <= max_n1, n2 <= max_n2 and all splitters.
pub fn normalization_sweep(
    max_n1: u32,
    max_n2: u32,
    splitters: &[SymmetricSplitter],
    formula: Formula,
    exec: Execution,
) -> Result<SweepStats> {
    let cases = grid(max_n1, max_n2, splitters.len())?;
    let devs = map_items(&cases, exec, |(pair, k)| {
        distribution(formula, *pair, &splitters[*k]).map(|d| d.norm_residual())
    });
    reduce(&cases, devs)
}

/// Largest componentwise |A_paths(m) - A_operators(m)| over n1 + n2 <= max_total.
pub fn oracle_sweep(
    max_total: u32,
    splitters: &[SymmetricSplitter],
    exec: Execution,
) -> Result<SweepStats> {
    let cases: Vec<(FockPair, usize)> = grid(max_total, max_total, splitters.len())?
        .into_iter()
        .filter(|(p, _)| p.total() <= max_total)
        .collect();
    let devs = map_items(&cases, exec, |(pair, k)| {
        let s = &splitters[*k];
        let paths = two_input_distribution(*pair, s)?;
        let ops = expand_output_state(*pair, s)?;
        let total = pair.total();
        Ok(paths
            .amplitudes
            .iter()
            .enumerate()
            .map(|(m, a)| (a - ops.amplitude(m as u32, total - m as u32)).norm())
            .fold(0.0, f64::max))
    });
    reduce(&cases, devs)
}
