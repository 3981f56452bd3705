//! Shared fixtures for the criterion benchmarks.

use quadlab_core::trees::{sample_well_labeled_seeded, SampleMode};
use quadlab_core::{schaeffer, Quadrangulation, WellLabeledTree};

pub fn free_tree(n: usize, seed: u64) -> WellLabeledTree {
    sample_well_labeled_seeded(n, SampleMode::FreeShift, seed).expect("n >= 1")
}

pub fn free_quadrangulation(n: usize, seed: u64) -> Quadrangulation {
    schaeffer::forward(&free_tree(n, seed)).expect("forward construction")
}
