//! Chi-square goodness of fit for the samplers.

use std::collections::HashMap;

use statrs::distribution::{ChiSquared, ContinuousCDF};

use quadlab_core::schaeffer::forward;
use quadlab_core::seed::derive_seed;
use quadlab_core::trees::{enumerate_plane_trees, enumerate_well_labeled, sample_plane_tree_seeded, sample_well_labeled_seeded};
use quadlab_core::SampleMode;

const ALPHA: f64 = 1e-4;

fn p_value(counts: &HashMap<String, usize>, categories: usize, samples: usize) -> f64 {
    assert_eq!(counts.len(), categories, "a category was never hit or an unknown one appeared");
    let expected = samples as f64 / categories as f64;
    let stat: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    1.0 - ChiSquared::new((categories - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn plane_trees_are_uniform() {
    let n = 5;
    let known: Vec<String> = enumerate_plane_trees(n).iter().map(|t| t.to_parens()).collect();
    let samples = 42_000;
    let mut counts = HashMap::new();
    for i in 0..samples {
        let t = sample_plane_tree_seeded(n, derive_seed(1, n as u64, i as u64)).unwrap();
        *counts.entry(t.to_parens()).or_insert(0) += 1;
    }
    assert!(counts.keys().all(|k| known.contains(k)));
    let p = p_value(&counts, known.len(), samples);
    assert!(p > ALPHA, "p = {p}");
}

#[test]
fn exact_rejection_is_uniform_on_rooted_quadrangulations() {
    let n = 3;
    let categories = enumerate_well_labeled(n).unwrap().count();
    assert_eq!(categories, 54);
    let samples = 27_000;
    let mut counts = HashMap::new();
    for i in 0..samples {
        let t = sample_well_labeled_seeded(n, SampleMode::ExactRejection, derive_seed(2, n as u64, i as u64)).unwrap();
        let code = forward(&t).unwrap().map().rooted_code();
        *counts.entry(format!("{code:?}")).or_insert(0) += 1;
    }
    let p = p_value(&counts, categories, samples);
    assert!(p > ALPHA, "p = {p}");
}

#[test]
fn free_shift_has_uniform_shapes_and_increments() {
    // 5 plane trees with 3 edges, 3^3 increment vectors.
    let n = 3;
    let samples = 27_000;
    let mut counts = HashMap::new();
    for i in 0..samples {
        let t = sample_well_labeled_seeded(n, SampleMode::FreeShift, derive_seed(3, n as u64, i as u64)).unwrap();
        assert_eq!(t.labels().iter().min(), Some(&1));
        let root = t.labels()[0] as i64;
        let shifted: Vec<i64> = t.labels().iter().map(|&l| l as i64 - root).collect();
        *counts.entry(format!("{}{shifted:?}", t.tree().to_parens())).or_insert(0) += 1;
    }
    let p = p_value(&counts, 5 * 27, samples);
    assert!(p > ALPHA, "p = {p}");
}
