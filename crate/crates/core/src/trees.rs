//! Plane trees, well-labeled trees and their contour/label processes.
//!
//! Vertices of a plane tree are numbered in preorder (first visit by the
//! depth-first contour walk), so the root is vertex 0 and children of a
//! vertex appear in increasing order.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::seed::rng_from_seed;

/// Largest size accepted by [`enumerate_well_labeled`].
pub const MAX_ENUMERATION_SIZE: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("a tree needs at least one edge")]
    EmptyTree,
    #[error("size {n} exceeds the enumeration limit {max}")]
    SizeTooLarge { n: usize, max: usize },
    #[error("not a Dyck word: {0}")]
    InvalidDyck(String),
    #[error("expected {expected} labels, found {found}")]
    LabelCount { expected: usize, found: usize },
    #[error("label of vertex {vertex} is {label}, labels must be positive")]
    NonPositiveLabel { vertex: usize, label: i64 },
    #[error("labels of vertices {parent} and {child} differ by more than 1")]
    NotLipschitz { parent: usize, child: usize },
    #[error("root label is {0}, expected 1")]
    RootLabel(u32),
    #[error("minimum label is {0}, expected 1")]
    MinimumLabel(u32),
    #[error("malformed tree text: {0}")]
    Malformed(String),
}

/// A rooted plane tree stored as its Dyck word.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlaneTree {
    /// `true` is a step away from the root.
    steps: Vec<bool>,
    parent: Vec<u32>,
}

impl PlaneTree {
    pub fn from_dyck(steps: Vec<bool>) -> Result<Self, TreeError> {
        if steps.is_empty() {
            return Err(TreeError::EmptyTree);
        }
        let mut parent = vec![u32::MAX];
        let mut stack = vec![0u32];
        for (i, &up) in steps.iter().enumerate() {
            if up {
                let v = parent.len() as u32;
                parent.push(*stack.last().unwrap());
                stack.push(v);
            } else {
                stack.pop();
                if stack.is_empty() {
                    return Err(TreeError::InvalidDyck(format!("dips below zero at step {i}")));
                }
            }
        }
        if stack.len() != 1 {
            return Err(TreeError::InvalidDyck("does not return to zero".into()));
        }
        Ok(Self { steps, parent })
    }

    /// Edge count.
    pub fn n(&self) -> usize {
        self.steps.len() / 2
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn steps(&self) -> &[bool] {
        &self.steps
    }

    /// Parent of a non-root vertex.
    pub fn parent(&self, v: usize) -> Option<usize> {
        (v != 0).then(|| self.parent[v] as usize)
    }

    /// Vertex visited at each contour time `0..=2n`.
    pub fn contour_vertices(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut next_id = 1u32;
        let mut current = 0u32;
        out.push(0);
        for &up in &self.steps {
            current = if up {
                next_id += 1;
                next_id - 1
            } else {
                self.parent[current as usize]
            };
            out.push(current);
        }
        out
    }

    /// Balanced parentheses, `(` for a step away from the root.
    pub fn to_parens(&self) -> String {
        self.steps.iter().map(|&up| if up { '(' } else { ')' }).collect()
    }

    pub fn from_parens(text: &str) -> Result<Self, TreeError> {
        let steps = text
            .trim()
            .chars()
            .map(|c| match c {
                '(' => Ok(true),
                ')' => Ok(false),
                other => Err(TreeError::InvalidDyck(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_dyck(steps)
    }
}

/// Uniform plane tree with `n` edges via the cycle lemma.
///
/// A uniform arrangement of `n` up-steps and `n + 1` down-steps has exactly
/// one rotation whose proper prefixes stay nonnegative; that rotation minus
/// its final down-step is a uniform Dyck path.
pub fn sample_plane_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PlaneTree, TreeError> {
    if n == 0 {
        return Err(TreeError::EmptyTree);
    }
    let mut seq = vec![false; 2 * n + 1];
    seq[..n].fill(true);
    seq.shuffle(rng);
    // Rotate to start right after the first minimum of the prefix sums.
    let (mut sum, mut min, mut argmin) = (0i64, i64::MAX, 0usize);
    for (i, &up) in seq.iter().enumerate() {
        sum += if up { 1 } else { -1 };
        if sum < min {
            min = sum;
            argmin = i;
        }
    }
    seq.rotate_left(argmin + 1);
    seq.pop();
    Ok(PlaneTree::from_dyck(seq).expect("cycle lemma yields a Dyck word"))
}

pub fn sample_plane_tree_seeded(n: usize, seed: u64) -> Result<PlaneTree, TreeError> {
    sample_plane_tree(n, &mut rng_from_seed(seed))
}

/// All Dyck words with `n` up-steps in lexicographic order (`(` before `)`).
pub fn enumerate_plane_trees(n: usize) -> Vec<PlaneTree> {
    fn rec(open: usize, close: usize, n: usize, word: &mut Vec<bool>, out: &mut Vec<PlaneTree>) {
        if word.len() == 2 * n {
            out.push(PlaneTree::from_dyck(word.clone()).unwrap());
            return;
        }
        if open < n {
            word.push(true);
            rec(open + 1, close, n, word, out);
            word.pop();
        }
        if close < open {
            word.push(false);
            rec(open, close + 1, n, word, out);
            word.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        rec(0, 0, n, &mut Vec::with_capacity(2 * n), &mut out);
    }
    out
}

/// A plane tree with positive labels that change by at most one along edges.
///
/// Trees built with [`WellLabeledTree::new`] also have root label 1, which is
/// the domain of the bijection with rooted quadrangulations. The free-shift
/// sampler produces [`WellLabeledTree::new_pointed`] trees, whose minimum
/// label is 1 but whose root label is arbitrary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WellLabeledTree {
    tree: PlaneTree,
    labels: Vec<u32>,
}

impl WellLabeledTree {
    pub fn new(tree: PlaneTree, labels: Vec<u32>) -> Result<Self, TreeError> {
        let t = Self::new_pointed(tree, labels)?;
        if t.labels[0] != 1 {
            return Err(TreeError::RootLabel(t.labels[0]));
        }
        Ok(t)
    }

    /// Positive 1-Lipschitz labels with minimum exactly 1.
    pub fn new_pointed(tree: PlaneTree, labels: Vec<u32>) -> Result<Self, TreeError> {
        if labels.len() != tree.node_count() {
            return Err(TreeError::LabelCount { expected: tree.node_count(), found: labels.len() });
        }
        if let Some(v) = labels.iter().position(|&l| l == 0) {
            return Err(TreeError::NonPositiveLabel { vertex: v, label: 0 });
        }
        for child in 1..tree.node_count() {
            let parent = tree.parent[child] as usize;
            if labels[child].abs_diff(labels[parent]) > 1 {
                return Err(TreeError::NotLipschitz { parent, child });
            }
        }
        let min = *labels.iter().min().unwrap();
        if min != 1 {
            return Err(TreeError::MinimumLabel(min));
        }
        Ok(Self { tree, labels })
    }

    pub fn tree(&self) -> &PlaneTree {
        &self.tree
    }

    /// Labels indexed by preorder vertex id.
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.tree.n()
    }

    pub fn root_label(&self) -> u32 {
        self.labels[0]
    }

    /// Rebuilds the tree from its contour and label processes.
    pub fn from_contour(pair: &ContourPair) -> Result<Self, TreeError> {
        let steps = pair
            .heights
            .windows(2)
            .map(|w| match w[1] as i64 - w[0] as i64 {
                1 => Ok(true),
                -1 => Ok(false),
                _ => Err(TreeError::InvalidDyck("contour steps must be +1 or -1".into())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let tree = PlaneTree::from_dyck(steps)?;
        let mut labels = vec![0u32; tree.node_count()];
        for (time, &v) in tree.contour_vertices().iter().enumerate() {
            labels[v as usize] = pair.labels[time];
        }
        Self::new_pointed(tree, labels)
    }

    /// Dyck word on the first line, labels in preorder on the second.
    pub fn to_text(&self) -> String {
        let labels: Vec<String> = self.labels.iter().map(u32::to_string).collect();
        format!("{}\n{}\n", self.tree.to_parens(), labels.join(" "))
    }

    pub fn from_text(text: &str) -> Result<Self, TreeError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let dyck = lines.next().ok_or_else(|| TreeError::Malformed("missing Dyck word".into()))?;
        let labels = lines.next().ok_or_else(|| TreeError::Malformed("missing label line".into()))?;
        if lines.next().is_some() {
            return Err(TreeError::Malformed("trailing content".into()));
        }
        let tree = PlaneTree::from_parens(dyck)?;
        let labels = labels
            .split_whitespace()
            .map(|tok| tok.parse::<u32>().map_err(|e| TreeError::Malformed(format!("label {tok:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new_pointed(tree, labels)
    }
}

impl fmt::Display for WellLabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Every well-labeled tree with `n` edges and root label 1, each once.
///
/// Trees come in lexicographic Dyck order; within a tree, labelings run
/// through the increments in `{-1, 0, +1}` per edge as an odometer.
pub fn enumerate_well_labeled(n: usize) -> Result<impl Iterator<Item = WellLabeledTree>, TreeError> {
    if n == 0 {
        return Err(TreeError::EmptyTree);
    }
    if n > MAX_ENUMERATION_SIZE {
        return Err(TreeError::SizeTooLarge { n, max: MAX_ENUMERATION_SIZE });
    }
    let combos = 3usize.pow(n as u32);
    Ok(enumerate_plane_trees(n).into_iter().flat_map(move |tree| {
        (0..combos).filter_map(move |mut code| {
            let mut labels = vec![1i64; tree.node_count()];
            for v in 1..tree.node_count() {
                labels[v] = labels[tree.parent[v] as usize] + (code % 3) as i64 - 1;
                code /= 3;
                if labels[v] < 1 {
                    return None;
                }
            }
            let labels = labels.into_iter().map(|l| l as u32).collect();
            Some(WellLabeledTree { tree: tree.clone(), labels })
        })
    }))
}

/// `2 * 3^n * (2n)! / (n! (n+2)!)`, the number of rooted quadrangulations with `n` faces.
pub fn rooted_quadrangulation_count(n: u32) -> u128 {
    // Catalan(n) * 2 * 3^n / (n + 2)
    let mut catalan: u128 = 1;
    for k in 0..n as u128 {
        catalan = catalan * 2 * (2 * k + 1) / (k + 2);
    }
    2 * 3u128.pow(n) * catalan / (n as u128 + 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMode {
    /// Uniform on well-labeled trees with root label 1, by rejection.
    #[default]
    ExactRejection,
    /// Unconditioned increments, shifted so that the minimum label is 1.
    /// The image quadrangulation has the law of a uniform one, pointed at an
    /// independent uniform vertex; the tree itself is not uniform on root-label-1 trees.
    FreeShift,
}

impl FromStr for SampleMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" | "exact-rejection" => Ok(Self::ExactRejection),
            "free" | "free-shift" => Ok(Self::FreeShift),
            other => Err(format!("unknown sampling mode {other:?} (expected exact-rejection or free-shift)")),
        }
    }
}

impl fmt::Display for SampleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ExactRejection => "exact-rejection",
            Self::FreeShift => "free-shift",
        })
    }
}

fn increment<R: Rng + ?Sized>(rng: &mut R) -> i64 {
    rng.random_range(0..3i64) - 1
}

pub fn sample_well_labeled<R: Rng + ?Sized>(n: usize, mode: SampleMode, rng: &mut R) -> Result<WellLabeledTree, TreeError> {
    match mode {
        SampleMode::ExactRejection => loop {
            let tree = sample_plane_tree(n, rng)?;
            let mut labels = vec![1u32; tree.node_count()];
            let mut accepted = true;
            for v in 1..tree.node_count() {
                let l = labels[tree.parent[v] as usize] as i64 + increment(rng);
                if l < 1 {
                    accepted = false;
                    break;
                }
                labels[v] = l as u32;
            }
            if accepted {
                return Ok(WellLabeledTree { tree, labels });
            }
        },
        SampleMode::FreeShift => {
            let tree = sample_plane_tree(n, rng)?;
            let mut raw = vec![0i64; tree.node_count()];
            for v in 1..tree.node_count() {
                raw[v] = raw[tree.parent[v] as usize] + increment(rng);
            }
            let min = *raw.iter().min().unwrap();
            let labels = raw.into_iter().map(|l| (l - min + 1) as u32).collect();
            Ok(WellLabeledTree { tree, labels })
        }
    }
}

pub fn sample_well_labeled_seeded(n: usize, mode: SampleMode, seed: u64) -> Result<WellLabeledTree, TreeError> {
    sample_well_labeled(n, mode, &mut rng_from_seed(seed))
}

/// Contour (height) process `C` and label process `L` at integer times `0..=2n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContourPair {
    pub heights: Vec<u32>,
    pub labels: Vec<u32>,
}

impl ContourPair {
    pub fn n(&self) -> usize {
        (self.heights.len() - 1) / 2
    }

    /// Rows `i,C,L`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,C,L\n");
        for (i, (c, l)) in self.heights.iter().zip(&self.labels).enumerate() {
            out.push_str(&format!("{i},{c},{l}\n"));
        }
        out
    }
}

pub fn contour_processes(t: &WellLabeledTree) -> ContourPair {
    let mut heights = Vec::with_capacity(2 * t.n() + 1);
    let mut h = 0u32;
    heights.push(0);
    for &up in t.tree.steps() {
        if up {
            h += 1;
        } else {
            h -= 1;
        }
        heights.push(h);
    }
    let labels = t.tree.contour_vertices().iter().map(|&v| t.labels[v as usize]).collect();
    ContourPair { heights, labels }
}
