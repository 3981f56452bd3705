//! Graph metric of a quadrangulation: BFS distances, radius and profile,
//! diameter, and the contour bound on distances between tree corners.

use std::collections::VecDeque;

use rayon::prelude::*;
use thiserror::Error;

use crate::map::{Adjacency, Quadrangulation};
use crate::schaeffer::contour_vertex;
use crate::trees::ContourPair;

/// Largest vertex count for exact all-pairs work.
pub const EXACT_DIAMETER_LIMIT: usize = 20_000;

pub const UNREACHED: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("{size} points exceed the exact limit {limit}")]
    SizeTooLarge { size: usize, limit: usize },
    #[error("contour indices ({i}, {j}) invalid for 2n = {two_n}; need i < j <= 2n")]
    IndexOutOfRange { i: usize, j: usize, two_n: usize },
    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),
    #[error("malformed distance matrix text: {0}")]
    Malformed(String),
}

/// Single-source BFS distances; unreachable vertices get [`UNREACHED`].
pub fn bfs_distances_in(adj: &Adjacency, source: u32) -> Vec<u32> {
    let mut dist = vec![UNREACHED; adj.vertex_count()];
    let mut queue = VecDeque::with_capacity(adj.vertex_count());
    dist[source as usize] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize] + 1;
        for &w in adj.neighbors(v) {
            if dist[w as usize] == UNREACHED {
                dist[w as usize] = d;
                queue.push_back(w);
            }
        }
    }
    dist
}

pub fn bfs_distances(q: &Quadrangulation, v: u32) -> Vec<u32> {
    bfs_distances_in(q.map().adjacency(), v)
}

#[derive(Debug, Clone)]
enum Backing {
    Matrix(Vec<f64>),
    Graph(Adjacency),
}

/// A finite metric space, either stored as a full matrix or backed by a
/// graph and evaluated by BFS on demand. Distances are multiplied by `scale`.
#[derive(Debug, Clone)]
pub struct FiniteMetricSpace {
    size: usize,
    backing: Backing,
    scale: f64,
}

impl FiniteMetricSpace {
    /// Row-major `size x size` matrix; must be symmetric, nonnegative, zero on the diagonal.
    pub fn from_matrix(size: usize, dist: Vec<f64>) -> Result<Self, MetricError> {
        if dist.len() != size * size {
            return Err(MetricError::InvalidMatrix(format!("{} entries for size {size}", dist.len())));
        }
        for i in 0..size {
            if dist[i * size + i] != 0.0 {
                return Err(MetricError::InvalidMatrix(format!("d({i},{i}) != 0")));
            }
            for j in 0..i {
                let (a, b) = (dist[i * size + j], dist[j * size + i]);
                if !(a >= 0.0 && a.is_finite()) || a != b {
                    return Err(MetricError::InvalidMatrix(format!("d({i},{j}) = {a}, d({j},{i}) = {b}")));
                }
            }
        }
        Ok(Self { size, backing: Backing::Matrix(dist), scale: 1.0 })
    }

    /// Builds a matrix-backed space from a distance function.
    pub fn from_fn(size: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self, MetricError> {
        let mut dist = vec![0.0; size * size];
        for i in 0..size {
            for j in 0..size {
                dist[i * size + j] = if i == j { 0.0 } else { f(i.min(j), i.max(j)) };
            }
        }
        Self::from_matrix(size, dist)
    }

    /// Vertices of `q` with the graph distance, BFS-backed.
    pub fn from_quadrangulation(q: &Quadrangulation) -> Self {
        Self { size: q.vertex_count(), backing: Backing::Graph(q.map().adjacency().clone()), scale: 1.0 }
    }

    /// Vertices of `q` with the graph distance stored as a matrix.
    pub fn matrix_from_quadrangulation(q: &Quadrangulation) -> Result<Self, MetricError> {
        let size = q.vertex_count();
        if size > EXACT_DIAMETER_LIMIT {
            return Err(MetricError::SizeTooLarge { size, limit: EXACT_DIAMETER_LIMIT });
        }
        let adj = q.map().adjacency();
        let rows: Vec<Vec<u32>> = (0..size as u32).into_par_iter().map(|v| bfs_distances_in(adj, v)).collect();
        let dist = rows.into_iter().flatten().map(f64::from).collect();
        Ok(Self { size, backing: Backing::Matrix(dist), scale: 1.0 })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_matrix(&self) -> bool {
        matches!(self.backing, Backing::Matrix(_))
    }

    /// The same points with every distance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { scale: self.scale * factor, ..self.clone() }
    }

    pub fn dist(&self, x: usize, y: usize) -> f64 {
        match &self.backing {
            Backing::Matrix(m) => m[x * self.size + y] * self.scale,
            Backing::Graph(adj) => f64::from(bfs_distances_in(adj, x as u32)[y]) * self.scale,
        }
    }

    /// Distances from `x` to every point.
    pub fn row(&self, x: usize) -> Vec<f64> {
        match &self.backing {
            Backing::Matrix(m) => m[x * self.size..(x + 1) * self.size].iter().map(|d| d * self.scale).collect(),
            Backing::Graph(adj) => bfs_distances_in(adj, x as u32).into_iter().map(|d| f64::from(d) * self.scale).collect(),
        }
    }

    pub fn to_matrix(&self) -> Self {
        let dist = (0..self.size).flat_map(|x| self.row(x)).collect();
        Self { size: self.size, backing: Backing::Matrix(dist), scale: 1.0 }
    }

    pub fn diameter(&self) -> f64 {
        (0..self.size).map(|x| self.row(x).into_iter().fold(0.0, f64::max)).fold(0.0, f64::max)
    }

    /// Number of sampled triples `(x, y, z)` violating `d(x,z) <= d(x,y) + d(y,z)`.
    pub fn triangle_violations(&self, triples: impl IntoIterator<Item = (usize, usize, usize)>) -> usize {
        triples
            .into_iter()
            .filter(|&(x, y, z)| self.dist(x, z) > self.dist(x, y) + self.dist(y, z) + 1e-12)
            .count()
    }

    /// Text format: the point count, then row `i` lists `d(i, 0) .. d(i, i-1)`.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.size);
        for i in 1..self.size {
            let row = self.row(i);
            let cells: Vec<String> = row[..i].iter().map(|d| format!("{d}")).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, MetricError> {
        let mut tokens = text
            .lines()
            .filter(|l| !l.trim_start().starts_with('#'))
            .flat_map(str::split_whitespace);
        let size: usize = tokens
            .next()
            .ok_or_else(|| MetricError::Malformed("empty input".into()))?
            .parse()
            .map_err(|e| MetricError::Malformed(format!("point count: {e}")))?;
        if size == 0 {
            return Err(MetricError::Malformed("a metric space needs at least one point".into()));
        }
        let mut dist = vec![0.0; size * size];
        for i in 1..size {
            for j in 0..i {
                let tok = tokens
                    .next()
                    .ok_or_else(|| MetricError::Malformed(format!("missing entry d({i},{j})")))?;
                let d: f64 = tok.parse().map_err(|e| MetricError::Malformed(format!("d({i},{j}) = {tok:?}: {e}")))?;
                dist[i * size + j] = d;
                dist[j * size + i] = d;
            }
        }
        if tokens.next().is_some() {
            return Err(MetricError::Malformed("trailing entries".into()));
        }
        Self::from_matrix(size, dist)
    }
}

/// Distance to the pointed vertex: maximum and histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusProfile {
    pub radius: u32,
    pub profile: Vec<u64>,
}

impl RadiusProfile {
    /// Rows `distance,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("distance,count\n");
        for (d, c) in self.profile.iter().enumerate() {
            out.push_str(&format!("{d},{c}\n"));
        }
        out
    }
}

pub fn radius_and_profile(q: &Quadrangulation) -> RadiusProfile {
    profile_of(&bfs_distances(q, q.pointed_vertex()))
}

pub(crate) fn profile_of(dist: &[u32]) -> RadiusProfile {
    let radius = dist.iter().copied().max().unwrap_or(0);
    let mut profile = vec![0u64; radius as usize + 1];
    for &d in dist {
        profile[d as usize] += 1;
    }
    RadiusProfile { radius, profile }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiameterMode {
    /// All-pairs BFS.
    Exact,
    /// Two BFS sweeps from the pointed vertex; a lower bound realized by a pair.
    DoubleSweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiameterEstimate {
    pub value: u32,
    pub endpoints: (u32, u32),
    pub exact: bool,
}

fn farthest(dist: &[u32]) -> (u32, u32) {
    let mut best = (0u32, 0u32);
    for (v, &d) in dist.iter().enumerate() {
        if d != UNREACHED && d > best.1 {
            best = (v as u32, d);
        }
    }
    best
}

pub fn diameter(q: &Quadrangulation, mode: DiameterMode) -> Result<DiameterEstimate, MetricError> {
    let adj = q.map().adjacency();
    match mode {
        DiameterMode::DoubleSweep => {
            let (u, _) = farthest(&bfs_distances_in(adj, q.pointed_vertex()));
            let (w, d) = farthest(&bfs_distances_in(adj, u));
            Ok(DiameterEstimate { value: d, endpoints: (u, w), exact: false })
        }
        DiameterMode::Exact => {
            let size = q.vertex_count();
            if size > EXACT_DIAMETER_LIMIT {
                return Err(MetricError::SizeTooLarge { size, limit: EXACT_DIAMETER_LIMIT });
            }
            let (value, endpoints) = (0..size as u32)
                .into_par_iter()
                .map(|v| {
                    let (w, d) = farthest(&bfs_distances_in(adj, v));
                    (d, (v, w))
                })
                .reduce(|| (0, (0, 0)), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
            Ok(DiameterEstimate { value, endpoints, exact: true })
        }
    }
}

/// Sparse table for range minima over a label sequence.
#[derive(Debug, Clone)]
pub struct RangeMin {
    levels: Vec<Vec<u32>>,
}

impl RangeMin {
    pub fn new(values: &[u32]) -> Self {
        let mut levels = vec![values.to_vec()];
        let mut width = 1;
        while 2 * width <= values.len() {
            let prev = levels.last().unwrap();
            let next = (0..=values.len() - 2 * width).map(|i| prev[i].min(prev[i + width])).collect();
            levels.push(next);
            width *= 2;
        }
        Self { levels }
    }

    /// Minimum over the inclusive range `lo..=hi`.
    pub fn min(&self, lo: usize, hi: usize) -> u32 {
        let k = (usize::BITS - 1 - (hi - lo + 1).leading_zeros()) as usize;
        self.levels[k][lo].min(self.levels[k][hi + 1 - (1 << k)])
    }
}

/// One evaluation of `d(x(i), x(j)) <= L_i + L_j - 2 min_{i<=k<=j} L_k + 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundCheck {
    pub i: usize,
    pub j: usize,
    pub lhs: u32,
    pub rhs: u32,
    pub holds: bool,
}

/// Evaluates the contour bound on a tree and its image `q = forward(tree)`.
pub struct ContourBoundChecker<'a> {
    pair: &'a ContourPair,
    q: &'a Quadrangulation,
    range_min: RangeMin,
}

impl<'a> ContourBoundChecker<'a> {
    pub fn new(pair: &'a ContourPair, q: &'a Quadrangulation) -> Self {
        Self { pair, q, range_min: RangeMin::new(&pair.labels) }
    }

    fn validate(&self, i: usize, j: usize) -> Result<(), MetricError> {
        let two_n = self.pair.labels.len() - 1;
        if i >= j || j > two_n {
            return Err(MetricError::IndexOutOfRange { i, j, two_n });
        }
        Ok(())
    }

    pub fn rhs(&self, i: usize, j: usize) -> u32 {
        let l = &self.pair.labels;
        l[i] + l[j] - 2 * self.range_min.min(i, j) + 2
    }

    pub fn check(&self, i: usize, j: usize) -> Result<BoundCheck, MetricError> {
        Ok(self.check_from(i, &[j])?.remove(0))
    }

    /// All checks `(i, j)` for `j` in `js`, sharing one BFS from `x(i)`.
    pub fn check_from(&self, i: usize, js: &[usize]) -> Result<Vec<BoundCheck>, MetricError> {
        for &j in js {
            self.validate(i, j)?;
        }
        let dist = bfs_distances(self.q, contour_vertex(self.q, i));
        Ok(js
            .iter()
            .map(|&j| {
                let lhs = dist[contour_vertex(self.q, j) as usize];
                let rhs = self.rhs(i, j);
                BoundCheck { i, j, lhs, rhs, holds: lhs <= rhs }
            })
            .collect())
    }
}

pub fn check_contour_bound(pair: &ContourPair, q: &Quadrangulation, i: usize, j: usize) -> Result<BoundCheck, MetricError> {
    ContourBoundChecker::new(pair, q).check(i, j)
}

/// Rows `i,j,lhs,rhs`.
pub fn bound_checks_csv(checks: &[BoundCheck]) -> String {
    let mut out = String::from("i,j,lhs,rhs\n");
    for c in checks {
        out.push_str(&format!("{},{},{},{}\n", c.i, c.j, c.lhs, c.rhs));
    }
    out
}
