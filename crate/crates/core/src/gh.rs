//! Gromov-Hausdorff distance between finite metric spaces, through
//! correspondences: `d_GH(A, B) = 1/2 inf_R dis(R)`.

use thiserror::Error;

use crate::metric::FiniteMetricSpace;

/// Largest space handled by [`gh_exact_small`].
pub const MAX_EXACT_POINTS: usize = 7;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GhError {
    #[error("relation does not cover {side} point {point}")]
    NotCovering { side: &'static str, point: usize },
    #[error("pair ({0}, {1}) out of range")]
    OutOfRange(usize, usize),
    #[error("spaces of sizes {a} and {b} exceed the exact limit {max}")]
    SizeTooLarge { a: usize, b: usize, max: usize },
}

/// A relation between the points of two spaces that covers both.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Correspondence {
    pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn new(pairs: Vec<(usize, usize)>, a_size: usize, b_size: usize) -> Result<Self, GhError> {
        let mut seen_a = vec![false; a_size];
        let mut seen_b = vec![false; b_size];
        for &(a, b) in &pairs {
            if a >= a_size || b >= b_size {
                return Err(GhError::OutOfRange(a, b));
            }
            seen_a[a] = true;
            seen_b[b] = true;
        }
        if let Some(point) = seen_a.iter().position(|&s| !s) {
            return Err(GhError::NotCovering { side: "A", point });
        }
        if let Some(point) = seen_b.iter().position(|&s| !s) {
            return Err(GhError::NotCovering { side: "B", point });
        }
        Ok(Self { pairs })
    }

    /// The identity relation on a space of `size` points.
    pub fn identity(size: usize) -> Self {
        Self { pairs: (0..size).map(|i| (i, i)).collect() }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// `sup |d_A(a, a') - d_B(b, b')|` over pairs of related points.
pub fn distortion(r: &Correspondence, a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> Result<f64, GhError> {
    // Re-validate against these particular spaces.
    let r = Correspondence::new(r.pairs.clone(), a.size(), b.size())?;
    let rows_a: Vec<Vec<f64>> = (0..a.size()).map(|x| a.row(x)).collect();
    let rows_b: Vec<Vec<f64>> = (0..b.size()).map(|y| b.row(y)).collect();
    let mut worst = 0.0f64;
    for &(x, y) in &r.pairs {
        for &(x2, y2) in &r.pairs {
            worst = worst.max((rows_a[x][x2] - rows_b[y][y2]).abs());
        }
    }
    Ok(worst)
}

struct ExactSearch {
    a: usize,
    b: usize,
    /// For pair `p = x * b + y`, the set of pairs compatible with it.
    compatible: Vec<u64>,
}

impl ExactSearch {
    fn new(da: &[Vec<f64>], db: &[Vec<f64>], tau: f64) -> Self {
        let (a, b) = (da.len(), db.len());
        let mut compatible = vec![0u64; a * b];
        for x in 0..a {
            for y in 0..b {
                let mut mask = 0u64;
                for (x2, &d) in da[x].iter().enumerate() {
                    for (y2, &e) in db[y].iter().enumerate() {
                        if (d - e).abs() <= tau {
                            mask |= 1 << (x2 * b + y2);
                        }
                    }
                }
                compatible[x * b + y] = mask;
            }
        }
        Self { a, b, compatible }
    }

    /// Picks a partner for every point of A, then for every uncovered point of B.
    fn feasible(&self, x: usize, allowed: u64, covered_b: u64) -> bool {
        if x < self.a {
            for y in 0..self.b {
                let p = x * self.b + y;
                if allowed & (1 << p) != 0
                    && self.feasible(x + 1, allowed & self.compatible[p], covered_b | (1 << y))
                {
                    return true;
                }
            }
            return false;
        }
        let Some(y) = (0..self.b).find(|&y| covered_b & (1 << y) == 0) else {
            return true;
        };
        (0..self.a).any(|x2| {
            let p = x2 * self.b + y;
            allowed & (1 << p) != 0 && self.feasible(self.a, allowed & self.compatible[p], covered_b | (1 << y))
        })
    }
}

/// Exact `d_GH` for spaces of at most [`MAX_EXACT_POINTS`] points.
///
/// The optimal distortion is one of the values `|d_A(a,a') - d_B(b,b')|`;
/// the smallest feasible one is found by bisection, each step a
/// backtracking search over correspondences with pairwise compatibility masks.
pub fn gh_exact_small(a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> Result<f64, GhError> {
    if a.size() > MAX_EXACT_POINTS || b.size() > MAX_EXACT_POINTS {
        return Err(GhError::SizeTooLarge { a: a.size(), b: b.size(), max: MAX_EXACT_POINTS });
    }
    let da: Vec<Vec<f64>> = (0..a.size()).map(|x| a.row(x)).collect();
    let db: Vec<Vec<f64>> = (0..b.size()).map(|y| b.row(y)).collect();
    let mut candidates = vec![0.0f64];
    for rx in &da {
        for ry in &db {
            for &u in rx {
                for &v in ry {
                    candidates.push((u - v).abs());
                }
            }
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let full = if a.size() * b.size() == 64 { u64::MAX } else { (1u64 << (a.size() * b.size())) - 1 };
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if ExactSearch::new(&da, &db, candidates[mid]).feasible(0, full, 0) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(candidates[lo] / 2.0)
}

fn hausdorff_1d(s: &[f64], t: &[f64]) -> f64 {
    let one_way = |s: &[f64], t: &[f64]| {
        s.iter()
            .map(|&x| {
                let i = t.partition_point(|&y| y < x);
                let mut best = f64::INFINITY;
                if i < t.len() {
                    best = best.min(t[i] - x);
                }
                if i > 0 {
                    best = best.min(x - t[i - 1]);
                }
                best
            })
            .fold(0.0, f64::max)
    };
    one_way(s, t).max(one_way(t, s))
}

/// Lower bound on `d_GH`, valid for every pair of finite spaces.
///
/// The maximum of half the diameter gap and half the first-order bound
/// `max_a min_b H(D_a, D_b)` (symmetrized), where `D_a` is the set of
/// distances from `a` and `H` the Hausdorff distance between subsets of the
/// line: a related pair `(a, b)` forces every distance from `a` to be matched
/// within `dis(R)` by a distance from `b`.
pub fn gh_lower_bounds(a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> f64 {
    let sorted_rows = |s: &FiniteMetricSpace| -> Vec<Vec<f64>> {
        (0..s.size())
            .map(|x| {
                let mut r = s.row(x);
                r.sort_by(f64::total_cmp);
                r
            })
            .collect()
    };
    let ra = sorted_rows(a);
    let rb = sorted_rows(b);
    let diam = |rows: &[Vec<f64>]| rows.iter().map(|r| *r.last().unwrap()).fold(0.0, f64::max);
    let diameter_gap = (diam(&ra) - diam(&rb)).abs() / 2.0;
    let side = |p: &[Vec<f64>], q: &[Vec<f64>]| {
        p.iter()
            .map(|x| q.iter().map(|y| hausdorff_1d(x, y)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    let local = side(&ra, &rb).max(side(&rb, &ra)) / 2.0;
    diameter_gap.max(local)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use rand::Rng;

    fn space(size: usize, entries: &[f64]) -> FiniteMetricSpace {
        let mut it = entries.iter();
        let mut m = vec![0.0; size * size];
        for i in 1..size {
            for j in 0..i {
                let d = *it.next().unwrap();
                m[i * size + j] = d;
                m[j * size + i] = d;
            }
        }
        FiniteMetricSpace::from_matrix(size, m).unwrap()
    }

    /// Minimum distortion over every covering relation, by enumerating subsets of A x B.
    fn brute_force_gh(a: &FiniteMetricSpace, b: &FiniteMetricSpace) -> f64 {
        let cells: Vec<(usize, usize)> = (0..a.size()).flat_map(|x| (0..b.size()).map(move |y| (x, y))).collect();
        let mut best = f64::INFINITY;
        for mask in 1u64..(1 << cells.len()) {
            let pairs: Vec<_> = cells.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, &p)| p).collect();
            if let Ok(r) = Correspondence::new(pairs, a.size(), b.size()) {
                best = best.min(distortion(&r, a, b).unwrap());
            }
        }
        best / 2.0
    }

    fn random_space(rng: &mut impl Rng, size: usize) -> FiniteMetricSpace {
        // Shortest paths of random positive weights give a genuine metric.
        let mut m = vec![f64::INFINITY; size * size];
        for i in 0..size {
            m[i * size + i] = 0.0;
            for j in 0..i {
                let w = rng.random_range(1..=6) as f64;
                m[i * size + j] = w;
                m[j * size + i] = w;
            }
        }
        for k in 0..size {
            for i in 0..size {
                for j in 0..size {
                    let via = m[i * size + k] + m[k * size + j];
                    if via < m[i * size + j] {
                        m[i * size + j] = via;
                    }
                }
            }
        }
        FiniteMetricSpace::from_matrix(size, m).unwrap()
    }

    #[test]
    fn identity_has_zero_distortion() {
        let a = space(3, &[1.0, 2.0, 1.5]);
        assert_eq!(distortion(&Correspondence::identity(3), &a, &a).unwrap(), 0.0);
        assert_eq!(gh_exact_small(&a, &a).unwrap(), 0.0);
        assert_eq!(gh_lower_bounds(&a, &a), 0.0);
    }

    #[test]
    fn two_point_spaces() {
        for (p, q) in [(1.0, 3.0), (2.5, 0.5), (4.0, 4.0)] {
            let a = space(2, &[p]);
            let b = space(2, &[q]);
            let full = Correspondence::new(vec![(0, 0), (0, 1), (1, 0), (1, 1)], 2, 2).unwrap();
            assert_eq!(distortion(&full, &a, &b).unwrap(), f64::max(p, q));
            let bij = Correspondence::new(vec![(0, 0), (1, 1)], 2, 2).unwrap();
            assert_eq!(distortion(&bij, &a, &b).unwrap(), (p - q).abs());
            assert_eq!(gh_exact_small(&a, &b).unwrap(), (p - q).abs() / 2.0);
            assert_eq!(brute_force_gh(&a, &b), (p - q).abs() / 2.0);
        }
    }

    #[test]
    fn point_versus_space() {
        let point = space(1, &[]);
        let b = space(3, &[2.0, 5.0, 3.0]);
        assert_eq!(gh_exact_small(&point, &b).unwrap(), 2.5);
        assert_eq!(brute_force_gh(&point, &b), 2.5);
    }

    #[test]
    fn exact_matches_brute_force() {
        let mut rng = rng_from_seed(4);
        for _ in 0..60 {
            let (sa, sb) = (rng.random_range(1..=3), rng.random_range(1..=4));
            let a = random_space(&mut rng, sa);
            let b = random_space(&mut rng, sb);
            assert_eq!(gh_exact_small(&a, &b).unwrap(), brute_force_gh(&a, &b));
        }
    }

    #[test]
    fn lower_bound_below_exact() {
        let mut rng = rng_from_seed(8);
        for _ in 0..200 {
            let a = random_space(&mut rng, 6);
            let b = random_space(&mut rng, 6);
            assert!(gh_lower_bounds(&a, &b) <= gh_exact_small(&a, &b).unwrap() + 1e-12);
        }
    }

    #[test]
    fn diameter_gap_bound() {
        let a = space(2, &[10.0]);
        let b = space(2, &[4.0]);
        assert!(gh_lower_bounds(&a, &b) >= 3.0);
    }

    #[test]
    fn errors() {
        assert_eq!(Correspondence::new(vec![(0, 0)], 2, 1), Err(GhError::NotCovering { side: "A", point: 1 }));
        let big = random_space(&mut rng_from_seed(1), 8);
        assert!(matches!(gh_exact_small(&big, &big), Err(GhError::SizeTooLarge { .. })));
    }
}
