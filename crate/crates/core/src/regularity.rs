//! Short simple cycles of a quadrangulation and the two sides they cut out.
//!
//! Side diameters are ambient: distances are measured in the whole map, not
//! inside the side. Intrinsic diameters can only be larger.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::map::Quadrangulation;
use crate::metric::{bfs_distances_in, UNREACHED};

/// Largest cycle length accepted by the enumerator.
pub const MAX_CYCLE_LENGTH: usize = 14;
/// Cap on `n * 3^K`, a crude bound on the DFS work.
pub const CYCLE_BUDGET: u128 = 10_000_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegularityError {
    #[error("cycle search with n = {n}, K = {max_len} exceeds the work budget")]
    BudgetExceeded { n: usize, max_len: usize },
    #[error("cycle is not simple or not closed")]
    NotSimple,
    #[error("cycle cut the dual graph into {components} components")]
    SplitFailed { components: usize },
}

/// A simple closed walk: `half_edges[i]` goes from `vertices[i]` to `vertices[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cycle {
    pub vertices: Vec<u32>,
    pub half_edges: Vec<u32>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.half_edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.half_edges.is_empty()
    }
}

/// BFS confined to a ball, with a reusable buffer.
struct Ball {
    dist: Vec<u32>,
    touched: Vec<u32>,
}

impl Ball {
    fn new(size: usize) -> Self {
        Self { dist: vec![UNREACHED; size], touched: Vec::new() }
    }

    /// Distances from `centre` up to `radius`, walking only through vertices above `floor`.
    fn fill(&mut self, q: &Quadrangulation, centre: u32, radius: u32, floor: Option<u32>) {
        for &v in &self.touched {
            self.dist[v as usize] = UNREACHED;
        }
        self.touched.clear();
        let adj = q.map().adjacency();
        self.dist[centre as usize] = 0;
        self.touched.push(centre);
        let mut head = 0;
        while head < self.touched.len() {
            let v = self.touched[head];
            head += 1;
            let d = self.dist[v as usize];
            if d == radius {
                continue;
            }
            for &w in adj.neighbors(v) {
                if floor.is_none_or(|f| w > f) && self.dist[w as usize] == UNREACHED {
                    self.dist[w as usize] = d + 1;
                    self.touched.push(w);
                }
            }
        }
    }
}

fn check_budget(n: usize, max_len: usize) -> Result<(), RegularityError> {
    if max_len > MAX_CYCLE_LENGTH || (n as u128) * 3u128.pow(max_len as u32) > CYCLE_BUDGET {
        return Err(RegularityError::BudgetExceeded { n, max_len });
    }
    Ok(())
}

/// Every simple cycle of length at most `max_len`, once each.
///
/// A cycle is reported from its smallest vertex, in the direction whose first
/// edge has the smaller edge id. Output order is deterministic.
pub fn enumerate_simple_cycles(q: &Quadrangulation, max_len: usize) -> Result<Vec<Cycle>, RegularityError> {
    check_budget(q.n(), max_len)?;
    Ok(cycles_in_balls(q, max_len, u32::MAX))
}

/// Cycles of length at most `max_len` whose vertices all lie within `radius`
/// of the smallest one. Every cycle of diameter at most `radius` is included.
fn cycles_in_balls(q: &Quadrangulation, max_len: usize, radius: u32) -> Vec<Cycle> {
    let half = max_len as u32 / 2;
    let v_count = q.vertex_count();
    let per_start: Vec<Vec<Cycle>> = (0..v_count as u32)
        .into_par_iter()
        .map_init(
            || (Ball::new(v_count), Ball::new(v_count)),
            |(closing, ambient), s| {
                // Other cycle vertices exceed `s`, so the way back to `s` only uses those.
                closing.fill(q, s, half, Some(s));
                let ambient = (radius < half).then(|| {
                    ambient.fill(q, s, radius, None);
                    &*ambient
                });
                let mut out = Vec::new();
                let mut search = Search {
                    q,
                    closing,
                    ambient,
                    start: s,
                    max_len,
                    path_v: vec![s],
                    path_h: Vec::new(),
                    on_path: Vec::new(),
                    out: &mut out,
                };
                search.run(s);
                out
            },
        )
        .collect();
    per_start.into_iter().flatten().collect()
}

struct Search<'a> {
    q: &'a Quadrangulation,
    closing: &'a Ball,
    ambient: Option<&'a Ball>,
    start: u32,
    max_len: usize,
    path_v: Vec<u32>,
    path_h: Vec<u32>,
    on_path: Vec<u32>,
    out: &'a mut Vec<Cycle>,
}

impl Search<'_> {
    fn run(&mut self, v: u32) {
        let map = self.q.map();
        let depth = self.path_h.len();
        for &h in map.adjacency().half_edges(v) {
            let w = map.target(h);
            if w == self.start {
                if depth >= 1 && map.edge_of(self.path_h[0]) < map.edge_of(h) {
                    let mut half_edges = self.path_h.clone();
                    half_edges.push(h);
                    self.out.push(Cycle { vertices: self.path_v.clone(), half_edges });
                }
                continue;
            }
            let dw = self.closing.dist[w as usize];
            // After stepping to w, at least dw more edges are needed to close.
            if dw == UNREACHED
                || depth + 1 + dw as usize > self.max_len
                || self.ambient.is_some_and(|b| b.dist[w as usize] == UNREACHED)
                || self.on_path.contains(&w)
            {
                continue;
            }
            self.path_v.push(w);
            self.path_h.push(h);
            self.on_path.push(w);
            self.run(w);
            self.on_path.pop();
            self.path_h.pop();
            self.path_v.pop();
        }
    }
}

/// Half-edges of a valid simple cycle, in both directions.
fn cut_half_edges(q: &Quadrangulation, cycle: &Cycle) -> Result<Vec<u32>, RegularityError> {
    let map = q.map();
    let len = cycle.half_edges.len();
    if len < 2 || cycle.vertices.len() != len {
        return Err(RegularityError::NotSimple);
    }
    let mut cut = Vec::with_capacity(2 * len);
    for (i, &h) in cycle.half_edges.iter().enumerate() {
        if h as usize >= map.half_edge_count()
            || map.origin(h) != cycle.vertices[i]
            || map.target(h) != cycle.vertices[(i + 1) % len]
            || cycle.vertices[..i].contains(&cycle.vertices[i])
            || cut.contains(&h)
        {
            return Err(RegularityError::NotSimple);
        }
        cut.push(h);
        cut.push(map.opposite(h));
    }
    Ok(cut)
}

/// Faces on each side of a simple cycle. Side A holds the face of the root half-edge.
pub fn split_by_cycle(q: &Quadrangulation, cycle: &Cycle) -> Result<(Vec<u32>, Vec<u32>), RegularityError> {
    let map = q.map();
    let cut = cut_half_edges(q, cycle)?;
    let faces = map.faces();
    let mut component = vec![u32::MAX; faces.len()];
    let mut components = 0;
    let root_face = faces.face_of(map.root());
    let order = std::iter::once(root_face).chain(0..faces.len() as u32);
    let mut queue = VecDeque::new();
    for f in order {
        if component[f as usize] != u32::MAX {
            continue;
        }
        component[f as usize] = components;
        queue.push_back(f);
        while let Some(g) = queue.pop_front() {
            for &h in faces.cycle(g as usize) {
                if cut.contains(&h) {
                    continue;
                }
                let other = faces.face_of(map.opposite(h));
                if component[other as usize] == u32::MAX {
                    component[other as usize] = components;
                    queue.push_back(other);
                }
            }
        }
        components += 1;
    }
    if components != 2 {
        return Err(RegularityError::SplitFailed { components: components as usize });
    }
    let side = |c: u32| (0..faces.len() as u32).filter(|&f| component[f as usize] == c).collect::<Vec<_>>();
    Ok((side(0), side(1)))
}

/// A split stored through its smaller side; the other side is the complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Split {
    pub face_count: usize,
    pub a_is_small: bool,
    pub small: Vec<u32>,
}

impl Split {
    pub fn large(&self) -> Vec<u32> {
        let mut mark = vec![false; self.face_count];
        for &f in &self.small {
            mark[f as usize] = true;
        }
        (0..self.face_count as u32).filter(|&f| !mark[f as usize]).collect()
    }

    pub fn side_a(&self) -> Vec<u32> {
        if self.a_is_small {
            self.small.clone()
        } else {
            self.large()
        }
    }

    pub fn side_b(&self) -> Vec<u32> {
        if self.a_is_small {
            self.large()
        } else {
            self.small.clone()
        }
    }

    /// Face counts of sides A and B.
    pub fn sizes(&self) -> (usize, usize) {
        let (s, l) = (self.small.len(), self.face_count - self.small.len());
        if self.a_is_small {
            (s, l)
        } else {
            (l, s)
        }
    }
}

/// Same split as [`split_by_cycle`], found by growing both sides in lockstep
/// and keeping the first one to close. Costs time proportional to that side.
pub fn split_small(q: &Quadrangulation, cycle: &Cycle) -> Result<Split, RegularityError> {
    let map = q.map();
    let cut = cut_half_edges(q, cycle)?;
    let faces = map.faces();
    let h0 = cycle.half_edges[0];
    let seeds = [faces.face_of(h0), faces.face_of(map.opposite(h0))];
    if seeds[0] == seeds[1] {
        return Err(RegularityError::SplitFailed { components: 1 });
    }
    let mut tag = vec![0u8; faces.len()];
    let mut visited: [Vec<u32>; 2] = [vec![seeds[0]], vec![seeds[1]]];
    let mut heads = [0usize; 2];
    tag[seeds[0] as usize] = 1;
    tag[seeds[1] as usize] = 2;
    let closed = 'grow: loop {
        for side in 0..2 {
            if heads[side] == visited[side].len() {
                break 'grow side;
            }
            let g = visited[side][heads[side]];
            heads[side] += 1;
            for &h in faces.cycle(g as usize) {
                if cut.contains(&h) {
                    continue;
                }
                let other = faces.face_of(map.opposite(h));
                match tag[other as usize] {
                    0 => {
                        tag[other as usize] = side as u8 + 1;
                        visited[side].push(other);
                    }
                    t if t != side as u8 + 1 => return Err(RegularityError::SplitFailed { components: 1 }),
                    _ => {}
                }
            }
        }
    };
    let root_face = faces.face_of(map.root());
    let mut small = std::mem::take(&mut visited[closed]);
    small.sort_unstable();
    Ok(Split { face_count: faces.len(), a_is_small: tag[root_face as usize] == closed as u8 + 1, small })
}

fn side_vertices(q: &Quadrangulation, faces: &[u32]) -> Vec<u32> {
    let map = q.map();
    let mut mark = vec![false; q.vertex_count()];
    let mut out = Vec::new();
    for &f in faces {
        for &h in map.faces().cycle(f as usize) {
            let v = map.origin(h);
            if !mark[v as usize] {
                mark[v as usize] = true;
                out.push(v);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Largest ambient distance from `source` to a vertex of `set`, with the farthest vertex.
fn eccentricity_in(q: &Quadrangulation, source: u32, set: &[u32]) -> (u32, u32) {
    let dist = bfs_distances_in(q.map().adjacency(), source);
    set.iter().map(|&v| (dist[v as usize], v)).max().unwrap_or((0, source))
}

/// Exact ambient diameter of a small vertex set: BFS from each member, stopped
/// once every member is reached.
fn local_set_diameter(q: &Quadrangulation, set: &[u32]) -> u32 {
    let adj = q.map().adjacency();
    let mut member = vec![false; q.vertex_count()];
    for &v in set {
        member[v as usize] = true;
    }
    let mut ball = Ball::new(q.vertex_count());
    let mut best = 0;
    for &s in set {
        for &v in &ball.touched {
            ball.dist[v as usize] = UNREACHED;
        }
        ball.touched.clear();
        ball.dist[s as usize] = 0;
        ball.touched.push(s);
        let mut remaining = set.len() - 1;
        let mut head = 0;
        while remaining > 0 {
            let v = ball.touched[head];
            head += 1;
            let d = ball.dist[v as usize];
            for &w in adj.neighbors(v) {
                if ball.dist[w as usize] == UNREACHED {
                    ball.dist[w as usize] = d + 1;
                    ball.touched.push(w);
                    if member[w as usize] {
                        best = best.max(d + 1);
                        remaining -= 1;
                    }
                }
            }
        }
    }
    best
}

/// Exact ambient diameter of a vertex set.
///
/// Small sets use [`local_set_diameter`]. Larger ones sweep from a central vertex `u` and computes eccentricities level by level,
/// farthest first, stopping once the best pair beats twice the current level.
fn set_diameter(q: &Quadrangulation, set: &[u32]) -> u32 {
    if set.len() < 2 {
        return 0;
    }
    if set.len() <= 256 {
        return local_set_diameter(q, set);
    }
    let adj = q.map().adjacency();
    let far_in_set = |dist: &[u32]| set.iter().map(|&v| (dist[v as usize], v)).max().expect("set is not empty");
    let (_, a) = far_in_set(&bfs_distances_in(adj, set[0]));
    let da = bfs_distances_in(adj, a);
    let (mut best, b) = far_in_set(&da);
    let db = bfs_distances_in(adj, b);
    let u = (0..da.len()).min_by_key(|&v| da[v].max(db[v])).expect("map has vertices") as u32;
    let du = bfs_distances_in(adj, u);
    let mut order: Vec<u32> = set.to_vec();
    order.sort_unstable_by_key(|&v| std::cmp::Reverse(du[v as usize]));
    let mut idx = 0;
    while idx < order.len() {
        let level = du[order[idx] as usize];
        if best >= 2 * level {
            break;
        }
        let end = idx + order[idx..].iter().take_while(|&&v| du[v as usize] == level).count();
        let ecc = order[idx..end].par_iter().map(|&v| eccentricity_in(q, v, set).0).max().unwrap_or(0);
        best = best.max(ecc);
        idx = end;
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleReport {
    pub cycle: Cycle,
    pub cycle_diameter: u32,
    pub split: Split,
    /// Ambient diameter of the vertices of side A, or a lower bound when `diam_a_exact` is false.
    pub diam_a: u32,
    pub diam_b: u32,
    pub diam_a_exact: bool,
    pub diam_b_exact: bool,
    /// Exact `min(diam_a, diam_b)`.
    pub min_side_diameter: u32,
    pub bottleneck: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanSummary {
    pub n: usize,
    pub max_len: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub cycles_scanned: usize,
    pub bottlenecks: usize,
    pub max_min_side_diam: u32,
}

impl ScanSummary {
    pub const CSV_HEADER: &'static str = "n,seed,K,delta,epsilon,cycles_scanned,bottlenecks,max_min_side_diam";

    pub fn csv_row(&self, seed: u64) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n, seed, self.max_len, self.delta, self.epsilon, self.cycles_scanned, self.bottlenecks, self.max_min_side_diam
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BottleneckScan {
    pub reports: Vec<CycleReport>,
    pub summary: ScanSummary,
}

impl BottleneckScan {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scan serializes")
    }
}

/// Measures one cycle against the bottleneck threshold `min_side`.
///
/// The diameter of the side found by [`split_small`] is exact. The other side
/// gets a lower bound, exact only when the bound falls short of the first.
/// Either way `min_side_diameter` is exact.
pub fn measure_cycle(q: &Quadrangulation, cycle: Cycle, min_side: f64) -> Result<CycleReport, RegularityError> {
    let split = split_small(q, &cycle)?;
    let cycle_diameter = set_diameter(q, &cycle.vertices);
    let small = side_vertices(q, &split.small);
    let d_small = set_diameter(q, &small);
    let mut inside_small = vec![false; q.vertex_count()];
    for &v in &small {
        inside_small[v as usize] = true;
    }
    for &v in &cycle.vertices {
        inside_small[v as usize] = false;
    }
    // Cycle vertices lie on both sides; look for a far vertex of the other side.
    let mut ball = Ball::new(q.vertex_count());
    let adj = q.map().adjacency();
    let source = cycle.vertices[0];
    ball.dist[source as usize] = 0;
    ball.touched.push(source);
    let mut head = 0;
    let mut d_large = 0;
    while head < ball.touched.len() && d_large < d_small {
        let v = ball.touched[head];
        head += 1;
        let d = ball.dist[v as usize];
        if !inside_small[v as usize] {
            d_large = d_large.max(d);
        }
        for &w in adj.neighbors(v) {
            if ball.dist[w as usize] == UNREACHED {
                ball.dist[w as usize] = d + 1;
                ball.touched.push(w);
            }
        }
    }
    let mut large_exact = false;
    if d_large < d_small {
        d_large = set_diameter(q, &side_vertices(q, &split.large()));
        large_exact = true;
    }
    let min_side_diameter = d_small.min(d_large);
    let (diam_a, diam_b, diam_a_exact, diam_b_exact) =
        if split.a_is_small { (d_small, d_large, true, large_exact) } else { (d_large, d_small, large_exact, true) };
    Ok(CycleReport {
        cycle,
        cycle_diameter,
        split,
        diam_a,
        diam_b,
        diam_a_exact,
        diam_b_exact,
        min_side_diameter,
        bottleneck: min_side_diameter as f64 >= min_side,
    })
}

/// Scans every simple cycle of length at most `max_len` and diameter at most
/// `delta * n^(1/4)`, flagging those whose sides both have diameter at least
/// `epsilon * n^(1/4)`.
pub fn bottleneck_scan(q: &Quadrangulation, delta: f64, epsilon: f64, max_len: usize) -> Result<BottleneckScan, RegularityError> {
    check_budget(q.n(), max_len)?;
    let scale = (q.n() as f64).powf(0.25);
    let max_diam = delta * scale;
    let min_side = epsilon * scale;
    let mut reports = Vec::new();
    if max_diam >= 1.0 {
        for cycle in cycles_in_balls(q, max_len, max_diam.floor() as u32) {
            if set_diameter(q, &cycle.vertices) as f64 <= max_diam {
                reports.push(measure_cycle(q, cycle, min_side)?);
            }
        }
    }
    let summary = ScanSummary {
        n: q.n(),
        max_len,
        delta,
        epsilon,
        cycles_scanned: reports.len(),
        bottlenecks: reports.iter().filter(|r| r.bottleneck).count(),
        max_min_side_diam: reports.iter().map(|r| r.min_side_diameter).max().unwrap_or(0),
    };
    Ok(BottleneckScan { reports, summary })
}

/// Two copies of quadrangulations glued along one edge each, joined by a 2-cycle neck.
pub fn dumbbell(a: &Quadrangulation, b: &Quadrangulation) -> Quadrangulation {
    let glued = a.map().glue_along_edges(a.map().root(), b.map(), b.map().root()).expect("gluing two valid maps");
    Quadrangulation::from_map(glued).expect("glued quadrangulations stay quadrangulations")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schaeffer::forward;
    use crate::trees::{enumerate_well_labeled, sample_well_labeled_seeded, SampleMode};

    fn all(n: usize) -> Vec<Quadrangulation> {
        enumerate_well_labeled(n).unwrap().map(|t| forward(&t).unwrap()).collect()
    }

    /// Cycles as sets of edges, by subset search over all edge subsets.
    fn brute_force_cycles(q: &Quadrangulation, max_len: usize) -> usize {
        let map = q.map();
        let edges: Vec<u32> = (0..map.half_edge_count() as u32).filter(|&h| map.edge_of(h) == h).collect();
        let mut count = 0;
        for mask in 1u32..(1 << edges.len()) {
            let chosen: Vec<u32> = (0..edges.len()).filter(|&i| mask >> i & 1 == 1).map(|i| edges[i]).collect();
            if chosen.len() < 2 || chosen.len() > max_len {
                continue;
            }
            let mut degree = std::collections::HashMap::new();
            for &h in &chosen {
                *degree.entry(map.origin(h)).or_insert(0) += 1;
                *degree.entry(map.target(h)).or_insert(0) += 1;
            }
            if degree.values().any(|&d| d != 2) || degree.len() != chosen.len() {
                continue;
            }
            // Connected: walk from one edge.
            let mut visited = vec![chosen[0]];
            let mut v = map.target(chosen[0]);
            while visited.len() < chosen.len() {
                let next = chosen.iter().find(|&&h| !visited.contains(&h) && (map.origin(h) == v || map.target(h) == v));
                match next {
                    Some(&h) => {
                        v = if map.origin(h) == v { map.target(h) } else { map.origin(h) };
                        visited.push(h);
                    }
                    None => break,
                }
            }
            if visited.len() == chosen.len() {
                count += 1;
            }
        }
        count
    }

    fn brute_diameter(q: &Quadrangulation, set: &[u32]) -> u32 {
        set.iter()
            .map(|&v| {
                let d = bfs_distances_in(q.map().adjacency(), v);
                set.iter().map(|&w| d[w as usize]).max().unwrap()
            })
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn set_diameter_matches_brute_force() {
        let q = forward(&sample_well_labeled_seeded(400, SampleMode::FreeShift, 21).unwrap()).unwrap();
        let all: Vec<u32> = (0..q.vertex_count() as u32).collect();
        for len in [2, 5, 40, 300, all.len()] {
            for offset in [0, 17, 101] {
                let set: Vec<u32> = all.iter().copied().cycle().skip(offset).step_by(1).take(len).collect();
                assert_eq!(set_diameter(&q, &set), brute_diameter(&q, &set));
            }
        }
    }

    #[test]
    fn n1_cycles_match_brute_force() {
        let qs = all(1);
        let counts: Vec<usize> = qs.iter().map(|q| enumerate_simple_cycles(q, 4).unwrap().len()).collect();
        let brute: Vec<usize> = qs.iter().map(|q| brute_force_cycles(q, 4)).collect();
        assert_eq!(counts, brute);
        // Three vertices and two edges: both maps are paths.
        assert_eq!(counts, vec![0, 0]);
    }

    #[test]
    fn complete_for_small_n() {
        for n in 1..=4 {
            for q in all(n) {
                let cycles = enumerate_simple_cycles(&q, 2 * n).unwrap();
                assert_eq!(cycles.len(), brute_force_cycles(&q, 2 * n));
                for c in &cycles {
                    assert_eq!(c.len() % 2, 0);
                    let mut vs = c.vertices.clone();
                    vs.sort_unstable();
                    vs.dedup();
                    assert_eq!(vs.len(), c.len());
                    let (a, b) = split_by_cycle(&q, c).unwrap();
                    assert_eq!(a.len() + b.len(), n);
                    let fast = split_small(&q, c).unwrap();
                    assert_eq!((fast.side_a(), fast.side_b()), (a.clone(), b.clone()));
                    assert!(a.contains(&q.map().faces().face_of(q.map().root())));
                }
            }
        }
    }

    #[test]
    fn n2_two_cycles_split_both_faces() {
        let mut seen = 0;
        for q in all(2) {
            for c in enumerate_simple_cycles(&q, 2).unwrap() {
                let (a, b) = split_by_cycle(&q, &c).unwrap();
                assert_eq!(a.len() + b.len(), 2);
                seen += 1;
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn more_length_never_fewer_cycles() {
        let q = forward(&sample_well_labeled_seeded(60, SampleMode::ExactRejection, 4).unwrap()).unwrap();
        let mut last = 0;
        for k in [2, 4, 6, 8] {
            let c = enumerate_simple_cycles(&q, k).unwrap().len();
            assert!(c >= last);
            last = c;
        }
    }

    #[test]
    fn guards() {
        let q = &all(1)[0];
        assert!(matches!(enumerate_simple_cycles(q, 15), Err(RegularityError::BudgetExceeded { .. })));
        let bad = Cycle { vertices: vec![0, 1], half_edges: vec![0, 0] };
        assert_eq!(split_by_cycle(q, &bad), Err(RegularityError::NotSimple));
    }

    #[test]
    fn tiny_delta_scans_nothing() {
        let q = forward(&sample_well_labeled_seeded(100, SampleMode::ExactRejection, 9).unwrap()).unwrap();
        let scan = bottleneck_scan(&q, 0.3, 0.5, 8).unwrap();
        assert_eq!(scan.summary.cycles_scanned, 0);
        assert_eq!(scan.summary.bottlenecks, 0);
    }

    #[test]
    fn scan_reports_are_consistent() {
        let q = forward(&sample_well_labeled_seeded(300, SampleMode::FreeShift, 1).unwrap()).unwrap();
        let scan = bottleneck_scan(&q, 0.5, 0.2, 8).unwrap();
        let adj = q.map().adjacency();
        for r in &scan.reports {
            assert!(r.cycle_diameter as f64 <= 0.5 * 300f64.powf(0.25));
            let (a, b) = (r.split.side_a(), r.split.side_b());
            assert_eq!((a.clone(), b.clone()), split_by_cycle(&q, &r.cycle).unwrap());
            assert_eq!(r.split.sizes(), (a.len(), b.len()));
            let exact = |faces: &[u32]| brute_diameter(&q, &side_vertices(&q, faces));
            let (da, db) = (exact(&a), exact(&b));
            assert_eq!(r.min_side_diameter, da.min(db));
            assert!(r.diam_a <= da && r.diam_b <= db);
            assert!(!r.diam_a_exact || r.diam_a == da);
            assert!(!r.diam_b_exact || r.diam_b == db);
            // Cycle vertices belong to both sides.
            let from_cycle = bfs_distances_in(adj, r.cycle.vertices[0]);
            let far = side_vertices(&q, &r.split.small).iter().map(|&v| from_cycle[v as usize]).max().unwrap();
            let d_small = if r.split.a_is_small { r.diam_a } else { r.diam_b };
            assert!(far <= d_small);
        }
    }

    #[test]
    fn dumbbell_has_a_bottleneck() {
        let a = forward(&sample_well_labeled_seeded(2000, SampleMode::FreeShift, 11).unwrap()).unwrap();
        let b = forward(&sample_well_labeled_seeded(2000, SampleMode::FreeShift, 12).unwrap()).unwrap();
        let q = dumbbell(&a, &b);
        assert_eq!(q.n(), 4000);
        let scan = bottleneck_scan(&q, 0.2, 0.5, 4).unwrap();
        assert!(scan.summary.bottlenecks >= 1);
    }
}
