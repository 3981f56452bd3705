//! Polyhedral surface of a quadrangulation: every face becomes a copy of the
//! unit cube with its bottom removed, and the bottom boundaries are glued
//! along the map edges.
//!
//! Each of the five squares of a chart is gridded at spacing `1/m`, with axis
//! and diagonal mesh edges weighted by their Euclidean length. Every mesh edge
//! is a straight segment inside one square, so mesh path lengths are lengths of
//! genuine surface paths and mesh distances bound surface distances from above.
//!
//! The boundary of the chart of face `f` with half-edges `(e1, e2, e3, e4)` in
//! traversal order is parameterized by
//! `c_e1(t) = (t,0,0)`, `c_e2(t) = (1,t,0)`, `c_e3(t) = (1-t,1,0)`,
//! `c_e4(t) = (0,1-t,0)`, and `c_e(t)` is glued to `c_opposite(e)(1-t)`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::map::Quadrangulation;
use crate::metric::bfs_distances_in;

/// Float tolerance for lengths that are integers in exact arithmetic.
pub const LENGTH_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("mesh resolution must be at least 1")]
    ResolutionZero,
}

/// Grid point of a chart, in units of `1/m`.
pub type ChartPoint = (u16, u16, u16);

#[derive(Debug, Clone, Copy)]
struct TemplateEdge {
    a: u32,
    b: u32,
    weight: f64,
    axis: bool,
    /// Side `0..4` of the bottom boundary when both ends lie along it.
    boundary_side: Option<u8>,
}

/// Mesh of one emptied cube, shared by every chart.
#[derive(Debug, Clone)]
struct ChartTemplate {
    m: u16,
    points: Vec<ChartPoint>,
    index: Vec<u32>,
    edges: Vec<TemplateEdge>,
    cells: usize,
}

impl ChartTemplate {
    fn new(m: u16) -> Self {
        let side = m as usize + 1;
        let mut index = vec![u32::MAX; side * side * side];
        let mut points = Vec::new();
        for k in 0..=m {
            for j in 0..=m {
                for i in 0..=m {
                    if i == 0 || i == m || j == 0 || j == m || k == m {
                        index[(k as usize * side + j as usize) * side + i as usize] = points.len() as u32;
                        points.push((i, j, k));
                    }
                }
            }
        }
        let mut template = Self { m, points, index, edges: Vec::new(), cells: 0 };
        let mut seen = HashSet::new();
        let mut edges = Vec::new();
        let mut cells = 0;
        // Each square is (origin, u-direction, v-direction).
        type Step = (i32, i32, i32);
        let squares: [(Step, Step, Step); 5] = [
            ((0, 0, 0), (1, 0, 0), (0, 0, 1)),
            ((m as i32, 0, 0), (0, 1, 0), (0, 0, 1)),
            ((0, m as i32, 0), (1, 0, 0), (0, 0, 1)),
            ((0, 0, 0), (0, 1, 0), (0, 0, 1)),
            ((0, 0, m as i32), (1, 0, 0), (0, 1, 0)),
        ];
        let unit = 1.0 / m as f64;
        for (origin, du, dv) in squares {
            let at = |u: i32, v: i32| {
                let p = (origin.0 + u * du.0 + v * dv.0, origin.1 + u * du.1 + v * dv.1, origin.2 + u * du.2 + v * dv.2);
                template.local((p.0 as u16, p.1 as u16, p.2 as u16)).expect("square point lies on the chart")
            };
            for u in 0..m as i32 {
                for v in 0..m as i32 {
                    cells += 1;
                    let (p00, p10, p01, p11) = (at(u, v), at(u + 1, v), at(u, v + 1), at(u + 1, v + 1));
                    for (a, b, axis) in [
                        (p00, p10, true),
                        (p00, p01, true),
                        (p10, p11, true),
                        (p01, p11, true),
                        (p00, p11, false),
                        (p10, p01, false),
                    ] {
                        if seen.insert((a.min(b), a.max(b))) {
                            let weight = if axis { unit } else { std::f64::consts::SQRT_2 * unit };
                            let boundary_side = template.common_side(a, b);
                            edges.push(TemplateEdge { a, b, weight, axis, boundary_side });
                        }
                    }
                }
            }
        }
        template.edges = edges;
        template.cells = cells;
        template
    }

    fn local(&self, (i, j, k): ChartPoint) -> Option<u32> {
        let side = self.m as usize + 1;
        if i > self.m || j > self.m || k > self.m {
            return None;
        }
        let idx = self.index[(k as usize * side + j as usize) * side + i as usize];
        (idx != u32::MAX).then_some(idx)
    }

    /// Boundary side and parameter `s` (in `0..=m`) of a chart point with `z = 0`.
    /// Corners report the side they start.
    fn boundary_position(&self, (i, j, k): ChartPoint) -> Option<(u8, u16)> {
        let m = self.m;
        if k != 0 {
            return None;
        }
        Some(if j == 0 && i < m {
            (0, i)
        } else if i == m && j < m {
            (1, j)
        } else if j == m && i > 0 {
            (2, m - i)
        } else {
            (3, m - j)
        })
    }

    fn common_side(&self, a: u32, b: u32) -> Option<u8> {
        let (pa, pb) = (self.points[a as usize], self.points[b as usize]);
        if pa.2 != 0 || pb.2 != 0 {
            return None;
        }
        let m = self.m;
        let on = |p: ChartPoint, side: u8| match side {
            0 => p.1 == 0,
            1 => p.0 == m,
            2 => p.1 == m,
            _ => p.0 == 0,
        };
        (0..4).find(|&s| on(pa, s) && on(pb, s))
    }
}

/// Weighted mesh of the glued surface. Node `v < V` is map vertex `v`.
#[derive(Debug, Clone)]
pub struct MeshedSurface {
    m: usize,
    vertex_count: usize,
    coords: Vec<(u32, ChartPoint)>,
    chart_nodes: Vec<u32>,
    points_per_chart: usize,
    offsets: Vec<u32>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    template: ChartTemplate,
    euler: i64,
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem(f64, u32);

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

pub fn build_mesh(q: &Quadrangulation, m: usize) -> Result<MeshedSurface, SurfaceError> {
    if m == 0 {
        return Err(SurfaceError::ResolutionZero);
    }
    let map = q.map();
    let template = ChartTemplate::new(m as u16);
    let vertex_count = map.vertex_count();
    let h_count = map.half_edge_count();
    let mut edge_index = vec![u32::MAX; h_count];
    let mut edges = 0u32;
    for h in 0..h_count as u32 {
        if map.edge_of(h) == h {
            edge_index[h as usize] = edges;
            edges += 1;
        }
    }
    let edge_base = vertex_count as u32;
    let interior_base = edge_base + edges * (m as u32 - 1);
    let mut coords: Vec<(u32, ChartPoint)> = vec![(u32::MAX, (0, 0, 0)); interior_base as usize];
    let faces = map.faces();
    let ppc = template.points.len();
    let mut chart_nodes = vec![0u32; faces.len() * ppc];
    let mut next_node = interior_base;
    for f in 0..faces.len() {
        let cycle = faces.cycle(f);
        for (local, &p) in template.points.iter().enumerate() {
            let node = match template.boundary_position(p) {
                Some((side, s)) => {
                    let e = cycle[side as usize];
                    if s == 0 {
                        map.origin(e)
                    } else {
                        let canonical = map.edge_of(e);
                        let idx = if canonical == e { s } else { m as u16 - s };
                        edge_base + edge_index[canonical as usize] * (m as u32 - 1) + idx as u32 - 1
                    }
                }
                None => {
                    next_node += 1;
                    coords.push((f as u32, p));
                    next_node - 1
                }
            };
            if coords[node as usize].0 == u32::MAX {
                coords[node as usize] = (f as u32, p);
            }
            chart_nodes[f * ppc + local] = node;
        }
    }
    let node_count = next_node as usize;

    let mut edge_list: Vec<(u32, u32, f64)> = Vec::new();
    let mut axis_edges = 0i64;
    for f in 0..faces.len() {
        let cycle = faces.cycle(f);
        for te in &template.edges {
            if let Some(side) = te.boundary_side {
                let e = cycle[side as usize];
                if map.edge_of(e) != e {
                    continue;
                }
            }
            if te.axis {
                axis_edges += 1;
            }
            edge_list.push((chart_nodes[f * ppc + te.a as usize], chart_nodes[f * ppc + te.b as usize], te.weight));
        }
    }
    let mut offsets = vec![0u32; node_count + 1];
    for &(a, b, _) in &edge_list {
        offsets[a as usize + 1] += 1;
        offsets[b as usize + 1] += 1;
    }
    for v in 0..node_count {
        offsets[v + 1] += offsets[v];
    }
    let mut fill = offsets.clone();
    let mut targets = vec![0u32; 2 * edge_list.len()];
    let mut weights = vec![0f64; 2 * edge_list.len()];
    for &(a, b, w) in &edge_list {
        for (x, y) in [(a, b), (b, a)] {
            let slot = fill[x as usize] as usize;
            targets[slot] = y;
            weights[slot] = w;
            fill[x as usize] += 1;
        }
    }
    let euler = node_count as i64 - axis_edges + (faces.len() * template.cells) as i64;
    Ok(MeshedSurface {
        m,
        vertex_count,
        coords,
        chart_nodes,
        points_per_chart: ppc,
        offsets,
        targets,
        weights,
        template,
        euler,
    })
}

impl MeshedSurface {
    pub fn resolution(&self) -> usize {
        self.m
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Euler characteristic of the glued square-cell complex.
    pub fn euler_characteristic(&self) -> i64 {
        self.euler
    }

    /// Mesh node of a map vertex.
    pub fn vertex_node(&self, v: u32) -> u32 {
        v
    }

    /// Mesh node of a grid point of the chart of face `f`.
    pub fn chart_node(&self, face: usize, point: ChartPoint) -> Option<u32> {
        let local = self.template.local(point)?;
        self.chart_nodes.get(face * self.points_per_chart + local as usize).copied()
    }

    /// Every node of the chart of face `f`.
    pub fn chart(&self, face: usize) -> &[u32] {
        &self.chart_nodes[face * self.points_per_chart..(face + 1) * self.points_per_chart]
    }

    fn neighbors(&self, v: u32) -> impl Iterator<Item = (u32, f64)> + '_ {
        let range = self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize;
        self.targets[range.clone()].iter().copied().zip(self.weights[range].iter().copied())
    }

    /// Dijkstra from a set of sources; returns distances and the source each node is closest to.
    pub fn distances_from(&self, sources: &[u32]) -> (Vec<f64>, Vec<u32>) {
        let mut dist = vec![f64::INFINITY; self.node_count()];
        let mut nearest = vec![u32::MAX; self.node_count()];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s as usize] = 0.0;
            nearest[s as usize] = s;
            heap.push(HeapItem(0.0, s));
        }
        while let Some(HeapItem(d, v)) = heap.pop() {
            if d > dist[v as usize] {
                continue;
            }
            for (w, len) in self.neighbors(v) {
                let nd = d + len;
                if nd < dist[w as usize] {
                    dist[w as usize] = nd;
                    nearest[w as usize] = nearest[v as usize];
                    heap.push(HeapItem(nd, w));
                }
            }
        }
        (dist, nearest)
    }

    /// Writes nodes with their chart coordinates, then weighted edges.
    pub fn to_off(&self) -> String {
        let mut out = format!("MESH {} {} {}\n", self.node_count(), self.edge_count(), self.m);
        let scale = self.m as f64;
        for &(face, (i, j, k)) in &self.coords {
            out.push_str(&format!(
                "{face} {} {} {}\n",
                i as f64 / scale,
                j as f64 / scale,
                k as f64 / scale
            ));
        }
        for v in 0..self.node_count() as u32 {
            for (w, len) in self.neighbors(v) {
                if v < w {
                    out.push_str(&format!("{v} {w} {len}\n"));
                }
            }
        }
        out
    }
}

pub fn mesh_distance(s: &MeshedSurface, a: u32, b: u32) -> f64 {
    if a == b {
        return 0.0;
    }
    s.distances_from(&[a]).0[b as usize]
}

/// Largest `|mesh_distance(u, v) - d_gr(u, v)|` over pairs of map vertices.
pub fn verify_vertex_isometry(q: &Quadrangulation, s: &MeshedSurface) -> f64 {
    let adj = q.map().adjacency();
    (0..q.vertex_count() as u32)
        .into_par_iter()
        .map(|u| {
            let graph = bfs_distances_in(adj, u);
            let (mesh, _) = s.distances_from(&[s.vertex_node(u)]);
            (0..q.vertex_count())
                .map(|v| (mesh[s.vertex_node(v as u32) as usize] - graph[v] as f64).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityAndGh {
    /// Largest distance from a mesh node to the nearest map vertex.
    pub density_radius: f64,
    /// Half the distortion of the nearest-vertex correspondence.
    pub gh_upper: f64,
}

/// Density of the vertex set and a GH upper bound between the vertex metric
/// space and the meshed surface, through the correspondence pairing every
/// mesh node with a nearest map vertex.
pub fn verify_density_and_gh(q: &Quadrangulation, s: &MeshedSurface) -> DensityAndGh {
    let vertices: Vec<u32> = (0..q.vertex_count() as u32).map(|v| s.vertex_node(v)).collect();
    let (to_vertex, nearest) = s.distances_from(&vertices);
    let density_radius = to_vertex.iter().copied().fold(0.0, f64::max);
    let adj = q.map().adjacency();
    let graph: Vec<Vec<u32>> = (0..q.vertex_count() as u32).map(|v| bfs_distances_in(adj, v)).collect();
    let distortion = (0..s.node_count() as u32)
        .into_par_iter()
        .map(|a| {
            let (row, _) = s.distances_from(&[a]);
            let ga = &graph[nearest[a as usize] as usize];
            row.iter()
                .zip(&nearest)
                .map(|(&d, &b)| (d - ga[b as usize] as f64).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    DensityAndGh { density_radius, gh_upper: distortion / 2.0 }
}

/// Mesh diameter of a single emptied cube at resolution `m`.
pub fn chart_mesh_diameter(m: usize) -> Result<f64, SurfaceError> {
    if m == 0 {
        return Err(SurfaceError::ResolutionZero);
    }
    let t = ChartTemplate::new(m as u16);
    let n = t.points.len();
    let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for e in &t.edges {
        adj[e.a as usize].push((e.b, e.weight));
        adj[e.b as usize].push((e.a, e.weight));
    }
    let mut diam = 0.0f64;
    for s in 0..n {
        let mut dist = vec![f64::INFINITY; n];
        let mut heap = BinaryHeap::new();
        dist[s] = 0.0;
        heap.push(HeapItem(0.0, s as u32));
        while let Some(HeapItem(d, v)) = heap.pop() {
            if d > dist[v as usize] {
                continue;
            }
            for &(w, len) in &adj[v as usize] {
                if d + len < dist[w as usize] {
                    dist[w as usize] = d + len;
                    heap.push(HeapItem(d + len, w));
                }
            }
        }
        diam = dist.into_iter().fold(diam, f64::max);
    }
    Ok(diam)
}

/// One row of the surface report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceReport {
    pub n: usize,
    pub m: usize,
    pub max_isometry_error: f64,
    pub density_radius: f64,
    pub gh_upper: f64,
}

impl SurfaceReport {
    pub fn measure(q: &Quadrangulation, m: usize) -> Result<Self, SurfaceError> {
        let s = build_mesh(q, m)?;
        let DensityAndGh { density_radius, gh_upper } = verify_density_and_gh(q, &s);
        Ok(Self { n: q.n(), m, max_isometry_error: verify_vertex_isometry(q, &s), density_radius, gh_upper })
    }

    /// The slack-adjusted bounds: isometry exact, density and GH within `3 + 2/m`.
    pub fn within_bounds(&self) -> bool {
        let bound = 3.0 + 2.0 / self.m as f64;
        self.max_isometry_error <= LENGTH_TOLERANCE && self.density_radius <= bound && self.gh_upper <= bound
    }

    pub const CSV_HEADER: &'static str = "n,m,max_isometry_error,density_radius,gh_upper";

    pub fn csv_row(&self) -> String {
        format!("{},{},{:e},{},{}", self.n, self.m, self.max_isometry_error, self.density_radius, self.gh_upper)
    }
}
