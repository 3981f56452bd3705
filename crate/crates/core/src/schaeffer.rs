//! The Schaeffer bijection between well-labeled trees and rooted quadrangulations.
//!
//! Forward direction: add a vertex `x*` with label 0; every corner of the tree
//! with label `l` sends one edge to its successor, the next corner in cyclic
//! contour order with label `l - 1` (or to `x*` when `l = 1`). Removing the
//! tree edges leaves a quadrangulation in which labels are distances to `x*`.
//!
//! Layout of the output: edge `c` is the one drawn from corner `c`, so
//! half-edge `2c` leaves the tree vertex visited at contour time `c` and
//! half-edge `2c + 1` is its other end. The root is the half-edge leaving
//! `x*` along the edge of the first corner with label 1.
//!
//! Rotation conventions (counterclockwise): inside a tree corner, the incoming
//! successor edges come first, ordered from the nearest preceding corner
//! backwards, followed by the corner's own outgoing edge; corners of a vertex
//! follow each other in increasing contour time. Around `x*` the edges come in
//! decreasing contour time.

use thiserror::Error;

use crate::map::{CombinatorialMap, MapError, Quadrangulation};
use crate::metric::bfs_distances_in;
use crate::trees::{PlaneTree, TreeError, WellLabeledTree};

/// Successor marker for corners whose edge goes to `x*`.
pub const TO_POINTED: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchaefferError {
    #[error("construction produced an invalid quadrangulation: {0}")]
    InvariantViolation(MapError),
    #[error("not a quadrangulation: {0}")]
    NotQuadrangulation(String),
    #[error("pointed vertex {pointed} is not the origin of the root half-edge")]
    NotPointed { pointed: u32 },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// A tree corner visited by the contour walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Corner {
    /// Preorder id of the tree vertex.
    pub vertex: u32,
    pub label: u32,
    /// Index of the successor corner, or [`TO_POINTED`].
    pub successor: u32,
}

/// The `2n` corners of a labeled tree in contour order with their successors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CornerSequence {
    pub corners: Vec<Corner>,
}

impl CornerSequence {
    pub fn new(t: &WellLabeledTree) -> Self {
        let visits = t.tree().contour_vertices();
        let two_n = visits.len() - 1;
        let labels = t.labels();
        let label_at = |c: usize| labels[visits[c] as usize];
        let max_label = labels.iter().copied().max().unwrap_or(1) as usize;
        // Scan the doubled cyclic sequence backwards, remembering the nearest
        // corner ahead with each label.
        let mut ahead = vec![TO_POINTED; max_label + 1];
        let mut successor = vec![TO_POINTED; two_n];
        for i in (0..2 * two_n).rev() {
            let c = i % two_n;
            let l = label_at(c) as usize;
            if i < two_n && l > 1 {
                successor[c] = ahead[l - 1];
            }
            ahead[l] = c as u32;
        }
        let corners = (0..two_n)
            .map(|c| Corner { vertex: visits[c], label: label_at(c), successor: successor[c] })
            .collect();
        Self { corners }
    }

    pub fn len(&self) -> usize {
        self.corners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corners.is_empty()
    }
}

/// Rotation tables of the forward construction, before validation.
fn forward_tables(t: &WellLabeledTree) -> (Vec<u32>, Vec<u32>, u32, CornerSequence) {
    let seq = CornerSequence::new(t);
    let two_n = seq.len();
    let h_count = 2 * two_n;
    let opposite: Vec<u32> = (0..h_count as u32).map(|h| h ^ 1).collect();
    let mut next = vec![u32::MAX; h_count];

    // Incoming edges per target corner, each list in backward cyclic order
    // starting just before the target.
    let mut in_offsets = vec![0u32; two_n + 1];
    for c in &seq.corners {
        if c.successor != TO_POINTED {
            in_offsets[c.successor as usize + 1] += 1;
        }
    }
    for s in 0..two_n {
        in_offsets[s + 1] += in_offsets[s];
    }
    let mut fill = in_offsets.clone();
    let mut incoming = vec![0u32; in_offsets[two_n] as usize];
    for j in (0..two_n).rev() {
        let s = seq.corners[j].successor;
        if s != TO_POINTED {
            incoming[fill[s as usize] as usize] = j as u32;
            fill[s as usize] += 1;
        }
    }
    // Lists were filled in decreasing j; rotate each so it starts just below s.
    for s in 0..two_n {
        let list = &mut incoming[in_offsets[s] as usize..in_offsets[s + 1] as usize];
        let split = list.iter().position(|&j| (j as usize) < s).unwrap_or(list.len());
        list.rotate_left(split);
    }

    // Corners grouped by tree vertex, in increasing time.
    let nodes = t.tree().node_count();
    let mut v_offsets = vec![0u32; nodes + 1];
    for c in &seq.corners {
        v_offsets[c.vertex as usize + 1] += 1;
    }
    for v in 0..nodes {
        v_offsets[v + 1] += v_offsets[v];
    }
    let mut v_fill = v_offsets.clone();
    let mut by_vertex = vec![0u32; two_n];
    for (c, corner) in seq.corners.iter().enumerate() {
        by_vertex[v_fill[corner.vertex as usize] as usize] = c as u32;
        v_fill[corner.vertex as usize] += 1;
    }

    let mut ring = Vec::new();
    for v in 0..nodes {
        ring.clear();
        for &c in &by_vertex[v_offsets[v] as usize..v_offsets[v + 1] as usize] {
            let c = c as usize;
            ring.extend(incoming[in_offsets[c] as usize..in_offsets[c + 1] as usize].iter().map(|&j| 2 * j + 1));
            ring.push(2 * c as u32);
        }
        link_ring(&mut next, &ring);
    }

    ring.clear();
    ring.extend(
        seq.corners
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| c.successor == TO_POINTED)
            .map(|(c, _)| 2 * c as u32 + 1),
    );
    let root = *ring.last().expect("some corner carries the minimum label");
    link_ring(&mut next, &ring);
    (opposite, next, root, seq)
}

fn link_ring(next: &mut [u32], ring: &[u32]) {
    for (k, &h) in ring.iter().enumerate() {
        next[h as usize] = ring[(k + 1) % ring.len()];
    }
}

/// Tree with positive labels to the quadrangulation pointed at `x*`.
///
/// Accepts trees with root label 1 (the bijective domain) as well as trees
/// whose minimum label is 1 elsewhere; in both cases the root is the edge
/// from `x*` to the first corner with label 1.
pub fn forward(t: &WellLabeledTree) -> Result<Quadrangulation, SchaefferError> {
    let (opposite, next, root, _) = forward_tables(t);
    let map = CombinatorialMap::new(opposite, next, root).map_err(SchaefferError::InvariantViolation)?;
    Quadrangulation::from_map(map).map_err(SchaefferError::InvariantViolation)
}

/// Map vertex visited at contour time `time` (`0..=2n`) in a map built by [`forward`].
pub fn contour_vertex(q: &Quadrangulation, time: usize) -> u32 {
    let two_n = q.map().edge_count();
    q.map().origin(2 * (time % two_n) as u32)
}

/// Map vertex of every tree vertex (preorder id) in a map built by [`forward`].
pub fn tree_vertex_map(t: &WellLabeledTree, q: &Quadrangulation) -> Vec<u32> {
    let mut out = vec![0u32; t.tree().node_count()];
    for (time, &v) in t.tree().contour_vertices().iter().enumerate() {
        out[v as usize] = contour_vertex(q, time);
    }
    out
}

/// Quadrangulation edges and tree edges drawn together on the same sphere.
///
/// Tree half-edge `4n + c` leaves the vertex visited at contour time `c`
/// towards the vertex visited at time `c + 1`, placed counterclockwise right
/// after the corner's outgoing edge.
pub fn overlay_map(t: &WellLabeledTree) -> Result<CombinatorialMap, SchaefferError> {
    let (mut opposite, mut next, root, seq) = forward_tables(t);
    let two_n = seq.len() as u32;
    let base = 2 * two_n;
    opposite.resize((base + two_n) as usize, 0);
    next.resize((base + two_n) as usize, 0);
    let mut open = Vec::new();
    for (c, &up) in t.tree().steps().iter().enumerate() {
        let c = c as u32;
        if up {
            open.push(c);
        } else {
            let d = open.pop().expect("Dyck word");
            opposite[(base + c) as usize] = base + d;
            opposite[(base + d) as usize] = base + c;
        }
        let out = 2 * c;
        next[(base + c) as usize] = next[out as usize];
        next[out as usize] = base + c;
    }
    CombinatorialMap::new(opposite, next, root).map_err(SchaefferError::InvariantViolation)
}

/// Inverse bijection on a validated quadrangulation.
pub fn reverse(q: &Quadrangulation) -> Result<WellLabeledTree, SchaefferError> {
    reverse_map(q.map(), q.pointed_vertex())
}

/// Inverse bijection on a raw map pointed at `pointed`.
///
/// Labels are BFS distances from `pointed`. Every half-edge `d` pointing one
/// step closer to `pointed` marks a tree corner; the tree half-edge of that
/// corner lies in the face containing `next_at_vertex(d)`. Each face receives
/// exactly two such marks, which are the ends of its tree edge.
pub fn reverse_map(map: &CombinatorialMap, pointed: u32) -> Result<WellLabeledTree, SchaefferError> {
    let root = map.root();
    if map.origin(root) != pointed {
        return Err(SchaefferError::NotPointed { pointed });
    }
    let faces = map.faces();
    if let Some(f) = (0..faces.len()).find(|&f| faces.degree(f) != 4) {
        return Err(SchaefferError::NotQuadrangulation(format!("face {f} has degree {}", faces.degree(f))));
    }
    if map.euler_characteristic() != 2 {
        return Err(SchaefferError::NotQuadrangulation("not planar".into()));
    }
    let adj = map.adjacency();
    let dist = bfs_distances_in(adj, pointed);
    let h_count = map.half_edge_count();
    let is_down = |h: u32| dist[map.origin(h) as usize] == dist[map.target(h) as usize] + 1;
    for h in 0..h_count as u32 {
        if dist[map.origin(h) as usize].abs_diff(dist[map.target(h) as usize]) != 1 {
            return Err(SchaefferError::NotQuadrangulation("labels of adjacent vertices must differ by 1".into()));
        }
    }

    // Pair the two marks of every face.
    let mut first_mark = vec![u32::MAX; faces.len()];
    let mut mate = vec![u32::MAX; h_count];
    for d in (0..h_count as u32).filter(|&d| is_down(d)) {
        let f = faces.face_of(map.next_at_vertex(d)) as usize;
        match first_mark[f] {
            u32::MAX => first_mark[f] = d,
            other if mate[other as usize] == u32::MAX => {
                mate[other as usize] = d;
                mate[d as usize] = other;
            }
            _ => return Err(SchaefferError::NotQuadrangulation(format!("face {f} carries more than one tree edge"))),
        }
    }
    if let Some(f) = first_mark.iter().position(|&d| d == u32::MAX || mate[d as usize] == u32::MAX) {
        return Err(SchaefferError::NotQuadrangulation(format!("face {f} carries no tree edge")));
    }

    // Counterclockwise successor among marks around each vertex.
    let mut next_mark = vec![u32::MAX; h_count];
    for v in 0..map.vertex_count() as u32 {
        let marks: Vec<u32> = adj.half_edges(v).iter().copied().filter(|&h| is_down(h)).collect();
        for (k, &d) in marks.iter().enumerate() {
            next_mark[d as usize] = marks[(k + 1) % marks.len()];
        }
    }

    let start = map.opposite(root);
    let n = faces.len();
    let mut preorder = vec![u32::MAX; map.vertex_count()];
    let mut labels = Vec::with_capacity(n + 1);
    let mut steps = Vec::with_capacity(2 * n);
    let root_vertex = map.origin(start);
    preorder[root_vertex as usize] = 0;
    labels.push(dist[root_vertex as usize]);
    let mut current = start;
    for _ in 0..2 * n {
        let arrival = mate[current as usize];
        let w = map.origin(arrival) as usize;
        if preorder[w] == u32::MAX {
            preorder[w] = labels.len() as u32;
            labels.push(dist[w]);
            steps.push(true);
        } else {
            steps.push(false);
        }
        current = next_mark[arrival as usize];
    }
    if current != start {
        return Err(SchaefferError::NotQuadrangulation("tree contour did not close".into()));
    }
    let tree = PlaneTree::from_dyck(steps)?;
    Ok(WellLabeledTree::new(tree, labels)?)
}

/// Labels recomputed as graph distances to the pointed vertex, per map vertex.
pub fn distance_labels(q: &Quadrangulation) -> Vec<u32> {
    bfs_distances_in(q.map().adjacency(), q.pointed_vertex())
}
