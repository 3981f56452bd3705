//! Combinatorial maps encoded as half-edge rotation systems.
//!
//! A map on `2E` half-edges is a pair of permutations: `opposite`, a fixed-point
//! free involution pairing the two halves of every edge, and `next_at_vertex`,
//! the counterclockwise successor of a half-edge around its origin vertex.
//!
//! Face traversal is fixed once for the whole crate as
//!
//! ```text
//! next_in_face(h) = next_at_vertex(opposite(h))
//! ```
//!
//! so the face cycle through `h` walks `h`, then turns counterclockwise at the
//! tip of `h`. Consecutive half-edges of a face cycle are head-to-tail.
//!
//! Vertices and faces are not stored; they are the cycles of `next_at_vertex`
//! and of `next_in_face` respectively, numbered in order of their smallest
//! half-edge.

use std::collections::VecDeque;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Version tag of the JSON interchange format.
pub const MAP_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("map has no half-edges")]
    Empty,
    #[error("table lengths differ: {what}")]
    LengthMismatch { what: String },
    #[error("{field}[{index}] = {value} is out of range")]
    OutOfRange { field: &'static str, index: usize, value: u32 },
    #[error("{field} is not a permutation: {value} appears more than once")]
    NotPermutation { field: &'static str, value: u32 },
    #[error("opposite is not a fixed-point-free involution at half-edge {half_edge}")]
    NotInvolution { half_edge: u32 },
    #[error("map is disconnected")]
    Disconnected,
    #[error("root half-edge {root} out of range")]
    RootOutOfRange { root: u32 },
    #[error("malformed input at line {line}, column {column}: {message}")]
    MalformedInput { line: usize, column: usize, message: String },
    #[error("face {face} has degree {degree}, expected 4")]
    FaceDegree { face: usize, degree: usize },
    #[error("Euler characteristic is {euler}, expected 2")]
    NotSpherical { euler: i64 },
    #[error("underlying graph is not bipartite")]
    NotBipartite,
    #[error("pointed vertex {pointed} is not the origin {origin} of the root half-edge")]
    PointedVertexMismatch { pointed: u32, origin: u32 },
}

/// Faces of a map, stored as flattened half-edge cycles.
#[derive(Debug, Clone)]
pub struct Faces {
    face_of: Vec<u32>,
    offsets: Vec<u32>,
    cycles: Vec<u32>,
}

impl Faces {
    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Half-edges of face `f` in traversal order, starting at its smallest half-edge.
    pub fn cycle(&self, f: usize) -> &[u32] {
        &self.cycles[self.offsets[f] as usize..self.offsets[f + 1] as usize]
    }

    pub fn degree(&self, f: usize) -> usize {
        (self.offsets[f + 1] - self.offsets[f]) as usize
    }

    pub fn face_of(&self, h: u32) -> u32 {
        self.face_of[h as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.len()).map(move |f| self.cycle(f))
    }
}

/// Compressed vertex adjacency. Multi-edges appear once per half-edge, in
/// counterclockwise order around each vertex.
#[derive(Debug, Clone)]
pub struct Adjacency {
    offsets: Vec<u32>,
    targets: Vec<u32>,
    half_edges: Vec<u32>,
}

impl Adjacency {
    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.targets[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }

    /// Outgoing half-edges of `v`, aligned with [`Adjacency::neighbors`].
    pub fn half_edges(&self, v: u32) -> &[u32] {
        &self.half_edges[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        (self.offsets[v as usize + 1] - self.offsets[v as usize]) as usize
    }
}

/// A connected graph embedded on an oriented surface.
#[derive(Debug)]
pub struct CombinatorialMap {
    opposite: Vec<u32>,
    next_at_vertex: Vec<u32>,
    root: u32,
    vertex_of: Vec<u32>,
    vertex_count: usize,
    faces: OnceLock<Faces>,
    adjacency: OnceLock<Adjacency>,
}

impl Clone for CombinatorialMap {
    fn clone(&self) -> Self {
        Self {
            opposite: self.opposite.clone(),
            next_at_vertex: self.next_at_vertex.clone(),
            root: self.root,
            vertex_of: self.vertex_of.clone(),
            vertex_count: self.vertex_count,
            faces: self.faces.clone(),
            adjacency: self.adjacency.clone(),
        }
    }
}

impl PartialEq for CombinatorialMap {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
            && self.opposite == other.opposite
            && self.next_at_vertex == other.next_at_vertex
    }
}

impl Eq for CombinatorialMap {}

fn check_permutation(field: &'static str, table: &[u32]) -> Result<(), MapError> {
    let mut seen = vec![false; table.len()];
    for (index, &value) in table.iter().enumerate() {
        let slot = seen
            .get_mut(value as usize)
            .ok_or(MapError::OutOfRange { field, index, value })?;
        if *slot {
            return Err(MapError::NotPermutation { field, value });
        }
        *slot = true;
    }
    Ok(())
}

/// Cycle index of every element under `perm`, numbered by smallest member.
fn cycle_labels(perm: &[u32]) -> (Vec<u32>, usize) {
    let mut label = vec![u32::MAX; perm.len()];
    let mut count = 0u32;
    for start in 0..perm.len() {
        if label[start] != u32::MAX {
            continue;
        }
        let mut h = start;
        while label[h] == u32::MAX {
            label[h] = count;
            h = perm[h] as usize;
        }
        count += 1;
    }
    (label, count as usize)
}

impl CombinatorialMap {
    /// Validates the two permutations and the root.
    pub fn new(opposite: Vec<u32>, next_at_vertex: Vec<u32>, root: u32) -> Result<Self, MapError> {
        if opposite.len() != next_at_vertex.len() {
            return Err(MapError::LengthMismatch {
                what: format!(
                    "opposite has {} entries, next_at_vertex has {}",
                    opposite.len(),
                    next_at_vertex.len()
                ),
            });
        }
        if opposite.is_empty() {
            return Err(MapError::Empty);
        }
        check_permutation("opposite", &opposite)?;
        check_permutation("next_at_vertex", &next_at_vertex)?;
        for (h, &o) in opposite.iter().enumerate() {
            if o as usize == h || opposite[o as usize] as usize != h {
                return Err(MapError::NotInvolution { half_edge: h as u32 });
            }
        }
        if root as usize >= opposite.len() {
            return Err(MapError::RootOutOfRange { root });
        }
        let (vertex_of, vertex_count) = cycle_labels(&next_at_vertex);
        let map = Self {
            opposite,
            next_at_vertex,
            root,
            vertex_of,
            vertex_count,
            faces: OnceLock::new(),
            adjacency: OnceLock::new(),
        };
        if !map.is_connected() {
            return Err(MapError::Disconnected);
        }
        Ok(map)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.opposite.len()];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut reached = 1usize;
        while let Some(h) = stack.pop() {
            for g in [self.opposite[h as usize], self.next_at_vertex[h as usize]] {
                if !seen[g as usize] {
                    seen[g as usize] = true;
                    reached += 1;
                    stack.push(g);
                }
            }
        }
        reached == self.opposite.len()
    }

    pub fn half_edge_count(&self) -> usize {
        self.opposite.len()
    }

    pub fn edge_count(&self) -> usize {
        self.opposite.len() / 2
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn face_count(&self) -> usize {
        self.faces().len()
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn opposite(&self, h: u32) -> u32 {
        self.opposite[h as usize]
    }

    pub fn next_at_vertex(&self, h: u32) -> u32 {
        self.next_at_vertex[h as usize]
    }

    pub fn next_in_face(&self, h: u32) -> u32 {
        self.next_at_vertex[self.opposite[h as usize] as usize]
    }

    pub fn opposite_table(&self) -> &[u32] {
        &self.opposite
    }

    pub fn next_at_vertex_table(&self) -> &[u32] {
        &self.next_at_vertex
    }

    /// Vertex a half-edge leaves from.
    pub fn origin(&self, h: u32) -> u32 {
        self.vertex_of[h as usize]
    }

    pub fn target(&self, h: u32) -> u32 {
        self.vertex_of[self.opposite[h as usize] as usize]
    }

    /// Canonical edge id: the smaller of the two half-edges.
    pub fn edge_of(&self, h: u32) -> u32 {
        h.min(self.opposite[h as usize])
    }

    pub fn faces(&self) -> &Faces {
        self.faces.get_or_init(|| {
            let h_count = self.opposite.len();
            let mut face_of = vec![u32::MAX; h_count];
            let mut offsets = vec![0u32];
            let mut cycles = Vec::with_capacity(h_count);
            for start in 0..h_count as u32 {
                if face_of[start as usize] != u32::MAX {
                    continue;
                }
                let f = offsets.len() as u32 - 1;
                let mut h = start;
                while face_of[h as usize] == u32::MAX {
                    face_of[h as usize] = f;
                    cycles.push(h);
                    h = self.next_in_face(h);
                }
                offsets.push(cycles.len() as u32);
            }
            Faces { face_of, offsets, cycles }
        })
    }

    pub fn adjacency(&self) -> &Adjacency {
        self.adjacency.get_or_init(|| {
            let mut offsets = vec![0u32; self.vertex_count + 1];
            for &v in &self.vertex_of {
                offsets[v as usize + 1] += 1;
            }
            for v in 0..self.vertex_count {
                offsets[v + 1] += offsets[v];
            }
            let mut targets = vec![0u32; self.opposite.len()];
            let mut half_edges = vec![0u32; self.opposite.len()];
            let mut seen = vec![false; self.opposite.len()];
            // Fill each vertex in rotation order starting from its smallest half-edge.
            for start in 0..self.opposite.len() as u32 {
                if seen[start as usize] {
                    continue;
                }
                let v = self.vertex_of[start as usize] as usize;
                let mut slot = offsets[v] as usize;
                let mut h = start;
                while !seen[h as usize] {
                    seen[h as usize] = true;
                    targets[slot] = self.target(h);
                    half_edges[slot] = h;
                    slot += 1;
                    h = self.next_at_vertex[h as usize];
                }
            }
            Adjacency { offsets, targets, half_edges }
        })
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edge_count() as i64 + self.face_count() as i64
    }

    pub fn genus(&self) -> i64 {
        (2 - self.euler_characteristic()) / 2
    }

    /// Two-colouring by BFS.
    pub fn is_bipartite(&self) -> bool {
        let adj = self.adjacency();
        let mut colour = vec![u8::MAX; self.vertex_count];
        let mut queue = VecDeque::new();
        colour[0] = 0;
        queue.push_back(0u32);
        while let Some(v) = queue.pop_front() {
            let c = colour[v as usize];
            for &w in adj.neighbors(v) {
                match colour[w as usize] {
                    u8::MAX => {
                        colour[w as usize] = 1 - c;
                        queue.push_back(w);
                    }
                    cw if cw == c => return false,
                    _ => {}
                }
            }
        }
        true
    }

    /// Canonical code of the rooted map: half-edges are renumbered in BFS
    /// order from the root (exploring `opposite` then `next_at_vertex`), and
    /// the code lists both permutations in the new numbering. Two rooted maps
    /// are isomorphic exactly when their codes agree.
    pub fn rooted_code(&self) -> Vec<u32> {
        let h_count = self.opposite.len();
        let mut new_id = vec![u32::MAX; h_count];
        let mut order = Vec::with_capacity(h_count);
        new_id[self.root as usize] = 0;
        order.push(self.root);
        let mut head = 0;
        while head < order.len() {
            let h = order[head];
            head += 1;
            for g in [self.opposite[h as usize], self.next_at_vertex[h as usize]] {
                if new_id[g as usize] == u32::MAX {
                    new_id[g as usize] = order.len() as u32;
                    order.push(g);
                }
            }
        }
        let mut code = Vec::with_capacity(2 * h_count);
        for &h in &order {
            code.push(new_id[self.opposite[h as usize] as usize]);
            code.push(new_id[self.next_at_vertex[h as usize] as usize]);
        }
        code
    }

    /// The same map with half-edge `h` renamed to `perm[h]`.
    pub fn relabel(&self, perm: &[u32]) -> Result<Self, MapError> {
        check_permutation("relabeling", perm)?;
        if perm.len() != self.opposite.len() {
            return Err(MapError::LengthMismatch { what: "relabeling".into() });
        }
        let mut opposite = vec![0; perm.len()];
        let mut next = vec![0; perm.len()];
        for h in 0..perm.len() {
            opposite[perm[h] as usize] = perm[self.opposite[h] as usize];
            next[perm[h] as usize] = perm[self.next_at_vertex[h] as usize];
        }
        Self::new(opposite, next, perm[self.root as usize])
    }

    /// The same map with a different root half-edge.
    pub fn with_root(&self, root: u32) -> Result<Self, MapError> {
        if root as usize >= self.opposite.len() {
            return Err(MapError::RootOutOfRange { root });
        }
        let mut map = self.clone();
        map.root = root;
        Ok(map)
    }

    /// Glues `b` onto `self` along edge `edge_a` of `self` and `edge_b` of `b`.
    ///
    /// Both edges are doubled into a pair of parallel edges, and the result has
    /// a 2-cycle whose two sides are the faces of `self` and the faces of `b`.
    /// Every face keeps its boundary. The origin of `edge_a` is merged with the
    /// origin of `edge_b`, and likewise for the tips. The root of `self` is kept.
    pub fn glue_along_edges(&self, edge_a: u32, b: &CombinatorialMap, edge_b: u32) -> Result<Self, MapError> {
        let shift = self.opposite.len() as u32;
        let mut opposite = self.opposite.clone();
        opposite.extend(b.opposite.iter().map(|&h| h + shift));
        let mut next = self.next_at_vertex.clone();
        next.extend(b.next_at_vertex.iter().map(|&h| h + shift));
        let ha = edge_a;
        let ha_bar = self.opposite(ha);
        let hb = edge_b + shift;
        let hb_bar = b.opposite(edge_b) + shift;
        opposite[ha as usize] = hb_bar;
        opposite[hb_bar as usize] = ha;
        opposite[hb as usize] = ha_bar;
        opposite[ha_bar as usize] = hb;
        next.swap(ha as usize, hb as usize);
        next.swap(ha_bar as usize, hb_bar as usize);
        Self::new(opposite, next, self.root)
    }

    pub fn to_document(&self, pointed_vertex: Option<u32>) -> MapDocument {
        MapDocument {
            half_edges: self.opposite.len(),
            opposite: self.opposite.clone(),
            next_at_vertex: self.next_at_vertex.clone(),
            root: self.root,
            pointed_vertex,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_document(None)).expect("map document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, MapError> {
        MapDocument::parse(text)?.into_map()
    }
}

/// JSON interchange document shared by every CLI subcommand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDocument {
    pub half_edges: usize,
    pub opposite: Vec<u32>,
    pub next_at_vertex: Vec<u32>,
    pub root: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pointed_vertex: Option<u32>,
}

impl MapDocument {
    pub fn parse(text: &str) -> Result<Self, MapError> {
        serde_json::from_str(text).map_err(|e| MapError::MalformedInput {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn into_map(self) -> Result<CombinatorialMap, MapError> {
        if self.half_edges != self.opposite.len() || self.half_edges != self.next_at_vertex.len() {
            return Err(MapError::LengthMismatch {
                what: format!(
                    "half_edges = {} but tables have {} and {} entries",
                    self.half_edges,
                    self.opposite.len(),
                    self.next_at_vertex.len()
                ),
            });
        }
        CombinatorialMap::new(self.opposite, self.next_at_vertex, self.root)
    }

    pub fn into_quadrangulation(self) -> Result<Quadrangulation, MapError> {
        let pointed = self.pointed_vertex;
        let map = self.into_map()?;
        match pointed {
            Some(v) => Quadrangulation::new(map, v),
            None => Quadrangulation::from_map(map),
        }
    }
}

/// A rooted planar map whose faces all have degree 4, pointed at the origin
/// of its root half-edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quadrangulation {
    map: CombinatorialMap,
    pointed_vertex: u32,
}

impl Quadrangulation {
    pub fn new(map: CombinatorialMap, pointed_vertex: u32) -> Result<Self, MapError> {
        let origin = map.origin(map.root());
        if pointed_vertex != origin {
            return Err(MapError::PointedVertexMismatch { pointed: pointed_vertex, origin });
        }
        let faces = map.faces();
        for f in 0..faces.len() {
            if faces.degree(f) != 4 {
                return Err(MapError::FaceDegree { face: f, degree: faces.degree(f) });
            }
        }
        let euler = map.euler_characteristic();
        if euler != 2 {
            return Err(MapError::NotSpherical { euler });
        }
        if !map.is_bipartite() {
            return Err(MapError::NotBipartite);
        }
        Ok(Self { map, pointed_vertex })
    }

    pub fn from_map(map: CombinatorialMap) -> Result<Self, MapError> {
        let origin = map.origin(map.root());
        Self::new(map, origin)
    }

    pub fn map(&self) -> &CombinatorialMap {
        &self.map
    }

    pub fn into_map(self) -> CombinatorialMap {
        self.map
    }

    /// Number of faces.
    pub fn n(&self) -> usize {
        self.map.face_count()
    }

    pub fn pointed_vertex(&self) -> u32 {
        self.pointed_vertex
    }

    pub fn vertex_count(&self) -> usize {
        self.map.vertex_count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.map.to_document(Some(self.pointed_vertex)))
            .expect("map document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, MapError> {
        MapDocument::parse(text)?.into_quadrangulation()
    }
}
