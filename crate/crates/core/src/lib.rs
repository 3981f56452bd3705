//! Uniform random planar quadrangulations and the metric objects built from them.
//!
//! The crate is organised bottom-up:
//!
//! - [`map`]: half-edge rotation systems, faces, Euler characteristic, JSON format.
//! - [`trees`]: plane trees, well-labeled trees, samplers, contour processes.
//! - [`schaeffer`]: the bijection between well-labeled trees and rooted quadrangulations.
//! - [`metric`]: BFS metrics, radius, diameter, contour distance bound.
//! - [`surface`]: glued emptied-cube surface meshes and their vertex isometry.
//! - [`gh`]: correspondences, distortion, Gromov-Hausdorff bounds.
//! - [`regularity`]: short simple cycles, Jordan splits and bottleneck scans.
//! - [`experiments`]: seeded ensembles, exponent fits, SVG plots.

pub mod experiments;
pub mod gh;
pub mod map;
pub mod metric;
pub mod regularity;
pub mod schaeffer;
pub mod seed;
pub mod surface;
pub mod trees;

pub use map::{CombinatorialMap, MapError, Quadrangulation};
pub use metric::FiniteMetricSpace;
pub use trees::{ContourPair, PlaneTree, SampleMode, WellLabeledTree};

/// Names and versions of every file format read or written by the crate.
pub const FORMAT_VERSIONS: &[(&str, u32)] = &[
    ("map-json", map::MAP_FORMAT_VERSION),
    ("tree-text", 1),
    ("distance-matrix", 1),
    ("mesh-off", 1),
    ("csv", 1),
];
