//! Semantic segmentation of geolocated 3D point clouds using OpenStreetMap
//! building footprints.
//!
//! The pipeline registers OSM footprints onto a point cloud in two steps: a
//! global affine transform fitted to manual control points, then a bounded
//! per-building translation search that maximizes the overlap between each
//! footprint polygon and a density-aware occupancy grid of the ground-filtered,
//! flattened cloud. Points are then labeled by the adjusted footprints and
//! per-building fit metrics are aggregated into a report.
//!
//! Modules follow the stages:
//!
//! - [`osm`]: OSM XML parsing and footprint extraction
//! - [`mercator`]: WGS84 ↔ ellipsoidal Mercator conversion
//! - [`registration`]: control-point affine estimation
//! - [`cloud`]: cloud readers, ground removal, flattening, occupancy grids
//! - [`geometry`]: polygon area / centroid / membership / intersection / IoU
//! - [`adjust`]: the per-building translation search and point labeling
//! - [`evaluation`]: metrics against ground truth and report rendering
//! - [`synth`]: deterministic synthetic scenes with known ground truth
//! - [`pipeline`]: file-based stages and the end-to-end run
//! - [`raster`]: scanline rasterization (independent verification route)

pub mod adjust;
pub mod cloud;
pub mod evaluation;
pub mod geometry;
pub mod mercator;
pub mod osm;
pub mod pipeline;
pub mod raster;
pub mod registration;
pub mod synth;
