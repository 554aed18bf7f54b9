//! Per-building translation search: maximize overlap between a footprint
//! polygon and the occupancy grid of the flattened cloud, then label cloud
//! points by the adjusted footprints.
//!
//! The candidate translations scan the search disk from its top-left corner
//! in steps of `step` (offsets −r + iΔ along each axis, kept while
//! x² + y² < r²), with the identity translation always included. Rotation
//! and scale are held fixed; the search is exhaustive, not greedy, and the
//! maximizer is made unique by a deterministic tie-break.

use crate::cloud::OccupancyGrid;
use crate::geometry::{point_in_polygon, PlanarPolygon};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AdjustError {
    #[error("search radius and step must be finite and positive with step <= radius (got r={radius}, step={step})")]
    BadSearchConfig { radius: f64, step: f64 },
    #[error("footprint `{name}` (dilated bbox [{min_x:.2},{min_y:.2}]..[{max_x:.2},{max_y:.2}]) exits the grid window")]
    WindowTooSmall {
        name: String,
        min_x: f64,
        min_y: f64,
        max_x: f64,
        max_y: f64,
    },
}

/// Translation search parameters: disk radius `r` and lattice step `Δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub radius: f64,
    pub step: f64,
}

impl SearchConfig {
    pub fn new(radius: f64, step: f64) -> Result<Self, AdjustError> {
        if !(radius.is_finite() && step.is_finite() && radius > 0.0 && step > 0.0 && step <= radius)
        {
            return Err(AdjustError::BadSearchConfig { radius, step });
        }
        Ok(Self { radius, step })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Translation2D {
    pub x: f64,
    pub y: f64,
}

impl Translation2D {
    pub const ZERO: Translation2D = Translation2D { x: 0.0, y: 0.0 };

    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }
}

/// Outcome of one building's search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjustmentResult {
    pub name: String,
    pub best: Translation2D,
    pub best_iou: f64,
    pub initial_iou: f64,
    pub evaluated_count: usize,
}

/// Enumerates the candidate translations for a search configuration. The
/// identity comes first, followed by the corner-anchored lattice scan in
/// row-major order; every candidate satisfies x² + y² < r² strictly.
pub fn candidate_translations(cfg: &SearchConfig) -> Vec<Translation2D> {
    let r = cfg.radius;
    let d = cfg.step;
    let steps = (2.0 * r / d).floor() as i64;
    let mut out = vec![Translation2D::ZERO];
    for i in 0..=steps {
        let x = -r + i as f64 * d;
        for j in 0..=steps {
            let y = -r + j as f64 * d;
            if x * x + y * y < r * r && !(x == 0.0 && y == 0.0) {
                out.push(Translation2D { x, y });
            }
        }
    }
    out
}

/// Grid-based IoU between a footprint and the occupied cells: cells whose
/// centers lie inside the polygon versus cells at or above the density
/// threshold. Zero when the union is empty.
pub fn cloud_iou(poly: &PlanarPolygon, grid: &OccupancyGrid) -> Result<f64, AdjustError> {
    let occupied_total = grid.occupied_count();
    let (inter, poly_cells) = poly_cell_overlap(poly, grid)?;
    let union = poly_cells + occupied_total - inter;
    Ok(if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    })
}

/// Counts (cells-in-polygon ∩ occupied, cells-in-polygon), restricted to the
/// polygon's bounding box. Errors if the polygon exits the grid extent.
fn poly_cell_overlap(
    poly: &PlanarPolygon,
    grid: &OccupancyGrid,
) -> Result<(usize, usize), AdjustError> {
    let (lo, hi) = poly.bbox();
    let ext = grid.extent_max();
    if lo[0] < grid.origin[0] || lo[1] < grid.origin[1] || hi[0] > ext[0] || hi[1] > ext[1] {
        return Err(AdjustError::WindowTooSmall {
            name: poly.name().to_string(),
            min_x: lo[0],
            min_y: lo[1],
            max_x: hi[0],
            max_y: hi[1],
        });
    }
    let col_lo = (((lo[0] - grid.origin[0]) / grid.cell_size).floor() as i64).max(0) as usize;
    let row_lo = (((lo[1] - grid.origin[1]) / grid.cell_size).floor() as i64).max(0) as usize;
    let col_hi = ((((hi[0] - grid.origin[0]) / grid.cell_size).ceil() as i64) as usize)
        .min(grid.width.saturating_sub(1));
    let row_hi = ((((hi[1] - grid.origin[1]) / grid.cell_size).ceil() as i64) as usize)
        .min(grid.height.saturating_sub(1));

    let mut inter = 0usize;
    let mut poly_cells = 0usize;
    for row in row_lo..=row_hi {
        for col in col_lo..=col_hi {
            if point_in_polygon(grid.cell_center(col, row), poly) {
                poly_cells += 1;
                if grid.is_occupied(col, row) {
                    inter += 1;
                }
            }
        }
    }
    Ok((inter, poly_cells))
}

/// Exhaustive search over [`candidate_translations`], returning the IoU
/// maximizer. Ties resolve to the smallest x² + y², then smallest y, then
/// smallest x, making the argmax unique and order-independent.
pub fn adjust_footprint(
    poly: &PlanarPolygon,
    grid: &OccupancyGrid,
    cfg: &SearchConfig,
) -> Result<AdjustmentResult, AdjustError> {
    SearchConfig::new(cfg.radius, cfg.step)?;
    // every candidate keeps the translated footprint inside the grid iff the
    // r-dilated bbox fits
    let (lo, hi) = poly.bbox();
    let ext = grid.extent_max();
    if lo[0] - cfg.radius < grid.origin[0]
        || lo[1] - cfg.radius < grid.origin[1]
        || hi[0] + cfg.radius > ext[0]
        || hi[1] + cfg.radius > ext[1]
    {
        return Err(AdjustError::WindowTooSmall {
            name: poly.name().to_string(),
            min_x: lo[0] - cfg.radius,
            min_y: lo[1] - cfg.radius,
            max_x: hi[0] + cfg.radius,
            max_y: hi[1] + cfg.radius,
        });
    }

    let occupied_total = grid.occupied_count();
    let candidates = candidate_translations(cfg);
    let mut initial_iou = 0.0;
    let mut best: Option<(Translation2D, f64)> = None;
    for (k, t) in candidates.iter().enumerate() {
        let moved = poly.translated(t.x, t.y);
        let (inter, poly_cells) = poly_cell_overlap(&moved, grid)?;
        let union = poly_cells + occupied_total - inter;
        let iou = if union == 0 {
            0.0
        } else {
            inter as f64 / union as f64
        };
        if k == 0 {
            initial_iou = iou;
        }
        let better = match &best {
            None => true,
            Some((bt, biou)) => {
                iou > *biou
                    || (iou == *biou
                        && (t.norm_sq() < bt.norm_sq()
                            || (t.norm_sq() == bt.norm_sq()
                                && (t.y < bt.y || (t.y == bt.y && t.x < bt.x)))))
            }
        };
        if better {
            best = Some((*t, iou));
        }
    }
    let (best, best_iou) = best.expect("candidate set is never empty");
    Ok(AdjustmentResult {
        name: poly.name().to_string(),
        best,
        best_iou,
        initial_iou,
        evaluated_count: candidates.len(),
    })
}

/// Labels each cloud point with the containing adjusted footprint, `None`
/// when outside all of them. Overlaps resolve by ascending building name.
/// `boundary_tolerance` extends membership to points within that distance of
/// a ring, absorbing the sub-step quantization left by the lattice search.
pub fn segment_cloud(
    points: &[[f64; 3]],
    polys: &[PlanarPolygon],
    boundary_tolerance: f64,
) -> Vec<Option<usize>> {
    let mut order: Vec<usize> = (0..polys.len()).collect();
    order.sort_by(|&a, &b| polys[a].name().cmp(polys[b].name()).then(a.cmp(&b)));
    let boxes: Vec<([f64; 2], [f64; 2])> = polys
        .iter()
        .map(|p| {
            let (lo, hi) = p.bbox();
            (
                [lo[0] - boundary_tolerance, lo[1] - boundary_tolerance],
                [hi[0] + boundary_tolerance, hi[1] + boundary_tolerance],
            )
        })
        .collect();
    points
        .iter()
        .map(|p| {
            let xy = [p[0], p[1]];
            for &i in &order {
                let (lo, hi) = boxes[i];
                if xy[0] < lo[0] || xy[0] > hi[0] || xy[1] < lo[1] || xy[1] > hi[1] {
                    continue;
                }
                if point_in_polygon(xy, &polys[i])
                    || (boundary_tolerance > 0.0
                        && ring_distance(xy, polys[i].ring()) <= boundary_tolerance)
                {
                    return Some(i);
                }
            }
            None
        })
        .collect()
}

fn ring_distance(p: [f64; 2], ring: &[[f64; 2]]) -> f64 {
    let n = ring.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        best = best.min(point_segment_distance(p, a, b));
    }
    best
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let len_sq = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len_sq == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / len_sq).clamp(0.0, 1.0)
    };
    let q = [a[0] + t * ab[0], a[1] + t * ab[1]];
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}
