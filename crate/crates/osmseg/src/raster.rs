//! Scanline rasterization of polygon rings onto boolean cell grids.
//!
//! This is a second, structurally different route to polygon membership and
//! overlap: row-interval parity fill, no shared code with the clipping or
//! ray-casting paths. Test suites use it to cross-check intersection areas
//! and membership decisions at fine resolution.

/// Boolean occupancy of cell centers over a regular grid.
pub struct RasterMask {
    pub origin: [f64; 2],
    pub cell: f64,
    pub width: usize,
    pub height: usize,
    pub filled: Vec<bool>,
}

impl RasterMask {
    pub fn is_filled(&self, col: usize, row: usize) -> bool {
        self.filled[row * self.width + col]
    }

    pub fn filled_count(&self) -> usize {
        self.filled.iter().filter(|&&f| f).count()
    }
}

/// Fills every cell whose center lies strictly inside the ring (even-odd rule).
pub fn rasterize_ring(
    ring: &[[f64; 2]],
    origin: [f64; 2],
    cell: f64,
    width: usize,
    height: usize,
) -> RasterMask {
    let mut filled = vec![false; width * height];
    let n = ring.len();
    for row in 0..height {
        let y = origin[1] + (row as f64 + 0.5) * cell;
        let mut xs: Vec<f64> = Vec::new();
        let mut j = n - 1;
        for i in 0..n {
            let (yi, yj) = (ring[i][1], ring[j][1]);
            if (yi > y) != (yj > y) {
                let t = (y - yi) / (yj - yi);
                xs.push(ring[i][0] + t * (ring[j][0] - ring[i][0]));
            }
            j = i;
        }
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut k = 0;
        while k + 1 < xs.len() {
            let (x0, x1) = (xs[k], xs[k + 1]);
            // first/last cell whose center falls in (x0, x1)
            let lo = (((x0 - origin[0]) / cell - 0.5).floor() as i64 + 1).max(0);
            let hi = (((x1 - origin[0]) / cell - 0.5).ceil() as i64 - 1).min(width as i64 - 1);
            for col in lo..=hi {
                filled[row * width + col as usize] = true;
            }
            k += 2;
        }
    }
    RasterMask {
        origin,
        cell,
        width,
        height,
        filled,
    }
}

/// Estimates |P∩Q| by counting cells of a shared grid filled by both rings.
pub fn raster_intersection_area(ring_p: &[[f64; 2]], ring_q: &[[f64; 2]], cell: f64) -> f64 {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for v in ring_p.iter().chain(ring_q.iter()) {
        for k in 0..2 {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    let origin = [lo[0] - cell, lo[1] - cell];
    let width = ((hi[0] - origin[0]) / cell).ceil() as usize + 1;
    let height = ((hi[1] - origin[1]) / cell).ceil() as usize + 1;
    let mp = rasterize_ring(ring_p, origin, cell, width, height);
    let mq = rasterize_ring(ring_q, origin, cell, width, height);
    let both = mp
        .filled
        .iter()
        .zip(mq.filled.iter())
        .filter(|(a, b)| **a && **b)
        .count();
    both as f64 * cell * cell
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_fill_count() {
        let ring = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let mask = rasterize_ring(&ring, [0.0, 0.0], 0.1, 10, 10);
        assert_eq!(mask.filled_count(), 100);
    }

    #[test]
    fn offset_squares_area_estimate() {
        let p = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let q = vec![[0.5, 0.0], [1.5, 0.0], [1.5, 1.0], [0.5, 1.0]];
        let est = raster_intersection_area(&p, &q, 0.01);
        assert!((est - 0.5).abs() < 0.02);
    }
}
