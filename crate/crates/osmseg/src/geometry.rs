//! Planar polygon primitives used for footprint overlap scoring.
//!
//! Polygons are simple rings stored counter-clockwise. Intersection of two
//! simple (possibly non-convex) polygons is computed by triangulating both
//! rings and summing pairwise triangle-triangle clips; the triangulations
//! partition each polygon, so the sum equals the intersection area without
//! any winding bookkeeping. Degenerate incidences that defeat ear clipping
//! are retried once under a deterministic 1e-9 m vertex perturbation.

use thiserror::Error;

/// Distance (meters) within which a point counts as lying on a boundary.
pub const BOUNDARY_EPS: f64 = 1e-9;

/// Amplitude of the deterministic perturbation applied on degeneracy retry.
const PERTURB_SCALE: f64 = 1e-9;

/// Intersection areas below this (m^2) snap to exactly zero.
const AREA_SNAP: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("polygon `{name}` has {got} vertices, need at least 3")]
    TooFewVertices { name: String, got: usize },
    #[error("polygon `{name}` repeats consecutive vertex at index {index}")]
    RepeatedVertex { name: String, index: usize },
    #[error("polygon `{name}` has zero area")]
    ZeroArea { name: String },
    #[error("polygon `{name}` is self-intersecting (edges {edge_a} and {edge_b} touch)")]
    SelfIntersecting {
        name: String,
        edge_a: usize,
        edge_b: usize,
    },
    #[error("degenerate intersection of `{a}` and `{b}` persists after perturbation retry")]
    NumericalDegeneracy { a: String, b: String },
}

/// A named simple polygon in planar meters, ring stored counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarPolygon {
    name: String,
    ring: Vec<[f64; 2]>,
}

impl PlanarPolygon {
    /// Validates the ring (>= 3 vertices, consecutive distinct, nonzero area,
    /// no non-adjacent edge contact) and normalizes orientation to CCW.
    pub fn new(name: impl Into<String>, ring: Vec<[f64; 2]>) -> Result<Self, GeometryError> {
        let name = name.into();
        if ring.len() < 3 {
            return Err(GeometryError::TooFewVertices {
                name,
                got: ring.len(),
            });
        }
        let n = ring.len();
        for i in 0..n {
            let a = ring[i];
            let b = ring[(i + 1) % n];
            if dist(a, b) < 1e-12 {
                return Err(GeometryError::RepeatedVertex { name, index: i });
            }
        }
        let area2 = signed_area2(&ring);
        let scale = coord_scale(&ring);
        if area2.abs() < 1e-12 * scale * scale {
            return Err(GeometryError::ZeroArea { name });
        }
        let mut ring = ring;
        if area2 < 0.0 {
            ring.reverse();
        }
        if let Some((i, j)) = find_self_intersection(&ring) {
            return Err(GeometryError::SelfIntersecting {
                name,
                edge_a: i,
                edge_b: j,
            });
        }
        Ok(Self { name, ring })
    }

    /// Translation preserves validity, so no re-validation is performed.
    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self {
            name: self.name.clone(),
            ring: self.ring.iter().map(|v| [v[0] + dx, v[1] + dy]).collect(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ring(&self) -> &[[f64; 2]] {
        &self.ring
    }

    pub fn bbox(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.ring {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }
}

/// Shoelace area; strictly positive for a valid (CCW) polygon.
pub fn polygon_area(p: &PlanarPolygon) -> f64 {
    signed_area2(&p.ring) / 2.0
}

/// Area-weighted centroid.
pub fn polygon_centroid(p: &PlanarPolygon) -> [f64; 2] {
    centroid_of_ring(&p.ring)
}

/// Even-odd membership; points within [`BOUNDARY_EPS`] of an edge count as inside.
pub fn point_in_polygon(pt: [f64; 2], p: &PlanarPolygon) -> bool {
    ring_contains(pt, &p.ring)
}

/// Area of the intersection of two simple polygons. Zero for disjoint inputs
/// and for shared-edge-only contact.
pub fn polygon_intersection_area(
    p: &PlanarPolygon,
    q: &PlanarPolygon,
) -> Result<f64, GeometryError> {
    let pa = polygon_area(p);
    let qa = polygon_area(q);
    if cyclically_equal(&p.ring, &q.ring) {
        return Ok(pa.min(qa));
    }
    let (plo, phi) = p.bbox();
    let (qlo, qhi) = q.bbox();
    if plo[0] > qhi[0] || qlo[0] > phi[0] || plo[1] > qhi[1] || qlo[1] > phi[1] {
        return Ok(0.0);
    }
    let raw = match clip_area(&p.ring, &q.ring) {
        Some(a) => a,
        None => {
            let pr = perturbed(&p.ring, 0x9e3779b97f4a7c15);
            let qr = perturbed(&q.ring, 0xbf58476d1ce4e5b9);
            match clip_area(&pr, &qr) {
                Some(a) => a,
                None => {
                    return Err(GeometryError::NumericalDegeneracy {
                        a: p.name.clone(),
                        b: q.name.clone(),
                    })
                }
            }
        }
    };
    let clamped = raw.min(pa.min(qa)).max(0.0);
    Ok(if clamped < AREA_SNAP { 0.0 } else { clamped })
}

/// Intersection over union: |P∩Q| / (|P| + |Q| − |P∩Q|), in [0, 1].
pub fn polygon_iou(p: &PlanarPolygon, q: &PlanarPolygon) -> Result<f64, GeometryError> {
    if cyclically_equal(&p.ring, &q.ring) {
        return Ok(1.0);
    }
    let inter = polygon_intersection_area(p, q)?;
    let union = polygon_area(p) + polygon_area(q) - inter;
    Ok((inter / union).clamp(0.0, 1.0))
}

/// Euclidean distance between the two area-weighted centroids.
pub fn centroid_distance(p: &PlanarPolygon, q: &PlanarPolygon) -> f64 {
    let a = polygon_centroid(p);
    let b = polygon_centroid(q);
    dist(a, b)
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Twice the signed shoelace area.
fn signed_area2(ring: &[[f64; 2]]) -> f64 {
    let n = ring.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        s += a[0] * b[1] - b[0] * a[1];
    }
    s
}

fn coord_scale(ring: &[[f64; 2]]) -> f64 {
    ring.iter()
        .map(|v| v[0].abs().max(v[1].abs()))
        .fold(1.0, f64::max)
}

fn centroid_of_ring(ring: &[[f64; 2]]) -> [f64; 2] {
    let n = ring.len();
    let mut a2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let p = ring[i];
        let q = ring[(i + 1) % n];
        let w = p[0] * q[1] - q[0] * p[1];
        a2 += w;
        cx += (p[0] + q[0]) * w;
        cy += (p[1] + q[1]) * w;
    }
    [cx / (3.0 * a2), cy / (3.0 * a2)]
}

fn point_on_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2], eps: f64) -> bool {
    let len = dist(a, b);
    if len == 0.0 {
        return dist(p, a) <= eps;
    }
    let c = cross(a, b, p);
    if c.abs() > eps * len {
        return false;
    }
    let t = (p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1]);
    t >= -eps * len && t <= len * len + eps * len
}

fn ring_contains(pt: [f64; 2], ring: &[[f64; 2]]) -> bool {
    let n = ring.len();
    for i in 0..n {
        if point_on_segment(pt, ring[i], ring[(i + 1) % n], BOUNDARY_EPS) {
            return true;
        }
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let a = ring[i];
        let b = ring[j];
        if (a[1] > pt[1]) != (b[1] > pt[1]) {
            let x_int = a[0] + (pt[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if pt[0] < x_int {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Any contact (crossing, touching, collinear overlap) between two closed
/// segments, endpoints included.
fn segments_touch(p1: [f64; 2], p2: [f64; 2], p3: [f64; 2], p4: [f64; 2]) -> bool {
    let d1 = cross(p3, p4, p1);
    let d2 = cross(p3, p4, p2);
    let d3 = cross(p1, p2, p3);
    let d4 = cross(p1, p2, p4);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && point_on_segment(p1, p3, p4, 0.0))
        || (d2 == 0.0 && point_on_segment(p2, p3, p4, 0.0))
        || (d3 == 0.0 && point_on_segment(p3, p1, p2, 0.0))
        || (d4 == 0.0 && point_on_segment(p4, p1, p2, 0.0))
}

/// Returns the first offending edge pair if the ring is not simple.
/// Adjacent edges may meet only at their shared vertex; a zero-angle spike
/// counts as self-contact.
pub(crate) fn find_self_intersection(ring: &[[f64; 2]]) -> Option<(usize, usize)> {
    let n = ring.len();
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        let c = ring[(i + 2) % n];
        if cross(a, b, c) == 0.0 {
            let dot = (a[0] - b[0]) * (c[0] - b[0]) + (a[1] - b[1]) * (c[1] - b[1]);
            if dot > 0.0 {
                return Some((i, (i + 1) % n));
            }
        }
    }
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_touch(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n]) {
                return Some((i, j));
            }
        }
    }
    None
}

fn cyclically_equal(a: &[[f64; 2]], b: &[[f64; 2]]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let n = a.len();
    'offsets: for off in 0..n {
        for i in 0..n {
            if a[i] != b[(i + off) % n] {
                continue 'offsets;
            }
        }
        return true;
    }
    false
}

/// Splitmix64-based deterministic vertex jitter, ~[`PERTURB_SCALE`] meters.
fn perturbed(ring: &[[f64; 2]], salt: u64) -> Vec<[f64; 2]> {
    ring.iter()
        .enumerate()
        .map(|(i, v)| {
            let mut z = (i as u64).wrapping_add(salt);
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^= z >> 31;
            let jx = ((z >> 32) as f64 / 4294967296.0 - 0.5) * 2.0 * PERTURB_SCALE;
            let jy = ((z & 0xffff_ffff) as f64 / 4294967296.0 - 0.5) * 2.0 * PERTURB_SCALE;
            [v[0] + jx, v[1] + jy]
        })
        .collect()
}

fn clip_area(p: &[[f64; 2]], q: &[[f64; 2]]) -> Option<f64> {
    let tp = triangulate(p)?;
    let tq = triangulate(q)?;
    let mut total = 0.0;
    for a in &tp {
        for b in &tq {
            total += triangle_clip_area(a, b);
        }
    }
    Some(total)
}

/// Ear-clipping triangulation of a CCW simple ring. Collinear straight-through
/// vertices are dropped as zero-area ears; returns `None` when no ear can be
/// carved (degenerate input, caller perturbs and retries).
fn triangulate(ring: &[[f64; 2]]) -> Option<Vec<[[f64; 2]; 3]>> {
    let n = ring.len();
    let scale = coord_scale(ring);
    let eps_area = 1e-12 * scale * scale;
    let mut idx: Vec<usize> = (0..n).collect();
    let mut tris = Vec::with_capacity(n.saturating_sub(2));
    while idx.len() > 3 {
        let m = idx.len();
        let mut carved = false;
        for k in 0..m {
            let ia = idx[(k + m - 1) % m];
            let ib = idx[k];
            let ic = idx[(k + 1) % m];
            let (a, b, c) = (ring[ia], ring[ib], ring[ic]);
            let cr = cross(a, b, c);
            if cr.abs() <= eps_area {
                let dot = (b[0] - a[0]) * (c[0] - b[0]) + (b[1] - a[1]) * (c[1] - b[1]);
                if dot > 0.0 {
                    idx.remove(k);
                    carved = true;
                    break;
                }
                continue;
            }
            if cr < 0.0 {
                continue;
            }
            let blocked = idx.iter().any(|&o| {
                o != ia && o != ib && o != ic && point_in_triangle(ring[o], a, b, c, eps_area)
            });
            if !blocked {
                tris.push([a, b, c]);
                idx.remove(k);
                carved = true;
                break;
            }
        }
        if !carved {
            let rem: Vec<[f64; 2]> = idx.iter().map(|&i| ring[i]).collect();
            if signed_area2(&rem).abs() <= 2.0 * eps_area * rem.len() as f64 {
                return Some(tris);
            }
            return None;
        }
    }
    tris.push([ring[idx[0]], ring[idx[1]], ring[idx[2]]]);
    Some(tris)
}

/// Inclusive membership for ear blocking: boundary contact blocks the ear.
fn point_in_triangle(p: [f64; 2], a: [f64; 2], b: [f64; 2], c: [f64; 2], eps: f64) -> bool {
    cross(a, b, p) >= -eps && cross(b, c, p) >= -eps && cross(c, a, p) >= -eps
}

/// Area of triangle `sub` clipped to CCW triangle `clip` (Sutherland–Hodgman).
fn triangle_clip_area(sub: &[[f64; 2]; 3], clip: &[[f64; 2]; 3]) -> f64 {
    let mut poly: Vec<[f64; 2]> = sub.to_vec();
    for e in 0..3 {
        let a = clip[e];
        let b = clip[(e + 1) % 3];
        poly = clip_halfplane(&poly, a, b);
        if poly.len() < 3 {
            return 0.0;
        }
    }
    (signed_area2(&poly) / 2.0).max(0.0)
}

fn clip_halfplane(poly: &[[f64; 2]], a: [f64; 2], b: [f64; 2]) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let n = poly.len();
    for i in 0..n {
        let s = poly[i];
        let e = poly[(i + 1) % n];
        let sc = cross(a, b, s);
        let ec = cross(a, b, e);
        let s_in = sc >= 0.0;
        let e_in = ec >= 0.0;
        match (s_in, e_in) {
            (true, true) => out.push(e),
            (true, false) | (false, true) => {
                let denom = sc - ec;
                if denom.abs() > 0.0 {
                    let t = sc / denom;
                    out.push([s[0] + (e[0] - s[0]) * t, s[1] + (e[1] - s[1]) * t]);
                }
                if e_in {
                    out.push(e);
                }
            }
            (false, false) => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(name: &str, x: f64, y: f64, side: f64) -> PlanarPolygon {
        PlanarPolygon::new(
            name,
            vec![[x, y], [x + side, y], [x + side, y + side], [x, y + side]],
        )
        .unwrap()
    }

    fn l_shape() -> PlanarPolygon {
        // [0,2]x[0,1] plus [0,1]x[1,2]
        PlanarPolygon::new(
            "L",
            vec![
                [0.0, 0.0],
                [2.0, 0.0],
                [2.0, 1.0],
                [1.0, 1.0],
                [1.0, 2.0],
                [0.0, 2.0],
            ],
        )
        .unwrap()
    }

    #[test]
    fn area_unit_square() {
        assert_eq!(polygon_area(&square("s", 0.0, 0.0, 1.0)), 1.0);
    }

    #[test]
    fn area_right_triangle() {
        let t = PlanarPolygon::new("t", vec![[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]]).unwrap();
        assert_eq!(polygon_area(&t), 2.0);
    }

    #[test]
    fn area_regular_hexagon() {
        let ring: Vec<[f64; 2]> = (0..6)
            .map(|i| {
                let th = std::f64::consts::PI / 3.0 * i as f64;
                [th.cos(), th.sin()]
            })
            .collect();
        let hex = PlanarPolygon::new("hex", ring).unwrap();
        let expect = 3.0 * 3.0_f64.sqrt() / 2.0;
        assert!((polygon_area(&hex) - expect).abs() < 1e-9);
    }

    #[test]
    fn cw_input_is_normalized_ccw() {
        let p =
            PlanarPolygon::new("cw", vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!(polygon_area(&p) > 0.0);
    }

    #[test]
    fn centroid_unit_square() {
        let c = polygon_centroid(&square("s", 0.0, 0.0, 1.0));
        assert_eq!(c, [0.5, 0.5]);
    }

    #[test]
    fn centroid_translation_equivariant() {
        let p = l_shape();
        let q = p.translated(3.25, -1.5);
        let cp = polygon_centroid(&p);
        let cq = polygon_centroid(&q);
        assert!((cq[0] - cp[0] - 3.25).abs() < 1e-12);
        assert!((cq[1] - cp[1] + 1.5).abs() < 1e-12);
    }

    #[test]
    fn centroid_l_shape_by_decomposition() {
        // rect [0,2]x[0,1]: area 2, centroid (1, 0.5); rect [0,1]x[1,2]: area 1,
        // centroid (0.5, 1.5) -> weighted centroid (5/6, 5/6)
        let c = polygon_centroid(&l_shape());
        assert!((c[0] - 5.0 / 6.0).abs() < 1e-12);
        assert!((c[1] - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn membership_basic() {
        let s = square("s", 0.0, 0.0, 1.0);
        assert!(point_in_polygon([0.5, 0.5], &s));
        assert!(!point_in_polygon([2.0, 2.0], &s));
    }

    #[test]
    fn membership_boundary_counts_inside() {
        let s = square("s", 0.0, 0.0, 1.0);
        assert!(point_in_polygon([1.0, 0.5], &s));
        assert!(point_in_polygon([0.0, 0.0], &s));
    }

    #[test]
    fn intersection_identical_squares() {
        let a = square("a", 0.0, 0.0, 1.0);
        let b = square("b", 0.0, 0.0, 1.0);
        assert_eq!(polygon_intersection_area(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn intersection_offset_squares() {
        let a = square("a", 0.0, 0.0, 1.0);
        let b = square("b", 0.5, 0.0, 1.0);
        let i = polygon_intersection_area(&a, &b).unwrap();
        assert!((i - 0.5).abs() < 1e-12);
    }

    #[test]
    fn intersection_disjoint_is_exactly_zero() {
        let a = square("a", 0.0, 0.0, 1.0);
        let b = square("b", 5.0, 5.0, 1.0);
        assert_eq!(polygon_intersection_area(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn intersection_shared_edge_only_is_zero() {
        let a = square("a", 0.0, 0.0, 1.0);
        let b = square("b", 1.0, 0.0, 1.0);
        assert_eq!(polygon_intersection_area(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn intersection_nonconvex_l_vs_square() {
        // Square [0.5,1.5]^2 covers [0.5,1.5]x[0.5,1] of the L base plus
        // [0.5,1]x[1,1.5] of the upright: 0.5 + 0.25
        let l = l_shape();
        let s = square("s", 0.5, 0.5, 1.0);
        let i = polygon_intersection_area(&l, &s).unwrap();
        assert!((i - 0.75).abs() < 1e-12);
    }

    #[test]
    fn iou_identical_exact_one_any_start_index() {
        let base = l_shape();
        let ring = base.ring().to_vec();
        for off in 0..ring.len() {
            let rot: Vec<[f64; 2]> = (0..ring.len())
                .map(|i| ring[(i + off) % ring.len()])
                .collect();
            let q = PlanarPolygon::new("rot", rot).unwrap();
            assert_eq!(polygon_iou(&base, &q).unwrap(), 1.0);
        }
    }

    #[test]
    fn iou_offset_squares_analytic() {
        let a = square("a", 0.0, 0.0, 1.0);
        let b = square("b", 0.5, 0.0, 1.0);
        let v = polygon_iou(&a, &b).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn iou_disjoint_zero() {
        let a = square("a", 0.0, 0.0, 1.0);
        let b = square("b", 9.0, 9.0, 1.0);
        assert_eq!(polygon_iou(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn centroid_distance_three_four_five() {
        let a = square("a", 0.0, 0.0, 1.0);
        let b = a.translated(3.0, 4.0);
        assert!((centroid_distance(&a, &b) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn centroid_distance_rotation_invariant() {
        let a = l_shape();
        let b = a.translated(2.0, 1.0);
        let d0 = centroid_distance(&a, &b);
        let th: f64 = 0.7343;
        let rot = |p: &PlanarPolygon| {
            let ring = p
                .ring()
                .iter()
                .map(|v| {
                    [
                        v[0] * th.cos() - v[1] * th.sin(),
                        v[0] * th.sin() + v[1] * th.cos(),
                    ]
                })
                .collect();
            PlanarPolygon::new(p.name(), ring).unwrap()
        };
        let d1 = centroid_distance(&rot(&a), &rot(&b));
        assert!((d0 - d1).abs() < 1e-9);
    }

    #[test]
    fn construction_rejects_degenerate() {
        assert!(matches!(
            PlanarPolygon::new("p", vec![[0.0, 0.0], [1.0, 0.0]]),
            Err(GeometryError::TooFewVertices { .. })
        ));
        assert!(matches!(
            PlanarPolygon::new("p", vec![[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]]),
            Err(GeometryError::RepeatedVertex { .. })
        ));
        assert!(matches!(
            PlanarPolygon::new("p", vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]),
            Err(GeometryError::ZeroArea { .. })
        ));
        // symmetric bowtie cancels to zero area
        assert!(matches!(
            PlanarPolygon::new("p", vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]),
            Err(GeometryError::ZeroArea { .. })
        ));
        // asymmetric bowtie has nonzero area and crossing edges
        assert!(matches!(
            PlanarPolygon::new("p", vec![[0.0, 0.0], [4.0, 0.0], [1.0, 2.0], [3.0, 2.0]]),
            Err(GeometryError::SelfIntersecting { .. })
        ));
    }

    #[test]
    fn collinear_chain_triangulates() {
        // redundant mid-edge vertex on a straight wall
        let p = PlanarPolygon::new(
            "wall",
            vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]],
        )
        .unwrap();
        let s = square("s", 0.5, 0.5, 1.0);
        let i = polygon_intersection_area(&p, &s).unwrap();
        assert!((i - 1.0).abs() < 1e-12);
    }
}
