//! WGS84 ↔ ellipsoidal Mercator conversion.
//!
//! The forward projection is the ellipsoidal (EPSG:3395-style) Mercator on
//! the WGS84 ellipsoid: x is linear in longitude, y corrects the spherical
//! log-tangent term by the eccentricity factor. The spherical variant is off
//! by tens of kilometers in y at mid latitudes and does not reproduce known
//! reference coordinates, so it is not offered.

use crate::geometry::{GeometryError, PlanarPolygon};
use crate::osm::GeoFootprint;
use thiserror::Error;

/// WGS84 semi-major axis in meters.
pub const SEMI_MAJOR_AXIS: f64 = 6_378_137.0;
/// WGS84 first eccentricity.
pub const ECCENTRICITY: f64 = 0.0818191908426215;
/// Latitudes at or beyond this are rejected (tan singularity guard).
pub const MAX_LATITUDE_DEG: f64 = 89.5;

#[derive(Debug, Error)]
pub enum ProjectionError {
    #[error("latitude {0} out of range (|lat| must be < {MAX_LATITUDE_DEG})")]
    LatitudeOutOfRange(f64),
    #[error("longitude {0} out of range (|lon| must be <= 180)")]
    LongitudeOutOfRange(f64),
    #[error("inverse projection did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("projected footprint is not a valid polygon: {0}")]
    InvalidPolygon(#[from] GeometryError),
}

/// A WGS84 geographic coordinate in degrees, validated for projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoCoord {
    longitude: f64,
    latitude: f64,
}

impl GeoCoord {
    pub fn new(longitude: f64, latitude: f64) -> Result<Self, ProjectionError> {
        if !(longitude.is_finite() && longitude.abs() <= 180.0) {
            return Err(ProjectionError::LongitudeOutOfRange(longitude));
        }
        if !(latitude.is_finite() && latitude.abs() < MAX_LATITUDE_DEG) {
            return Err(ProjectionError::LatitudeOutOfRange(latitude));
        }
        Ok(Self {
            longitude,
            latitude,
        })
    }

    pub fn longitude(&self) -> f64 {
        self.longitude
    }

    pub fn latitude(&self) -> f64 {
        self.latitude
    }
}

/// Planar Mercator coordinate in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MercatorXY {
    pub x: f64,
    pub y: f64,
}

/// Forward ellipsoidal Mercator:
/// x = a·λ, y = a·ln( tan(π/4 + φ/2) · ((1 − e·sinφ)/(1 + e·sinφ))^(e/2) ).
///
/// The spherical term is evaluated as asinh(tan φ), which is the same
/// function but exact at the equator and fully conditioned near the poles
/// (ln∘tan loses nothing, while atanh(sin φ) would amplify one ulp of the
/// sine to meters at high latitude).
pub fn wgs84_to_mercator(g: GeoCoord) -> MercatorXY {
    let lam = g.longitude.to_radians();
    let phi = g.latitude.to_radians();
    let es = ECCENTRICITY * phi.sin();
    let x = SEMI_MAJOR_AXIS * lam;
    let y = SEMI_MAJOR_AXIS * (phi.tan().asinh() - ECCENTRICITY * es.atanh());
    MercatorXY { x, y }
}

const INVERSE_MAX_ITERATIONS: usize = 25;

/// Inverse projection by fixed-point iteration on latitude, in the form
/// matched to the forward evaluation: φ ← atan( sinh( y/a + e·atanh(e·sinφ) ) ).
pub fn mercator_to_wgs84(m: MercatorXY) -> Result<GeoCoord, ProjectionError> {
    let lon = (m.x / SEMI_MAJOR_AXIS).to_degrees();
    let q = m.y / SEMI_MAJOR_AXIS;
    let mut phi = q.sinh().atan();
    let mut converged = false;
    // y sensitivity grows as a/cos(phi), so the iterate must reach the
    // floating-point fixed point: after entering the 1e-12 neighborhood,
    // polish until the update is exactly zero or three more steps ran
    // (contraction is ~e^2 per step, which bottoms out at one ulp).
    let mut polish = 0;
    for _ in 0..INVERSE_MAX_ITERATIONS {
        let es = ECCENTRICITY * phi.sin();
        let next = (q + ECCENTRICITY * es.atanh()).sinh().atan();
        let delta = (next - phi).abs();
        phi = next;
        if delta == 0.0 {
            converged = true;
            break;
        }
        if delta < 1e-12 {
            polish += 1;
            if polish >= 3 {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(ProjectionError::NoConvergence(INVERSE_MAX_ITERATIONS));
    }
    GeoCoord::new(lon, phi.to_degrees())
}

/// Projects every vertex of a footprint, preserving name and vertex count.
pub fn project_footprint(f: &GeoFootprint) -> Result<PlanarPolygon, ProjectionError> {
    let mut ring = Vec::with_capacity(f.ring.len());
    for &[lon, lat] in &f.ring {
        let m = wgs84_to_mercator(GeoCoord::new(lon, lat)?);
        ring.push([m.x, m.y]);
    }
    Ok(PlanarPolygon::new(f.name.clone(), ring)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference pair: Dublin city centre, checked against an independent
    // ellipsoidal Mercator implementation.
    const REF_LON: f64 = -6.25532;
    const REF_LAT: f64 = 53.34380;
    const REF_X: f64 = -696339.0371489801;
    const REF_Y: f64 = 7012543.77625507;

    #[test]
    fn forward_matches_reference_pair() {
        let m = wgs84_to_mercator(GeoCoord::new(REF_LON, REF_LAT).unwrap());
        assert!((m.x - REF_X).abs() < 1.0, "x off by {}", m.x - REF_X);
        assert!((m.y - REF_Y).abs() < 1.0, "y off by {}", m.y - REF_Y);
    }

    #[test]
    fn forward_origin() {
        let m = wgs84_to_mercator(GeoCoord::new(0.0, 0.0).unwrap());
        assert_eq!(m.x, 0.0);
        assert_eq!(m.y, 0.0);
    }

    #[test]
    fn forward_odd_in_latitude() {
        let phi = 53.3438;
        let north = wgs84_to_mercator(GeoCoord::new(10.0, phi).unwrap());
        let south = wgs84_to_mercator(GeoCoord::new(10.0, -phi).unwrap());
        assert!((north.y + south.y).abs() < 1e-9);
        assert_eq!(north.x, south.x);
    }

    #[test]
    fn x_linear_in_longitude() {
        let (l1, l2) = (37.25, -92.5);
        let x1 = wgs84_to_mercator(GeoCoord::new(l1, 10.0).unwrap()).x;
        let x2 = wgs84_to_mercator(GeoCoord::new(l2, 10.0).unwrap()).x;
        let sum = wgs84_to_mercator(GeoCoord::new(l1 + l2, 10.0).unwrap()).x;
        assert!(((x1 + x2 - sum) / sum).abs() < 1e-9);
    }

    #[test]
    fn y_strictly_increasing_in_latitude() {
        let mut prev = f64::NEG_INFINITY;
        for i in -894..=894 {
            let lat = i as f64 / 10.0;
            let y = wgs84_to_mercator(GeoCoord::new(0.0, lat).unwrap()).y;
            assert!(y > prev);
            prev = y;
        }
    }

    #[test]
    fn inverse_of_reference_pair() {
        let g = mercator_to_wgs84(MercatorXY { x: REF_X, y: REF_Y }).unwrap();
        // forward error is sub-millimeter, so the recovered geographic
        // coordinate matches to well under 1e-8 degrees
        assert!((g.longitude() - REF_LON).abs() < 1e-8);
        assert!((g.latitude() - REF_LAT).abs() < 1e-8);
    }

    #[test]
    fn inverse_origin() {
        let g = mercator_to_wgs84(MercatorXY { x: 0.0, y: 0.0 }).unwrap();
        assert_eq!(g.longitude(), 0.0);
        assert_eq!(g.latitude(), 0.0);
    }

    #[test]
    fn project_footprint_preserves_name_and_count() {
        let f = crate::osm::GeoFootprint {
            name: "Museum Building".into(),
            ring: vec![
                [REF_LON, REF_LAT],
                [REF_LON + 0.0006, REF_LAT],
                [REF_LON + 0.0006, REF_LAT + 0.0004],
                [REF_LON, REF_LAT + 0.0004],
            ],
        };
        let poly = project_footprint(&f).unwrap();
        assert_eq!(poly.name(), "Museum Building");
        assert_eq!(poly.ring().len(), 4);
        let first = poly.ring()[0];
        assert!((first[0] - REF_X).abs() < 1.0);
        assert!((first[1] - REF_Y).abs() < 1.0);
    }

    #[test]
    fn project_footprint_propagates_latitude_error() {
        let f = crate::osm::GeoFootprint {
            name: "polar".into(),
            ring: vec![[0.0, 89.6], [0.1, 89.6], [0.1, 89.7]],
        };
        assert!(matches!(
            project_footprint(&f),
            Err(ProjectionError::LatitudeOutOfRange(_))
        ));
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(
            GeoCoord::new(0.0, 89.6),
            Err(ProjectionError::LatitudeOutOfRange(_))
        ));
        assert!(matches!(
            GeoCoord::new(181.0, 0.0),
            Err(ProjectionError::LongitudeOutOfRange(_))
        ));
    }
}
