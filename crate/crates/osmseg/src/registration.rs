//! Global affine registration from user-supplied control points.
//!
//! Fits the transform mapping Mercator meters into the point-cloud model
//! frame by least squares over correspondence pairs. The full 6-parameter
//! affine is the default; a 4-parameter similarity (uniform scale, rotation,
//! translation) is available for sensitivity studies. Solves use normal
//! equations with condition monitoring, which is ample at control-point
//! counts (a few dozen pairs).

use crate::geometry::{GeometryError, PlanarPolygon};
use crate::mercator::MercatorXY;
use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Condition-number threshold on the normal matrix beyond which the source
/// configuration is reported as rank deficient.
pub const CONDITION_LIMIT: f64 = 1e10;

#[derive(Debug, Error)]
pub enum RegistrationError {
    #[error("need at least 3 control pairs, got {0}")]
    InsufficientPairs(usize),
    #[error("source points are collinear or near-collinear (condition {0:.3e} exceeds {CONDITION_LIMIT:.0e})")]
    CollinearSources(f64),
    #[error("control point file: line {line}: {reason}")]
    BadControlFile { line: usize, reason: String },
    #[error("fitted transform maps a polygon onto degenerate geometry: {0}")]
    DegenerateImage(#[from] GeometryError),
}

/// One manual correspondence: a projected OSM location and where it sits in
/// the model frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlPointPair {
    pub source: MercatorXY,
    pub target: [f64; 2],
}

/// 2D affine map `p -> linear * p + translation`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Affine2D {
    /// row-major 2x2 linear part
    pub linear: [[f64; 2]; 2],
    pub translation: [f64; 2],
}

impl Affine2D {
    pub const IDENTITY: Affine2D = Affine2D {
        linear: [[1.0, 0.0], [0.0, 1.0]],
        translation: [0.0, 0.0],
    };

    pub fn determinant(&self) -> f64 {
        self.linear[0][0] * self.linear[1][1] - self.linear[0][1] * self.linear[1][0]
    }

    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        [
            self.linear[0][0] * p[0] + self.linear[0][1] * p[1] + self.translation[0],
            self.linear[1][0] * p[0] + self.linear[1][1] * p[1] + self.translation[1],
        ]
    }

    pub fn inverse(&self) -> Option<Affine2D> {
        let det = self.determinant();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let inv = [
            [self.linear[1][1] / det, -self.linear[0][1] / det],
            [-self.linear[1][0] / det, self.linear[0][0] / det],
        ];
        let t = [
            -(inv[0][0] * self.translation[0] + inv[0][1] * self.translation[1]),
            -(inv[1][0] * self.translation[0] + inv[1][1] * self.translation[1]),
        ];
        Some(Affine2D {
            linear: inv,
            translation: t,
        })
    }

    /// Maps every vertex; output orientation is re-normalized (a reflecting
    /// transform reverses the ring) and simplicity re-validated.
    pub fn apply_to_polygon(&self, poly: &PlanarPolygon) -> Result<PlanarPolygon, GeometryError> {
        let ring = poly.ring().iter().map(|&v| self.apply(v)).collect();
        PlanarPolygon::new(poly.name().to_string(), ring)
    }

    pub fn apply_to_points(&self, pts: &[[f64; 2]]) -> Vec<[f64; 2]> {
        pts.iter().map(|&p| self.apply(p)).collect()
    }
}

/// Which parameterization to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitModel {
    /// 6 parameters: translation, rotation, anisotropic scale, shear.
    #[default]
    Affine,
    /// 4 parameters: translation, rotation, uniform scale.
    Similarity,
}

/// Per-pair residual norms and their root mean square, in model meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub per_pair: Vec<f64>,
    pub rms: f64,
}

/// Least-squares fit of `A * source + t = target` over all pairs.
pub fn estimate_affine(
    pairs: &[ControlPointPair],
    model: FitModel,
) -> Result<(Affine2D, ResidualReport), RegistrationError> {
    if pairs.len() < 3 {
        return Err(RegistrationError::InsufficientPairs(pairs.len()));
    }
    // Solving in a source-centered frame keeps the normal matrix condition
    // number meaningful when coordinates are large (Mercator meters).
    let n = pairs.len() as f64;
    let cx = pairs.iter().map(|p| p.source.x).sum::<f64>() / n;
    let cy = pairs.iter().map(|p| p.source.y).sum::<f64>() / n;

    let affine = match model {
        FitModel::Affine => fit_affine_centered(pairs, cx, cy)?,
        FitModel::Similarity => fit_similarity_centered(pairs, cx, cy)?,
    };

    let per_pair: Vec<f64> = pairs
        .iter()
        .map(|p| {
            let m = affine.apply([p.source.x, p.source.y]);
            ((m[0] - p.target[0]).powi(2) + (m[1] - p.target[1]).powi(2)).sqrt()
        })
        .collect();
    let rms = (per_pair.iter().map(|r| r * r).sum::<f64>() / n).sqrt();
    Ok((affine, ResidualReport { per_pair, rms }))
}

fn check_condition(singular: &[f64]) -> Result<(), RegistrationError> {
    let smax = singular.iter().cloned().fold(0.0, f64::max);
    let smin = singular.iter().cloned().fold(f64::INFINITY, f64::min);
    let cond = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !cond.is_finite() || cond > CONDITION_LIMIT {
        return Err(RegistrationError::CollinearSources(cond));
    }
    Ok(())
}

fn fit_affine_centered(
    pairs: &[ControlPointPair],
    cx: f64,
    cy: f64,
) -> Result<Affine2D, RegistrationError> {
    let mut nmat = Matrix3::zeros();
    let mut rhs_x = Vector3::zeros();
    let mut rhs_y = Vector3::zeros();
    for p in pairs {
        let row = Vector3::new(p.source.x - cx, p.source.y - cy, 1.0);
        nmat += row * row.transpose();
        rhs_x += row * p.target[0];
        rhs_y += row * p.target[1];
    }
    let svd = nmat.svd(true, true);
    check_condition(svd.singular_values.as_slice())?;
    let bx = svd.solve(&rhs_x, 0.0).expect("svd solve");
    let by = svd.solve(&rhs_y, 0.0).expect("svd solve");
    // un-center: t = t' - L * c
    let linear = [[bx[0], bx[1]], [by[0], by[1]]];
    let translation = [
        bx[2] - (linear[0][0] * cx + linear[0][1] * cy),
        by[2] - (linear[1][0] * cx + linear[1][1] * cy),
    ];
    Ok(Affine2D {
        linear,
        translation,
    })
}

fn fit_similarity_centered(
    pairs: &[ControlPointPair],
    cx: f64,
    cy: f64,
) -> Result<Affine2D, RegistrationError> {
    // unknowns: (a, b, tx, ty) with x' = a x - b y + tx, y' = b x + a y + ty
    let mut nmat = Matrix4::zeros();
    let mut rhs = Vector4::zeros();
    for p in pairs {
        let (sx, sy) = (p.source.x - cx, p.source.y - cy);
        let row_x = Vector4::new(sx, -sy, 1.0, 0.0);
        let row_y = Vector4::new(sy, sx, 0.0, 1.0);
        nmat += row_x * row_x.transpose() + row_y * row_y.transpose();
        rhs += row_x * p.target[0] + row_y * p.target[1];
    }
    let svd = nmat.svd(true, true);
    check_condition(svd.singular_values.as_slice())?;
    let b = svd.solve(&rhs, 0.0).expect("svd solve");
    let linear = [[b[0], -b[1]], [b[1], b[0]]];
    let translation = [
        b[2] - (linear[0][0] * cx + linear[0][1] * cy),
        b[3] - (linear[1][0] * cx + linear[1][1] * cy),
    ];
    Ok(Affine2D {
        linear,
        translation,
    })
}

/// One row of the control-point CSV, before projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlPointRecord {
    pub lon: f64,
    pub lat: f64,
    pub model_x: f64,
    pub model_y: f64,
}

/// Parses `lon,lat,model_x,model_y` CSV with a header row.
pub fn parse_control_points(text: &str) -> Result<Vec<ControlPointRecord>, RegistrationError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (idx == 0 && line.chars().next().is_some_and(|c| c.is_alphabetic())) {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 4 {
            return Err(RegistrationError::BadControlFile {
                line: idx + 1,
                reason: format!("expected 4 columns, found {}", cols.len()),
            });
        }
        let mut vals = [0.0f64; 4];
        for (k, c) in cols.iter().enumerate() {
            vals[k] = c.parse().map_err(|_| RegistrationError::BadControlFile {
                line: idx + 1,
                reason: format!("column {} is not a number: `{c}`", k + 1),
            })?;
        }
        out.push(ControlPointRecord {
            lon: vals[0],
            lat: vals[1],
            model_x: vals[2],
            model_y: vals[3],
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(sx: f64, sy: f64, tx: f64, ty: f64) -> ControlPointPair {
        ControlPointPair {
            source: MercatorXY { x: sx, y: sy },
            target: [tx, ty],
        }
    }

    fn rotation_scale(theta: f64, scale: f64, t: [f64; 2]) -> Affine2D {
        Affine2D {
            linear: [
                [scale * theta.cos(), -scale * theta.sin()],
                [scale * theta.sin(), scale * theta.cos()],
            ],
            translation: t,
        }
    }

    #[test]
    fn identity_from_fixed_pairs() {
        let pairs = [
            pair(0.0, 0.0, 0.0, 0.0),
            pair(10.0, 0.0, 10.0, 0.0),
            pair(0.0, 7.0, 0.0, 7.0),
        ];
        let (a, rep) = estimate_affine(&pairs, FitModel::Affine).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((a.linear[i][j] - expect).abs() < 1e-12);
            }
            assert!(a.translation[i].abs() < 1e-12);
        }
        assert!(rep.rms < 1e-12);
    }

    #[test]
    fn recovers_known_transform_exactly() {
        let truth = rotation_scale(17f64.to_radians(), 1.3, [5.0, -2.0]);
        let sources = [
            [0.0, 0.0],
            [25.0, 3.0],
            [-11.0, 19.0],
            [4.0, -30.0],
            [17.5, 12.25],
        ];
        let pairs: Vec<ControlPointPair> = sources
            .iter()
            .map(|&s| {
                let t = truth.apply(s);
                pair(s[0], s[1], t[0], t[1])
            })
            .collect();
        for model in [FitModel::Affine, FitModel::Similarity] {
            let (a, rep) = estimate_affine(&pairs, model).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    assert!(
                        (a.linear[i][j] - truth.linear[i][j]).abs() < 1e-9,
                        "{model:?} linear[{i}][{j}]"
                    );
                }
                assert!((a.translation[i] - truth.translation[i]).abs() < 1e-9);
            }
            assert!(rep.rms < 1e-9);
        }
    }

    #[test]
    fn insufficient_pairs_rejected() {
        let pairs = [pair(0.0, 0.0, 0.0, 0.0), pair(1.0, 0.0, 1.0, 0.0)];
        assert!(matches!(
            estimate_affine(&pairs, FitModel::Affine),
            Err(RegistrationError::InsufficientPairs(2))
        ));
    }

    #[test]
    fn collinear_sources_rejected() {
        let pairs = [
            pair(0.0, 0.0, 0.0, 0.0),
            pair(1.0, 1.0, 1.0, 1.0),
            pair(2.0, 2.0, 2.0, 2.0),
            pair(3.0, 3.0, 3.0, 3.0),
        ];
        assert!(matches!(
            estimate_affine(&pairs, FitModel::Affine),
            Err(RegistrationError::CollinearSources(_))
        ));
    }

    #[test]
    fn estimation_invariant_to_pair_order() {
        let truth = rotation_scale(-0.4, 0.85, [100.0, 250.0]);
        let sources = [
            [3.0, 1.0],
            [40.0, -2.0],
            [-7.0, 33.0],
            [12.0, 12.0],
            [0.5, -19.0],
        ];
        let mut pairs: Vec<ControlPointPair> = sources
            .iter()
            .map(|&s| {
                let t = truth.apply(s);
                pair(s[0], s[1], t[0], t[1])
            })
            .collect();
        let (a1, _) = estimate_affine(&pairs, FitModel::Affine).unwrap();
        pairs.reverse();
        let (a2, _) = estimate_affine(&pairs, FitModel::Affine).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((a1.linear[i][j] - a2.linear[i][j]).abs() < 1e-12);
            }
            assert!((a1.translation[i] - a2.translation[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn adding_exact_pair_does_not_raise_rms() {
        let truth = rotation_scale(0.2, 1.1, [3.0, -4.0]);
        let mut pairs: Vec<ControlPointPair> = [[0.0, 0.0], [10.0, 1.0], [2.0, 8.0], [-5.0, 4.0]]
            .iter()
            .map(|&s| {
                let t = truth.apply(s);
                pair(s[0], s[1], t[0], t[1])
            })
            .collect();
        // perturb one target to create nonzero residual
        pairs[1].target[0] += 0.05;
        let (a, before) = estimate_affine(&pairs, FitModel::Affine).unwrap();
        let extra = a.apply([20.0, -6.0]);
        pairs.push(pair(20.0, -6.0, extra[0], extra[1]));
        let (_, after) = estimate_affine(&pairs, FitModel::Affine).unwrap();
        assert!(after.rms <= before.rms + 1e-12);
    }

    #[test]
    fn apply_affine_identity_and_translation() {
        let square =
            PlanarPolygon::new("s", vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let same = Affine2D::IDENTITY.apply_to_polygon(&square).unwrap();
        assert_eq!(same.ring(), square.ring());

        let shift = Affine2D {
            linear: [[1.0, 0.0], [0.0, 1.0]],
            translation: [3.0, 4.0],
        };
        let moved = shift.apply_to_polygon(&square).unwrap();
        let c0 = crate::geometry::polygon_centroid(&square);
        let c1 = crate::geometry::polygon_centroid(&moved);
        assert!((c1[0] - c0[0] - 3.0).abs() < 1e-12);
        assert!((c1[1] - c0[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_scale_quadruples_area() {
        let square =
            PlanarPolygon::new("s", vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let scale2 = Affine2D {
            linear: [[2.0, 0.0], [0.0, 2.0]],
            translation: [0.0, 0.0],
        };
        let big = scale2.apply_to_polygon(&square).unwrap();
        assert!((crate::geometry::polygon_area(&big) - 4.0).abs() < 1e-9);
    }

    #[test]
    fn reflecting_transform_renormalizes_orientation() {
        let square =
            PlanarPolygon::new("s", vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let mirror = Affine2D {
            linear: [[-1.0, 0.0], [0.0, 1.0]],
            translation: [0.0, 0.0],
        };
        let flipped = mirror.apply_to_polygon(&square).unwrap();
        assert!(crate::geometry::polygon_area(&flipped) > 0.0);
    }

    #[test]
    fn control_csv_parses_and_rejects() {
        let text = "lon,lat,model_x,model_y\n-6.25532,53.34380,0.0,0.0\n-6.25,53.35,120.5,-40.25\n";
        let rows = parse_control_points(text).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].model_x, 120.5);

        assert!(matches!(
            parse_control_points("lon,lat,model_x,model_y\n1,2,3\n"),
            Err(RegistrationError::BadControlFile { line: 2, .. })
        ));
    }

    #[test]
    fn inverse_round_trips() {
        let a = rotation_scale(0.31, 0.6, [-17.0, 42.0]);
        let inv = a.inverse().unwrap();
        let p = [12.5, -3.75];
        let q = inv.apply(a.apply(p));
        assert!((q[0] - p[0]).abs() < 1e-9);
        assert!((q[1] - p[1]).abs() < 1e-9);
    }
}
