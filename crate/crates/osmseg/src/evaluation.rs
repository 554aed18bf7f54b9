//! Scoring of footprint positions against ground-truth polygons and
//! aggregation into summary statistics.
//!
//! The median convention is: middle element for odd counts, midpoint of the
//! two central order statistics for even counts.

use crate::geometry::{centroid_distance, polygon_iou, GeometryError, PlanarPolygon};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error("cannot aggregate an empty metrics list")]
    EmptyInput,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("report parse: line {line}: {reason}")]
    BadReport { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildingMetrics {
    pub name: String,
    pub iou: f64,
    pub centroid_dist: f64,
}

/// Echo of the pipeline parameters a report was produced under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub radius: f64,
    pub step: f64,
    pub cell_size: f64,
    pub min_points: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub buildings: Vec<BuildingMetrics>,
    pub mean_iou: f64,
    pub median_iou: f64,
    pub mean_dist: f64,
    pub median_dist: f64,
    pub config: ReportConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Polygon IoU plus centroid distance for one candidate/truth pair.
pub fn evaluate_building(
    candidate: &PlanarPolygon,
    truth: &PlanarPolygon,
) -> Result<BuildingMetrics, EvaluationError> {
    Ok(BuildingMetrics {
        name: candidate.name().to_string(),
        iou: polygon_iou(candidate, truth)?,
        centroid_dist: centroid_distance(candidate, truth),
    })
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

pub fn aggregate(
    metrics: Vec<BuildingMetrics>,
    config: ReportConfig,
) -> Result<EvaluationReport, EvaluationError> {
    if metrics.is_empty() {
        return Err(EvaluationError::EmptyInput);
    }
    let ious: Vec<f64> = metrics.iter().map(|m| m.iou).collect();
    let dists: Vec<f64> = metrics.iter().map(|m| m.centroid_dist).collect();
    Ok(EvaluationReport {
        mean_iou: mean(&ious),
        median_iou: median(&ious),
        mean_dist: mean(&dists),
        median_dist: median(&dists),
        buildings: metrics,
        config,
    })
}

fn csv_quote(name: &str) -> String {
    if name.contains(',') || name.contains('"') || name.contains('\n') {
        format!("\"{}\"", name.replace('"', "\"\""))
    } else {
        name.to_string()
    }
}

/// Renders a report losslessly. JSON nests the whole structure; CSV is flat
/// with one row per building and aggregate rows suffixed MEAN/MEDIAN.
pub fn render_report(report: &EvaluationReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let c = report.config;
            let mut out = format!(
                "# config radius={} step={} cell_size={} min_points={}\n",
                c.radius, c.step, c.cell_size, c.min_points
            );
            out.push_str("name,iou,centroid_dist\n");
            for m in &report.buildings {
                let _ = writeln!(out, "{},{},{}", csv_quote(&m.name), m.iou, m.centroid_dist);
            }
            let _ = writeln!(out, "MEAN,{},{}", report.mean_iou, report.mean_dist);
            let _ = writeln!(out, "MEDIAN,{},{}", report.median_iou, report.median_dist);
            out
        }
    }
}

pub fn parse_report_json(text: &str) -> Result<EvaluationReport, EvaluationError> {
    serde_json::from_str(text).map_err(|e| EvaluationError::BadReport {
        line: e.line(),
        reason: e.to_string(),
    })
}

fn split_csv_row(line: &str) -> Vec<String> {
    let mut fields = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' if quoted && chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            '"' => quoted = !quoted,
            ',' if !quoted => fields.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    fields.push(cur);
    fields
}

pub fn parse_report_csv(text: &str) -> Result<EvaluationReport, EvaluationError> {
    let mut config: Option<ReportConfig> = None;
    let mut buildings = Vec::new();
    let mut mean_pair: Option<(f64, f64)> = None;
    let mut median_pair: Option<(f64, f64)> = None;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# config ") {
            let mut vals = std::collections::BTreeMap::new();
            for kv in rest.split_whitespace() {
                if let Some((k, v)) = kv.split_once('=') {
                    vals.insert(k.to_string(), v.to_string());
                }
            }
            let get = |k: &str| -> Result<f64, EvaluationError> {
                vals.get(k)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| EvaluationError::BadReport {
                        line: idx + 1,
                        reason: format!("missing config key {k}"),
                    })
            };
            config = Some(ReportConfig {
                radius: get("radius")?,
                step: get("step")?,
                cell_size: get("cell_size")?,
                min_points: get("min_points")? as u32,
            });
            continue;
        }
        if line == "name,iou,centroid_dist" {
            continue;
        }
        let fields = split_csv_row(line);
        if fields.len() != 3 {
            return Err(EvaluationError::BadReport {
                line: idx + 1,
                reason: format!("expected 3 columns, found {}", fields.len()),
            });
        }
        let a: f64 = fields[1].parse().map_err(|_| EvaluationError::BadReport {
            line: idx + 1,
            reason: format!("bad number `{}`", fields[1]),
        })?;
        let b: f64 = fields[2].parse().map_err(|_| EvaluationError::BadReport {
            line: idx + 1,
            reason: format!("bad number `{}`", fields[2]),
        })?;
        match fields[0].as_str() {
            "MEAN" => mean_pair = Some((a, b)),
            "MEDIAN" => median_pair = Some((a, b)),
            name => buildings.push(BuildingMetrics {
                name: name.to_string(),
                iou: a,
                centroid_dist: b,
            }),
        }
    }
    let config = config.ok_or(EvaluationError::BadReport {
        line: 1,
        reason: "missing `# config` line".into(),
    })?;
    let (mean_iou, mean_dist) = mean_pair.ok_or(EvaluationError::BadReport {
        line: 1,
        reason: "missing MEAN row".into(),
    })?;
    let (median_iou, median_dist) = median_pair.ok_or(EvaluationError::BadReport {
        line: 1,
        reason: "missing MEDIAN row".into(),
    })?;
    Ok(EvaluationReport {
        buildings,
        mean_iou,
        median_iou,
        mean_dist,
        median_dist,
        config,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Per-building IoU after global affine registration, 16 campus
    /// buildings (reference values).
    pub const GLOBAL_REGISTRATION_IOUS: [f64; 16] = [
        0.6231, 0.7278, 0.5433, 0.7633, 0.7163, 0.5837, 0.4360, 0.3455, 0.3909, 0.5994, 0.6906,
        0.4867, 0.6919, 0.1562, 0.7050, 0.6155,
    ];

    /// Per-building IoU after adjustment with r = 12 m (reference values).
    pub const ADJUSTED_R12_IOUS: [f64; 16] = [
        0.7588, 0.7889, 0.8878, 0.7820, 0.9463, 0.6654, 0.7283, 0.8485, 0.6690, 0.7845, 0.6642,
        0.7345, 0.8460, 0.7980, 0.8941, 0.8586,
    ];

    fn metrics_from(ious: &[f64]) -> Vec<BuildingMetrics> {
        ious.iter()
            .enumerate()
            .map(|(i, &iou)| BuildingMetrics {
                name: format!("B{i:02}"),
                iou,
                centroid_dist: 0.0,
            })
            .collect()
    }

    fn cfg() -> ReportConfig {
        ReportConfig {
            radius: 12.0,
            step: 0.8,
            cell_size: 1.0,
            min_points: 3,
        }
    }

    #[test]
    fn aggregates_match_global_registration_reference() {
        let rep = aggregate(metrics_from(&GLOBAL_REGISTRATION_IOUS), cfg()).unwrap();
        assert!(
            (rep.mean_iou - 0.567).abs() < 0.001,
            "mean {}",
            rep.mean_iou
        );
        assert!(
            (rep.median_iou - 0.607).abs() < 0.001,
            "median {}",
            rep.median_iou
        );
    }

    #[test]
    fn aggregates_match_adjusted_r12_reference() {
        let rep = aggregate(metrics_from(&ADJUSTED_R12_IOUS), cfg()).unwrap();
        assert!(
            (rep.mean_iou - 0.791).abs() < 0.001,
            "mean {}",
            rep.mean_iou
        );
        assert!(
            (rep.median_iou - 0.787).abs() < 0.001,
            "median {}",
            rep.median_iou
        );
    }

    #[test]
    fn single_element_aggregate() {
        let rep = aggregate(
            vec![BuildingMetrics {
                name: "only".into(),
                iou: 0.42,
                centroid_dist: 1.5,
            }],
            cfg(),
        )
        .unwrap();
        assert_eq!(rep.mean_iou, 0.42);
        assert_eq!(rep.median_iou, 0.42);
        assert_eq!(rep.mean_dist, 1.5);
        assert_eq!(rep.median_dist, 1.5);
    }

    #[test]
    fn empty_aggregate_is_error() {
        assert!(matches!(
            aggregate(vec![], cfg()),
            Err(EvaluationError::EmptyInput)
        ));
    }

    #[test]
    fn median_permutation_invariant() {
        let mut m = metrics_from(&GLOBAL_REGISTRATION_IOUS);
        let fwd = aggregate(m.clone(), cfg()).unwrap();
        m.reverse();
        let rev = aggregate(m, cfg()).unwrap();
        assert_eq!(fwd.mean_iou, rev.mean_iou);
        assert_eq!(fwd.median_iou, rev.median_iou);
    }

    #[test]
    fn even_median_between_order_statistics() {
        let vals = [0.9, 0.1, 0.4, 0.6];
        let rep = aggregate(metrics_from(&vals), cfg()).unwrap();
        assert_eq!(rep.median_iou, 0.5);
    }

    #[test]
    fn evaluate_building_cases() {
        let sq =
            PlanarPolygon::new("sq", vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let same = evaluate_building(&sq, &sq).unwrap();
        assert_eq!(same.iou, 1.0);
        assert_eq!(same.centroid_dist, 0.0);

        let far = sq.translated(10.0, 0.0);
        let disjoint = evaluate_building(&sq, &far).unwrap();
        assert_eq!(disjoint.iou, 0.0);

        let offset = sq.translated(0.5, 0.0);
        let m = evaluate_building(&sq, &offset).unwrap();
        assert!((m.iou - 1.0 / 3.0).abs() < 1e-9);
        assert!((m.centroid_dist - 0.5).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_identical() {
        let rep = aggregate(metrics_from(&ADJUSTED_R12_IOUS), cfg()).unwrap();
        let parsed = parse_report_json(&render_report(&rep, ReportFormat::Json)).unwrap();
        assert_eq!(rep, parsed);
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn csv_round_trip_identical_and_row_count() {
        let mut metrics = metrics_from(&GLOBAL_REGISTRATION_IOUS);
        metrics[3].name = "O'Reilly, \"Annex\"".to_string();
        metrics[5].centroid_dist = 5.5940000000000003;
        let rep = aggregate(metrics, cfg()).unwrap();
        let csv = render_report(&rep, ReportFormat::Csv);
        // comment + header + 16 buildings + MEAN + MEDIAN
        assert_eq!(csv.lines().count(), 2 + 16 + 2);
        let parsed = parse_report_csv(&csv).unwrap();
        assert_eq!(rep, parsed);
    }

    #[test]
    fn json_aggregates_match_recomputation() {
        let rep = aggregate(metrics_from(&ADJUSTED_R12_IOUS), cfg()).unwrap();
        let parsed = parse_report_json(&render_report(&rep, ReportFormat::Json)).unwrap();
        let re = aggregate(parsed.buildings.clone(), parsed.config).unwrap();
        assert!((parsed.mean_iou - re.mean_iou).abs() < 1e-9);
        assert!((parsed.median_iou - re.median_iou).abs() < 1e-9);
        assert!((parsed.mean_dist - re.mean_dist).abs() < 1e-9);
        assert!((parsed.median_dist - re.median_dist).abs() < 1e-9);
    }
}
