//! File-based pipeline stages and the end-to-end batch run.
//!
//! Every stage reads and writes plain JSON/CSV/XYZ artifacts so runs are
//! inspectable and stages are independently testable and cacheable. The
//! monolithic run chains the same stage functions over the same files, so
//! its artifacts are identical to running the subcommands one at a time.
//! All outputs are deterministically serialized; re-running a configuration
//! on the same inputs is byte-identical regardless of the thread count.

use crate::adjust::{adjust_footprint, segment_cloud, AdjustError, SearchConfig, Translation2D};
use crate::cloud::{
    build_occupancy, flatten, load_cloud, remove_ground, CloudError, CloudFormat, GroundConfig,
    PointCloud3, WindowRect,
};
use crate::evaluation::{
    aggregate, evaluate_building, render_report, BuildingMetrics, EvaluationError,
    EvaluationReport, ReportConfig, ReportFormat,
};
use crate::geometry::{GeometryError, PlanarPolygon};
use crate::mercator::{mercator_to_wgs84, project_footprint, MercatorXY, ProjectionError};
use crate::osm::{
    extract_footprints, parse_osm, write_osm_xml, FootprintFilter, GeoFootprint, OsmDocument,
    OsmError, OsmWay,
};
use crate::registration::{
    estimate_affine, parse_control_points, Affine2D, ControlPointPair, FitModel, RegistrationError,
};
use crate::synth::{campus_world_transform, generate_scene, SceneSpec, SynthError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const FOOTPRINTS_FILE: &str = "footprints.json";
pub const TRANSFORM_FILE: &str = "transform.json";
pub const ADJUSTED_FILE: &str = "adjusted.json";
pub const LABELED_FILE: &str = "labeled.xyz";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Label written for points outside every adjusted footprint.
pub const UNLABELED: &str = "UNLABELED";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("input file does not exist: {0}")]
    MissingInput(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {reason}")]
    BadJson { path: PathBuf, reason: String },
    #[error("configuration: {0}")]
    Config(String),
    #[error("no buildings matched the filter")]
    NoBuildings,
    #[error(transparent)]
    Osm(#[from] OsmError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Registration(#[from] RegistrationError),
    #[error(transparent)]
    Cloud(#[from] CloudError),
    #[error(transparent)]
    Adjust(#[from] AdjustError),
    #[error(transparent)]
    Evaluation(#[from] EvaluationError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Synth(#[from] SynthError),
}

// ---------------------------------------------------------------------------
// configuration

/// JSON config file mirroring the CLI flags; any field may be omitted.
/// Flags override file values, which override defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub osm: Option<PathBuf>,
    pub cloud: Option<PathBuf>,
    pub control_points: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub radius: Option<f64>,
    pub step: Option<f64>,
    pub cell_size: Option<f64>,
    pub min_points: Option<u32>,
    pub ground_mode: Option<String>,
    pub ground_z: Option<f64>,
    pub ground_cell: Option<f64>,
    pub ground_height: Option<f64>,
    pub buildings: Option<Vec<String>>,
    pub format: Option<String>,
    pub threads: Option<usize>,
    pub label_tolerance: Option<f64>,
    pub fit_model: Option<String>,
}

impl FileConfig {
    /// Field-wise overlay; `self` wins where set.
    pub fn over(self, base: FileConfig) -> FileConfig {
        FileConfig {
            osm: self.osm.or(base.osm),
            cloud: self.cloud.or(base.cloud),
            control_points: self.control_points.or(base.control_points),
            truth: self.truth.or(base.truth),
            out: self.out.or(base.out),
            radius: self.radius.or(base.radius),
            step: self.step.or(base.step),
            cell_size: self.cell_size.or(base.cell_size),
            min_points: self.min_points.or(base.min_points),
            ground_mode: self.ground_mode.or(base.ground_mode),
            ground_z: self.ground_z.or(base.ground_z),
            ground_cell: self.ground_cell.or(base.ground_cell),
            ground_height: self.ground_height.or(base.ground_height),
            buildings: self.buildings.or(base.buildings),
            format: self.format.or(base.format),
            threads: self.threads.or(base.threads),
            label_tolerance: self.label_tolerance.or(base.label_tolerance),
            fit_model: self.fit_model.or(base.fit_model),
        }
    }
}

/// Fully resolved, validated pipeline parameters. Defaults: r = 12 m,
/// Δ = 0.8 m, 1 m cells with a 3-point density threshold, LOCAL ground
/// removal (5 m cells, 1.5 m offset).
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub osm: PathBuf,
    pub cloud: PathBuf,
    pub control_points: PathBuf,
    pub truth: Option<PathBuf>,
    pub out: PathBuf,
    pub search: SearchConfig,
    pub cell_size: f64,
    pub min_points: u32,
    pub ground: GroundConfig,
    pub buildings: Option<Vec<String>>,
    pub format: ReportFormat,
    pub threads: usize,
    /// labeling membership extends this far beyond a footprint ring,
    /// absorbing the sub-step quantization of the lattice search
    pub label_tolerance: f64,
    pub fit_model: FitModel,
}

pub fn resolve_config(merged: FileConfig) -> Result<PipelineConfig, PipelineError> {
    let need = |field: &str, v: Option<PathBuf>| {
        v.ok_or_else(|| PipelineError::Config(format!("missing required path `{field}`")))
    };
    let radius = merged.radius.unwrap_or(12.0);
    let step = merged.step.unwrap_or(0.8);
    let search =
        SearchConfig::new(radius, step).map_err(|e| PipelineError::Config(e.to_string()))?;
    let cell_size = merged.cell_size.unwrap_or(1.0);
    if !(cell_size.is_finite() && cell_size > 0.0) {
        return Err(PipelineError::Config(format!(
            "cell_size must be positive, got {cell_size}"
        )));
    }
    let min_points = merged.min_points.unwrap_or(3);
    if min_points < 1 {
        return Err(PipelineError::Config("min_points must be >= 1".into()));
    }
    let ground = match merged.ground_mode.as_deref().unwrap_or("local") {
        "global" => GroundConfig::Global {
            z_threshold: merged.ground_z.unwrap_or(0.0),
        },
        "local" => {
            let cell = merged.ground_cell.unwrap_or(5.0);
            let height = merged.ground_height.unwrap_or(1.5);
            if !(cell > 0.0 && height >= 0.0) {
                return Err(PipelineError::Config(
                    "ground cell must be > 0 and height >= 0".into(),
                ));
            }
            GroundConfig::Local { cell, height }
        }
        other => {
            return Err(PipelineError::Config(format!(
                "ground_mode must be `global` or `local`, got `{other}`"
            )))
        }
    };
    let format = match merged.format.as_deref().unwrap_or("json") {
        "json" => ReportFormat::Json,
        "csv" => ReportFormat::Csv,
        other => {
            return Err(PipelineError::Config(format!(
                "format must be `json` or `csv`, got `{other}`"
            )))
        }
    };
    let fit_model = match merged.fit_model.as_deref().unwrap_or("affine") {
        "affine" => FitModel::Affine,
        "similarity" => FitModel::Similarity,
        other => {
            return Err(PipelineError::Config(format!(
                "fit_model must be `affine` or `similarity`, got `{other}`"
            )))
        }
    };
    let threads = merged.threads.unwrap_or(1).max(1);
    let label_tolerance = merged.label_tolerance.unwrap_or(step);
    if !(label_tolerance.is_finite() && label_tolerance >= 0.0) {
        return Err(PipelineError::Config("label_tolerance must be >= 0".into()));
    }
    Ok(PipelineConfig {
        osm: need("osm", merged.osm)?,
        cloud: need("cloud", merged.cloud)?,
        control_points: need("control_points", merged.control_points)?,
        truth: merged.truth,
        out: need("out", merged.out)?,
        search,
        cell_size,
        min_points,
        ground,
        buildings: merged.buildings,
        format,
        threads,
        label_tolerance,
        fit_model,
    })
}

// ---------------------------------------------------------------------------
// file helpers and records

fn read_file(path: &Path) -> Result<String, PipelineError> {
    if !path.exists() {
        return Err(PipelineError::MissingInput(path.to_path_buf()));
    }
    std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, content: &str) -> Result<(), PipelineError> {
    std::fs::write(path, content).map_err(|source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn from_json<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, PipelineError> {
    serde_json::from_str(text).map_err(|e| PipelineError::BadJson {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact serializes");
    s.push('\n');
    s
}

/// On-disk polygon: `{name, ring: [[x,y], ...]}` in model meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonRecord {
    pub name: String,
    pub ring: Vec<[f64; 2]>,
}

impl PolygonRecord {
    pub fn from_polygon(p: &PlanarPolygon) -> Self {
        Self {
            name: p.name().to_string(),
            ring: p.ring().to_vec(),
        }
    }

    pub fn into_polygon(self) -> Result<PlanarPolygon, GeometryError> {
        PlanarPolygon::new(self.name, self.ring)
    }
}

/// On-disk global transform with its fit diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformRecord {
    pub model: FitModel,
    pub linear: [[f64; 2]; 2],
    pub translation: [f64; 2],
    pub rms: f64,
    pub residuals: Vec<f64>,
}

impl TransformRecord {
    pub fn affine(&self) -> Affine2D {
        Affine2D {
            linear: self.linear,
            translation: self.translation,
        }
    }
}

/// On-disk per-building adjustment outcome plus the adjusted ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjustedBuilding {
    pub name: String,
    pub translation: Translation2D,
    pub best_iou: f64,
    pub initial_iou: f64,
    pub evaluated_count: usize,
    pub ring: Vec<[f64; 2]>,
}

pub fn detect_cloud_format(path: &Path) -> CloudFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("ply") => CloudFormat::PlyAscii,
        _ => CloudFormat::Xyz,
    }
}

pub fn load_cloud_path(path: &Path) -> Result<PointCloud3, PipelineError> {
    let text = read_file(path)?;
    Ok(load_cloud(&text, detect_cloud_format(path))?)
}

// ---------------------------------------------------------------------------
// stages

/// Parse the OSM extract and write `footprints.json` (deterministic,
/// ascending way id). Warnings go to stderr.
pub fn stage_parse_osm(
    osm_path: &Path,
    filter: &FootprintFilter,
    out_dir: &Path,
) -> Result<Vec<GeoFootprint>, PipelineError> {
    let doc = parse_osm(&read_file(osm_path)?)?;
    let extraction = extract_footprints(&doc, filter)?;
    for w in &extraction.warnings {
        eprintln!("warning: {w}");
    }
    write_file(
        &out_dir.join(FOOTPRINTS_FILE),
        &to_json_pretty(&extraction.footprints),
    )?;
    Ok(extraction.footprints)
}

/// Fit the Mercator->model transform from the control-point CSV and write
/// `transform.json`.
pub fn stage_register(
    control_points_path: &Path,
    model: FitModel,
    out_dir: &Path,
) -> Result<TransformRecord, PipelineError> {
    let rows = parse_control_points(&read_file(control_points_path)?)?;
    let mut pairs = Vec::with_capacity(rows.len());
    for r in rows {
        let m = crate::mercator::wgs84_to_mercator(crate::mercator::GeoCoord::new(r.lon, r.lat)?);
        pairs.push(ControlPointPair {
            source: m,
            target: [r.model_x, r.model_y],
        });
    }
    let (affine, residuals) = estimate_affine(&pairs, model)?;
    let record = TransformRecord {
        model,
        linear: affine.linear,
        translation: affine.translation,
        rms: residuals.rms,
        residuals: residuals.per_pair,
    };
    write_file(&out_dir.join(TRANSFORM_FILE), &to_json_pretty(&record))?;
    Ok(record)
}

/// Parameters of the adjustment stage.
#[derive(Debug, Clone)]
pub struct AdjustParams {
    pub ground: GroundConfig,
    pub cell_size: f64,
    pub min_points: u32,
    pub search: SearchConfig,
    pub threads: usize,
    pub label_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedBuilding {
    pub name: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct AdjustStageOutput {
    pub adjusted: Vec<AdjustedBuilding>,
    pub skipped: Vec<SkippedBuilding>,
    /// points per emitted label (building names plus UNLABELED)
    pub label_counts: BTreeMap<String, usize>,
    pub ground_removed: usize,
    pub cloud_points: usize,
}

/// Project footprints into the model frame, search each building's optimal
/// translation against the occupancy grid, label the cloud, and write
/// `adjusted.json` + `labeled.xyz`. Per-building failures are skipped with a
/// warning; buildings are processed in footprint order and merged
/// deterministically regardless of thread count.
pub fn stage_adjust(
    footprints_path: &Path,
    transform_path: &Path,
    cloud_path: &Path,
    params: &AdjustParams,
    out_dir: &Path,
) -> Result<AdjustStageOutput, PipelineError> {
    let footprints: Vec<GeoFootprint> = from_json(footprints_path, &read_file(footprints_path)?)?;
    let transform: TransformRecord = from_json(transform_path, &read_file(transform_path)?)?;
    let affine = transform.affine();

    let cloud = load_cloud_path(cloud_path)?;
    let filtered = remove_ground(&cloud, &params.ground);
    if filtered.all_removed {
        eprintln!("warning: ground removal discarded every point");
    }
    let flat = flatten(&filtered.cloud);

    // footprint -> model frame; projection or geometry failures skip the
    // building rather than aborting the run
    let mut model_polys: Vec<PlanarPolygon> = Vec::new();
    let mut skipped: Vec<SkippedBuilding> = Vec::new();
    for f in &footprints {
        let placed = project_footprint(f)
            .map_err(PipelineError::from)
            .and_then(|p| affine.apply_to_polygon(&p).map_err(PipelineError::from));
        match placed {
            Ok(p) => model_polys.push(p),
            Err(e) => {
                eprintln!("warning: skipping `{}`: {e}", f.name);
                skipped.push(SkippedBuilding {
                    name: f.name.clone(),
                    reason: e.to_string(),
                });
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(params.threads)
        .build()
        .map_err(|e| PipelineError::Config(format!("thread pool: {e}")))?;
    let results: Vec<Result<AdjustedBuilding, SkippedBuilding>> = pool.install(|| {
        model_polys
            .par_iter()
            .map(|poly| {
                let (lo, hi) = poly.bbox();
                let dilate = params.search.radius + params.cell_size;
                let window = WindowRect::new(
                    [lo[0] - dilate, lo[1] - dilate],
                    [hi[0] + dilate, hi[1] + dilate],
                );
                let grid = build_occupancy(&flat, params.cell_size, params.min_points, window);
                match adjust_footprint(poly, &grid, &params.search) {
                    Ok(res) => {
                        let moved = poly.translated(res.best.x, res.best.y);
                        Ok(AdjustedBuilding {
                            name: res.name,
                            translation: res.best,
                            best_iou: res.best_iou,
                            initial_iou: res.initial_iou,
                            evaluated_count: res.evaluated_count,
                            ring: moved.ring().to_vec(),
                        })
                    }
                    Err(e) => Err(SkippedBuilding {
                        name: poly.name().to_string(),
                        reason: e.to_string(),
                    }),
                }
            })
            .collect()
    });

    let mut adjusted: Vec<AdjustedBuilding> = Vec::new();
    for r in results {
        match r {
            Ok(a) => adjusted.push(a),
            Err(s) => {
                eprintln!("warning: skipping `{}`: {}", s.name, s.reason);
                skipped.push(s);
            }
        }
    }

    let adjusted_polys: Vec<PlanarPolygon> = adjusted
        .iter()
        .map(|a| PlanarPolygon::new(a.name.clone(), a.ring.clone()))
        .collect::<Result<_, _>>()?;
    let labels = segment_cloud(&cloud.points, &adjusted_polys, params.label_tolerance);

    let mut label_counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut labeled = String::new();
    for (p, l) in cloud.points.iter().zip(&labels) {
        let name = match l {
            Some(i) => adjusted_polys[*i].name(),
            None => UNLABELED,
        };
        *label_counts.entry(name.to_string()).or_insert(0) += 1;
        let _ = writeln!(labeled, "{} {} {} {}", p[0], p[1], p[2], name);
    }

    write_file(&out_dir.join(ADJUSTED_FILE), &to_json_pretty(&adjusted))?;
    write_file(&out_dir.join(LABELED_FILE), &labeled)?;

    Ok(AdjustStageOutput {
        adjusted,
        skipped,
        label_counts,
        ground_removed: filtered.removed,
        cloud_points: cloud.len(),
    })
}

/// Score adjusted buildings against the ground-truth polygon file (matched
/// by name) and write `report.json`/`report.csv`.
pub fn stage_evaluate(
    adjusted_path: &Path,
    truth_path: &Path,
    config: ReportConfig,
    format: ReportFormat,
    out_dir: &Path,
) -> Result<EvaluationReport, PipelineError> {
    let adjusted: Vec<AdjustedBuilding> = from_json(adjusted_path, &read_file(adjusted_path)?)?;
    let truth_records: Vec<PolygonRecord> = from_json(truth_path, &read_file(truth_path)?)?;
    let mut truth_by_name: BTreeMap<String, PlanarPolygon> = BTreeMap::new();
    for t in truth_records {
        let name = t.name.clone();
        truth_by_name.insert(name, t.into_polygon()?);
    }
    let mut metrics = Vec::new();
    for a in &adjusted {
        match truth_by_name.get(&a.name) {
            Some(truth) => {
                let candidate = PlanarPolygon::new(a.name.clone(), a.ring.clone())?;
                metrics.push(evaluate_building(&candidate, truth)?);
            }
            None => eprintln!("warning: no ground truth for `{}`; skipped", a.name),
        }
    }
    let report = aggregate(metrics, config)?;
    let file = match format {
        ReportFormat::Json => "report.json",
        ReportFormat::Csv => "report.csv",
    };
    write_file(&out_dir.join(file), &render_report(&report, format))?;
    Ok(report)
}

/// Aggregate a pre-computed metrics file (`[{name, iou, centroid_dist}]`)
/// without geometric evaluation.
pub fn stage_evaluate_metrics(
    metrics_path: &Path,
    config: ReportConfig,
    format: ReportFormat,
    out_dir: &Path,
) -> Result<EvaluationReport, PipelineError> {
    let metrics: Vec<BuildingMetrics> = from_json(metrics_path, &read_file(metrics_path)?)?;
    let report = aggregate(metrics, config)?;
    let file = match format {
        ReportFormat::Json => "report.json",
        ReportFormat::Csv => "report.csv",
    };
    write_file(&out_dir.join(file), &render_report(&report, format))?;
    Ok(report)
}

// ---------------------------------------------------------------------------
// scene generation

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneSummary {
    pub points: usize,
    pub buildings: usize,
    pub clutter_blobs: usize,
}

/// Materialize a synthetic scene as a complete input dataset: `cloud.xyz`,
/// `osm.xml` (WGS84, via the fixed synthetic world transform), `truth.json`,
/// `control_points.csv` (18 exact correspondences), `labels.txt` (per-point
/// truth labels) and `offsets.json` (expected recoveries).
pub fn stage_gen_scene(spec: &SceneSpec, out_dir: &Path) -> Result<SceneSummary, PipelineError> {
    let scene = generate_scene(spec)?;
    let world = campus_world_transform();
    let to_mercator = world
        .inverse()
        .expect("synthetic world transform is invertible");

    write_file(
        &out_dir.join("cloud.xyz"),
        &crate::cloud::write_xyz(&scene.cloud),
    )?;

    let truth: Vec<PolygonRecord> = scene
        .truth
        .iter()
        .map(PolygonRecord::from_polygon)
        .collect();
    write_file(&out_dir.join("truth.json"), &to_json_pretty(&truth))?;

    // OSM extract: each displaced footprint becomes one closed, tagged way
    let mut doc = OsmDocument::default();
    let mut next_node: i64 = 1;
    for (i, poly) in scene.osm.iter().enumerate() {
        let mut refs = Vec::with_capacity(poly.ring().len() + 1);
        for &v in poly.ring() {
            let m = to_mercator.apply(v);
            let g = mercator_to_wgs84(MercatorXY { x: m[0], y: m[1] })?;
            doc.nodes.insert(next_node, [g.longitude(), g.latitude()]);
            refs.push(next_node);
            next_node += 1;
        }
        refs.push(refs[0]);
        let mut tags = BTreeMap::new();
        tags.insert("building".to_string(), "yes".to_string());
        tags.insert("name".to_string(), poly.name().to_string());
        doc.ways.push(OsmWay {
            id: 1000 + i as i64,
            node_refs: refs,
            tags,
        });
    }
    write_file(&out_dir.join("osm.xml"), &write_osm_xml(&doc))?;

    // 18 exact control correspondences on a 6x3 grid over the ground extent
    let g = spec.ground;
    let mut csv = String::from("lon,lat,model_x,model_y\n");
    for j in 0..3 {
        for i in 0..6 {
            let p = [
                g.min[0] + (i as f64 + 0.5) * (g.max[0] - g.min[0]) / 6.0,
                g.min[1] + (j as f64 + 0.5) * (g.max[1] - g.min[1]) / 3.0,
            ];
            let m = to_mercator.apply(p);
            let geo = mercator_to_wgs84(MercatorXY { x: m[0], y: m[1] })?;
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                geo.longitude(),
                geo.latitude(),
                p[0],
                p[1]
            );
        }
    }
    write_file(&out_dir.join("control_points.csv"), &csv)?;

    let mut labels = String::new();
    for l in &scene.labels {
        let name = match l {
            Some(i) => scene.truth[*i].name(),
            None => UNLABELED,
        };
        labels.push_str(name);
        labels.push('\n');
    }
    write_file(&out_dir.join("labels.txt"), &labels)?;

    #[derive(Serialize)]
    struct OffsetRecord<'a> {
        name: &'a str,
        offset: Translation2D,
    }
    let offsets: Vec<OffsetRecord> = scene
        .truth
        .iter()
        .zip(&spec.injected_offsets)
        .map(|(p, &offset)| OffsetRecord {
            name: p.name(),
            offset,
        })
        .collect();
    write_file(&out_dir.join("offsets.json"), &to_json_pretty(&offsets))?;

    Ok(SceneSummary {
        points: scene.cloud.len(),
        buildings: scene.truth.len(),
        clutter_blobs: spec.clutter.len(),
    })
}

// ---------------------------------------------------------------------------
// the monolithic run

/// Machine-readable record of a run: semantic parameters, fit diagnostics,
/// per-building outcomes and the report aggregates. Execution width
/// (thread count) does not influence results and is not recorded.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub osm: String,
    pub cloud: String,
    pub control_points: String,
    pub truth: Option<String>,
    pub ground: GroundConfig,
    pub cell_size: f64,
    pub min_points: u32,
    pub radius: f64,
    pub step: f64,
    pub label_tolerance: f64,
    pub fit_model: FitModel,
    pub cloud_points: usize,
    pub ground_removed: usize,
    pub transform: TransformRecord,
    pub buildings: Vec<AdjustmentSummary>,
    pub skipped: Vec<SkippedBuilding>,
    pub label_counts: BTreeMap<String, usize>,
    pub report: Option<ReportAggregates>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdjustmentSummary {
    pub name: String,
    pub translation: Translation2D,
    pub best_iou: f64,
    pub initial_iou: f64,
    pub evaluated_count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportAggregates {
    pub mean_iou: f64,
    pub median_iou: f64,
    pub mean_dist: f64,
    pub median_dist: f64,
}

/// Full pipeline: parse -> register -> adjust (+ segment) -> evaluate.
/// Validates every input path before writing anything; a hard error leaves
/// no partial outputs behind.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunManifest, PipelineError> {
    for path in [&cfg.osm, &cfg.cloud, &cfg.control_points]
        .into_iter()
        .chain(cfg.truth.iter())
    {
        if !path.exists() {
            return Err(PipelineError::MissingInput(path.clone()));
        }
    }
    std::fs::create_dir_all(&cfg.out).map_err(|source| PipelineError::Io {
        path: cfg.out.clone(),
        source,
    })?;

    let filter = match &cfg.buildings {
        Some(names) => FootprintFilter::Names(names.clone()),
        None => FootprintFilter::Buildings,
    };
    let footprints = stage_parse_osm(&cfg.osm, &filter, &cfg.out)?;
    if footprints.is_empty() {
        return Err(PipelineError::NoBuildings);
    }

    let transform = stage_register(&cfg.control_points, cfg.fit_model, &cfg.out)?;

    let params = AdjustParams {
        ground: cfg.ground,
        cell_size: cfg.cell_size,
        min_points: cfg.min_points,
        search: cfg.search,
        threads: cfg.threads,
        label_tolerance: cfg.label_tolerance,
    };
    let adjust_out = stage_adjust(
        &cfg.out.join(FOOTPRINTS_FILE),
        &cfg.out.join(TRANSFORM_FILE),
        &cfg.cloud,
        &params,
        &cfg.out,
    )?;

    let report = match &cfg.truth {
        Some(truth) => Some(stage_evaluate(
            &cfg.out.join(ADJUSTED_FILE),
            truth,
            ReportConfig {
                radius: cfg.search.radius,
                step: cfg.search.step,
                cell_size: cfg.cell_size,
                min_points: cfg.min_points,
            },
            cfg.format,
            &cfg.out,
        )?),
        None => None,
    };

    let manifest = RunManifest {
        osm: cfg.osm.display().to_string(),
        cloud: cfg.cloud.display().to_string(),
        control_points: cfg.control_points.display().to_string(),
        truth: cfg.truth.as_ref().map(|p| p.display().to_string()),
        ground: cfg.ground,
        cell_size: cfg.cell_size,
        min_points: cfg.min_points,
        radius: cfg.search.radius,
        step: cfg.search.step,
        label_tolerance: cfg.label_tolerance,
        fit_model: cfg.fit_model,
        cloud_points: adjust_out.cloud_points,
        ground_removed: adjust_out.ground_removed,
        transform,
        buildings: adjust_out
            .adjusted
            .iter()
            .map(|a| AdjustmentSummary {
                name: a.name.clone(),
                translation: a.translation,
                best_iou: a.best_iou,
                initial_iou: a.initial_iou,
                evaluated_count: a.evaluated_count,
            })
            .collect(),
        skipped: adjust_out.skipped,
        label_counts: adjust_out.label_counts,
        report: report.map(|r| ReportAggregates {
            mean_iou: r.mean_iou,
            median_iou: r.median_iou,
            mean_dist: r.mean_dist,
            median_dist: r.median_dist,
        }),
    };
    write_file(&cfg.out.join(MANIFEST_FILE), &to_json_pretty(&manifest))?;
    Ok(manifest)
}
