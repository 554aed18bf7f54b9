//! Thin command-line front end over the pipeline stages.

use clap::{Args, Parser, Subcommand};
use osmseg::evaluation::{ReportConfig, ReportFormat};
use osmseg::osm::FootprintFilter;
use osmseg::pipeline::{
    resolve_config, run_pipeline, stage_adjust, stage_evaluate, stage_evaluate_metrics,
    stage_gen_scene, stage_parse_osm, stage_register, AdjustParams, FileConfig, PipelineError,
};
use osmseg::registration::FitModel;
use osmseg::synth::{demo_campus_spec, SceneSpec};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "osmseg",
    about = "Segment geolocated point clouds with OpenStreetMap building footprints",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline: parse, register, adjust, segment, evaluate
    Run(RunArgs),
    /// Parse an OSM XML extract into footprints.json
    ParseOsm {
        #[arg(long)]
        osm: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// restrict to these building names (comma-separated)
        #[arg(long, value_delimiter = ',')]
        buildings: Option<Vec<String>>,
    },
    /// Fit the global Mercator->model transform from control points
    Register {
        #[arg(long)]
        control_points: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// affine (6-parameter) or similarity (4-parameter)
        #[arg(long, default_value = "affine")]
        fit_model: String,
    },
    /// Adjust footprints against a cloud and label its points
    Adjust(AdjustArgs),
    /// Score adjusted footprints against ground truth polygons
    Evaluate(EvaluateArgs),
    /// Generate a synthetic scene dataset with known ground truth
    GenScene {
        /// scene spec JSON; omitted = built-in 16-building demo campus
        #[arg(long)]
        spec: Option<PathBuf>,
        /// overrides the spec seed
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file mirroring these flags; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    osm: Option<PathBuf>,
    #[arg(long)]
    cloud: Option<PathBuf>,
    #[arg(long)]
    control_points: Option<PathBuf>,
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// search radius r in meters
    #[arg(long)]
    radius: Option<f64>,
    /// search step Δ in meters
    #[arg(long)]
    step: Option<f64>,
    /// occupancy cell size in meters
    #[arg(long)]
    cell_size: Option<f64>,
    /// cell density threshold (points per cell)
    #[arg(long)]
    min_points: Option<u32>,
    /// global or local
    #[arg(long)]
    ground_mode: Option<String>,
    /// GLOBAL mode elevation threshold
    #[arg(long)]
    ground_z: Option<f64>,
    /// LOCAL mode cell side in meters
    #[arg(long)]
    ground_cell: Option<f64>,
    /// LOCAL mode height offset in meters
    #[arg(long)]
    ground_height: Option<f64>,
    /// restrict to these building names (comma-separated)
    #[arg(long, value_delimiter = ',')]
    buildings: Option<Vec<String>>,
    /// report format: json or csv
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
    /// labeling membership tolerance in meters (default: the search step)
    #[arg(long)]
    label_tolerance: Option<f64>,
    /// affine or similarity
    #[arg(long)]
    fit_model: Option<String>,
}

#[derive(Args)]
struct AdjustArgs {
    #[arg(long)]
    footprints: PathBuf,
    #[arg(long)]
    transform: PathBuf,
    #[arg(long)]
    cloud: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 12.0)]
    radius: f64,
    #[arg(long, default_value_t = 0.8)]
    step: f64,
    #[arg(long, default_value_t = 1.0)]
    cell_size: f64,
    #[arg(long, default_value_t = 3)]
    min_points: u32,
    #[arg(long, default_value = "local")]
    ground_mode: String,
    #[arg(long, default_value_t = 0.0)]
    ground_z: f64,
    #[arg(long, default_value_t = 5.0)]
    ground_cell: f64,
    #[arg(long, default_value_t = 1.5)]
    ground_height: f64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// labeling membership tolerance in meters (default: the search step)
    #[arg(long)]
    label_tolerance: Option<f64>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// adjusted.json produced by the adjust stage
    #[arg(long, conflicts_with = "metrics")]
    adjusted: Option<PathBuf>,
    /// pre-computed metrics JSON ([{name, iou, centroid_dist}])
    #[arg(long)]
    metrics: Option<PathBuf>,
    /// ground truth polygons (required with --adjusted)
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "json")]
    format: String,
    // config echo for the report header
    #[arg(long, default_value_t = 12.0)]
    radius: f64,
    #[arg(long, default_value_t = 0.8)]
    step: f64,
    #[arg(long, default_value_t = 1.0)]
    cell_size: f64,
    #[arg(long, default_value_t = 3)]
    min_points: u32,
}

fn parse_format(s: &str) -> Result<ReportFormat, PipelineError> {
    match s {
        "json" => Ok(ReportFormat::Json),
        "csv" => Ok(ReportFormat::Csv),
        other => Err(PipelineError::Config(format!(
            "format must be `json` or `csv`, got `{other}`"
        ))),
    }
}

fn parse_fit_model(s: &str) -> Result<FitModel, PipelineError> {
    match s {
        "affine" => Ok(FitModel::Affine),
        "similarity" => Ok(FitModel::Similarity),
        other => Err(PipelineError::Config(format!(
            "fit_model must be `affine` or `similarity`, got `{other}`"
        ))),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, PipelineError> {
    if !path.exists() {
        return Err(PipelineError::MissingInput(path.clone()));
    }
    let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.clone(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| PipelineError::BadJson {
        path: path.clone(),
        reason: e.to_string(),
    })
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Run(args) => {
            let file_cfg: FileConfig = match &args.config {
                Some(path) => read_json(path)?,
                None => FileConfig::default(),
            };
            let flags = FileConfig {
                osm: args.osm,
                cloud: args.cloud,
                control_points: args.control_points,
                truth: args.truth,
                out: args.out,
                radius: args.radius,
                step: args.step,
                cell_size: args.cell_size,
                min_points: args.min_points,
                ground_mode: args.ground_mode,
                ground_z: args.ground_z,
                ground_cell: args.ground_cell,
                ground_height: args.ground_height,
                buildings: args.buildings,
                format: args.format,
                threads: args.threads,
                label_tolerance: args.label_tolerance,
                fit_model: args.fit_model,
            };
            let cfg = resolve_config(flags.over(file_cfg))?;
            let manifest = run_pipeline(&cfg)?;
            println!(
                "adjusted {} buildings ({} skipped); rms {:.3e} m{}",
                manifest.buildings.len(),
                manifest.skipped.len(),
                manifest.transform.rms,
                match &manifest.report {
                    Some(r) => format!(
                        "; mean IoU {:.4}, mean centroid distance {:.3} m",
                        r.mean_iou, r.mean_dist
                    ),
                    None => String::new(),
                }
            );
            Ok(())
        }
        Command::ParseOsm {
            osm,
            out,
            buildings,
        } => {
            std::fs::create_dir_all(&out).map_err(|source| PipelineError::Io {
                path: out.clone(),
                source,
            })?;
            let filter = match buildings {
                Some(names) => FootprintFilter::Names(names),
                None => FootprintFilter::Buildings,
            };
            let footprints = stage_parse_osm(&osm, &filter, &out)?;
            println!("wrote {} footprints", footprints.len());
            Ok(())
        }
        Command::Register {
            control_points,
            out,
            fit_model,
        } => {
            std::fs::create_dir_all(&out).map_err(|source| PipelineError::Io {
                path: out.clone(),
                source,
            })?;
            let record = stage_register(&control_points, parse_fit_model(&fit_model)?, &out)?;
            println!(
                "fit rms {:.6} m over {} pairs",
                record.rms,
                record.residuals.len()
            );
            Ok(())
        }
        Command::Adjust(args) => {
            std::fs::create_dir_all(&args.out).map_err(|source| PipelineError::Io {
                path: args.out.clone(),
                source,
            })?;
            let ground = match args.ground_mode.as_str() {
                "global" => osmseg::cloud::GroundConfig::Global {
                    z_threshold: args.ground_z,
                },
                "local" => osmseg::cloud::GroundConfig::Local {
                    cell: args.ground_cell,
                    height: args.ground_height,
                },
                other => {
                    return Err(PipelineError::Config(format!(
                        "ground_mode must be `global` or `local`, got `{other}`"
                    )))
                }
            };
            let params = AdjustParams {
                ground,
                cell_size: args.cell_size,
                min_points: args.min_points,
                search: osmseg::adjust::SearchConfig::new(args.radius, args.step)?,
                threads: args.threads.max(1),
                label_tolerance: args.label_tolerance.unwrap_or(args.step),
            };
            let out = stage_adjust(
                &args.footprints,
                &args.transform,
                &args.cloud,
                &params,
                &args.out,
            )?;
            println!(
                "adjusted {} buildings ({} skipped)",
                out.adjusted.len(),
                out.skipped.len()
            );
            Ok(())
        }
        Command::Evaluate(args) => {
            std::fs::create_dir_all(&args.out).map_err(|source| PipelineError::Io {
                path: args.out.clone(),
                source,
            })?;
            let config = ReportConfig {
                radius: args.radius,
                step: args.step,
                cell_size: args.cell_size,
                min_points: args.min_points,
            };
            let format = parse_format(&args.format)?;
            let report = match (&args.adjusted, &args.metrics) {
                (Some(adjusted), None) => {
                    let truth = args.truth.as_ref().ok_or_else(|| {
                        PipelineError::Config("--truth is required with --adjusted".into())
                    })?;
                    stage_evaluate(adjusted, truth, config, format, &args.out)?
                }
                (None, Some(metrics)) => {
                    stage_evaluate_metrics(metrics, config, format, &args.out)?
                }
                _ => {
                    return Err(PipelineError::Config(
                        "exactly one of --adjusted or --metrics is required".into(),
                    ))
                }
            };
            println!(
                "mean IoU {:.4}, median IoU {:.4}, mean dist {:.4} m, median dist {:.4} m",
                report.mean_iou, report.median_iou, report.mean_dist, report.median_dist
            );
            Ok(())
        }
        Command::GenScene { spec, seed, out } => {
            std::fs::create_dir_all(&out).map_err(|source| PipelineError::Io {
                path: out.clone(),
                source,
            })?;
            let mut scene_spec: SceneSpec = match &spec {
                Some(path) => read_json(path)?,
                None => demo_campus_spec(seed.unwrap_or(42)),
            };
            if let Some(s) = seed {
                scene_spec.seed = s;
            }
            let summary = stage_gen_scene(&scene_spec, &out)?;
            println!(
                "generated {} points, {} buildings, {} clutter blobs",
                summary.points, summary.buildings, summary.clutter_blobs
            );
            Ok(())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
