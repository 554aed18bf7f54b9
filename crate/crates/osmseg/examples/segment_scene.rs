//! Label cloud points by adjusted footprints and measure accuracy against
//! the generator's ground truth.
//!
//! ```bash
//! cargo run --example segment_scene
//! ```

use osmseg::adjust::{adjust_footprint, segment_cloud, SearchConfig, Translation2D};
use osmseg::cloud::{build_occupancy, flatten, remove_ground, GroundConfig, WindowRect};
use osmseg::synth::{generate_scene, BuildingSpec, GroundSpec, SceneSpec};
use std::collections::BTreeMap;

fn main() {
    let spec = SceneSpec {
        seed: 10,
        buildings: vec![
            BuildingSpec {
                name: "Library".into(),
                ring: vec![[-30.0, -10.0], [-10.0, -10.0], [-10.0, 10.0], [-30.0, 10.0]],
                height: 12.0,
            },
            BuildingSpec {
                name: "Chapel".into(),
                ring: vec![[12.0, -8.0], [30.0, -8.0], [30.0, 6.0], [12.0, 6.0]],
                height: 9.0,
            },
        ],
        ground: GroundSpec {
            min: [-55.0, -35.0],
            max: [55.0, 35.0],
            slope: 0.0,
            density: 0.4,
        },
        edge_density: 22.0,
        interior_density: 7.0,
        clutter: vec![],
        injected_offsets: vec![
            Translation2D { x: 2.0, y: -1.0 },
            Translation2D { x: -3.0, y: 2.0 },
        ],
        inset: 0.613,
    };
    let scene = generate_scene(&spec).unwrap();
    let filtered = remove_ground(
        &scene.cloud,
        &GroundConfig::Local {
            cell: 5.0,
            height: 1.5,
        },
    );
    let flat = flatten(&filtered.cloud);
    let cfg = SearchConfig::new(6.0, 1.0).unwrap();

    let mut adjusted = Vec::new();
    for poly in &scene.osm {
        let (lo, hi) = poly.bbox();
        let window = WindowRect::new(
            [lo[0] - cfg.radius - 1.0, lo[1] - cfg.radius - 1.0],
            [hi[0] + cfg.radius + 1.0, hi[1] + cfg.radius + 1.0],
        );
        let grid = build_occupancy(&flat, 1.0, 1, window);
        let res = adjust_footprint(poly, &grid, &cfg).unwrap();
        println!("{}: moved by ({}, {})", res.name, res.best.x, res.best.y);
        adjusted.push(poly.translated(res.best.x, res.best.y));
    }

    let labels = segment_cloud(&scene.cloud.points, &adjusted, 1.0);
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut correct = 0usize;
    let mut building_points = 0usize;
    for (got, truth) in labels.iter().zip(&scene.labels) {
        let name = got.map(|i| adjusted[i].name()).unwrap_or("UNLABELED");
        *counts.entry(name).or_insert(0) += 1;
        if let Some(bi) = truth {
            building_points += 1;
            if name == scene.truth[*bi].name() {
                correct += 1;
            }
        }
    }
    println!("\nlabel counts:");
    for (name, n) in &counts {
        println!("  {name:<12} {n}");
    }
    println!(
        "\naccuracy on building points: {:.2}%",
        100.0 * correct as f64 / building_points as f64
    );
}
