//! Fit the global Mercator-to-model transform from control points, with and
//! without measurement noise.
//!
//! ```bash
//! cargo run --example register_control_points
//! ```

use osmseg::mercator::MercatorXY;
use osmseg::registration::{estimate_affine, Affine2D, ControlPointPair, FitModel};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn main() {
    // ground-truth transform: 15 deg rotation, 0.62 scale, offset
    let theta = 15f64.to_radians();
    let s = 0.62;
    let truth = Affine2D {
        linear: [
            [s * theta.cos(), -s * theta.sin()],
            [s * theta.sin(), s * theta.cos()],
        ],
        translation: [431.5, -208.25],
    };

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pairs: Vec<ControlPointPair> = (0..18)
        .map(|_| {
            let src = [
                unit(&mut rng) * 800.0 - 400.0,
                unit(&mut rng) * 800.0 - 400.0,
            ];
            ControlPointPair {
                source: MercatorXY {
                    x: src[0],
                    y: src[1],
                },
                target: truth.apply(src),
            }
        })
        .collect();

    let (fit, report) = estimate_affine(&pairs, FitModel::Affine).unwrap();
    println!("noise-free fit:");
    println!("  linear      {:?}", fit.linear);
    println!("  translation {:?}", fit.translation);
    println!("  rms         {:.3e} m", report.rms);

    // add 10 cm of isotropic noise to the targets
    let noisy: Vec<ControlPointPair> = pairs
        .iter()
        .map(|p| ControlPointPair {
            source: p.source,
            target: [
                p.target[0] + 0.1 * (unit(&mut rng) - 0.5) * 3.46,
                p.target[1] + 0.1 * (unit(&mut rng) - 0.5) * 3.46,
            ],
        })
        .collect();
    for model in [FitModel::Affine, FitModel::Similarity] {
        let (_, rep) = estimate_affine(&noisy, model).unwrap();
        println!(
            "noisy fit ({model:?}): rms {:.4} m over {} pairs",
            rep.rms,
            rep.per_pair.len()
        );
    }
}
