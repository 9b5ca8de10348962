//! The `path` subcommand: simulate a price path to CSV.

use std::path::Path;

use quotail_core::pricepath::{gbm_baseline, simulate_basic, simulate_grid, PricePath};
use quotail_core::rng::RngStream;
use serde::Serialize;

use crate::cli::PathArgs;
use crate::config;
use crate::error::CliError;
use crate::manifest::RunManifest;

#[derive(Serialize)]
struct PathRow {
    step: u32,
    price: f64,
    snapped: u8,
}

#[derive(Serialize)]
struct PathSummary {
    steps: usize,
    rejections: u32,
    final_price: f64,
}

fn write_path_csv(path: &Path, prices: &[f64], snapped: &[bool]) -> Result<(), CliError> {
    let mut wtr = csv::Writer::from_path(path)?;
    for (i, (&price, &snap)) in prices.iter().zip(snapped).enumerate() {
        wtr.serialize(PathRow {
            step: i as u32,
            price,
            snapped: u8::from(snap),
        })?;
    }
    wtr.flush()
        .map_err(CliError::io(path.display().to_string()))
}

pub fn run(args: &PathArgs) -> Result<(), CliError> {
    let stream = RngStream::new(args.seed, args.stream_id);
    let (path, config_digest) = match &args.config {
        Some(config_path) => {
            let cfg = config::load_path_config(config_path)?;
            let digest = config::file_digest(config_path)?;
            let path = match &cfg.model {
                Some(model) => simulate_basic(model, &cfg.pf, cfg.p0, cfg.steps, stream)?,
                None => simulate_grid(&cfg, stream)?,
            };
            (path, Some(digest))
        }
        None => {
            let prices = gbm_baseline(
                args.p0.expect("required by parser"),
                args.gbm_mu.expect("required by parser"),
                args.gbm_sigma.expect("required by parser"),
                args.gbm_dt.expect("required by parser"),
                args.steps.expect("required by parser"),
                stream,
            )?;
            let snapped = vec![false; prices.len()];
            (
                PricePath {
                    prices,
                    snapped,
                    rejections: 0,
                },
                None,
            )
        }
    };

    let manifest = RunManifest::begin("path", config_digest, Some(args.seed), Some(args.stream_id));
    write_path_csv(&args.out, &path.prices, &path.snapped)?;
    manifest.finish_and_write(&args.out)?;

    let summary = PathSummary {
        steps: path.prices.len().saturating_sub(1),
        rejections: path.rejections,
        final_price: *path.prices.last().expect("paths are never empty"),
    };
    println!("{}", serde_json::to_string(&summary)?);
    Ok(())
}
