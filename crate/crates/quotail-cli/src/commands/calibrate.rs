//! The `calibrate` subcommand: fit the price-function exponent from
//! supply/demand observations.

use std::path::Path;

use quotail_core::calibration::{
    drawdown_probability, fit_price_function, CalibrationResult, Observation,
};
use quotail_core::density_series::SeriesTruncation;
use serde::Serialize;

use crate::cli::CalibrateArgs;
use crate::config;
use crate::error::CliError;
use crate::manifest::RunManifest;

#[derive(Serialize)]
struct CalibrateReport {
    #[serde(flatten)]
    fit: CalibrationResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    drawdown_probability: Option<f64>,
}

fn read_observations(path: &Path) -> Result<Vec<Observation>, CliError> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for record in rdr.deserialize::<Observation>() {
        rows.push(record?);
    }
    Ok(rows)
}

pub fn run(args: &CalibrateArgs) -> Result<(), CliError> {
    let observations = read_observations(&args.input)?;
    let fit = fit_price_function(&observations)?;

    let drawdown = match (args.drawdown_threshold, &args.config) {
        (Some(threshold), Some(config_path)) => {
            let model = config::load_model(config_path)?;
            let trunc = SeriesTruncation::for_model(&model)?;
            Some(drawdown_probability(&fit, &model, trunc, threshold)?)
        }
        _ => None,
    };

    let report = CalibrateReport {
        fit,
        drawdown_probability: drawdown,
    };
    let text = serde_json::to_string_pretty(&report)? + "\n";
    match &args.out {
        Some(path) => {
            let digest = match &args.config {
                Some(config_path) => Some(config::file_digest(config_path)?),
                None => None,
            };
            let manifest = RunManifest::begin("calibrate", digest, None, None);
            std::fs::write(path, text).map_err(CliError::io(path.display().to_string()))?;
            manifest.finish_and_write(path)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
