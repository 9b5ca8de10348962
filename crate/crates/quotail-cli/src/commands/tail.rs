//! The `tail` subcommand: fit a tail exponent to a sample file.

use std::path::Path;

use quotail_core::tail::{hill_estimator, loglog_survival_fit, TailFit};

use crate::cli::{EstimatorArg, TailArgs};
use crate::error::CliError;
use crate::manifest::RunManifest;

/// Read the `value` column of a CSV file.
fn read_value_column(path: &Path) -> Result<Vec<f64>, CliError> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    let column = headers
        .iter()
        .position(|h| h == "value")
        .ok_or_else(|| CliError::Config(format!("{}: no `value` column", path.display())))?;
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let field = record.get(column).unwrap_or("");
        let value: f64 = field.parse().map_err(|_| {
            CliError::Config(format!(
                "{}: row {}: `{field}` is not a number",
                path.display(),
                values.len() + 2
            ))
        })?;
        values.push(value);
    }
    Ok(values)
}

pub fn run(args: &TailArgs) -> Result<(), CliError> {
    let mut values = read_value_column(&args.input)?;
    if args.absolute {
        for v in &mut values {
            *v = v.abs();
        }
    }
    let fit: TailFit = match args.estimator {
        EstimatorArg::Hill => hill_estimator(&values, args.top_k)?,
        EstimatorArg::LoglogSurvival => loglog_survival_fit(
            &values,
            args.x_min.expect("required by parser"),
            args.x_max.expect("required by parser"),
        )?,
    };
    let text = serde_json::to_string_pretty(&fit)? + "\n";
    match &args.out {
        Some(path) => {
            let manifest = RunManifest::begin("tail", None, None, None);
            std::fs::write(path, text).map_err(CliError::io(path.display().to_string()))?;
            manifest.finish_and_write(path)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
