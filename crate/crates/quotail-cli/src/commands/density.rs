//! The `density` subcommand: evaluate quotient densities at points.
//!
//! All values are densities of the scaled quotient, the same variable the
//! `simulate --emit quotient` samples contain, so sweeps can be compared
//! to histograms directly.

use std::io::Write;

use quotail_core::density_exact::{
    full_mixture_density, mixture_conditional_positive_density, AntiCorrParams,
};
use quotail_core::density_series::{
    quotient_density, quotient_density_asymptotic, quotient_density_conditional, DensityEvaluation,
    SeriesTruncation,
};
use quotail_core::model::{CorrelationSpec, QuotientModel};
use serde::Serialize;

use crate::cli::{DensityArgs, MethodArg};
use crate::config;
use crate::error::CliError;
use crate::manifest::RunManifest;

#[derive(Serialize)]
struct DensityRow {
    w: f64,
    value: f64,
    abs_error: f64,
    method: quotail_core::density_series::DensityMethod,
}

/// Convert a density in quotient units into scaled-quotient units at the
/// user's coordinate.
fn rescaled(eval: DensityEvaluation, x: f64, d_over_s: f64) -> DensityEvaluation {
    DensityEvaluation {
        w: x,
        value: eval.value / d_over_s,
        abs_error_estimate: eval.abs_error_estimate / d_over_s,
        method: eval.method,
    }
}

fn evaluate(
    model: &QuotientModel,
    method: MethodArg,
    x: f64,
) -> Result<DensityEvaluation, CliError> {
    let ds = model.d_over_s;
    let eval = match method {
        MethodArg::Quadrature => {
            let trunc = SeriesTruncation::for_model(model)?;
            rescaled(quotient_density(x / ds, model, trunc)?, x, ds)
        }
        MethodArg::Asymptotic => {
            let trunc = SeriesTruncation::for_model(model)?;
            rescaled(quotient_density_asymptotic(x / ds, model, trunc)?, x, ds)
        }
        MethodArg::Conditional => match model.corr {
            CorrelationSpec::AntiCorrelated => {
                let params = AntiCorrParams::from_model(model)?;
                mixture_conditional_positive_density(x, &params, params.truncation()?)?
            }
            _ => {
                let trunc = SeriesTruncation::for_model(model)?;
                rescaled(quotient_density_conditional(x / ds, model, trunc)?, x, ds)
            }
        },
        MethodArg::Exact => {
            let params = AntiCorrParams::from_model(model)?;
            full_mixture_density(x, &params, params.truncation()?)?
        }
    };
    Ok(eval)
}

fn grid_points(spec: &[f64]) -> Result<Vec<f64>, CliError> {
    let (start, stop, count) = (spec[0], spec[1], spec[2]);
    if !start.is_finite() || !stop.is_finite() {
        return Err(CliError::Config(
            "--grid: START and STOP must be finite".to_string(),
        ));
    }
    if count.fract() != 0.0 || !(2.0..=1e7).contains(&count) {
        return Err(CliError::Config(
            "--grid: COUNT must be an integer between 2 and 10000000".to_string(),
        ));
    }
    let count = count as usize;
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

pub fn run(args: &DensityArgs) -> Result<(), CliError> {
    let model = config::load_model(&args.config)?;
    let points = match (args.x, &args.grid) {
        (Some(x), None) => vec![x],
        (None, Some(spec)) => grid_points(spec)?,
        _ => unreachable!("argument group admits exactly one"),
    };

    let mut rows = Vec::with_capacity(points.len());
    for &x in &points {
        let eval = evaluate(&model, args.method, x)?;
        rows.push(DensityRow {
            w: eval.w,
            value: eval.value,
            abs_error: eval.abs_error_estimate,
            method: eval.method,
        });
    }

    match &args.out {
        Some(path) => {
            let digest = config::file_digest(&args.config)?;
            let manifest = RunManifest::begin("density", Some(digest), None, None);
            let mut wtr = csv::Writer::from_path(path)?;
            for row in &rows {
                wtr.serialize(row)?;
            }
            wtr.flush()
                .map_err(CliError::io(path.display().to_string()))?;
            manifest.finish_and_write(path)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            let mut wtr = csv::Writer::from_writer(&mut lock);
            for row in &rows {
                wtr.serialize(row)?;
            }
            wtr.flush().map_err(CliError::io("stdout".to_string()))?;
            drop(wtr);
            lock.flush().map_err(CliError::io("stdout".to_string()))?;
            Ok(())
        }
    }
}
