//! The `corr` subcommand: aggregate correlation report.

use quotail_core::correlation::{
    model_total_correlation, rho_t_range, total_correlation, JumpLevelCorrelation,
};
use quotail_core::density_series::SeriesTruncation;
use quotail_core::model::jump_correlation;
use serde::Serialize;

use crate::cli::CorrArgs;
use crate::config;
use crate::error::CliError;
use crate::manifest::RunManifest;

#[derive(Serialize)]
struct CorrReport {
    /// Aggregate correlation of the legs under the model's own coupling.
    rho_t: f64,
    /// Smallest aggregate correlation over jump-level correlations in [-1, 1].
    band_min: f64,
    /// Largest aggregate correlation over jump-level correlations in [-1, 1].
    band_max: f64,
    /// Correlation of the jump counts themselves, when defined.
    #[serde(skip_serializing_if = "Option::is_none")]
    jump_corr: Option<f64>,
    /// Aggregate correlation at the requested constant jump-level value.
    #[serde(skip_serializing_if = "Option::is_none")]
    rho_t_at_jump_rho: Option<f64>,
}

pub fn run(args: &CorrArgs) -> Result<(), CliError> {
    let model = config::load_model(&args.config)?;
    let trunc = SeriesTruncation::for_model(&model)?;
    let rho_t = model_total_correlation(&model, trunc)?;
    let (band_min, band_max) = rho_t_range(&model, trunc)?;
    let jump_corr = jump_correlation(&model.jumps).ok();
    let rho_t_at_jump_rho = match args.jump_rho {
        Some(r) => Some(total_correlation(
            &model,
            &JumpLevelCorrelation::Constant(r),
            trunc,
        )?),
        None => None,
    };
    let report = CorrReport {
        rho_t,
        band_min,
        band_max,
        jump_corr,
        rho_t_at_jump_rho,
    };
    let text = serde_json::to_string_pretty(&report)? + "\n";
    match &args.out {
        Some(path) => {
            let digest = config::file_digest(&args.config)?;
            let manifest = RunManifest::begin("corr", Some(digest), None, None);
            std::fs::write(path, text).map_err(CliError::io(path.display().to_string()))?;
            manifest.finish_and_write(path)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
