//! The `simulate` subcommand: deterministic draws to CSV.

use std::path::Path;

use quotail_core::model::QuotientModel;
use quotail_core::rng::{RngStream, CHUNK_SIZE};
use quotail_core::sampler::{fill_pair_chunk, quotient_from_batch, QuotientSamples, SampleBatch};
use quotail_core::transforms;
use rayon::prelude::*;
use serde::Serialize;

use crate::cli::{EmitKind, SimulateArgs};
use crate::config;
use crate::error::CliError;
use crate::manifest::RunManifest;

#[derive(Serialize)]
struct PairRow {
    r1: f64,
    r2: f64,
    k1: u32,
    k2: u32,
}

#[derive(Serialize)]
struct ValueRow {
    value: f64,
}

#[derive(Serialize)]
struct SimulateMeta {
    seed: u64,
    stream_id: u64,
    model_digest: String,
    emit: String,
    condition_positive: bool,
    n_requested: usize,
    n_written: usize,
    rejected_nonpositive: u64,
    discarded_zero_denominator: u64,
}

/// Draw the full batch, chunk-parallel when a thread pool is requested.
///
/// Chunks are seeded by index, so the values never depend on the thread
/// count or on scheduling order.
fn sample_batch(
    model: &QuotientModel,
    n: usize,
    stream: RngStream,
    threads: Option<usize>,
) -> Result<SampleBatch, CliError> {
    model.validate()?;
    let mut r1 = vec![0.0; n];
    let mut r2 = vec![0.0; n];
    let mut k1 = vec![0u32; n];
    let mut k2 = vec![0u32; n];
    {
        let mut fill = || -> quotail_core::Result<()> {
            r1.par_chunks_mut(CHUNK_SIZE)
                .zip(r2.par_chunks_mut(CHUNK_SIZE))
                .zip(k1.par_chunks_mut(CHUNK_SIZE))
                .zip(k2.par_chunks_mut(CHUNK_SIZE))
                .enumerate()
                .try_for_each(|(index, (((a, b), c), d))| {
                    fill_pair_chunk(model, stream, index as u64, a, b, c, d)
                })
        };
        match threads {
            Some(t) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
                pool.install(fill)?;
            }
            None => fill()?,
        }
    }
    Ok(SampleBatch {
        r1,
        r2,
        k1,
        k2,
        seed: stream.seed,
        stream_id: stream.stream_id,
        model_digest: model.digest64(),
    })
}

fn write_batch_csv(path: &Path, batch: &SampleBatch) -> Result<usize, CliError> {
    let mut wtr = csv::Writer::from_path(path).map_err(CliError::from)?;
    for i in 0..batch.r1.len() {
        wtr.serialize(PairRow {
            r1: batch.r1[i],
            r2: batch.r2[i],
            k1: batch.k1[i],
            k2: batch.k2[i],
        })?;
    }
    wtr.flush()
        .map_err(CliError::io(path.display().to_string()))?;
    Ok(batch.r1.len())
}

fn write_value_csv(path: &Path, values: &[f64]) -> Result<usize, CliError> {
    let mut wtr = csv::Writer::from_path(path).map_err(CliError::from)?;
    for &value in values {
        wtr.serialize(ValueRow { value })?;
    }
    wtr.flush()
        .map_err(CliError::io(path.display().to_string()))?;
    Ok(values.len())
}

pub fn run(args: &SimulateArgs) -> Result<(), CliError> {
    if args.condition_positive && args.emit == EmitKind::Batch {
        return Err(CliError::Config(
            "--condition-positive requires --emit quotient or --emit rc".to_string(),
        ));
    }
    if args.pf.is_some() && args.emit != EmitKind::Rc {
        return Err(CliError::Config(
            "--pf only applies to --emit rc".to_string(),
        ));
    }
    let model = config::load_model(&args.config)?;
    let digest = config::file_digest(&args.config)?;
    let manifest = RunManifest::begin(
        "simulate",
        Some(digest),
        Some(args.seed),
        Some(args.stream_id),
    );

    let stream = RngStream::new(args.seed, args.stream_id);
    let batch = sample_batch(&model, args.n, stream, args.threads)?;

    let (n_written, discards) = match args.emit {
        EmitKind::Batch => {
            let n = write_batch_csv(&args.out, &batch)?;
            (n, (0, 0))
        }
        EmitKind::Quotient => {
            let q = quotient_from_batch(&model, &batch, args.condition_positive);
            let n = write_value_csv(&args.out, &q.values)?;
            (n, (q.rejected_nonpositive, q.discarded_zero_denominator))
        }
        EmitKind::Rc => {
            let pf = config::load_price_function(args.pf.as_ref().expect("required by parser"))?;
            let mut q = quotient_from_batch(&model, &batch, args.condition_positive);
            q = transform_values(q, &pf)?;
            let n = write_value_csv(&args.out, &q.values)?;
            (n, (q.rejected_nonpositive, q.discarded_zero_denominator))
        }
    };

    let meta = SimulateMeta {
        seed: args.seed,
        stream_id: args.stream_id,
        model_digest: format!("{:016x}", batch.model_digest),
        emit: format!("{:?}", args.emit).to_lowercase(),
        condition_positive: args.condition_positive,
        n_requested: args.n,
        n_written,
        rejected_nonpositive: discards.0,
        discarded_zero_denominator: discards.1,
    };
    let meta_path = {
        let mut name = args.out.as_os_str().to_os_string();
        name.push(".meta.json");
        std::path::PathBuf::from(name)
    };
    let text = serde_json::to_string_pretty(&meta)?;
    std::fs::write(&meta_path, text + "\n")
        .map_err(CliError::io(meta_path.display().to_string()))?;

    manifest.finish_and_write(&args.out)
}

/// Map quotients through the relative-change transform, folding exact
/// zeros into the discard count the same way the library sampler does.
fn transform_values(
    mut q: QuotientSamples,
    pf: &quotail_core::PriceFunction,
) -> Result<QuotientSamples, CliError> {
    pf.validate()?;
    let mut values = Vec::with_capacity(q.values.len());
    for &x in &q.values {
        if x == 0.0 {
            q.discarded_zero_denominator += 1;
            continue;
        }
        values.push(transforms::g_fun(transforms::r_transform(x)?, pf));
    }
    q.values = values;
    Ok(q)
}
