//! Monte-Carlo samplers for the leg pair `(R1, R2)`, the scaled quotient,
//! and its price transform.
//!
//! Sampling follows the model definition exactly: draw the jump counts,
//! then draw the legs from the conditional bivariate normal with the
//! moments of [`QuotientModel::conditional_moments`]. Batches are filled
//! chunk by chunk through [`crate::rng::RngStream`], so a serial fill and a
//! multi-threaded fill of the same chunks are bitwise identical.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::model::{CorrelationSpec, JumpCountModel, PriceFunction, QuotientModel};
use crate::rng::{chunk_layout, RngStream, DOMAIN_PAIRS};
use crate::transforms;

/// A batch of leg samples with the provenance needed to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    /// Demand-leg values.
    pub r1: Vec<f64>,
    /// Supply-leg values.
    pub r2: Vec<f64>,
    /// Demand jump counts.
    pub k1: Vec<u32>,
    /// Supply jump counts.
    pub k2: Vec<u32>,
    /// Seed the batch was drawn with.
    pub seed: u64,
    /// Stream id the batch was drawn with.
    pub stream_id: u64,
    /// Content hash of the generating model ([`QuotientModel::digest64`]).
    pub model_digest: u64,
}

/// Quotient samples plus the bookkeeping of dropped draws.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientSamples {
    /// Retained values.
    pub values: Vec<f64>,
    /// Draws rejected by positivity conditioning.
    pub rejected_nonpositive: u64,
    /// Draws discarded because a zero denominator (or an exactly zero
    /// quotient, for transformed samples) makes the value undefined.
    pub discarded_zero_denominator: u64,
}

/// Draw the jump-count pair for one variate.
fn draw_counts<R: Rng>(rng: &mut R, pois: &CountDists) -> (u64, u64) {
    match pois {
        CountDists::Independent(p1, p2) => {
            let k1 = p1.as_ref().map_or(0.0, |p| p.sample(rng));
            let k2 = p2.as_ref().map_or(0.0, |p| p.sample(rng));
            (k1 as u64, k2 as u64)
        }
        CountDists::Bivariate(p01, p02, p12) => {
            let j01 = p01.as_ref().map_or(0.0, |p| p.sample(rng));
            let j02 = p02.as_ref().map_or(0.0, |p| p.sample(rng));
            let j12 = p12.as_ref().map_or(0.0, |p| p.sample(rng));
            (j01 as u64 + j12 as u64, j02 as u64 + j12 as u64)
        }
    }
}

/// Pre-built Poisson distributions (None encodes a zero mean, which
/// `rand_distr` rejects and which is the deterministic zero count).
enum CountDists {
    Independent(Option<Poisson<f64>>, Option<Poisson<f64>>),
    Bivariate(
        Option<Poisson<f64>>,
        Option<Poisson<f64>>,
        Option<Poisson<f64>>,
    ),
}

fn build_count_dists(jumps: &JumpCountModel, dt: f64) -> Result<CountDists> {
    let mk = |mean: f64| -> Result<Option<Poisson<f64>>> {
        if mean == 0.0 {
            Ok(None)
        } else {
            Poisson::new(mean)
                .map(Some)
                .map_err(|_| Error::Domain("sampler: invalid Poisson mean"))
        }
    };
    Ok(match *jumps {
        JumpCountModel::Independent { lambda1, lambda2 } => {
            CountDists::Independent(mk(lambda1 * dt)?, mk(lambda2 * dt)?)
        }
        JumpCountModel::Bivariate {
            lambda01,
            lambda02,
            lambda12,
        } => CountDists::Bivariate(mk(lambda01)?, mk(lambda02)?, mk(lambda12)?),
    })
}

/// One-pair sampling plan shared by the batch driver and the price-path
/// simulator; both produce identical draws from identical RNG states.
pub(crate) struct PairSampler {
    pois: CountDists,
    kind: PairKind,
}

enum PairKind {
    Conditional {
        rho: f64,
        rho_comp: f64,
    },
    AntiCorrelated {
        half_sqrt_dt: f64,
        mu: f64,
        delta: f64,
        mu01: f64,
        drift_sum: f64,
    },
}

impl PairSampler {
    pub(crate) fn new(model: &QuotientModel) -> Result<Self> {
        let pois = build_count_dists(&model.jumps, model.dt)?;
        let kind = match model.corr {
            CorrelationSpec::Conditional { rho } => PairKind::Conditional {
                rho,
                rho_comp: libm::sqrt(1.0 - rho * rho),
            },
            CorrelationSpec::AntiCorrelated => PairKind::AntiCorrelated {
                half_sqrt_dt: model.demand.sigma0 / 2.0 * libm::sqrt(model.dt),
                mu: model.demand.jump_mu,
                delta: model.demand.jump_sigma,
                mu01: model.demand.mu0,
                drift_sum: model.demand.mu0 + model.supply.mu0,
            },
        };
        Ok(PairSampler { pois, kind })
    }

    /// Draw one `(r1, r2, k1, k2)` tuple.
    pub(crate) fn draw<R: Rng>(&self, model: &QuotientModel, rng: &mut R) -> (f64, f64, u64, u64) {
        match self.kind {
            PairKind::Conditional { rho, rho_comp } => {
                let (c1, c2) = draw_counts(rng, &self.pois);
                let m = model.conditional_moments(c1, c2);
                let z1: f64 = StandardNormal.sample(rng);
                let z2: f64 = StandardNormal.sample(rng);
                (
                    m.mu_r1 + m.sigma_r1 * z1,
                    m.mu_r2 + m.sigma_r2 * (rho * z1 + rho_comp * z2),
                    c1,
                    c2,
                )
            }
            PairKind::AntiCorrelated {
                half_sqrt_dt,
                mu,
                delta,
                mu01,
                drift_sum,
            } => {
                // One shared jump count; the supply leg carries the exact
                // negation of the demand noise, so R1 + R2 = mu01 + mu02
                // always.
                let (c, _) = draw_counts(rng, &self.pois);
                let zw: f64 = StandardNormal.sample(rng);
                let zj: f64 = StandardNormal.sample(rng);
                let kf = c as f64;
                let noise = half_sqrt_dt * zw + kf * mu + libm::sqrt(kf) * delta * zj;
                let r1 = mu01 + noise;
                // Mirrored form keeps r1 + r2 = mu01 + mu02 bit-exact.
                (r1, drift_sum - r1, c, c)
            }
        }
    }
}

/// Fill one chunk of leg samples. `chunk_index` addresses the RNG key;
/// all four slices must have equal length (at most [`crate::rng::CHUNK_SIZE`]).
///
/// Exposed so a std-side driver can fan chunks out across threads while
/// keeping output identical to [`sample_pair_batch`].
pub fn fill_pair_chunk(
    model: &QuotientModel,
    stream: RngStream,
    chunk_index: u64,
    r1: &mut [f64],
    r2: &mut [f64],
    k1: &mut [u32],
    k2: &mut [u32],
) -> Result<()> {
    debug_assert!(r1.len() == r2.len() && r1.len() == k1.len() && r1.len() == k2.len());
    let mut rng = stream.chunk_rng(DOMAIN_PAIRS, chunk_index);
    let sampler = PairSampler::new(model)?;
    for i in 0..r1.len() {
        let (a, b, c1, c2) = sampler.draw(model, &mut rng);
        r1[i] = a;
        r2[i] = b;
        k1[i] = c1 as u32;
        k2[i] = c2 as u32;
    }
    Ok(())
}

/// Draw `n` leg pairs serially.
pub fn sample_pair_batch(
    model: &QuotientModel,
    n: usize,
    stream: RngStream,
) -> Result<SampleBatch> {
    model.validate()?;
    let mut r1 = vec![0.0; n];
    let mut r2 = vec![0.0; n];
    let mut k1 = vec![0u32; n];
    let mut k2 = vec![0u32; n];
    for (chunk_index, len) in chunk_layout(n) {
        let start = chunk_index as usize * crate::rng::CHUNK_SIZE;
        fill_pair_chunk(
            model,
            stream,
            chunk_index,
            &mut r1[start..start + len],
            &mut r2[start..start + len],
            &mut k1[start..start + len],
            &mut k2[start..start + len],
        )?;
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

/// Reduce a batch to scaled quotients `d_over_s * r1 / r2`.
///
/// With `condition_positive` set, draws with a nonpositive leg are rejected
/// (post-hoc filtering; the output shrinks rather than being topped up).
/// Draws with `r2 == 0` are undefined and discarded with their own count.
pub fn quotient_from_batch(
    model: &QuotientModel,
    batch: &SampleBatch,
    condition_positive: bool,
) -> QuotientSamples {
    let mut out = QuotientSamples {
        values: Vec::with_capacity(batch.r1.len()),
        rejected_nonpositive: 0,
        discarded_zero_denominator: 0,
    };
    for (&a, &b) in batch.r1.iter().zip(&batch.r2) {
        if condition_positive && !(a > 0.0 && b > 0.0) {
            out.rejected_nonpositive += 1;
            continue;
        }
        if b == 0.0 {
            out.discarded_zero_denominator += 1;
            continue;
        }
        out.values.push(model.d_over_s * a / b);
    }
    out
}

/// Draw `n` pairs and return their scaled quotients.
pub fn sample_quotient(
    model: &QuotientModel,
    n: usize,
    stream: RngStream,
    condition_positive: bool,
) -> Result<QuotientSamples> {
    let batch = sample_pair_batch(model, n, stream)?;
    Ok(quotient_from_batch(model, &batch, condition_positive))
}

/// Draw `n` pairs and return `G_eps` of their scaled quotients.
///
/// Exactly zero quotients (possible only when `r1` draws exactly zero) have
/// no `r` image and are folded into the discard count.
pub fn sample_rc(
    model: &QuotientModel,
    pf: &PriceFunction,
    n: usize,
    stream: RngStream,
    condition_positive: bool,
) -> Result<QuotientSamples> {
    pf.validate()?;
    let mut q = sample_quotient(model, n, stream, condition_positive)?;
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
