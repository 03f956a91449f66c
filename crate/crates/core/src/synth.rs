//! Deterministic synthetic tick generators for oracles and benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::ingest::{Tick, TickSeries};

/// Price model for the generator.
#[derive(Debug, Clone, Copy)]
pub enum SynthModel {
    /// ln p(τ) = ln p₀ + b·τ.
    LnLinear { p0: f64, b: f64 },
    /// p(τ) = a₁ + a₂·cos(ω·τ), a₁ > a₂ ≥ 0.
    Cosine { a1: f64, a2: f64, omega: f64 },
    /// Geometric Brownian motion with per-tick drift μ and volatility σ.
    Gbm { p0: f64, mu: f64, sigma: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct SynthParams {
    pub model: SynthModel,
    pub n: usize,
    pub seed: u64,
    /// Absolute ask−bid spread; 0 collapses both quotes onto the mid.
    pub spread: f64,
    pub start_ms: i64,
    pub dt_ms: i64,
}

impl SynthParams {
    pub fn new(model: SynthModel, n: usize, seed: u64) -> Self {
        Self { model, n, seed, spread: 0.0, start_ms: 0, dt_ms: 1000 }
    }
}

/// Generates a tick series; identical inputs (including seed) give identical
/// output bytes.
pub fn synth(params: &SynthParams) -> Result<TickSeries> {
    if params.n < 2 {
        return Err(Error::InvalidParams("need n >= 2 ticks".into()));
    }
    if params.dt_ms <= 0 {
        return Err(Error::InvalidParams("dt must be positive".into()));
    }
    if params.spread < 0.0 {
        return Err(Error::InvalidParams("spread must be >= 0".into()));
    }
    let mids: Vec<f64> = match params.model {
        SynthModel::LnLinear { p0, b } => {
            if !(p0 > 0.0) {
                return Err(Error::InvalidParams("p0 must be positive".into()));
            }
            (0..params.n).map(|i| p0 * (b * i as f64).exp()).collect()
        }
        SynthModel::Cosine { a1, a2, omega } => {
            if !(a2 >= 0.0 && a1 > a2) {
                return Err(Error::InvalidParams("cosine needs a1 > a2 >= 0".into()));
            }
            (0..params.n).map(|i| a1 + a2 * (omega * i as f64).cos()).collect()
        }
        SynthModel::Gbm { p0, mu, sigma } => {
            if !(p0 > 0.0) || sigma < 0.0 {
                return Err(Error::InvalidParams("gbm needs p0 > 0 and sigma >= 0".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            let drift = mu - 0.5 * sigma * sigma;
            let mut ln_p = p0.ln();
            (0..params.n)
                .map(|i| {
                    if i > 0 {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        ln_p += drift + sigma * z;
                    }
                    ln_p.exp()
                })
                .collect()
        }
    };
    let half = params.spread / 2.0;
    let ticks: Vec<Tick> = mids
        .iter()
        .enumerate()
        .map(|(i, &m)| Tick {
            t_ms: params.start_ms + i as i64 * params.dt_ms,
            ask: m + half,
            bid: m - half,
        })
        .collect();
    if let Some(bad) = ticks.iter().find(|t| !(t.bid > 0.0)) {
        return Err(Error::InvalidParams(format!(
            "spread {} drives the bid non-positive at mid {}",
            params.spread,
            bad.bid + half
        )));
    }
    TickSeries::new(model_label(&params.model), ticks)
}

fn model_label(model: &SynthModel) -> &'static str {
    match model {
        SynthModel::LnLinear { .. } => "SYNTH/LNLIN",
        SynthModel::Cosine { .. } => "SYNTH/COS",
        SynthModel::Gbm { .. } => "SYNTH/GBM",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lnlinear_flat_when_b_zero() {
        let s = synth(&SynthParams::new(SynthModel::LnLinear { p0: 1.5, b: 0.0 }, 10, 0)).unwrap();
        assert!(s.ask.iter().all(|&a| a == 1.5));
    }

    #[test]
    fn cosine_flat_when_a2_zero() {
        let s = synth(&SynthParams::new(
            SynthModel::Cosine { a1: 2.0, a2: 0.0, omega: 0.3 },
            10,
            0,
        ))
        .unwrap();
        assert!(s.ask.iter().all(|&a| a == 2.0));
        assert!(synth(&SynthParams::new(
            SynthModel::Cosine { a1: 1.0, a2: 1.0, omega: 0.3 },
            10,
            0
        ))
        .is_err());
    }

    #[test]
    fn gbm_is_seed_deterministic() {
        let p = SynthParams::new(SynthModel::Gbm { p0: 1.0, mu: 0.0, sigma: 0.01 }, 500, 42);
        let a = synth(&p).unwrap();
        let b = synth(&p).unwrap();
        assert_eq!(a, b);
        let c = synth(&SynthParams { seed: 43, ..p }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn spread_splits_quotes() {
        let mut p = SynthParams::new(SynthModel::LnLinear { p0: 1.0, b: 0.001 }, 5, 0);
        p.spread = 0.002;
        let s = synth(&p).unwrap();
        for i in 0..s.len() {
            assert!((s.ask[i] - s.bid[i] - 0.002).abs() < 1e-15);
        }
        p.spread = 3.0;
        assert!(synth(&p).is_err(), "bid would go non-positive");
    }
}
