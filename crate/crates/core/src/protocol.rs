//! Repeat-until-success preparation of `n` heralded photons from memories.
//!
//! Every source retries its write step until it heralds an excitation, for at
//! most `m` trials per batch; the batch yields an `n`-photon event only if
//! all sources are ready by then, otherwise it is discarded and the next
//! batch starts from scratch. Compared with requiring all sources to fire in
//! one and the same trial, the rate per write trial improves by
//! `[1 − (1 − p_e)^m]^n / (m·p_eⁿ)`.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_BATCHES: u64 = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    /// Excitation probability per write trial.
    pub p_e: f64,
    /// Maximum trials per batch.
    pub m: u32,
    /// Number of sources.
    pub n: u32,
    /// Memory lifetime in μs (not simulated).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lifetime_us: Option<f64>,
    /// Duration of one write trial in μs (not simulated).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial_period_us: Option<f64>,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self { p_e: 0.04, m: 7, n: 3, lifetime_us: Some(64.0), trial_period_us: None }
    }
}

impl ProtocolConfig {
    pub fn new(p_e: f64, m: u32, n: u32) -> Result<Self> {
        let cfg = Self { p_e, m, n, lifetime_us: None, trial_period_us: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_e > 0.0 && self.p_e <= 1.0) {
            return Err(Error::InvalidProtocol(format!("p_e must lie in (0, 1], got {}", self.p_e)));
        }
        if self.m == 0 || self.n == 0 {
            return Err(Error::InvalidProtocol("m and n must be at least 1".into()));
        }
        Ok(())
    }

    /// Probability that one source is ready within `m` trials.
    pub fn ready_probability(&self) -> f64 {
        1.0 - (1.0 - self.p_e).powi(self.m as i32)
    }
}

/// `[1 − (1 − p_e)^m]^n / (m·p_eⁿ)`.
pub fn enhancement_factor(cfg: &ProtocolConfig) -> f64 {
    cfg.ready_probability().powi(cfg.n as i32) / (cfg.m as f64 * cfg.p_e.powi(cfg.n as i32))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateEstimate {
    pub batches: u64,
    /// Successful batches per write trial with feedback (each batch spends `m` trials).
    pub rate_feedback: f64,
    pub stderr_feedback: f64,
    /// Trials in which all sources fire at once, per trial.
    pub rate_naive: f64,
    pub stderr_naive: f64,
    pub ratio: f64,
    pub stderr_ratio: f64,
}

/// Simulates `n_batches` batches with feedback and the same number of write
/// trials without it. Batch `b` draws from its own ChaCha8 stream.
pub fn monte_carlo_rate(cfg: &ProtocolConfig, n_batches: u64, seed: u64) -> Result<RateEstimate> {
    cfg.validate()?;
    if n_batches < MIN_BATCHES {
        return Err(Error::InvalidProtocol(format!("need at least {MIN_BATCHES} batches, got {n_batches}")));
    }
    let base = ChaCha8Rng::seed_from_u64(seed);
    let (fb, naive) = (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = base.clone();
            rng.set_stream(b);
            let ready = (0..cfg.n).all(|_| (0..cfg.m).any(|_| rng.gen::<f64>() < cfg.p_e));
            // Independent draws for the baseline so the two estimates do not share noise.
            let mut naive = 0u64;
            for _ in 0..cfg.m {
                let fired = (0..cfg.n).map(|_| rng.gen::<f64>() < cfg.p_e).filter(|&f| f).count();
                naive += u64::from(fired == cfg.n as usize);
            }
            (u64::from(ready), naive)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if naive == 0 {
        return Err(Error::InvalidProtocol(format!(
            "the single-trial baseline never succeeded in {} trials; raise n_batches",
            n_batches * u64::from(cfg.m)
        )));
    }
    let trials = (n_batches * u64::from(cfg.m)) as f64;
    let p_fb = fb as f64 / n_batches as f64;
    let rate_feedback = p_fb / cfg.m as f64;
    let stderr_feedback = (p_fb * (1.0 - p_fb) / n_batches as f64).sqrt() / cfg.m as f64;
    let rate_naive = naive as f64 / trials;
    let stderr_naive = (rate_naive * (1.0 - rate_naive) / trials).sqrt();
    let ratio = rate_feedback / rate_naive;
    let rel = |se: f64, r: f64| if r > 0.0 { se / r } else { 0.0 };
    let stderr_ratio = ratio * (rel(stderr_feedback, rate_feedback).powi(2) + rel(stderr_naive, rate_naive).powi(2)).sqrt();
    Ok(RateEstimate { batches: n_batches, rate_feedback, stderr_feedback, rate_naive, stderr_naive, ratio, stderr_ratio })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolReport {
    pub config: ProtocolConfig,
    pub seed: u64,
    pub closed_form: f64,
    pub estimate: RateEstimate,
    /// `(ratio − closed_form) / stderr`.
    pub z: f64,
    pub within_3_sigma: bool,
}

impl ProtocolReport {
    pub fn run(cfg: &ProtocolConfig, n_batches: u64, seed: u64) -> Result<Self> {
        let closed_form = enhancement_factor(cfg);
        let estimate = monte_carlo_rate(cfg, n_batches, seed)?;
        let diff = estimate.ratio - closed_form;
        let z = if estimate.stderr_ratio > 0.0 {
            diff / estimate.stderr_ratio
        } else if diff.abs() <= 1e-12 * closed_form {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        };
        Ok(Self { config: cfg.clone(), seed, closed_form, estimate, z, within_3_sigma: z.abs() <= 3.0 })
    }

    pub fn to_text(&self) -> String {
        let c = &self.config;
        let e = &self.estimate;
        let mut s = String::new();
        writeln!(s, "# tr-boson protocol report v1").unwrap();
        writeln!(s, "p_e = {}", c.p_e).unwrap();
        writeln!(s, "m = {}", c.m).unwrap();
        writeln!(s, "n = {}", c.n).unwrap();
        if let Some(l) = c.lifetime_us {
            writeln!(s, "lifetime_us = {l}  # informational").unwrap();
        }
        if let Some(t) = c.trial_period_us {
            writeln!(s, "trial_period_us = {t}  # informational").unwrap();
        }
        writeln!(s, "batches = {}", e.batches).unwrap();
        writeln!(s, "seed = {}", self.seed).unwrap();
        writeln!(s, "closed_form = {}", self.closed_form).unwrap();
        writeln!(s, "rate_feedback = {} +- {}", e.rate_feedback, e.stderr_feedback).unwrap();
        writeln!(s, "rate_naive = {} +- {}", e.rate_naive, e.stderr_naive).unwrap();
        writeln!(s, "ratio = {} +- {}", e.ratio, e.stderr_ratio).unwrap();
        writeln!(s, "z = {:.3}", self.z).unwrap();
        writeln!(s, "within_3_sigma = {}", if self.within_3_sigma { "pass" } else { "fail" }).unwrap();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_limits() {
        for p in [0.01, 0.3, 0.9] {
            for n in 1..4 {
                let cfg = ProtocolConfig::new(p, 1, n).unwrap();
                assert!((enhancement_factor(&cfg) - 1.0).abs() < 1e-12);
            }
        }
        let cfg = ProtocolConfig::new(0.999, 7, 3).unwrap();
        assert!((enhancement_factor(&cfg) * 7.0 - 1.0).abs() < 0.01);
        let cfg = ProtocolConfig::default();
        let direct = (1.0 - 0.96f64.powi(7)).powi(3) / (7.0 * 0.04f64.powi(3));
        assert!((enhancement_factor(&cfg) - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn monotone_in_m_and_bounded_below() {
        for p in [0.01, 0.02, 0.03, 0.04, 0.05, 0.06] {
            for n in 1..=3 {
                let mut last = 0.0;
                for m in 1..=10 {
                    let e = enhancement_factor(&ProtocolConfig::new(p, m, n).unwrap());
                    assert!(e >= 1.0 / m as f64);
                    // A single source only dilutes its rate with extra trials.
                    if n == 1 {
                        assert!(m == 1 || e < last);
                    } else {
                        assert!(e > last);
                    }
                    last = e;
                }
            }
        }
    }

    #[test]
    fn certain_excitation_is_deterministic() {
        let r = ProtocolReport::run(&ProtocolConfig::new(1.0, 7, 3).unwrap(), 1000, 1).unwrap();
        assert_eq!(r.estimate.ratio, 1.0 / 7.0);
        assert_eq!(r.estimate.stderr_ratio, 0.0);
        assert!(r.within_3_sigma);
    }

    #[test]
    fn single_source_agrees() {
        let cfg = ProtocolConfig::new(0.04, 7, 1).unwrap();
        let r = ProtocolReport::run(&cfg, 200_000, 5).unwrap();
        assert!(r.z.abs() < 3.0, "{}", r.to_text());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ProtocolConfig::new(0.0, 7, 3).is_err());
        assert!(ProtocolConfig::new(0.1, 0, 3).is_err());
        assert!(monte_carlo_rate(&ProtocolConfig::default(), 10, 1).is_err());
    }

    #[test]
    fn seeded_and_repeatable() {
        let a = monte_carlo_rate(&ProtocolConfig::default(), 20_000, 9).unwrap();
        let b = monte_carlo_rate(&ProtocolConfig::default(), 20_000, 9).unwrap();
        assert_eq!(a, b);
    }
}
