//! Monte Carlo detection events.
//!
//! Each preparation trial draws, in order: which photons survive loss,
//! which sources add a contamination photon (and whether it survives), the
//! ordered port tuple of the surviving photons from their port weights, and
//! their detection times from the conditional density by rejection. The
//! proposal draws every time independently from the mean intensity
//! `Ī(t) = (1/k) Σ_j |ξ_j(t)|²` of the `k` surviving photons. Writing
//! `κ_j = sup_t |ξ_j(t)|²/Ī(t)` (exactly one for a common envelope, never
//! above `k`), `|perm M|² ≤ perm(|U_d|·diag(√κ))² · Π_i Ī(t_i)`, which is the
//! envelope constant used for acceptance.
//!
//! Contamination photons are classical: routed by `|U[d, j]|²` and timed by
//! `|ξ_j|²`, without interfering. Every trial owns a ChaCha8 stream selected by
//! its index, so results never depend on the worker count.

mod event;
mod noise;
mod weights;

pub use event::{events_to_text, parse_events, read_events, write_events, DetectionEvent, Record, FLAG_CONTAMINATED};
pub use noise::{
    contamination_from_g2, table_contamination, NoiseModel, DEFAULT_JITTER_NS, G2_EXCITATION, G2_TABLE,
    PAPER_EXCITATION,
};
pub use weights::{port_weights, PortWeights};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::correlation::check_network;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::permanent::permanent_slice;
use crate::wavepacket::{SourceSet, QUAD_STEP_NS};
use crate::C64;
use weights::{tuple_of, weights_for_inputs};

/// Proposals allowed for a single event before giving up.
pub const MAX_PROPOSALS_PER_EVENT: u64 = 1 << 20;
/// Trials per parallel chunk.
const CHUNK: u64 = 8192;
/// Numerical slack on the rejection bound.
const BOUND_SLACK: f64 = 1e-9;
/// Safety factor on a numerically estimated `κ`.
const KAPPA_MARGIN: f64 = 1.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Statistics {
    /// Interfering photons: times drawn from `|perm M|²`.
    Quantum,
    /// Independent photons: no interference terms.
    Distinguishable,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplerOptions {
    /// Keep only trials with exactly one detection on each of `N` distinct
    /// ports, `N` being the number of sources.
    pub post_select: bool,
    /// Trial budget per requested event.
    pub max_trials_per_event: u64,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        Self { post_select: true, max_trials_per_event: 100_000 }
    }
}

/// Outcome of a sampling run with its bookkeeping.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleRun {
    pub events: Vec<DetectionEvent>,
    /// Preparation trials consumed.
    pub trials: u64,
    /// Rejection proposals and acceptances over all trials.
    pub proposals: u64,
    pub accepted: u64,
}

impl SampleRun {
    pub fn acceptance(&self) -> f64 {
        if self.proposals == 0 {
            1.0
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }
}

struct SubsetPlan {
    inputs: Vec<usize>,
    cumulative: Vec<f64>,
    bounds: Vec<f64>,
}

pub struct Sampler {
    statistics: Statistics,
    u: ComplexMatrix,
    sources: SourceSet,
    noise: NoiseModel,
    options: SamplerOptions,
    /// Indexed by the bit mask of surviving photons.
    plans: Vec<Option<SubsetPlan>>,
    /// Cumulative `|U[d, j]|²` over ports `d`, per source `j`.
    routing: Vec<Vec<f64>>,
}

impl Sampler {
    pub fn new(u: &ComplexMatrix, sources: &SourceSet, noise: &NoiseModel, statistics: Statistics) -> Result<Self> {
        check_network(u, sources)?;
        noise.validate(sources.len())?;
        let n = sources.len();
        if n == 0 || n > 16 {
            return Err(Error::Sampler(format!("{n} sources is outside 1..=16")));
        }
        let routing = (0..n)
            .map(|j| {
                let mut acc = 0.0;
                (0..u.n_rows())
                    .map(|d| {
                        acc += u[(d, j)].norm_sqr();
                        acc
                    })
                    .collect()
            })
            .collect();
        let mut plans: Vec<Option<SubsetPlan>> = (0..1usize << n).map(|_| None).collect();
        if statistics == Statistics::Quantum {
            let gram = sources.gram();
            for (mask, plan) in plans.iter_mut().enumerate().skip(1) {
                let inputs: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
                *plan = Some(subset_plan(u, sources, &gram, inputs)?);
            }
        }
        Ok(Self {
            statistics,
            u: u.clone(),
            sources: sources.clone(),
            noise: noise.clone(),
            options: SamplerOptions::default(),
            plans,
            routing,
        })
    }

    pub fn with_options(mut self, options: SamplerOptions) -> Self {
        self.options = options;
        self
    }

    /// Runs trials in index order until `n_events` events are emitted.
    pub fn run(&self, n_events: usize, seed: u64) -> Result<SampleRun> {
        let mut run = SampleRun { events: Vec::with_capacity(n_events), trials: 0, proposals: 0, accepted: 0 };
        if n_events == 0 || self.noise.efficiency.iter().all(|&e| e == 0.0) {
            return Ok(run);
        }
        let base = ChaCha8Rng::seed_from_u64(seed);
        let budget = (n_events as u64).saturating_mul(self.options.max_trials_per_event);
        while run.events.len() < n_events {
            if run.trials >= budget {
                return Err(Error::Sampler(format!(
                    "trial budget exhausted: {} of {n_events} events after {} trials",
                    run.events.len(),
                    run.trials
                )));
            }
            let end = (run.trials + CHUNK).min(budget);
            let outcomes: Vec<Result<TrialOutcome>> =
                (run.trials..end).into_par_iter().map(|id| self.trial(&base, id)).collect();
            for (id, outcome) in (run.trials..end).zip(outcomes) {
                let outcome = outcome?;
                if run.events.len() == n_events {
                    break;
                }
                run.trials = id + 1;
                run.proposals += outcome.proposals;
                run.accepted += outcome.accepted;
                if let Some((records, contaminated)) = outcome.event {
                    let event_id = run.events.len() as u64;
                    run.events.push(DetectionEvent::new(event_id, id, records, contaminated));
                }
            }
        }
        Ok(run)
    }

    fn trial(&self, base: &ChaCha8Rng, id: u64) -> Result<TrialOutcome> {
        let mut rng = base.clone();
        rng.set_stream(id);
        let n = self.sources.len();
        let mut mask = 0usize;
        for j in 0..n {
            if rng.gen::<f64>() < self.noise.efficiency[j] {
                mask |= 1 << j;
            }
        }
        let mut extras = Vec::new();
        for j in 0..n {
            let emitted = rng.gen::<f64>() < self.noise.contamination[j];
            if emitted && rng.gen::<f64>() < self.noise.efficiency[j] {
                extras.push(j);
            }
        }
        let detections = mask.count_ones() as usize + extras.len();
        let mut outcome = TrialOutcome { event: None, proposals: 0, accepted: 0 };
        if detections == 0 || (self.options.post_select && detections != n) {
            return Ok(outcome);
        }
        let mut records = Vec::with_capacity(detections);
        if mask != 0 {
            match self.statistics {
                Statistics::Quantum => {
                    let plan = self.plans[mask].as_ref().expect("plans cover every subset");
                    let (recs, proposals) = self.sample_quantum(plan, &mut rng)?;
                    outcome.proposals = proposals;
                    outcome.accepted = 1;
                    records.extend(recs);
                }
                Statistics::Distinguishable => {
                    for j in (0..n).filter(|j| mask >> j & 1 == 1) {
                        records.push(self.classical_photon(j, &mut rng));
                    }
                }
            }
        }
        for &j in &extras {
            records.push(self.classical_photon(j, &mut rng));
        }
        if self.noise.jitter_ns > 0.0 {
            let jitter = Normal::new(0.0, self.noise.jitter_ns).expect("validated jitter");
            for r in &mut records {
                r.time += jitter.sample(&mut rng);
            }
        }
        if self.options.post_select {
            let mut ports: Vec<usize> = records.iter().map(|r| r.port).collect();
            ports.sort_unstable();
            ports.dedup();
            if ports.len() != n {
                return Ok(outcome);
            }
        }
        outcome.event = Some((records, !extras.is_empty()));
        Ok(outcome)
    }

    fn classical_photon(&self, j: usize, rng: &mut ChaCha8Rng) -> Record {
        let cdf = &self.routing[j];
        let x = rng.gen::<f64>() * cdf[cdf.len() - 1];
        let port = cdf.partition_point(|&c| c <= x).min(cdf.len() - 1) + 1;
        Record { port, time: self.sources.get(j).sample_time(rng) }
    }

    fn sample_quantum(&self, plan: &SubsetPlan, rng: &mut ChaCha8Rng) -> Result<(Vec<Record>, u64)> {
        let k = plan.inputs.len();
        let total = plan.cumulative[plan.cumulative.len() - 1];
        let x = rng.gen::<f64>() * total;
        let idx = plan.cumulative.partition_point(|&c| c <= x).min(plan.cumulative.len() - 1);
        let ports = tuple_of(idx, self.u.n_rows(), k);
        let bound = plan.bounds[idx];
        let mut m = vec![C64::new(0.0, 0.0); k * k];
        let mut times = vec![0.0; k];
        for proposal in 1..=MAX_PROPOSALS_PER_EVENT {
            for t in times.iter_mut() {
                let j = plan.inputs[rng.gen_range(0..k)];
                *t = self.sources.get(j).sample_time(rng);
            }
            let mut proposal_density = 1.0;
            for (i, &t) in times.iter().enumerate() {
                let mut mean = 0.0;
                for (c, &j) in plan.inputs.iter().enumerate() {
                    let xi = self.sources.get(j).amplitude(t);
                    mean += xi.norm_sqr();
                    m[i * k + c] = self.u[(ports[i] - 1, j)] * xi;
                }
                proposal_density *= mean / k as f64;
            }
            let ratio = permanent_slice(&m, k).norm_sqr() / (bound * proposal_density);
            if ratio > 1.0 + BOUND_SLACK {
                return Err(Error::Sampler(format!(
                    "rejection bound violated for ports {ports:?} (ratio {ratio:.6})"
                )));
            }
            if rng.gen::<f64>() < ratio {
                let records = ports.iter().zip(&times).map(|(&port, &time)| Record { port, time }).collect();
                return Ok((records, proposal));
            }
        }
        Err(Error::LowAcceptance { ports, accepted: 0, proposals: MAX_PROPOSALS_PER_EVENT })
    }
}

struct TrialOutcome {
    event: Option<(Vec<Record>, bool)>,
    proposals: u64,
    accepted: u64,
}

fn subset_plan(u: &ComplexMatrix, sources: &SourceSet, gram: &[Vec<C64>], inputs: Vec<usize>) -> Result<SubsetPlan> {
    let k = inputs.len();
    let weights = weights_for_inputs(u, gram, &inputs)?;
    let kappa = envelope_constants(sources, &inputs);
    let mut acc = 0.0;
    let cumulative = weights
        .as_slice()
        .iter()
        .map(|&w| {
            acc += w.max(0.0);
            acc
        })
        .collect();
    let bounds = (0..weights.as_slice().len())
        .map(|idx| {
            let ports = tuple_of(idx, u.n_rows(), k);
            let a: Vec<C64> = ports
                .iter()
                .flat_map(|&d| inputs.iter().zip(&kappa).map(move |(&j, &kap)| C64::new(u[(d - 1, j)].norm() * kap.sqrt(), 0.0)))
                .collect();
            permanent_slice(&a, k).re.powi(2)
        })
        .collect();
    Ok(SubsetPlan { inputs, cumulative, bounds })
}

/// `κ_j = sup_t |ξ_j(t)|² / Ī(t)` over the photons in `inputs`.
fn envelope_constants(sources: &SourceSet, inputs: &[usize]) -> Vec<f64> {
    let k = inputs.len();
    let first = sources.get(inputs[0]);
    let common = inputs
        .iter()
        .all(|&j| sources.get(j).envelope() == first.envelope() && sources.get(j).t0() == first.t0());
    if common {
        return vec![1.0; k];
    }
    let (lo, hi) = inputs.iter().map(|&j| sources.get(j).support()).fold((f64::INFINITY, f64::NEG_INFINITY), |a, b| {
        (a.0.min(b.0), a.1.max(b.1))
    });
    let steps = ((hi - lo) / QUAD_STEP_NS).ceil() as usize;
    let mut kappa = vec![0.0f64; k];
    for s in 0..=steps {
        let t = lo + s as f64 * QUAD_STEP_NS;
        let intensities: Vec<f64> = inputs.iter().map(|&j| sources.get(j).intensity(t)).collect();
        let mean = intensities.iter().sum::<f64>() / k as f64;
        if mean > 0.0 {
            for (kap, i) in kappa.iter_mut().zip(&intensities) {
                *kap = kap.max(i / mean);
            }
        }
    }
    kappa.into_iter().map(|kap| (kap * KAPPA_MARGIN).min(k as f64)).collect()
}

/// Interfering photons with the default options.
pub fn sample_events(
    u: &ComplexMatrix,
    sources: &SourceSet,
    noise: &NoiseModel,
    n_events: usize,
    seed: u64,
) -> Result<Vec<DetectionEvent>> {
    Ok(Sampler::new(u, sources, noise, Statistics::Quantum)?.run(n_events, seed)?.events)
}

/// Classical baseline: each photon routed and timed independently.
pub fn sample_distinguishable(
    u: &ComplexMatrix,
    sources: &SourceSet,
    noise: &NoiseModel,
    n_events: usize,
    seed: u64,
) -> Result<Vec<DetectionEvent>> {
    Ok(Sampler::new(u, sources, noise, Statistics::Distinguishable)?.run(n_events, seed)?.events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{paper_network, tritter};
    use crate::wavepacket::{paper_sources, Envelope, Wavepacket};

    fn two_photon_bs() -> (ComplexMatrix, SourceSet) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let u = ComplexMatrix::from_rows(
            2,
            2,
            vec![C64::new(h, 0.0), C64::new(0.0, h), C64::new(0.0, h), C64::new(h, 0.0)],
        )
        .unwrap();
        let env = Envelope::double_exponential_ns(5.0, 25.0);
        let s = SourceSet::ideal(vec![
            Wavepacket::new(env.clone(), 0.0, 0.0).unwrap(),
            Wavepacket::new(env, 0.0, 20.0).unwrap(),
        ])
        .unwrap();
        (u, s)
    }

    #[test]
    fn zero_efficiency_emits_nothing() {
        let noise = NoiseModel::uniform(3, 0.0, 0.1, 0.5).unwrap();
        let ev = sample_events(&tritter(), &paper_sources(), &noise, 100, 1).unwrap();
        assert!(ev.is_empty());
    }

    #[test]
    fn seeded_runs_repeat() {
        let u = paper_network(0.3).unwrap();
        let noise = NoiseModel::paper();
        let a = sample_events(&u, &paper_sources(), &noise, 200, 42).unwrap();
        let b = sample_events(&u, &paper_sources(), &noise, 200, 42).unwrap();
        assert_eq!(a.len(), 200);
        assert_eq!(a, b);
        assert!(a.iter().all(DetectionEvent::is_threefold));
        let c = sample_events(&u, &paper_sources(), &noise, 200, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn event_ids_are_sequential_and_batches_increase() {
        let ev = sample_events(&tritter(), &paper_sources(), &NoiseModel::paper(), 50, 5).unwrap();
        assert!(ev.iter().enumerate().all(|(k, e)| e.event_id == k as u64));
        assert!(ev.windows(2).all(|w| w[0].batch_id < w[1].batch_id));
    }

    #[test]
    fn distinguishable_pair_splits_half_the_time() {
        let (u, s) = two_photon_bs();
        let sampler = Sampler::new(&u, &s, &NoiseModel::ideal(2), Statistics::Distinguishable)
            .unwrap()
            .with_options(SamplerOptions { post_select: false, ..Default::default() });
        let n = 40_000;
        let run = sampler.run(n, 9).unwrap();
        let split = run.events.iter().filter(|e| e.records[0].port != e.records[1].port).count();
        let frac = split as f64 / n as f64;
        assert!((frac - 0.5).abs() < 5.0 * (0.25 / n as f64).sqrt(), "{frac}");
    }

    #[test]
    fn quantum_pair_never_splits_at_equal_times() {
        // Color-different photons on a 50:50 splitter: coincidences vanish
        // at zero delay, so sampled split events avoid t1 = t2.
        let (u, s) = two_photon_bs();
        let ev = sample_events(&u, &s, &NoiseModel::ideal(2), 4000, 3).unwrap();
        let near = ev.iter().filter(|e| (e.records[0].time - e.records[1].time).abs() < 0.5).count();
        // An interference-free density would put ~3% of events here.
        assert!((near as f64) < 0.005 * ev.len() as f64, "{near}");
    }

    #[test]
    fn unequal_envelopes_keep_the_bound() {
        let wps = vec![
            Wavepacket::new(Envelope::double_exponential_ns(5.0, 25.0), 0.0, 72.4).unwrap(),
            Wavepacket::new(Envelope::double_exponential_ns(3.0, 40.0), 2.0, 33.0).unwrap(),
            Wavepacket::new(Envelope::Gaussian { sigma: 8.0 }, 20.0, 52.4).unwrap(),
        ];
        let s = SourceSet::ideal(wps).unwrap();
        let run = Sampler::new(&tritter(), &s, &NoiseModel::ideal(3), Statistics::Quantum).unwrap().run(500, 2).unwrap();
        assert_eq!(run.events.len(), 500);
        assert!(run.acceptance() > 1e-3, "{}", run.acceptance());
    }
}
