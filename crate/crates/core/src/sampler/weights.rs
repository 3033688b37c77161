//! Probabilities of ordered output-port tuples.
//!
//! Integrating `|perm M|²` over all detection times factorizes into
//! single-photon overlaps, so
//! `C(d) = (1/N!) Σ_{σ,τ} Π_i U[d_i,σ_i]·conj(U[d_i,τ_i])·⟨ξ_{τ_i}|ξ_{σ_i}⟩`
//! with the Gram matrix evaluated by one-dimensional quadrature.

use crate::correlation::{check_network, factorial};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::wavepacket::SourceSet;
use crate::C64;

/// Upper bound on `n^N·(N!)²` product terms.
const TERM_BUDGET: f64 = 1e9;

#[derive(Clone, Debug, PartialEq)]
pub struct PortWeights {
    n_modes: usize,
    n_photons: usize,
    /// Indexed by the base-`n_modes` digits of `(d_1 − 1, …, d_N − 1)`.
    weights: Vec<f64>,
}

impl PortWeights {
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_photons(&self) -> usize {
        self.n_photons
    }

    pub fn get(&self, ports: &[usize]) -> Option<f64> {
        if ports.len() != self.n_photons || ports.iter().any(|&p| p == 0 || p > self.n_modes) {
            return None;
        }
        Some(self.weights[ports.iter().fold(0, |acc, &p| acc * self.n_modes + p - 1)])
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Ordered tuples (1-based) with their weights.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.weights.iter().enumerate().map(|(idx, &w)| (tuple_of(idx, self.n_modes, self.n_photons), w))
    }

    pub(crate) fn as_slice(&self) -> &[f64] {
        &self.weights
    }
}

pub(crate) fn tuple_of(mut idx: usize, n_modes: usize, n_photons: usize) -> Vec<usize> {
    let mut ports = vec![0; n_photons];
    for slot in ports.iter_mut().rev() {
        *slot = idx % n_modes + 1;
        idx /= n_modes;
    }
    ports
}

/// Port-tuple probabilities for the lossless network.
pub fn port_weights(u: &ComplexMatrix, sources: &SourceSet) -> Result<PortWeights> {
    check_network(u, sources)?;
    let inputs: Vec<usize> = (0..sources.len()).collect();
    weights_for_inputs(u, &sources.gram(), &inputs)
}

/// Weights for the photons entering `inputs` (0-based modes) only; `gram`
/// is indexed by input mode.
pub(crate) fn weights_for_inputs(u: &ComplexMatrix, gram: &[Vec<C64>], inputs: &[usize]) -> Result<PortWeights> {
    let n_modes = u.n_rows();
    let k = inputs.len();
    let n_tuples = n_modes.checked_pow(k as u32).unwrap_or(usize::MAX);
    let cost = n_tuples as f64 * factorial(k).powi(2);
    if cost > TERM_BUDGET {
        return Err(Error::Sampler(format!(
            "port-weight quadrature needs {cost:.2e} terms for {k} photons in {n_modes} modes"
        )));
    }
    let perms = permutations(k);
    let norm = factorial(k);
    let weights = (0..n_tuples)
        .map(|idx| {
            let d = tuple_of(idx, n_modes, k);
            let mut acc = C64::new(0.0, 0.0);
            for s in &perms {
                for t in &perms {
                    let mut term = C64::new(1.0, 0.0);
                    for i in 0..k {
                        let (a, b) = (inputs[s[i]], inputs[t[i]]);
                        term *= u[(d[i] - 1, a)] * u[(d[i] - 1, b)].conj() * gram[b][a];
                    }
                    acc += term;
                }
            }
            acc.re / norm
        })
        .collect();
    Ok(PortWeights { n_modes, n_photons: k, weights })
}

/// All permutations of `0..k` in lexicographic order.
pub(crate) fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                prefix.push(j);
                rec(prefix, used, out);
                prefix.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(k), &mut vec![false; k], &mut out);
    out
}
