//! Metropolis sampling of partitions under a discrete beta-ensemble.
//!
//! The chain proposes single-row moves `lambda_i -> lambda_i +- 1`
//! (uniform row, sign 1/2 each), auto-rejects moves leaving the box, and
//! accepts with probability `min(1, exp(Delta log pmf))`. One sweep is
//! `K` proposals. Because moves change one coordinate by one, the
//! acceptance log-ratio telescopes: each Gamma-ratio cross term differs
//! by a single log of a rational expression and the site weight differs
//! by the loop-equation ratio `Phi^+ / Phi^-`, so no log-Gamma is needed
//! in the hot loop. The tests pin this shortcut to the direct log-Gamma
//! pmf difference.
//!
//! Chains are independent units of work: one ChaCha stream per chain
//! (`set_stream(chain index)` on a common seed), shared read-only model,
//! results merged in chain order, so runs are deterministic regardless of
//! thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleModel;
use crate::error::{Error, Result};
use crate::partition::{enumerate_box, Partition};

/// Initial state of a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitState {
    /// The empty partition (always valid).
    #[default]
    Empty,
    /// The full `K x R` rectangle (top corner), for burn-in diagnostics.
    FullBox,
}

/// Chain schedule: total sweeps, burn-in sweeps, thinning, seed, chain count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub sweeps: u64,
    pub burnin: u64,
    pub thin: u64,
    pub seed: u64,
    pub chains: u64,
    #[serde(default)]
    pub init: InitState,
}

impl ChainConfig {
    pub fn new(sweeps: u64, burnin: u64, thin: u64, seed: u64) -> Self {
        ChainConfig { sweeps, burnin, thin, seed, chains: 1, init: InitState::Empty }
    }

    pub fn with_chains(mut self, chains: u64) -> Self {
        self.chains = chains;
        self
    }

    pub fn with_init(mut self, init: InitState) -> Self {
        self.init = init;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sweeps > 0 && self.sweeps <= self.burnin {
            return Err(Error::Config("need sweeps > burnin".into()));
        }
        if self.thin == 0 {
            return Err(Error::Config("thin must be >= 1".into()));
        }
        if self.chains == 0 {
            return Err(Error::Config("chains must be >= 1".into()));
        }
        Ok(())
    }
}

/// Output of one chain: thinned samples with their sweep indices, the
/// acceptance rate, and the final state.
#[derive(Debug, Clone)]
pub struct ChainOutput {
    pub chain: u64,
    pub samples: Vec<(u64, Partition)>,
    pub accept_rate: f64,
    pub final_state: Partition,
}

/// Mutable chain state: the `K`-padded part vector.
struct ChainState<'a> {
    model: &'a EnsembleModel,
    parts: Vec<u32>,
}

impl<'a> ChainState<'a> {
    fn new(model: &'a EnsembleModel, init: InitState) -> Self {
        let parts = match init {
            InitState::Empty => vec![0; model.k()],
            InitState::FullBox => vec![model.r() as u32; model.k()],
        };
        ChainState { model, parts }
    }

    fn ell(&self, row: usize) -> f64 {
        let k = self.parts.len();
        self.parts[row] as f64 + (k - 1 - row) as f64 * self.model.theta()
    }

    fn move_is_valid(&self, row: usize, up: bool) -> bool {
        let lam = self.parts[row];
        if up {
            u64::from(lam) < self.model.r() && (row == 0 || self.parts[row - 1] > lam)
        } else {
            lam >= 1 && (row + 1 == self.parts.len() || self.parts[row + 1] < lam)
        }
    }

    /// Acceptance log-ratio of the move, `-inf` when it leaves the state
    /// space. `O(K)` with one log per interacting pair.
    fn log_accept(&self, row: usize, up: bool) -> f64 {
        if !self.move_is_valid(row, up) {
            return f64::NEG_INFINITY;
        }
        let theta = self.model.theta();
        let x = self.ell(row);
        // Site weight: w(x+1)/w(x) = Phi^+(x+1)/Phi^-(x+1) and
        // w(x-1)/w(x) = Phi^-(x)/Phi^+(x).
        let weight_ratio = if up {
            let (plus, minus) = self.model.weight_ratio(x + 1.0);
            plus / minus
        } else {
            let (plus, minus) = self.model.weight_ratio(x);
            minus / plus
        };
        // Cross terms: c(d) = lnG(d+1) + lnG(d+theta) - lnG(d) - lnG(d+1-theta)
        // changes by c(d+1) - c(d) = ln[(d+1)(d+theta) / (d (d+1-theta))].
        // Each factor is 1 + O(1/gap), so the running product stays within
        // f64 range for any realistic K and a single log at the end suffices.
        let grow = |d: f64| (d + 1.0) * (d + theta) / (d * (d + 1.0 - theta));
        let mut ratio = weight_ratio;
        for j in 0..self.parts.len() {
            if j == row {
                continue;
            }
            let gap = (self.ell(j) - x).abs();
            let widens = (j > row) == up;
            if widens {
                ratio *= grow(gap);
            } else {
                ratio /= grow(gap - 1.0);
            }
        }
        ratio.ln()
    }

    fn apply(&mut self, row: usize, up: bool) {
        if up {
            self.parts[row] += 1;
        } else {
            self.parts[row] -= 1;
        }
    }

    fn snapshot(&self) -> Partition {
        let parts: Vec<u32> = self.parts.iter().copied().take_while(|&p| p > 0).collect();
        Partition::from_valid(parts)
    }
}

/// Acceptance log-ratio for the move `(row, +1/-1)` applied to `lambda`
/// under the model; `-inf` when the move exits the box. Rows are 1-based.
pub fn log_accept_ratio(
    model: &EnsembleModel,
    lambda: &Partition,
    row: usize,
    up: bool,
) -> Result<f64> {
    if row == 0 || row > model.k() {
        return Err(Error::Domain(format!("row {row} outside 1..={}", model.k())));
    }
    if !model.contains(lambda) {
        return Err(Error::Domain(format!("{lambda} outside the box")));
    }
    let state = ChainState { model, parts: lambda.padded(model.k())? };
    Ok(state.log_accept(row - 1, up))
}

/// Runs a single chain (index `chain`) and returns its thinned samples.
///
/// Sampling happens at sweeps `s > burnin` with `(s - burnin) % thin == 0`.
/// Deterministic: the same model, config and chain index give identical
/// output.
pub fn run_chain(model: &EnsembleModel, cfg: &ChainConfig, chain: u64) -> Result<ChainOutput> {
    cfg.validate()?;
    if model.r() > u32::MAX as u64 {
        return Err(Error::Config("box bound too large for the sampler".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(chain);
    let mut state = ChainState::new(model, cfg.init);
    let k = model.k();
    let mut accepted: u64 = 0;
    let mut proposed: u64 = 0;
    let mut samples = Vec::new();
    for sweep in 1..=cfg.sweeps {
        for _ in 0..k {
            let row = rng.random_range(0..k);
            let up = rng.random::<bool>();
            proposed += 1;
            let delta = state.log_accept(row, up);
            if delta >= 0.0 || rng.random::<f64>() < delta.exp() {
                state.apply(row, up);
                accepted += 1;
            }
        }
        if sweep > cfg.burnin && (sweep - cfg.burnin).is_multiple_of(cfg.thin) {
            samples.push((sweep, state.snapshot()));
        }
    }
    Ok(ChainOutput {
        chain,
        samples,
        accept_rate: if proposed == 0 { 0.0 } else { accepted as f64 / proposed as f64 },
        final_state: state.snapshot(),
    })
}

/// Worker-thread cap: `JACKGAS_THREADS` when set, else the available
/// parallelism.
pub fn worker_threads() -> usize {
    if let Ok(v) = std::env::var("JACKGAS_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Runs `cfg.chains` independent chains in parallel (capped by
/// [`worker_threads`]) and returns them in chain order.
pub fn run_chains(model: &EnsembleModel, cfg: &ChainConfig) -> Result<Vec<ChainOutput>> {
    cfg.validate()?;
    let total = cfg.chains as usize;
    let threads = worker_threads().min(total).max(1);
    let mut results: Vec<Option<Result<ChainOutput>>> = Vec::new();
    results.resize_with(total, || None);
    std::thread::scope(|scope| {
        let per = total.div_ceil(threads);
        let mut rest = results.as_mut_slice();
        let mut start = 0u64;
        while !rest.is_empty() {
            let take = per.min(rest.len());
            let (head, tail) = rest.split_at_mut(take);
            rest = tail;
            let begin = start;
            start += take as u64;
            scope.spawn(move || {
                for (off, out) in head.iter_mut().enumerate() {
                    *out = Some(run_chain(model, cfg, begin + off as u64));
                }
            });
        }
    });
    results.into_iter().map(|r| r.expect("all chains filled")).collect()
}

/// Full normalized pmf of a model by enumeration, for small boxes.
///
/// `max_weight` optionally truncates by weight; the state count is capped
/// at 10^6.
pub fn exact_distribution_small(
    model: &EnsembleModel,
    max_weight: Option<u64>,
) -> Result<Vec<(Partition, f64)>> {
    let r = u32::try_from(model.r())
        .map_err(|_| Error::Resource("box bound too large to enumerate".into()))?;
    let mut states = Vec::new();
    for lam in enumerate_box(model.k(), Some(r), max_weight)? {
        states.push(lam);
        if states.len() > 1_000_000 {
            return Err(Error::Resource("more than 10^6 states in the box".into()));
        }
    }
    let logs: Vec<f64> = states
        .iter()
        .map(|lam| model.log_pmf_unnormalized(lam))
        .collect::<Result<_>>()?;
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|&l| (l - top).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(states.into_iter().zip(weights).map(|(lam, w)| (lam, w / total)).collect())
}

/// Pooled rescaled particle positions `l_i / scale` from a set of samples.
#[derive(Debug, Clone)]
pub struct EmpiricalMeasure {
    positions: Vec<f64>,
    samples: usize,
}

impl EmpiricalMeasure {
    /// Pools every particle of every sample, rescaled by `scale`
    /// (normally the particle count `K`, so positions live on
    /// `[0, R/K + theta]`).
    pub fn from_samples<'a>(
        model: &EnsembleModel,
        samples: impl IntoIterator<Item = &'a Partition>,
        scale: f64,
    ) -> Result<Self> {
        let mut positions = Vec::new();
        let mut count = 0usize;
        for lam in samples {
            let config = model.particles(lam)?;
            positions.extend(config.ells().iter().map(|&l| l / scale));
            count += 1;
        }
        if count == 0 {
            return Err(Error::Domain("need at least one sample".into()));
        }
        positions.sort_by(f64::total_cmp);
        Ok(EmpiricalMeasure { positions, samples: count })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn sample_count(&self) -> usize {
        self.samples
    }

    /// One-sample Kolmogorov-Smirnov distance against a reference CDF.
    pub fn ks_distance<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        let n = self.positions.len();
        let mut worst: f64 = 0.0;
        for (i, &x) in self.positions.iter().enumerate() {
            let f = cdf(x);
            let hi = (i + 1) as f64 / n as f64 - f;
            let lo = f - i as f64 / n as f64;
            worst = worst.max(hi.abs()).max(lo.abs());
        }
        worst
    }
}

/// Two-sample Kolmogorov-Smirnov distance. Ties advance both sides, so
/// identical samples give 0.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (mut i, mut j) = (0usize, 0usize);
    let mut worst: f64 = 0.0;
    while i < xs.len() || j < ys.len() {
        let v = match (xs.get(i), ys.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => break,
        };
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        let fa = i as f64 / xs.len() as f64;
        let fb = j as f64 / ys.len() as f64;
        worst = worst.max((fa - fb).abs());
    }
    worst
}

/// Total variation distance between an empirical partition histogram and
/// an exact probability table.
pub fn total_variation(samples: &[Partition], exact: &[(Partition, f64)]) -> f64 {
    use std::collections::HashMap;
    let mut hist: HashMap<&Partition, usize> = HashMap::new();
    for lam in samples {
        *hist.entry(lam).or_insert(0) += 1;
    }
    let n = samples.len() as f64;
    let mut tv = 0.0;
    for (lam, p) in exact {
        let emp = hist.get(lam).map_or(0.0, |&c| c as f64 / n);
        tv += (emp - p).abs();
    }
    tv / 2.0
}
