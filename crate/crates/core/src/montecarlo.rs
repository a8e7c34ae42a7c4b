//! Monte Carlo experiments on the geometrically randomized observation
//! `(x_A, γ_A) = (X_{N(q_A)}, ℓ̃_{N(q_A)})`, `q_A` geometric with mean `A/2`.
//!
//! Sample `i` owns the streams `"q"[i]`, `"walk"[i]` and `"jitter"[i]` of the
//! root seed, so a batch is the same whatever the number of workers.

use std::collections::{BTreeMap, HashMap};

use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;
use serde::Serialize;

use crate::analytics;
use crate::observables::{self, k_bounds, ModifiedProfile};
use crate::oracle::{self, ExactLaw};
use crate::rng::{CoinSource, Flipped, SeedSpec, StreamCoins};
use crate::stats::{self, ChiSquareResult, KsResult};
use crate::walk::WalkState;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("A must be a finite number greater than 2, got {0}")]
    BadScale(f64),
    #[error("at least one sample is required")]
    NoSamples,
    #[error("at least one worker is required")]
    NoWorkers,
}

/// Scale, sample count, seed and worker count of one batch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentConfig {
    #[serde(rename = "A")]
    pub a: f64,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn new(a: f64, samples: u64, seed: u64) -> Self {
        ExperimentConfig {
            a,
            samples,
            seed,
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn at_scale(mut self, a: f64) -> Self {
        self.a = a;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.a.is_finite() && self.a > 2.0) {
            return Err(ConfigError::BadScale(self.a));
        }
        if self.samples == 0 {
            return Err(ConfigError::NoSamples);
        }
        if self.workers == 0 {
            return Err(ConfigError::NoWorkers);
        }
        Ok(())
    }

    pub fn seed_spec(&self) -> SeedSpec {
        SeedSpec::new(self.seed)
    }

    /// Safety cap `20·A·ln A + 1000` on the number of walk steps.
    pub fn step_cap(&self) -> u64 {
        (20.0 * self.a * self.a.ln().max(1.0)) as u64 + 1000
    }
}

/// Draw `q_A` for sample `index`: `ℙ(q_A = k) = (1 − 2/A)^{k−1} (2/A)`,
/// `k ≥ 1`.
pub fn draw_q(config: &ExperimentConfig, index: u64) -> u64 {
    let mut rng = config.seed_spec().stream("q").index(index).rng();
    let geo = Geometric::new(2.0 / config.a).expect("A > 2");
    1 + geo.sample(&mut rng)
}

/// A full observation, with the profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub q: u64,
    /// `N(q_A)`.
    pub steps: u64,
    pub x: i64,
    pub f: ModifiedProfile,
    pub interval: observables::AdmissibleInterval,
}

impl Observation {
    pub fn summary(&self) -> Summary {
        Summary {
            q: self.q,
            steps: self.steps,
            x: self.x,
            rank: self.interval.rank(self.x).expect("x in I"),
            interval_len: self.interval.len(),
            m_minus: self.f.m_minus(),
            m_plus: self.f.m_plus(),
            zeros: self.f.zero_count() as u32,
            area: self.f.area(),
            max_f: self.f.max_value(),
        }
    }
}

/// The scalar features of an observation kept by a batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub q: u64,
    pub steps: u64,
    pub x: i64,
    /// Position of `x` within `I(f)`, from 0.
    pub rank: i64,
    /// `#I(f)`.
    pub interval_len: i64,
    pub m_minus: i64,
    pub m_plus: i64,
    /// `O(f)`.
    pub zeros: u32,
    /// `𝒜(f)`.
    pub area: i64,
    pub max_f: i64,
}

/// Run the walk to coin time `N(q)` and read the observation. `None` if the
/// step cap was hit.
///
/// Panics if the observation breaks one of the structural facts it must
/// satisfy (`x ∈ I(f)`, the bounds on `q` in terms of `𝒜(f)`, and the
/// round trip through [`observables::hit_time`]); that would be a bug.
pub fn observe<C: CoinSource>(q: u64, coins: &mut C, max_steps: u64) -> Option<Observation> {
    let mut state = WalkState::new();
    if !state.run_to_coin(q, coins, max_steps) {
        return None;
    }
    let x = state.position();
    let f = observables::modify_state(&state).expect("coin time");
    let interval = f.interval().expect("reachable profiles are well formed");
    assert!(interval.contains(x), "x = {x} outside {interval} for {f}");
    let (lo, hi) = k_bounds(&f);
    assert!(lo <= q && q <= hi, "q = {q} outside [{lo}, {hi}]");
    let (n, k) = observables::hit_time(&f, x).expect("x in I");
    assert_eq!((n, k), (state.step_count(), q), "hit time round trip");
    Some(Observation {
        q,
        steps: state.step_count(),
        x,
        f,
        interval,
    })
}

/// Observation number `index` of a batch.
pub fn sample_observation(
    config: &ExperimentConfig,
    index: u64,
    mirrored: bool,
) -> Option<Observation> {
    let q = draw_q(config, index);
    let key = config.seed_spec().stream("walk").index(index);
    let cap = config.step_cap();
    if mirrored {
        observe(q, &mut Flipped(StreamCoins::new(key)), cap)
    } else {
        observe(q, &mut StreamCoins::new(key), cap)
    }
}

fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool")
}

/// Summaries of `config.samples` observations at one scale.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub config: ExperimentConfig,
    pub mirrored: bool,
    pub summaries: Vec<Summary>,
    /// Indices of samples that hit the step cap.
    pub cap_failures: Vec<u64>,
}

impl Batch {
    pub fn run(config: &ExperimentConfig) -> Batch {
        Batch::run_with(config, false)
    }

    /// As [`Batch::run`] with every coin flipped.
    pub fn run_mirrored(config: &ExperimentConfig) -> Batch {
        Batch::run_with(config, true)
    }

    fn run_with(config: &ExperimentConfig, mirrored: bool) -> Batch {
        config.validate().expect("invalid experiment config");
        let results: Vec<(u64, Option<Summary>)> = pool(config.workers).install(|| {
            (0..config.samples)
                .into_par_iter()
                .map(|i| {
                    (
                        i,
                        sample_observation(config, i, mirrored).map(|o| o.summary()),
                    )
                })
                .collect()
        });
        let mut summaries = Vec::with_capacity(results.len());
        let mut cap_failures = Vec::new();
        for (i, s) in results {
            match s {
                Some(s) => summaries.push(s),
                None => cap_failures.push(i),
            }
        }
        Batch {
            config: *config,
            mirrored,
            summaries,
            cap_failures,
        }
    }

    /// Jittered rank statistic `U = (rank + V)/#I`, `V` uniform on `[0,1)`,
    /// for samples with `#I ≥ 2`.
    pub fn rank_statistic(&self) -> Vec<f64> {
        let jitter = self.config.seed_spec().stream("jitter");
        self.summaries
            .iter()
            .enumerate()
            .filter(|(_, s)| s.interval_len >= 2)
            .map(|(i, s)| (s.rank as f64 + jitter.uniform(i as u64)) / s.interval_len as f64)
            .collect()
    }

    pub fn singletons(&self) -> usize {
        self.summaries
            .iter()
            .filter(|s| s.interval_len == 1)
            .count()
    }

    fn scaled(&self, power: f64, g: impl Fn(&Summary) -> f64) -> Vec<f64> {
        let s = self.config.a.powf(-power);
        self.summaries.iter().map(|x| g(x) * s).collect()
    }

    /// `A^{−2/3} x_A`.
    pub fn scaled_position(&self) -> Vec<f64> {
        self.scaled(2.0 / 3.0, |s| s.x as f64)
    }

    /// `A^{−1/3} max γ_A`.
    pub fn scaled_height(&self) -> Vec<f64> {
        self.scaled(1.0 / 3.0, |s| s.max_f as f64)
    }

    /// `A^{−2/3} (m₊ − m₋)`.
    pub fn scaled_support(&self) -> Vec<f64> {
        self.scaled(2.0 / 3.0, |s| (s.m_plus - s.m_minus) as f64)
    }

    /// `A^{−2/3} #I`.
    pub fn scaled_interval(&self) -> Vec<f64> {
        self.scaled(2.0 / 3.0, |s| s.interval_len as f64)
    }

    /// Count of samples with `O(γ_A) = 0`.
    pub fn hidden_hits(&self) -> u64 {
        self.summaries.iter().filter(|s| s.zeros == 0).count() as u64
    }
}

/// Uniformity of `x_A` within `I(γ_A)` at one scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformityLevel {
    #[serde(rename = "A")]
    pub a: f64,
    pub samples: u64,
    pub used: usize,
    pub singletons: usize,
    pub cap_failures: usize,
    pub ks: KsResult,
    pub chi_square: ChiSquareResult,
    pub histogram: Vec<u64>,
    /// KS distance detectable at the 5% level with this many samples,
    /// `1.36/√n`.
    pub ks_critical_5pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformityReport {
    pub config: ExperimentConfig,
    pub levels: Vec<UniformityLevel>,
    /// KS distance strictly decreasing along the ladder.
    pub decreasing: bool,
    /// `KS(U, 1 − U′)` between the first level and its mirrored batch.
    pub mirror: Option<KsResult>,
}

pub const UNIFORMITY_BINS: usize = 10;

pub fn uniformity_level(batch: &Batch) -> UniformityLevel {
    let u = batch.rank_statistic();
    let histogram = stats::histogram_unit(&u, UNIFORMITY_BINS);
    UniformityLevel {
        a: batch.config.a,
        samples: batch.config.samples,
        used: u.len(),
        singletons: batch.singletons(),
        cap_failures: batch.cap_failures.len(),
        ks: stats::ks_uniform(&u),
        chi_square: stats::chi_square_uniform(&histogram),
        histogram,
        ks_critical_5pct: 1.36 / (u.len().max(1) as f64).sqrt(),
    }
}

/// Mirror check: the rank statistic of the flipped walk, reflected, has
/// the same law.
pub fn mirror_check(batch: &Batch, mirrored: &Batch) -> KsResult {
    let u = batch.rank_statistic();
    let w: Vec<f64> = mirrored.rank_statistic().iter().map(|v| 1.0 - v).collect();
    stats::ks_two_sample(&u, &w)
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

pub fn uniformity_from(
    config: &ExperimentConfig,
    batches: &[&Batch],
    mirror: Option<KsResult>,
) -> UniformityReport {
    let levels: Vec<_> = batches.iter().map(|b| uniformity_level(b)).collect();
    let d: Vec<f64> = levels.iter().map(|l| l.ks.distance).collect();
    UniformityReport {
        config: *config,
        decreasing: strictly_decreasing(&d),
        levels,
        mirror,
    }
}

/// Uniformity test over a ladder of scales, with a mirrored batch at the
/// first scale.
pub fn uniformity_test(config: &ExperimentConfig, ladder: &[f64]) -> UniformityReport {
    let batches: Vec<Batch> = ladder
        .iter()
        .map(|&a| Batch::run(&config.at_scale(a)))
        .collect();
    let mirror = batches
        .first()
        .map(|b| mirror_check(b, &Batch::run_mirrored(&b.config)));
    let refs: Vec<&Batch> = batches.iter().collect();
    uniformity_from(config, &refs, mirror)
}

/// Estimate of `ℙ(O(γ_A) = 0)` at one scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HiddenLevel {
    #[serde(rename = "A")]
    pub a: f64,
    pub samples: usize,
    pub hits: u64,
    pub estimate: f64,
    pub std_err: f64,
    pub exact: f64,
    /// `|estimate − exact| ≤ max(3σ, 0.01)`.
    pub within_tolerance: bool,
    /// Profiles are tiny at small `A` and the event is dominated by lattice
    /// effects.
    pub small_a: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HiddenReport {
    pub config: ExperimentConfig,
    pub exact: f64,
    pub levels: Vec<HiddenLevel>,
    /// `|error|` at the largest scale is below the one at the smallest.
    pub moves_toward_exact: bool,
    /// Display only: extrapolation of the last two levels assuming an
    /// `A^{−1/3}` bias.
    pub extrapolated: Option<f64>,
}

pub const SMALL_A: f64 = 1e3;

pub fn hidden_level(batch: &Batch) -> HiddenLevel {
    let exact = analytics::hidden_probability_exact().value();
    let n = batch.summaries.len();
    let hits = batch.hidden_hits();
    let (estimate, std_err) = stats::proportion(hits, n as u64);
    HiddenLevel {
        a: batch.config.a,
        samples: n,
        hits,
        estimate,
        std_err,
        exact,
        within_tolerance: (estimate - exact).abs() <= (3.0 * std_err).max(0.01),
        small_a: batch.config.a < SMALL_A,
    }
}

pub fn hidden_from(config: &ExperimentConfig, batches: &[&Batch]) -> HiddenReport {
    let exact = analytics::hidden_probability_exact().value();
    let levels: Vec<_> = batches.iter().map(|b| hidden_level(b)).collect();
    let moves_toward_exact = match (levels.first(), levels.last()) {
        (Some(a), Some(b)) if levels.len() >= 2 => {
            (b.estimate - exact).abs() < (a.estimate - exact).abs()
        }
        _ => true,
    };
    let extrapolated = if levels.len() >= 2 {
        let (l1, l2) = (&levels[levels.len() - 2], &levels[levels.len() - 1]);
        let r = (l2.a / l1.a).cbrt();
        Some((r * l2.estimate - l1.estimate) / (r - 1.0))
    } else {
        None
    };
    HiddenReport {
        config: *config,
        exact,
        levels,
        moves_toward_exact,
        extrapolated,
    }
}

/// `ℙ(O(γ_A) = 0)` over a ladder of scales.
pub fn hidden_probability_mc(config: &ExperimentConfig, ladder: &[f64]) -> HiddenReport {
    let batches: Vec<Batch> = ladder
        .iter()
        .map(|&a| Batch::run(&config.at_scale(a)))
        .collect();
    let refs: Vec<&Batch> = batches.iter().collect();
    hidden_from(config, &refs)
}

/// Scaled features at one scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingLevel {
    #[serde(rename = "A")]
    pub a: f64,
    pub samples: usize,
    pub mean_steps_over_a: (f64, f64),
    pub mean_area_over_a: (f64, f64),
    pub mean_abs_position: (f64, f64),
    pub mean_height: (f64, f64),
    pub mean_support: (f64, f64),
    pub mean_interval: (f64, f64),
    /// `KS(A^{−2/3}x_A, −A^{−2/3}x_A)`.
    pub symmetry: KsResult,
}

/// Two-sample KS distances between consecutive scales.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingPair {
    pub a_lo: f64,
    pub a_hi: f64,
    pub position: KsResult,
    pub height: KsResult,
    pub support: KsResult,
    pub interval: KsResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub config: ExperimentConfig,
    pub levels: Vec<ScalingLevel>,
    pub pairs: Vec<ScalingPair>,
    /// Position KS distances strictly decreasing along the ladder.
    pub position_decreasing: bool,
}

pub fn scaling_level(batch: &Batch) -> ScalingLevel {
    let a = batch.config.a;
    let per_a = |g: &dyn Fn(&Summary) -> f64| {
        let v: Vec<f64> = batch.summaries.iter().map(|s| g(s) / a).collect();
        stats::mean_se(&v)
    };
    let x = batch.scaled_position();
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    let abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    ScalingLevel {
        a,
        samples: batch.summaries.len(),
        mean_steps_over_a: per_a(&|s| s.steps as f64),
        mean_area_over_a: per_a(&|s| s.area as f64),
        mean_abs_position: stats::mean_se(&abs),
        mean_height: stats::mean_se(&batch.scaled_height()),
        mean_support: stats::mean_se(&batch.scaled_support()),
        mean_interval: stats::mean_se(&batch.scaled_interval()),
        symmetry: stats::ks_two_sample(&x, &neg),
    }
}

pub fn scaling_pair(lo: &Batch, hi: &Batch) -> ScalingPair {
    ScalingPair {
        a_lo: lo.config.a,
        a_hi: hi.config.a,
        position: stats::ks_two_sample(&lo.scaled_position(), &hi.scaled_position()),
        height: stats::ks_two_sample(&lo.scaled_height(), &hi.scaled_height()),
        support: stats::ks_two_sample(&lo.scaled_support(), &hi.scaled_support()),
        interval: stats::ks_two_sample(&lo.scaled_interval(), &hi.scaled_interval()),
    }
}

pub fn scaling_from(config: &ExperimentConfig, batches: &[&Batch]) -> ScalingReport {
    let levels = batches.iter().map(|b| scaling_level(b)).collect();
    let pairs: Vec<ScalingPair> = batches
        .windows(2)
        .map(|w| scaling_pair(w[0], w[1]))
        .collect();
    let d: Vec<f64> = pairs.iter().map(|p| p.position.distance).collect();
    ScalingReport {
        config: *config,
        levels,
        position_decreasing: strictly_decreasing(&d),
        pairs,
    }
}

/// Distributional stabilization of the scaled observation along a ladder.
pub fn scaling_diagnostics(config: &ExperimentConfig, ladder: &[f64]) -> ScalingReport {
    let batches: Vec<Batch> = ladder
        .iter()
        .map(|&a| Batch::run(&config.at_scale(a)))
        .collect();
    let refs: Vec<&Batch> = batches.iter().collect();
    scaling_from(config, &refs)
}

/// Monte Carlo frequencies of `E_{x,f}` (the walk is at `x` with modified
/// local time `f` at some coin time) over walks run to `max_k` coins.
#[derive(Debug, Clone, PartialEq)]
pub struct EventFrequencies {
    pub walks: u64,
    pub max_k: u64,
    pub counts: BTreeMap<(ModifiedProfile, i64), u64>,
}

pub fn event_frequencies(walks: u64, max_k: u64, seed: u64, workers: usize) -> EventFrequencies {
    let key = SeedSpec::new(seed).stream("events");
    let counts: HashMap<(ModifiedProfile, i64), u64> = pool(workers.max(1)).install(|| {
        (0..walks)
            .into_par_iter()
            .fold(HashMap::new, |mut acc: HashMap<_, u64>, i| {
                let mut coins = StreamCoins::new(key.index(i));
                let mut state = WalkState::new();
                for k in 1..=max_k {
                    state.run_to_coin(k, &mut coins, u64::MAX);
                    let f = observables::modify_state(&state).expect("coin time");
                    *acc.entry((f, state.position())).or_insert(0) += 1;
                }
                acc
            })
            .reduce(HashMap::new, |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
                a
            })
    });
    EventFrequencies {
        walks,
        max_k,
        counts: counts.into_iter().collect(),
    }
}

/// One `(f, x)` with its observed frequency and two reference values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyRow {
    pub f: ModifiedProfile,
    pub x: i64,
    pub count: u64,
    pub frequency: f64,
    /// `(1/2)^{(m₊−m₋)−O(f)}`, common to all `x ∈ I(f)`.
    pub weight: f64,
    /// Exact `ℙ(E_{x,f})` from the enumeration.
    pub exact: f64,
    pub sigma_weight: f64,
    pub sigma_exact: f64,
}

impl FrequencyRow {
    /// `|frequency − weight| ≤ z σ`.
    pub fn matches_weight(&self, z: f64) -> bool {
        (self.frequency - self.weight).abs() <= z * self.sigma_weight
    }

    /// `|frequency − exact| ≤ z σ`.
    pub fn matches_exact(&self, z: f64) -> bool {
        (self.frequency - self.exact).abs() <= z * self.sigma_exact
    }
}

/// Compare frequencies against the oracle for every profile whose whole
/// interval is resolved within `freq.max_k` coins.
pub fn frequency_table(freq: &EventFrequencies, law: &ExactLaw) -> Vec<FrequencyRow> {
    assert!(law.max_coins() as u64 >= freq.max_k);
    let n = freq.walks as f64;
    let sigma = |p: f64| (p * (1.0 - p) / n).sqrt();
    let mut rows = Vec::new();
    for f in law.profiles() {
        if f.is_initial() || !law.is_resolved(&f) {
            continue;
        }
        let interval = f.interval().expect("resolved");
        let top = interval.sites().map(|x| f.get(x)).max().unwrap_or(0);
        if (f.area() / 2 + top) as u64 > freq.max_k {
            continue;
        }
        let weight = oracle::to_f64(&observables::event_weight(&f));
        for x in interval.sites() {
            let exact = oracle::to_f64(&law.event_probability(&f, x).expect("resolved"));
            let count = freq.counts.get(&(f.clone(), x)).copied().unwrap_or(0);
            rows.push(FrequencyRow {
                f: f.clone(),
                x,
                count,
                frequency: count as f64 / n,
                weight,
                exact,
                sigma_weight: sigma(weight),
                sigma_exact: sigma(exact),
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(a: f64, samples: u64) -> ExperimentConfig {
        ExperimentConfig::new(a, samples, 11).with_workers(2)
    }

    #[test]
    fn config_validation() {
        assert!(cfg(3.0, 1).validate().is_ok());
        assert_eq!(cfg(2.0, 1).validate(), Err(ConfigError::BadScale(2.0)));
        assert!(cfg(f64::NAN, 1).validate().is_err());
        assert_eq!(cfg(10.0, 0).validate(), Err(ConfigError::NoSamples));
        assert_eq!(
            cfg(10.0, 1).with_workers(0).validate(),
            Err(ConfigError::NoWorkers)
        );
    }

    #[test]
    fn geometric_q_has_mean_a_over_2() {
        let c = cfg(50.0, 1);
        let n = 40_000;
        let qs: Vec<f64> = (0..n).map(|i| draw_q(&c, i) as f64).collect();
        assert!(qs.iter().all(|&q| q >= 1.0));
        let (m, se) = stats::mean_se(&qs);
        assert!((m - 25.0).abs() < 4.0 * se, "mean {m} ± {se}");
    }

    #[test]
    fn one_coin_observation_is_an_oracle_atom() {
        let law = oracle::enumerate(1).unwrap();
        for seed in 0..20 {
            let mut coins = StreamCoins::new(SeedSpec::new(seed).stream("walk"));
            let o = observe(1, &mut coins, 100).unwrap();
            let p = law.event_probability(&o.f, o.x).unwrap();
            assert_eq!(oracle::to_f64(&p), 0.5);
            assert_eq!(o.x.abs(), 2);
        }
    }

    #[test]
    fn observations_satisfy_invariants() {
        let c = cfg(200.0, 300);
        for i in 0..c.samples {
            let o = sample_observation(&c, i, false).unwrap();
            assert!(o.interval.contains(o.x));
            let (lo, hi) = k_bounds(&o.f);
            assert!(lo <= o.q && o.q <= hi);
        }
    }

    #[test]
    fn batch_independent_of_worker_count() {
        let a = Batch::run(&cfg(100.0, 200).with_workers(1));
        let b = Batch::run(&cfg(100.0, 200).with_workers(3));
        assert_eq!(a.summaries, b.summaries);
    }

    #[test]
    fn step_cap_is_counted() {
        let mut coins = StreamCoins::new(SeedSpec::new(1).stream("walk"));
        assert!(observe(1000, &mut coins, 50).is_none());
    }

    #[test]
    fn rank_statistic_in_unit_interval() {
        let b = Batch::run(&cfg(100.0, 500));
        let u = b.rank_statistic();
        assert_eq!(u.len() + b.singletons(), b.summaries.len());
        assert!(u.iter().all(|v| (0.0..1.0).contains(v)));
    }

    #[test]
    fn mirrored_batch_reflects_positions() {
        let c = cfg(100.0, 100);
        let a = Batch::run(&c);
        let b = Batch::run_mirrored(&c);
        for (s, t) in a.summaries.iter().zip(&b.summaries) {
            assert_eq!(s.x, -t.x);
            assert_eq!(s.zeros, t.zeros);
            assert_eq!(s.interval_len, t.interval_len);
            assert_eq!(s.rank, t.interval_len - 1 - t.rank);
        }
    }

    #[test]
    fn standard_error_halves_with_four_times_samples() {
        let c = cfg(100.0, 4000);
        let small = hidden_level(&Batch::run(&c));
        let big = hidden_level(&Batch::run(&ExperimentConfig {
            samples: 16_000,
            ..c
        }));
        let ratio = big.std_err / small.std_err;
        assert!((ratio - 0.5).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn reports_are_reproducible() {
        let c = cfg(50.0, 300);
        let a = serde_json::to_string(&uniformity_test(&c, &[20.0, 50.0])).unwrap();
        let b = serde_json::to_string(&uniformity_test(&c, &[20.0, 50.0])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn small_scale_is_flagged() {
        let r = hidden_probability_mc(&cfg(10.0, 200), &[10.0]);
        assert!(r.levels[0].small_a);
        assert!(r.extrapolated.is_none());
    }

    #[test]
    fn frequencies_follow_the_exact_law() {
        let law = oracle::enumerate(3).unwrap();
        let freq = event_frequencies(20_000, 3, 5, 2);
        let rows = frequency_table(&freq, &law);
        assert!(!rows.is_empty());
        for r in &rows {
            assert!(r.matches_exact(5.0), "{r:?}");
        }
    }
}
