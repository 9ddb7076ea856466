//! Trial simulation of one two-hop transmission and batched outage
//! estimation.
//!
//! Trial `i` draws from ChaCha8 seeded with `seed` on stream `i`, so its
//! outcome depends only on `(seed, i)`. Trials are grouped in fixed chunks
//! and the per-chunk counts are summed as integers, which makes the totals
//! independent of the number of workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{path_loss, sample_gain, sinr_from_powers, ChannelGain};
use crate::protocols::{noise_set, select_relay_optimal, select_relay_random, select_relay_region, NoiseSet};
use crate::scenario::{Point, Protocol, ScenarioEqual, ScenarioGeo};

/// z-score of the two-sided 99% Wilson interval.
pub const Z_99: f64 = 2.576;
/// Floor applied to node distances so coincident nodes stay finite.
pub const MIN_DISTANCE: f64 = 1e-12;
/// Trials per scheduling unit.
const CHUNK: u64 = 4096;
/// Stream reserved for drawing a frozen layout.
const LAYOUT_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonteCarloError {
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("successes ({successes}) must not exceed trials ({trials})")]
    BadCounts { successes: u64, trials: u64 },
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("protocol {0} needs the distance-dependent scenario")]
    NeedsGeometry(Protocol),
    #[error("could not start worker pool: {0}")]
    Pool(String),
}

/// Events of one two-hop transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrialOutcome {
    pub hop1_tx_outage: bool,
    pub hop2_tx_outage: bool,
    pub hop1_sec_outage: bool,
    pub hop2_sec_outage: bool,
    /// No relay inside the selection region; nothing was transmitted.
    pub relay_unavailable: bool,
    pub hop1_noise_size: u32,
    pub hop2_noise_size: u32,
}

impl TrialOutcome {
    pub fn tx_outage(&self) -> bool {
        self.hop1_tx_outage || self.hop2_tx_outage || self.relay_unavailable
    }

    pub fn sec_outage(&self) -> bool {
        self.hop1_sec_outage || self.hop2_sec_outage
    }

    fn unavailable() -> TrialOutcome {
        TrialOutcome {
            hop1_tx_outage: true,
            hop2_tx_outage: true,
            relay_unavailable: true,
            ..TrialOutcome::default()
        }
    }
}

/// Internal state of one trial, for structural checks.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrialTrace {
    pub relay: Option<usize>,
    pub hop1_noise: NoiseSet,
    pub hop2_noise: NoiseSet,
    /// Gains from each relay to the selected relay (hop 1 receiver).
    pub gains_to_relay: Vec<f64>,
    /// Gains from each relay to the destination (hop 2 receiver).
    pub gains_to_dest: Vec<f64>,
}

/// Relay selection rule of the equal path-loss network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelaySelection {
    Optimal,
    Random,
}

impl TryFrom<Protocol> for RelaySelection {
    type Error = MonteCarloError;

    fn try_from(p: Protocol) -> Result<Self, Self::Error> {
        match p {
            Protocol::Optimal => Ok(RelaySelection::Optimal),
            Protocol::Random => Ok(RelaySelection::Random),
            Protocol::Region => Err(MonteCarloError::NeedsGeometry(p)),
        }
    }
}

fn draw_gains<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<ChannelGain> {
    (0..n).map(|_| sample_gain(rng)).collect()
}

/// Whether any of `m` unit-distance eavesdroppers reaches γ_E against the
/// given noise set, drawing fresh channels per eavesdropper.
fn equal_hop_intercepted<R: Rng + ?Sized>(rng: &mut R, s: &ScenarioEqual, noise: &NoiseSet) -> bool {
    let mut caught = false;
    for _ in 0..s.m {
        // every draw is made even after an interception so the stream
        // layout does not depend on outcomes
        let signal = s.es * sample_gain(rng).value();
        let interference: f64 = noise.iter().map(|_| s.es * sample_gain(rng).value()).sum();
        caught |= sinr_from_powers(signal, interference, s.n0).reaches(s.gamma_e);
    }
    caught
}

fn interference_from(gains: &[ChannelGain], noise: &NoiseSet, es: f64) -> f64 {
    noise.iter().map(|j| es * gains[j].value()).sum()
}

pub fn run_trial_equal<R: Rng + ?Sized>(selection: RelaySelection, s: &ScenarioEqual, rng: &mut R) -> TrialOutcome {
    equal_trial(selection, s, rng, None)
}

pub fn run_trial_equal_traced<R: Rng + ?Sized>(
    selection: RelaySelection,
    s: &ScenarioEqual,
    rng: &mut R,
) -> (TrialOutcome, TrialTrace) {
    let mut trace = TrialTrace::default();
    let outcome = equal_trial(selection, s, rng, Some(&mut trace));
    (outcome, trace)
}

fn equal_trial<R: Rng + ?Sized>(
    selection: RelaySelection,
    s: &ScenarioEqual,
    rng: &mut R,
    trace: Option<&mut TrialTrace>,
) -> TrialOutcome {
    let n = s.n as usize;
    let (relay, hop1_signal, hop2_signal) = match selection {
        RelaySelection::Optimal => {
            let from_source = draw_gains(rng, n);
            let to_dest = draw_gains(rng, n);
            let j = select_relay_optimal(&from_source, &to_dest)
                .expect("validated scenario has n ≥ 2")
                .index()
                .expect("optimal selection always picks a relay");
            (j, from_source[j], to_dest[j])
        }
        RelaySelection::Random => {
            let j = select_relay_random(n, rng)
                .expect("validated scenario has n ≥ 2")
                .index()
                .expect("random selection always picks a relay");
            (j, sample_gain(rng), sample_gain(rng))
        }
    };

    let to_relay = draw_gains(rng, n);
    let hop1_noise = noise_set(&to_relay, s.tau, relay);
    let hop1_sinr = sinr_from_powers(
        s.es * hop1_signal.value(),
        interference_from(&to_relay, &hop1_noise, s.es),
        s.n0,
    );
    let hop1_sec = equal_hop_intercepted(rng, s, &hop1_noise);

    let to_dest = draw_gains(rng, n);
    let hop2_noise = noise_set(&to_dest, s.tau, relay);
    let hop2_sinr = sinr_from_powers(
        s.es * hop2_signal.value(),
        interference_from(&to_dest, &hop2_noise, s.es),
        s.n0,
    );
    let hop2_sec = equal_hop_intercepted(rng, s, &hop2_noise);

    let outcome = TrialOutcome {
        hop1_tx_outage: !hop1_sinr.exceeds(s.gamma_r),
        hop2_tx_outage: !hop2_sinr.exceeds(s.gamma_r),
        hop1_sec_outage: hop1_sec,
        hop2_sec_outage: hop2_sec,
        relay_unavailable: false,
        hop1_noise_size: hop1_noise.len() as u32,
        hop2_noise_size: hop2_noise.len() as u32,
    };
    if let Some(t) = trace {
        *t = TrialTrace {
            relay: Some(relay),
            hop1_noise,
            hop2_noise,
            gains_to_relay: to_relay.iter().map(|g| g.value()).collect(),
            gains_to_dest: to_dest.iter().map(|g| g.value()).collect(),
        };
    }
    outcome
}

/// Node placement of one geometric trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub relays: Vec<Point>,
    pub eavesdroppers: Vec<Point>,
}

impl Layout {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> Layout {
        let mut point = || Point {
            x: rng.gen::<f64>(),
            y: rng.gen::<f64>(),
        };
        let relays = (0..n).map(|_| point()).collect();
        let eavesdroppers = (0..m).map(|_| point()).collect();
        Layout { relays, eavesdroppers }
    }

    /// The layout used by frozen-position runs with this seed.
    pub fn frozen(seed: u64, n: usize, m: usize) -> Layout {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(LAYOUT_STREAM);
        Layout::sample(&mut rng, n, m)
    }
}

/// Whether node positions are redrawn every trial.
#[derive(Debug, Clone, PartialEq)]
pub enum PositionMode {
    Resample,
    Frozen(Layout),
}

fn dist(p: Point, q: Point) -> f64 {
    p.distance(q).max(MIN_DISTANCE)
}

/// Secrecy outage of one geometric hop sent from `tx`.
fn geo_hop_intercepted<R: Rng + ?Sized>(
    rng: &mut R,
    g: &ScenarioGeo,
    layout: &Layout,
    tx: Point,
    noise: &NoiseSet,
) -> bool {
    let s = &g.base;
    let mut caught = false;
    for &e in &layout.eavesdroppers {
        let signal = s.es * sample_gain(rng).value() * path_loss(dist(tx, e), g.alpha);
        let interference: f64 = noise
            .iter()
            .map(|j| s.es * sample_gain(rng).value() * path_loss(dist(layout.relays[j], e), g.alpha))
            .sum();
        let near = tx.distance(e) < g.r0;
        caught |= near || sinr_from_powers(signal, interference, s.n0).reaches(s.gamma_e);
    }
    caught
}

/// Interference at `rx` from the noise set, using the already-drawn gains.
fn geo_interference(gains: &[ChannelGain], noise: &NoiseSet, layout: &Layout, rx: Point, g: &ScenarioGeo) -> f64 {
    noise
        .iter()
        .map(|j| g.base.es * gains[j].value() * path_loss(dist(layout.relays[j], rx), g.alpha))
        .sum()
}

pub fn run_trial_geo<R: Rng + ?Sized>(g: &ScenarioGeo, positions: &PositionMode, rng: &mut R) -> TrialOutcome {
    let s = &g.base;
    let sampled;
    let layout = match positions {
        PositionMode::Resample => {
            sampled = Layout::sample(rng, s.n as usize, s.m as usize);
            &sampled
        }
        PositionMode::Frozen(layout) => layout,
    };
    let Some(relay) = select_relay_region(&layout.relays, g.a, g.b, rng).index() else {
        return TrialOutcome::unavailable();
    };
    let n = s.n as usize;
    let relay_at = layout.relays[relay];
    let (source, dest) = (ScenarioGeo::SOURCE, ScenarioGeo::DESTINATION);

    let hop1_signal = s.es * sample_gain(rng).value() * path_loss(dist(source, relay_at), g.alpha);
    let to_relay = draw_gains(rng, n);
    let hop1_noise = noise_set(&to_relay, s.tau, relay);
    let hop1_sinr = sinr_from_powers(
        hop1_signal,
        geo_interference(&to_relay, &hop1_noise, layout, relay_at, g),
        s.n0,
    );
    let hop1_sec = geo_hop_intercepted(rng, g, layout, source, &hop1_noise);

    let hop2_signal = s.es * sample_gain(rng).value() * path_loss(dist(relay_at, dest), g.alpha);
    let to_dest = draw_gains(rng, n);
    let hop2_noise = noise_set(&to_dest, s.tau, relay);
    let hop2_sinr = sinr_from_powers(
        hop2_signal,
        geo_interference(&to_dest, &hop2_noise, layout, dest, g),
        s.n0,
    );
    let hop2_sec = geo_hop_intercepted(rng, g, layout, relay_at, &hop2_noise);

    TrialOutcome {
        hop1_tx_outage: !hop1_sinr.exceeds(s.gamma_r),
        hop2_tx_outage: !hop2_sinr.exceeds(s.gamma_r),
        hop1_sec_outage: hop1_sec,
        hop2_sec_outage: hop2_sec,
        relay_unavailable: false,
        hop1_noise_size: hop1_noise.len() as u32,
        hop2_noise_size: hop2_noise.len() as u32,
    }
}

/// A fully specified simulation.
#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Equal {
        selection: RelaySelection,
        scenario: ScenarioEqual,
    },
    Geo {
        scenario: ScenarioGeo,
        positions: PositionMode,
    },
}

impl Experiment {
    pub fn run_trial<R: Rng + ?Sized>(&self, rng: &mut R) -> TrialOutcome {
        match self {
            Experiment::Equal { selection, scenario } => run_trial_equal(*selection, scenario, rng),
            Experiment::Geo { scenario, positions } => run_trial_geo(scenario, positions, rng),
        }
    }
}

/// Integer event tallies; merging is exact and order-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OutageCounts {
    pub trials: u64,
    pub tx: u64,
    pub sec: u64,
    pub hop1_tx: u64,
    pub hop2_tx: u64,
    pub hop1_sec: u64,
    pub hop2_sec: u64,
    pub unavailable: u64,
    pub hop1_noise_total: u64,
    pub hop2_noise_total: u64,
}

impl OutageCounts {
    pub fn record(&mut self, o: &TrialOutcome) {
        self.trials += 1;
        self.tx += o.tx_outage() as u64;
        self.sec += o.sec_outage() as u64;
        self.hop1_tx += o.hop1_tx_outage as u64;
        self.hop2_tx += o.hop2_tx_outage as u64;
        self.hop1_sec += o.hop1_sec_outage as u64;
        self.hop2_sec += o.hop2_sec_outage as u64;
        self.unavailable += o.relay_unavailable as u64;
        self.hop1_noise_total += u64::from(o.hop1_noise_size);
        self.hop2_noise_total += u64::from(o.hop2_noise_size);
    }

    pub fn merge(self, o: OutageCounts) -> OutageCounts {
        OutageCounts {
            trials: self.trials + o.trials,
            tx: self.tx + o.tx,
            sec: self.sec + o.sec,
            hop1_tx: self.hop1_tx + o.hop1_tx,
            hop2_tx: self.hop2_tx + o.hop2_tx,
            hop1_sec: self.hop1_sec + o.hop1_sec,
            hop2_sec: self.hop2_sec + o.hop2_sec,
            unavailable: self.unavailable + o.unavailable,
            hop1_noise_total: self.hop1_noise_total + o.hop1_noise_total,
            hop2_noise_total: self.hop2_noise_total + o.hop2_noise_total,
        }
    }

    fn estimate(&self, successes: u64) -> OutageEstimate {
        OutageEstimate::new(successes, self.trials).expect("tallies never exceed the trial count")
    }

    pub fn transmission(&self) -> OutageEstimate {
        self.estimate(self.tx)
    }

    pub fn secrecy(&self) -> OutageEstimate {
        self.estimate(self.sec)
    }

    pub fn hop1_transmission(&self) -> OutageEstimate {
        self.estimate(self.hop1_tx)
    }

    pub fn hop2_transmission(&self) -> OutageEstimate {
        self.estimate(self.hop2_tx)
    }

    pub fn hop1_secrecy(&self) -> OutageEstimate {
        self.estimate(self.hop1_sec)
    }

    pub fn hop2_secrecy(&self) -> OutageEstimate {
        self.estimate(self.hop2_sec)
    }

    pub fn relay_unavailable(&self) -> OutageEstimate {
        self.estimate(self.unavailable)
    }
}

/// Empirical probability with its Wilson 99% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl OutageEstimate {
    pub fn new(successes: u64, trials: u64) -> Result<OutageEstimate, MonteCarloError> {
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z_99)?;
        let p_hat = successes as f64 / trials as f64;
        Ok(OutageEstimate {
            successes,
            trials,
            p_hat,
            ci_low: ci_low.min(p_hat),
            ci_high: ci_high.max(p_hat),
        })
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> Result<(f64, f64), MonteCarloError> {
    if trials == 0 {
        return Err(MonteCarloError::NoTrials);
    }
    if successes > trials {
        return Err(MonteCarloError::BadCounts { successes, trials });
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let high = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    Ok((low, high))
}

/// Parses `N` or `auto`; `auto` means the number of available cores.
pub fn parse_workers(s: &str) -> Result<usize, String> {
    if s.eq_ignore_ascii_case("auto") {
        return Ok(std::thread::available_parallelism().map_or(1, |n| n.get()));
    }
    match s.parse::<usize>() {
        Ok(0) => Err("worker count must be at least 1".to_string()),
        Ok(n) => Ok(n),
        Err(_) => Err(format!("expected a worker count or `auto`, got `{s}`")),
    }
}

fn run_chunk(experiment: &Experiment, base: &ChaCha8Rng, start: u64, end: u64) -> OutageCounts {
    let mut counts = OutageCounts::default();
    for i in start..end {
        let mut rng = base.clone();
        rng.set_stream(i);
        counts.record(&experiment.run_trial(&mut rng));
    }
    counts
}

/// Runs `trials` independent trials on `workers` threads.
pub fn estimate_counts(
    experiment: &Experiment,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<OutageCounts, MonteCarloError> {
    if trials == 0 {
        return Err(MonteCarloError::NoTrials);
    }
    if workers == 0 {
        return Err(MonteCarloError::NoWorkers);
    }
    let base = ChaCha8Rng::seed_from_u64(seed);
    let chunks = trials.div_ceil(CHUNK);
    let work = |c: u64| run_chunk(experiment, &base, c * CHUNK, ((c + 1) * CHUNK).min(trials));
    if workers == 1 {
        return Ok((0..chunks).map(work).fold(OutageCounts::default(), OutageCounts::merge));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| MonteCarloError::Pool(e.to_string()))?;
    Ok(pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(work)
            .reduce(OutageCounts::default, OutageCounts::merge)
    }))
}

/// Transmission and secrecy outage estimates.
pub fn estimate(
    experiment: &Experiment,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<(OutageEstimate, OutageEstimate), MonteCarloError> {
    let counts = estimate_counts(experiment, trials, seed, workers)?;
    Ok((counts.transmission(), counts.secrecy()))
}
