//! The Metropolis-Hastings loop, its configuration and its trace.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};

use crate::grid::ClassifiedGrid;
use crate::mcmc::kernels::{propose, KernelParams, ProposalContext, RoomProposals, SplitCache};
use crate::mcmc::schedule::{select_kernel, KernelKind, Schedule};
use crate::model::{delta_stats, evaluate, stats_of, LogScore, PriorParams, ScoreStats, SensorModel};
use crate::raster::{rasterize, PredictedGrid};
use crate::world::World;
use crate::{ChainRng, Error};

/// Largest tolerated gap between incremental and full scores in verify mode.
pub const VERIFY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct ChainConfig {
    pub iterations: u64,
    pub seed: u64,
    pub schedule: Schedule,
    pub kernels: KernelParams,
    pub prior: PriorParams,
    pub sensor: SensorModel,
    /// Free-space candidates join the add pool after this iteration.
    pub fsr_activation: u64,
    /// Re-evaluate the full score after every accepted move.
    pub verify: bool,
    /// Window of the rolling acceptance rate.
    pub trace_window: usize,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            iterations: 15_000,
            seed: 0,
            schedule: Schedule::default(),
            kernels: KernelParams::default(),
            prior: PriorParams::default(),
            sensor: SensorModel::default(),
            fsr_activation: 4000,
            verify: false,
            trace_window: 100,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<(), Error> {
        self.kernels.validate()?;
        self.prior.validate()?;
        if self.trace_window == 0 {
            return Err(Error::InvalidParameter("trace window must be positive"));
        }
        Ok(())
    }
}

/// Accepts a move with probability `min(1, exp(dpost + log_q_backward - log_q_forward))`.
/// Always consumes exactly one uniform draw.
pub fn accept<R: Rng + ?Sized>(
    before: &LogScore,
    after: &LogScore,
    log_q_forward: f64,
    log_q_backward: f64,
    rng: &mut R,
) -> bool {
    let u: f64 = rng.random();
    let log_ratio = (after.posterior() - before.posterior()) + (log_q_backward - log_q_forward);
    if log_ratio.is_nan() {
        return false;
    }
    log_ratio >= 0.0 || u < libm::exp(log_ratio)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    /// Iteration index, from 1.
    pub iteration: u64,
    pub kernel: KernelKind,
    /// Log posterior of the chain's world after this iteration.
    pub log_posterior: f64,
    pub accepted: bool,
    /// Share of accepted moves among the last `window` iterations.
    pub acceptance_rate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainTrace {
    records: Vec<TraceRecord>,
    window: usize,
    accepted_in_window: usize,
}

impl ChainTrace {
    pub fn new(window: usize) -> Self {
        Self {
            records: Vec::new(),
            window: window.max(1),
            accepted_in_window: 0,
        }
    }

    pub fn push(&mut self, iteration: u64, kernel: KernelKind, log_posterior: f64, accepted: bool) -> &TraceRecord {
        let n = self.records.len();
        if n >= self.window && self.records[n - self.window].accepted {
            self.accepted_in_window -= 1;
        }
        self.accepted_in_window += usize::from(accepted);
        let span = (n + 1).min(self.window);
        self.records.push(TraceRecord {
            iteration,
            kernel,
            log_posterior,
            accepted,
            acceptance_rate: self.accepted_in_window as f64 / span as f64,
        });
        self.records.last().expect("just pushed")
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Share of accepted moves among `records[range]`.
    pub fn acceptance(&self, range: core::ops::Range<usize>) -> f64 {
        let slice = &self.records[range];
        if slice.is_empty() {
            return 0.0;
        }
        slice.iter().filter(|r| r.accepted).count() as f64 / slice.len() as f64
    }
}

/// The evolving part of a chain.
#[derive(Clone, Debug)]
pub struct ChainState {
    /// Iterations completed.
    pub beta: u64,
    pub world: World,
    pub score: LogScore,
    pub rng: ChainRng,
    pub fsr_active: bool,
}

/// Result of a finished chain.
#[derive(Clone, Debug)]
pub struct ChainOutcome {
    pub best: World,
    pub best_score: LogScore,
    pub final_world: World,
    pub final_score: LogScore,
    pub trace: ChainTrace,
}

/// One Markov chain over a fixed map.
pub struct Chain<'a> {
    classified: &'a ClassifiedGrid,
    rooms: &'a RoomProposals,
    config: &'a ChainConfig,
    state: ChainState,
    predicted: PredictedGrid,
    stats: ScoreStats,
    cache: SplitCache,
    best: (World, LogScore),
    trace: ChainTrace,
}

impl<'a> Chain<'a> {
    /// A chain starting from the empty world.
    pub fn new(
        classified: &'a ClassifiedGrid,
        rooms: &'a RoomProposals,
        config: &'a ChainConfig,
    ) -> Result<Self, Error> {
        config.validate()?;
        let world = World::new();
        let predicted = rasterize(&world, classified.width(), classified.height())?;
        let stats = stats_of(&world, classified, &predicted, &config.prior);
        let score = stats.score(&config.sensor, &config.prior);
        Ok(Self {
            classified,
            rooms,
            config,
            state: ChainState {
                beta: 0,
                world: world.clone(),
                score,
                rng: ChainRng::seed_from_u64(config.seed),
                fsr_active: false,
            },
            predicted,
            stats,
            cache: SplitCache::new(),
            best: (world, score),
            trace: ChainTrace::new(config.trace_window),
        })
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    pub fn predicted(&self) -> &PredictedGrid {
        &self.predicted
    }

    pub fn best(&self) -> (&World, &LogScore) {
        (&self.best.0, &self.best.1)
    }

    pub fn trace(&self) -> &ChainTrace {
        &self.trace
    }

    /// Runs one iteration: select a kernel, propose, score incrementally, accept or reject.
    pub fn step(&mut self) -> Result<TraceRecord, Error> {
        let beta = self.state.beta + 1;
        let cfg = self.config;
        self.state.fsr_active = beta > cfg.fsr_activation;
        let selected = select_kernel(&cfg.schedule, beta, &mut self.state.rng);
        let ctx = ProposalContext {
            classified: self.classified,
            rooms: self.rooms,
            params: &cfg.kernels,
            predicted: &self.predicted,
            fsr_active: self.state.fsr_active,
        };
        let proposal = propose(selected, &self.state.world, &ctx, &mut self.cache, &mut self.state.rng);
        let (kind, accepted) = match proposal {
            Err(_) => (selected, false),
            Ok(p) => {
                let delta = delta_stats(&self.state.world, &p.world_after, &p.diff, self.classified, &cfg.prior);
                let stats = self.stats + delta;
                let score = stats.score(&cfg.sensor, &cfg.prior);
                let ok = accept(
                    &self.state.score,
                    &score,
                    p.log_q_forward,
                    p.log_q_backward,
                    &mut self.state.rng,
                );
                if ok {
                    let mut world = p.world_after;
                    world.refresh_wall_types();
                    self.predicted.refresh(&world, &p.diff);
                    self.state.world = world;
                    self.state.score = score;
                    self.stats = stats;
                    if cfg.verify {
                        self.verify(beta)?;
                    }
                    if score.posterior() > self.best.1.posterior() {
                        self.best = (self.state.world.clone(), score);
                    }
                }
                (p.kind, ok)
            }
        };
        self.state.beta = beta;
        Ok(*self.trace.push(beta, kind, self.state.score.posterior(), accepted))
    }

    fn verify(&self, iteration: u64) -> Result<(), Error> {
        let cfg = self.config;
        let full = evaluate(&self.state.world, self.classified, &cfg.sensor, &cfg.prior)?;
        let delta = (full.posterior() - self.state.score.posterior()).abs();
        if !(delta <= VERIFY_TOLERANCE) {
            return Err(Error::ScoreDivergence { iteration, delta });
        }
        Ok(())
    }

    pub fn finish(self) -> ChainOutcome {
        ChainOutcome {
            best: self.best.0,
            best_score: self.best.1,
            final_world: self.state.world,
            final_score: self.state.score,
            trace: self.trace,
        }
    }
}

/// Detects wall-based candidates and runs `config.iterations` steps from the empty world.
pub fn run(classified: &ClassifiedGrid, config: &ChainConfig) -> Result<ChainOutcome, Error> {
    let rooms = RoomProposals::detect(classified, &config.kernels)?;
    let mut chain = Chain::new(classified, &rooms, config)?;
    for _ in 0..config.iterations {
        chain.step()?;
    }
    Ok(chain.finish())
}
