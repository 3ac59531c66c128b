//! End-to-end run: load the map, classify it, run one or more chains and
//! write every artifact into the output directory.
//!
//! Artifacts:
//! - `world_best.json`, `world_final.json`: scene graphs of the best and last world.
//! - `overlay_best.ppm`: walls and doors of the best world over the map.
//! - `classified.ppm`: the classified map in the class palette.
//! - `trace.csv`: the chain trace.
//! - `snapshots/iter_NNNNNN.ppm`: overlays of the chain's current world, when
//!   enabled. With several chains the files are `chainK_iter_NNNNNN.ppm`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use gridplan_core::grid::classify;
use gridplan_core::mcmc::{Chain, ChainConfig, ChainOutcome, RoomProposals};
use gridplan_core::ClassifiedGrid;

use crate::pnm::{self, Pixmap};
use crate::scene::{scene_graph, write_scene};
use crate::trace::write_trace;
use crate::{Error, RunConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    /// Index of the chain whose best world was kept.
    pub chain: usize,
    pub best_log_posterior: f64,
    pub rooms: usize,
    pub doors: usize,
    /// Iterations summed over all chains.
    pub iterations: u64,
    pub seconds: f64,
    /// Iterations per second of one chain.
    pub iterations_per_second: f64,
    pub out_dir: PathBuf,
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

struct Snapshots<'a> {
    every: u64,
    dir: PathBuf,
    prefix: String,
    background: &'a Pixmap,
}

fn run_chain(
    classified: &ClassifiedGrid,
    rooms: &RoomProposals,
    config: &ChainConfig,
    snapshots: Option<Snapshots<'_>>,
) -> Result<(ChainOutcome, f64), Error> {
    let start = Instant::now();
    let mut chain = Chain::new(classified, rooms, config)?;
    for _ in 0..config.iterations {
        let rec = chain.step()?;
        if let Some(s) = &snapshots {
            if rec.iteration % s.every == 0 {
                let overlay = pnm::render_overlay(s.background, &chain.state().world)?;
                let path = s.dir.join(format!("{}iter_{:06}.ppm", s.prefix, rec.iteration));
                pnm::write_pixmap(&overlay, &path)?;
            }
        }
    }
    Ok((chain.finish(), start.elapsed().as_secs_f64()))
}

/// Runs the configured pipeline and writes all artifacts.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunSummary, Error> {
    cfg.validate()?;
    let map_path = cfg
        .map
        .path
        .as_deref()
        .ok_or_else(|| Error::Config("no map given (set [map] path or pass --map)".into()))?;
    let grid = pnm::load_grid(map_path, cfg.map.metadata.as_deref())?;
    let classified = classify(&grid, cfg.thresholds()?);
    let (w, h, res) = (grid.width(), grid.height(), grid.resolution());

    let out = &cfg.run.out_dir;
    fs::create_dir_all(out).map_err(io_error(out))?;
    pnm::write_pixmap(&pnm::render_classified(&classified), &out.join("classified.ppm"))?;

    let chains = cfg.run.chains;
    let configs = (0..chains)
        .map(|i| cfg.chain_config(i))
        .collect::<Result<Vec<_>, _>>()?;
    let rooms = RoomProposals::detect(&classified, &configs[0].kernels)?;
    let background = pnm::render_grayscale(&grid);
    let snapshot_dir = out.join("snapshots");
    if cfg.run.snapshot_every > 0 {
        fs::create_dir_all(&snapshot_dir).map_err(io_error(&snapshot_dir))?;
    }
    let snapshots = |i: usize| {
        (cfg.run.snapshot_every > 0).then(|| Snapshots {
            every: cfg.run.snapshot_every,
            dir: snapshot_dir.clone(),
            prefix: if chains > 1 {
                format!("chain{i}_")
            } else {
                String::new()
            },
            background: &background,
        })
    };

    let start = Instant::now();
    let results: Vec<Result<(ChainOutcome, f64), Error>> = if chains == 1 {
        vec![run_chain(&classified, &rooms, &configs[0], snapshots(0))]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = configs
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let (classified, rooms, snap) = (&classified, &rooms, snapshots(i));
                    s.spawn(move || run_chain(classified, rooms, c, snap))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("chain thread panicked"))
                .collect()
        })
    };
    let seconds = start.elapsed().as_secs_f64();
    let results = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut pick = 0;
    for (i, (o, _)) in results.iter().enumerate() {
        if o.best_score.posterior() > results[pick].0.best_score.posterior() {
            pick = i;
        }
    }
    let (outcome, chain_seconds) = &results[pick];
    let best_post = outcome.best_score.posterior();
    write_scene(
        &scene_graph(&outcome.best, w, h, res, Some(best_post)),
        &out.join("world_best.json"),
    )?;
    write_scene(
        &scene_graph(&outcome.final_world, w, h, res, Some(outcome.final_score.posterior())),
        &out.join("world_final.json"),
    )?;
    pnm::write_pixmap(
        &pnm::render_overlay(&background, &outcome.best)?,
        &out.join("overlay_best.ppm"),
    )?;
    write_trace(&outcome.trace, &out.join("trace.csv"))?;

    let iterations = cfg.run.iterations * chains as u64;
    Ok(RunSummary {
        chain: pick,
        best_log_posterior: best_post,
        rooms: outcome.best.rooms().len(),
        doors: outcome.best.doors().len(),
        iterations,
        seconds,
        iterations_per_second: if *chain_seconds > 0.0 {
            cfg.run.iterations as f64 / chain_seconds
        } else {
            0.0
        },
        out_dir: out.clone(),
    })
}
