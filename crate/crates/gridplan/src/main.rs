use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gridplan::pnm;
use gridplan::scene::{scene_graph, write_scene};
use gridplan::{exit, run_pipeline, Error, RunConfig};
use gridplan_core::synthetic::{generate_synthetic, random_layout, LayoutParams};
use gridplan_core::{seeded_rng, SensorModel};

/// Extract a semantic floor plan (rooms, walls, doors) from an occupancy grid map.
#[derive(Parser, Debug)]
#[command(name = "gridplan", version, args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random synthetic floor plan and its noisy map.
    Synth(SynthArgs),
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    /// Occupancy grid map (P5 or P2 graymap).
    #[arg(long)]
    map: Option<PathBuf>,
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    iterations: Option<u64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Write an overlay snapshot every N iterations (0 = off).
    #[arg(long)]
    snapshot_every: Option<u64>,
    /// Independent chains run in parallel; the best world wins.
    #[arg(long)]
    chains: Option<usize>,
    /// Check every incremental score against a full evaluation.
    #[arg(long)]
    verify: bool,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, default_value = "synth")]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = LayoutParams::default().width)]
    width: usize,
    #[arg(long, default_value_t = LayoutParams::default().height)]
    height: usize,
    /// Meters per cell written to the sidecar metadata.
    #[arg(long, default_value_t = 0.05)]
    resolution: f64,
}

fn run(args: RunArgs) -> Result<(), Error> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(m) = args.map {
        cfg.map.path = Some(m);
    }
    if let Some(s) = args.seed {
        cfg.run.seed = s;
    }
    if let Some(n) = args.iterations {
        cfg.run.iterations = n;
    }
    if let Some(d) = args.out_dir {
        cfg.run.out_dir = d;
    }
    if let Some(n) = args.snapshot_every {
        cfg.run.snapshot_every = n;
    }
    if let Some(n) = args.chains {
        cfg.run.chains = n;
    }
    cfg.run.verify |= args.verify;
    let s = run_pipeline(&cfg)?;
    println!(
        "best log-posterior {:.3} | rooms {} | doors {} | chain {} | {} iterations in {:.2}s ({:.0} it/s per chain) | output {}",
        s.best_log_posterior,
        s.rooms,
        s.doors,
        s.chain,
        s.iterations,
        s.seconds,
        s.iterations_per_second,
        s.out_dir.display()
    );
    Ok(())
}

fn synth(args: SynthArgs) -> Result<(), Error> {
    let params = LayoutParams {
        width: args.width,
        height: args.height,
        ..LayoutParams::default()
    };
    let spec = random_layout(&params, &mut seeded_rng(args.seed))?;
    let (grid, truth) = generate_synthetic(&spec, &SensorModel::default(), args.seed)?;
    let dir = &args.out_dir;
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.clone(),
        source,
    })?;
    pnm::write_grid(&grid, &dir.join("map.pgm"))?;
    let meta = dir.join("map.yaml");
    std::fs::write(&meta, format!("image: map.pgm\nresolution: {}\n", args.resolution))
        .map_err(|source| Error::Io { path: meta, source })?;
    write_scene(
        &scene_graph(&truth, grid.width(), grid.height(), args.resolution, None),
        &dir.join("truth.json"),
    )?;
    println!(
        "{} rooms, {} doors on a {}x{} map written to {}",
        truth.rooms().len(),
        truth.doors().len(),
        grid.width(),
        grid.height(),
        dir.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Some(Command::Synth(a)) => synth(a),
        None => run(cli.run),
    };
    match result {
        Ok(()) => ExitCode::from(exit::SUCCESS),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
