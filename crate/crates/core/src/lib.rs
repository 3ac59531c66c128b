//! Semantic floor-plan extraction from 2D occupancy grids.
//!
//! A floor plan ("world") is a set of axis-aligned rectangular rooms whose
//! walls are typed by their connectivity, plus doors joining pairs of rooms.
//! The crate scores worlds against a classified occupancy grid with a
//! generative model (structural prior times a per-cell sensor likelihood)
//! and searches for the maximum-a-posteriori world with a Metropolis-Hastings
//! chain whose proposals are driven by bottom-up detectors.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command-line front end live in the `gridplan` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod detectors;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod mcmc;
pub mod model;
pub mod raster;
pub mod synthetic;
pub mod world;

pub use error::Error;
pub use geometry::{CellBox, CellIndex, Rect, Segment, Side};
pub use grid::{CellClass, ClassifiedGrid, ClassifierThresholds, OccupancyGrid};
pub use model::{LogScore, PriorParams, SensorModel};
pub use raster::{PredictedClass, PredictedGrid};
pub use world::{Door, DoorId, Room, RoomId, WallType, World};

/// Random stream used everywhere a detector or kernel needs randomness.
pub type ChainRng = rand_chacha::ChaCha8Rng;

/// Builds the crate's random stream from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> ChainRng {
    use rand::SeedableRng;
    ChainRng::seed_from_u64(seed)
}
