//! Forward simulation of occupancy maps from known floor plans.
//!
//! A [`SyntheticSpec`] is rasterized and every cell's observation is drawn
//! from the sensor table row of its predicted class, giving a map together
//! with its ground truth. [`random_layout`] produces guillotine floor plans
//! of non-overlapping rooms joined by doors.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};

use crate::geometry::{Axis, Rect, Side};
use crate::grid::{CellClass, OccupancyGrid};
use crate::model::SensorModel;
use crate::raster::rasterize;
use crate::world::World;
use crate::{ChainRng, Error};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DoorSpec {
    /// Indices into [`SyntheticSpec::rooms`].
    pub rooms: (usize, usize),
    pub walls: (Side, Side),
    pub lo: usize,
    pub hi: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub width: usize,
    pub height: usize,
    pub rooms: Vec<Rect>,
    pub doors: Vec<DoorSpec>,
}

impl SyntheticSpec {
    /// The ground-truth world, rooms and doors in spec order.
    pub fn world(&self) -> Result<World, Error> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidSpec("map must be nonempty"));
        }
        let mut world = World::new();
        let mut ids = Vec::with_capacity(self.rooms.len());
        for r in &self.rooms {
            if !r.fits(self.width, self.height) {
                return Err(Error::InvalidSpec("room exceeds the map"));
            }
            ids.push(world.add_room(*r));
        }
        for d in &self.doors {
            let (Some(&a), Some(&b)) = (ids.get(d.rooms.0), ids.get(d.rooms.1)) else {
                return Err(Error::InvalidSpec("door references a missing room"));
            };
            world
                .add_door(a, d.walls.0, b, d.walls.1, d.lo, d.hi, 1.0)
                .map_err(|_| Error::InvalidSpec("door does not lie on both walls"))?;
        }
        world.refresh_wall_types();
        Ok(world)
    }
}

/// Draws an observed class from the sensor row `row`.
pub fn sample_observation<R: Rng + ?Sized>(sensor: &SensorModel, row: usize, rng: &mut R) -> CellClass {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for class in CellClass::ALL {
        acc += sensor.probability(row, class.index());
        if u < acc {
            return class;
        }
    }
    CellClass::Free
}

/// Samples a map for `spec`; observations are written with each class's
/// canonical intensity.
pub fn generate_synthetic(
    spec: &SyntheticSpec,
    sensor: &SensorModel,
    seed: u64,
) -> Result<(OccupancyGrid, World), Error> {
    let world = spec.world()?;
    let predicted = rasterize(&world, spec.width, spec.height)?;
    let mut rng = ChainRng::seed_from_u64(seed);
    let intensities = predicted
        .classes()
        .map(|c| sample_observation(sensor, c.row(), &mut rng).intensity())
        .collect();
    Ok((OccupancyGrid::new(spec.width, spec.height, intensities)?, world))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LayoutParams {
    pub width: usize,
    pub height: usize,
    /// Unexplored border around the floor.
    pub margin: usize,
    pub min_rooms: usize,
    pub max_rooms: usize,
    pub min_room_side: usize,
    /// Door widths in cells, inclusive range.
    pub door_cells: (usize, usize),
    /// Smallest distance from a door to the end of either host wall.
    pub door_clearance: usize,
}

impl Default for LayoutParams {
    fn default() -> Self {
        Self {
            width: 240,
            height: 200,
            margin: 10,
            min_rooms: 2,
            max_rooms: 5,
            min_room_side: 40,
            door_cells: (5, 8),
            door_clearance: 10,
        }
    }
}

struct Cut {
    axis: Axis,
    /// Last coordinate of the low side; the high side starts one cell later.
    at: usize,
}

/// A random guillotine floor plan.
///
/// Every cut separates two rooms with parallel walls one cell apart and
/// receives one door, so `k` rooms come with `k - 1` doors and form a
/// connected graph.
pub fn random_layout<R: Rng + ?Sized>(params: &LayoutParams, rng: &mut R) -> Result<SyntheticSpec, Error> {
    let p = params;
    if p.min_rooms < 1 || p.min_rooms > p.max_rooms || p.door_cells.0 < 4 || p.door_cells.0 > p.door_cells.1 {
        return Err(Error::InvalidSpec("inconsistent layout parameters"));
    }
    if p.width <= 2 * p.margin + p.min_room_side || p.height <= 2 * p.margin + p.min_room_side {
        return Err(Error::InvalidSpec("map too small for one room"));
    }
    let floor = Rect::from_corners(p.margin, p.margin, p.width - 1 - p.margin, p.height - 1 - p.margin)?;
    for _ in 0..64 {
        let target = rng.random_range(p.min_rooms..=p.max_rooms);
        if let Some(spec) = try_layout(p, floor, target, rng) {
            return Ok(spec);
        }
    }
    Err(Error::InvalidSpec("no layout satisfies the parameters"))
}

fn try_layout<R: Rng + ?Sized>(p: &LayoutParams, floor: Rect, target: usize, rng: &mut R) -> Option<SyntheticSpec> {
    let mut rooms = alloc::vec![floor];
    let mut cuts = Vec::new();
    while rooms.len() < target {
        let splittable: Vec<(usize, Axis)> = rooms
            .iter()
            .enumerate()
            .flat_map(|(i, r)| {
                let fits = |extent: usize| extent > 2 * p.min_room_side;
                [(Axis::Vertical, r.width()), (Axis::Horizontal, r.height())]
                    .into_iter()
                    .filter(move |&(_, e)| fits(e))
                    .map(move |(a, _)| (i, a))
            })
            .collect();
        if splittable.is_empty() {
            return None;
        }
        let (i, axis) = splittable[rng.random_range(0..splittable.len())];
        let (mn, mx) = (rooms[i].min(), rooms[i].max());
        let (lo, hi) = match axis {
            Axis::Vertical => (mn.x, mx.x),
            Axis::Horizontal => (mn.y, mx.y),
        };
        let at = rng.random_range(lo + p.min_room_side..hi - p.min_room_side);
        let (a, b) = match axis {
            Axis::Vertical => (
                Rect::from_corners(lo, mn.y, at, mx.y).ok()?,
                Rect::from_corners(at + 1, mn.y, hi, mx.y).ok()?,
            ),
            Axis::Horizontal => (
                Rect::from_corners(mn.x, lo, mx.x, at).ok()?,
                Rect::from_corners(mn.x, at + 1, mx.x, hi).ok()?,
            ),
        };
        rooms[i] = a;
        rooms.push(b);
        cuts.push(Cut { axis, at });
    }

    let mut doors = Vec::new();
    for cut in &cuts {
        // a cut by x = at puts vertical walls at `at` (low room) and `at + 1` (high room)
        let (low_side, high_side) = match cut.axis {
            Axis::Vertical => (Side::East, Side::West),
            Axis::Horizontal => (Side::South, Side::North),
        };
        let width = rng.random_range(p.door_cells.0..=p.door_cells.1);
        let mut options = Vec::new();
        for (i, a) in rooms.iter().enumerate() {
            if a.line(low_side) != cut.at {
                continue;
            }
            for (j, b) in rooms.iter().enumerate() {
                if b.line(high_side) != cut.at + 1 {
                    continue;
                }
                let (alo, ahi) = a.span(low_side);
                let (blo, bhi) = b.span(high_side);
                let lo = alo.max(blo) + p.door_clearance;
                let hi = ahi.min(bhi).saturating_sub(p.door_clearance);
                if hi >= lo + width {
                    options.push((i, j, lo, hi + 1 - width));
                }
            }
        }
        if options.is_empty() {
            return None;
        }
        let (i, j, first, last) = options[rng.random_range(0..options.len())];
        let start = rng.random_range(first..=last);
        doors.push(DoorSpec {
            rooms: (i, j),
            walls: (low_side, high_side),
            lo: start,
            hi: start + width - 1,
        });
    }
    Some(SyntheticSpec {
        width: p.width,
        height: p.height,
        rooms,
        doors,
    })
}
