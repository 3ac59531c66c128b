//! The generative model: structural prior over worlds, per-cell sensor
//! likelihood of the classified map, and their (unnormalized) posterior.
//!
//! Everything is evaluated in log space. Scores are derived from integer
//! sufficient statistics (a 3x3 confusion count, the overlap excess and the
//! structural violation counts), so an incrementally maintained score is
//! bit-identical to a full recomputation.

use core::ops::{Add, Sub};

use crate::geometry::CellBox;
use crate::grid::ClassifiedGrid;
use crate::raster::{rasterize, Counts, PredictedGrid};
use crate::world::{Room, World};
use crate::Error;

/// Penalty factors of the structural prior.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PriorParams {
    /// Per pair of adjacent walls that are not at a right angle.
    pub psi1: f64,
    /// Per room without a door.
    pub psi2: f64,
    /// Per excess room covering a cell.
    pub psi3: f64,
    /// Allowed deviation from 90 degrees, in degrees.
    pub right_angle_tolerance: f64,
}

impl PriorParams {
    pub fn new(psi1: f64, psi2: f64, psi3: f64, right_angle_tolerance: f64) -> Result<Self, Error> {
        let p = Self {
            psi1,
            psi2,
            psi3,
            right_angle_tolerance,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let open = |v: f64| v > 0.0 && v < 1.0;
        if !(open(self.psi1) && open(self.psi2) && open(self.psi3)) {
            return Err(Error::InvalidParameter("prior penalties must lie in (0, 1)"));
        }
        if !(self.right_angle_tolerance >= 0.0 && self.right_angle_tolerance < 90.0) {
            return Err(Error::InvalidParameter("right-angle tolerance must lie in [0, 90)"));
        }
        Ok(())
    }
}

impl Default for PriorParams {
    fn default() -> Self {
        Self {
            psi1: 0.9,
            psi2: 0.9,
            psi3: 0.6,
            right_angle_tolerance: 5.0,
        }
    }
}

/// Lookup table p(observed class | predicted class).
///
/// Rows are predicted {wall, unknown, free}; columns are observed
/// {occupied, unexplained, free}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensorModel {
    table: [[f64; 3]; 3],
    log_table: [[f64; 3]; 3],
}

impl SensorModel {
    /// Rows summing to 1 within 1e-6 are renormalized; anything else is rejected.
    pub fn new(table: [[f64; 3]; 3]) -> Result<Self, Error> {
        let mut t = table;
        for row in t.iter_mut() {
            if row.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
                return Err(Error::InvalidParameter("sensor probabilities must lie in (0, 1)"));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidParameter("sensor table rows must sum to 1"));
            }
            for p in row.iter_mut() {
                *p /= sum;
            }
        }
        let log_table = t.map(|row| row.map(libm::log));
        Ok(Self { table: t, log_table })
    }

    pub fn table(&self) -> &[[f64; 3]; 3] {
        &self.table
    }

    pub fn probability(&self, predicted_row: usize, observed: usize) -> f64 {
        self.table[predicted_row][observed]
    }

    pub fn log_probability(&self, predicted_row: usize, observed: usize) -> f64 {
        self.log_table[predicted_row][observed]
    }
}

impl Default for SensorModel {
    fn default() -> Self {
        Self::new([[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]]).expect("default table is valid")
    }
}

/// Unnormalized log prior and log likelihood of a world.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LogScore {
    pub log_prior: f64,
    pub log_likelihood: f64,
}

impl LogScore {
    pub fn posterior(&self) -> f64 {
        log_posterior(self)
    }
}

/// Log posterior up to the normalizing constant.
pub fn log_posterior(score: &LogScore) -> f64 {
    score.log_prior + score.log_likelihood
}

/// Integer sufficient statistics of a [`LogScore`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScoreStats {
    /// Cells by (predicted row, observed class).
    pub confusion: [[i64; 3]; 3],
    /// Sum over cells of max(coverage - 1, 0).
    pub overlap: i64,
    /// Adjacent wall pairs off a right angle.
    pub skewed_corners: i64,
    pub doorless_rooms: i64,
}

impl ScoreStats {
    pub fn score(&self, sensor: &SensorModel, prior: &PriorParams) -> LogScore {
        let mut log_likelihood = 0.0;
        for r in 0..3 {
            for o in 0..3 {
                if self.confusion[r][o] != 0 {
                    log_likelihood += self.confusion[r][o] as f64 * sensor.log_probability(r, o);
                }
            }
        }
        let log_prior = self.skewed_corners as f64 * libm::log(prior.psi1)
            + self.doorless_rooms as f64 * libm::log(prior.psi2)
            + self.overlap as f64 * libm::log(prior.psi3);
        LogScore {
            log_prior,
            log_likelihood,
        }
    }
}

impl Add for ScoreStats {
    type Output = ScoreStats;
    fn add(mut self, rhs: ScoreStats) -> ScoreStats {
        for r in 0..3 {
            for o in 0..3 {
                self.confusion[r][o] += rhs.confusion[r][o];
            }
        }
        self.overlap += rhs.overlap;
        self.skewed_corners += rhs.skewed_corners;
        self.doorless_rooms += rhs.doorless_rooms;
        self
    }
}

impl Sub for ScoreStats {
    type Output = ScoreStats;
    fn sub(mut self, rhs: ScoreStats) -> ScoreStats {
        for r in 0..3 {
            for o in 0..3 {
                self.confusion[r][o] -= rhs.confusion[r][o];
            }
        }
        self.overlap -= rhs.overlap;
        self.skewed_corners -= rhs.skewed_corners;
        self.doorless_rooms -= rhs.doorless_rooms;
        self
    }
}

/// Counts adjacent wall pairs of `room` whose included angle is outside
/// 90 degrees +- `tolerance`.
pub fn skewed_corners(room: &Room, tolerance: f64) -> usize {
    (0..4)
        .filter(|&i| {
            let u = room.walls[i].segment;
            let v = room.walls[(i + 1) % 4].segment;
            let (ux, uy) = (u.b().x as f64 - u.a().x as f64, u.b().y as f64 - u.a().y as f64);
            let (vx, vy) = (v.b().x as f64 - v.a().x as f64, v.b().y as f64 - v.a().y as f64);
            let cos = (ux * vx + uy * vy) / (libm::hypot(ux, uy) * libm::hypot(vx, vy));
            let angle = libm::acos(cos.clamp(-1.0, 1.0)).to_degrees();
            (angle - 90.0).abs() > tolerance
        })
        .count()
}

fn structural_stats(world: &World, prior: &PriorParams) -> ScoreStats {
    ScoreStats {
        skewed_corners: world
            .rooms()
            .iter()
            .map(|r| skewed_corners(r, prior.right_angle_tolerance) as i64)
            .sum(),
        doorless_rooms: world.rooms().iter().filter(|r| world.door_count(r.id) == 0).count() as i64,
        ..ScoreStats::default()
    }
}

/// Log of the structural prior: rectangularity, door presence and overlap penalties.
pub fn log_prior(world: &World, params: &PriorParams, predicted: &PredictedGrid) -> f64 {
    let mut stats = structural_stats(world, params);
    stats.overlap = predicted
        .coverage_slice()
        .iter()
        .map(|&c| c.saturating_sub(1) as i64)
        .sum();
    stats.score(&SensorModel::default(), params).log_prior
}

/// Sum over cells of the log sensor probability of the observed class given
/// the predicted class.
pub fn log_likelihood(
    classified: &ClassifiedGrid,
    predicted: &PredictedGrid,
    sensor: &SensorModel,
) -> Result<f64, Error> {
    check_dims(classified, predicted)?;
    let mut confusion = [[0i64; 3]; 3];
    for (i, obs) in classified.classes().iter().enumerate() {
        confusion[predicted.class_at(i).row()][obs.index()] += 1;
    }
    let stats = ScoreStats {
        confusion,
        ..ScoreStats::default()
    };
    Ok(stats.score(sensor, &PriorParams::default()).log_likelihood)
}

fn check_dims(classified: &ClassifiedGrid, predicted: &PredictedGrid) -> Result<(), Error> {
    if classified.width() != predicted.width() || classified.height() != predicted.height() {
        return Err(Error::DimensionMismatch {
            left_width: classified.width(),
            left_height: classified.height(),
            right_width: predicted.width(),
            right_height: predicted.height(),
        });
    }
    Ok(())
}

/// Full statistics of `world` against the map.
pub fn evaluate_stats(world: &World, classified: &ClassifiedGrid, prior: &PriorParams) -> Result<ScoreStats, Error> {
    let predicted = rasterize(world, classified.width(), classified.height())?;
    Ok(stats_of(world, classified, &predicted, prior))
}

pub(crate) fn stats_of(
    world: &World,
    classified: &ClassifiedGrid,
    predicted: &PredictedGrid,
    prior: &PriorParams,
) -> ScoreStats {
    let mut stats = structural_stats(world, prior);
    for (i, obs) in classified.classes().iter().enumerate() {
        stats.confusion[predicted.class_at(i).row()][obs.index()] += 1;
    }
    stats.overlap = predicted
        .coverage_slice()
        .iter()
        .map(|&c| c.saturating_sub(1) as i64)
        .sum();
    stats
}

/// Full evaluation of `world`.
pub fn evaluate(
    world: &World,
    classified: &ClassifiedGrid,
    sensor: &SensorModel,
    prior: &PriorParams,
) -> Result<LogScore, Error> {
    Ok(evaluate_stats(world, classified, prior)?.score(sensor, prior))
}

/// Change in statistics from `before` to `after`, looking only at the cells
/// of `region` (which must come from [`crate::raster::diff_region`]).
pub fn delta_stats(
    before: &World,
    after: &World,
    region: &[CellBox],
    classified: &ClassifiedGrid,
    prior: &PriorParams,
) -> ScoreStats {
    let mut delta = structural_stats(after, prior) - structural_stats(before, prior);
    let (w, h) = (classified.width(), classified.height());
    let classes = classified.classes();
    for b in region {
        let Some(b) = b.clip(w, h) else { continue };
        let c0 = Counts::of_world(before, b);
        let c1 = Counts::of_world(after, b);
        let mut k = 0;
        for y in b.y0..=b.y1 {
            let row = y * w;
            for x in b.x0..=b.x1 {
                let obs = classes[row + x].index();
                let (p0, p1) = (c0.class_at(k), c1.class_at(k));
                if p0 != p1 {
                    delta.confusion[p0.row()][obs] -= 1;
                    delta.confusion[p1.row()][obs] += 1;
                }
                delta.overlap += c1.coverage[k].saturating_sub(1) as i64 - c0.coverage[k].saturating_sub(1) as i64;
                k += 1;
            }
        }
    }
    delta
}

/// Score of `after` from the score of `before`, re-evaluating only `region`
/// plus the structural terms.
pub fn apply_delta(
    score: &LogScore,
    before: &World,
    after: &World,
    region: &[CellBox],
    classified: &ClassifiedGrid,
    sensor: &SensorModel,
    prior: &PriorParams,
) -> LogScore {
    let d = delta_stats(before, after, region, classified, prior).score(sensor, prior);
    LogScore {
        log_prior: score.log_prior + d.log_prior,
        log_likelihood: score.log_likelihood + d.log_likelihood,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CellIndex, Rect, Segment, Side};
    use crate::grid::CellClass;
    use crate::raster::diff_region;
    use crate::world::{Wall, WallType};
    use alloc::vec;
    use alloc::vec::Vec;

    fn rect(x0: usize, y0: usize, x1: usize, y1: usize) -> Rect {
        Rect::from_corners(x0, y0, x1, y1).unwrap()
    }

    fn uniform_map(w: usize, h: usize, class: CellClass) -> ClassifiedGrid {
        ClassifiedGrid::from_classes(w, h, vec![class; w * h]).unwrap()
    }

    fn ln(x: f64) -> f64 {
        libm::log(x)
    }

    #[test]
    fn empty_world_has_zero_prior() {
        let w = World::new();
        let g = rasterize(&w, 10, 10).unwrap();
        assert_eq!(log_prior(&w, &PriorParams::default(), &g), 0.0);
    }

    #[test]
    fn doorless_room_costs_psi2() {
        let mut w = World::new();
        w.add_room(rect(1, 1, 8, 8));
        let g = rasterize(&w, 10, 10).unwrap();
        assert!((log_prior(&w, &PriorParams::default(), &g) - ln(0.9)).abs() < 1e-15);
    }

    #[test]
    fn six_overlap_cells_with_doors() {
        let mut w = World::new();
        let a = w.add_room(rect(0, 0, 10, 10));
        let b = w.add_room(rect(9, 8, 20, 20));
        let c = w.add_room(rect(11, 0, 20, 7));
        // a-c door on a's east wall / c's west wall, b-c door on c's south / b's north
        w.add_door(a, Side::East, c, Side::West, 1, 5, 3.0).unwrap();
        w.add_door(b, Side::North, c, Side::South, 13, 17, 3.0).unwrap();
        let g = rasterize(&w, 22, 22).unwrap();
        let overlap: usize = g.coverage_slice().iter().map(|&c| c.saturating_sub(1) as usize).sum();
        assert_eq!(overlap, 6);
        let expected = 6.0 * ln(0.6);
        assert!((log_prior(&w, &PriorParams::default(), &g) - expected).abs() < 1e-12);
    }

    #[test]
    fn skewed_room_is_penalized() {
        let mut room = Room::new(crate::RoomId(0), rect(0, 0, 10, 10));
        assert_eq!(skewed_corners(&room, 5.0), 0);
        // replace the east wall with a horizontal one: two corners become 0/180 degrees
        room.walls[1] = Wall {
            segment: Segment::new(CellIndex::new(0, 5), CellIndex::new(10, 5)).unwrap(),
            kind: WallType::BWall,
        };
        assert_eq!(skewed_corners(&room, 5.0), 2);
    }

    #[test]
    fn likelihood_table_entries() {
        let sensor = SensorModel::default();
        let mut one_room = World::new();
        one_room.add_room(rect(0, 0, 2, 2));
        // cell (0,0) is a wall cell, (1,1) free, and a 1x1 empty world is unknown.
        for (obs, expected) in [
            (CellClass::Occupied, 0.8),
            (CellClass::Unexplained, 0.1),
            (CellClass::Free, 0.1),
        ] {
            let map = uniform_map(3, 3, obs);
            let g = rasterize(&one_room, 3, 3).unwrap();
            let total = log_likelihood(&map, &g, &sensor).unwrap();
            let expect = 8.0 * ln(expected) + ln(if obs == CellClass::Free { 0.8 } else { 0.1 });
            assert!((total - expect).abs() < 1e-12);
        }
        let map = uniform_map(1, 1, CellClass::Unexplained);
        let g = rasterize(&World::new(), 1, 1).unwrap();
        assert!((log_likelihood(&map, &g, &sensor).unwrap() - ln(0.8)).abs() < 1e-15);
    }

    #[test]
    fn likelihood_dimension_mismatch() {
        let map = uniform_map(3, 3, CellClass::Free);
        let g = rasterize(&World::new(), 4, 3).unwrap();
        assert!(matches!(
            log_likelihood(&map, &g, &SensorModel::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn posterior_is_additive() {
        let s = |p, l| LogScore {
            log_prior: p,
            log_likelihood: l,
        };
        assert_eq!(log_posterior(&s(0.0, -5.0)), -5.0);
        assert_eq!(log_posterior(&s(-1.0, 0.0)), -1.0);
        assert_eq!(log_posterior(&s(-2.5, -7.5)), -10.0);
    }

    #[test]
    fn sensor_validation() {
        assert!(SensorModel::new([[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.7]]).is_err());
        assert!(SensorModel::new([[1.0, 0.0, 0.0], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]]).is_err());
        let s = SensorModel::new([[0.8, 0.1, 0.1000001], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]]).unwrap();
        for row in s.table() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
        assert!(PriorParams::new(0.9, 1.0, 0.6, 5.0).is_err());
    }

    #[test]
    fn overlap_cell_costs_exactly_psi3() {
        let prior = PriorParams::default();
        let mut w = World::new();
        let a = w.add_room(rect(0, 0, 10, 10));
        w.add_room(rect(12, 0, 20, 10));
        let g0 = rasterize(&w, 30, 30).unwrap();
        let p0 = log_prior(&w, &prior, &g0);
        // moving a's east wall onto x = 12 creates one column (11 cells) of double coverage
        w.set_room_rect(a, rect(0, 0, 12, 10)).unwrap();
        let g1 = rasterize(&w, 30, 30).unwrap();
        let p1 = log_prior(&w, &prior, &g1);
        assert!((p1 - p0 - 11.0 * ln(0.6)).abs() < 1e-12);
    }

    #[test]
    fn apply_delta_identity_and_add() {
        let mut classes = Vec::new();
        for i in 0..40 * 30 {
            classes.push(CellClass::ALL[(i * 13 + i / 7) % 3]);
        }
        let map = ClassifiedGrid::from_classes(40, 30, classes).unwrap();
        let (sensor, prior) = (SensorModel::default(), PriorParams::default());
        let mut w = World::new();
        w.add_room(rect(2, 2, 15, 20));
        let s0 = evaluate(&w, &map, &sensor, &prior).unwrap();
        assert_eq!(
            apply_delta(&s0, &w, &w, &diff_region(&w, &w), &map, &sensor, &prior),
            s0
        );
        let mut w1 = w.clone();
        w1.add_room(rect(10, 5, 35, 25));
        let region = diff_region(&w, &w1);
        let inc = apply_delta(&s0, &w, &w1, &region, &map, &sensor, &prior);
        let full = evaluate(&w1, &map, &sensor, &prior).unwrap();
        assert!((inc.posterior() - full.posterior()).abs() < 1e-9);
    }
}
