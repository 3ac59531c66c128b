//! Evidence weights of walls, rooms and door spans against the observed map.
//!
//! A segment of Euclidean length `l` covers `l + 1` lattice cells; the ratio of
//! matching cells to `l` is clamped to `[0, 1]`.

use crate::geometry::{Rect, Segment};
use crate::grid::{CellClass, ClassifiedGrid};

fn ratio(matches: usize, segment: &Segment) -> f64 {
    (matches as f64 / segment.length()).clamp(0.0, 1.0)
}

/// Fraction of a wall lying on occupied cells.
pub fn wall_weight(wall: &Segment, classified: &ClassifiedGrid) -> f64 {
    ratio(classified.count_on(wall, CellClass::Occupied), wall)
}

/// The weakest of the four walls.
pub fn room_weight(rect: &Rect, classified: &ClassifiedGrid) -> f64 {
    rect.walls()
        .iter()
        .map(|w| wall_weight(w, classified))
        .fold(f64::INFINITY, f64::min)
}

/// Fraction of a span lying on free cells.
pub fn door_weight(span: &Segment, classified: &ClassifiedGrid) -> f64 {
    ratio(classified.count_on(span, CellClass::Free), span)
}
