//! Wall-based room candidates: detected wall lines are extended across the map,
//! cutting it into a grid of sub-areas, and every contiguous rectangular block
//! of sub-areas becomes a candidate room.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::detectors::hough::{hough_segments, HoughParams};
use crate::detectors::weights::room_weight;
use crate::geometry::{Axis, Rect};
use crate::grid::ClassifiedGrid;
use crate::Error;

/// Default upper bound on the number of enumerated blocks.
pub const DEFAULT_CANDIDATE_CAP: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoomCandidate {
    pub rect: Rect,
    pub weight: f64,
}

/// Boundary coordinates of the sub-area arrangement: the map borders plus
/// every detected line, sorted and deduplicated.
pub fn arrangement_lines(classified: &ClassifiedGrid, hough: &HoughParams) -> (Vec<usize>, Vec<usize>) {
    let mut xs = BTreeSet::from([0, classified.width() - 1]);
    let mut ys = BTreeSet::from([0, classified.height() - 1]);
    for s in hough_segments(classified, None, hough) {
        match s.axis() {
            Axis::Vertical => xs.insert(s.line()),
            Axis::Horizontal => ys.insert(s.line()),
        };
    }
    (xs.into_iter().collect(), ys.into_iter().collect())
}

/// Number of contiguous blocks in an arrangement with the given boundaries.
pub fn block_count(xs: usize, ys: usize) -> usize {
    let pairs = |n: usize| n * n.saturating_sub(1) / 2;
    pairs(xs).saturating_mul(pairs(ys))
}

/// Every contiguous block of sub-areas, before any filtering.
///
/// `xs` and `ys` must be strictly increasing.
pub fn subarea_blocks(xs: &[usize], ys: &[usize]) -> Vec<Rect> {
    let mut out = Vec::with_capacity(block_count(xs.len(), ys.len()));
    for (i, &x0) in xs.iter().enumerate() {
        for &x1 in &xs[i + 1..] {
            for (k, &y0) in ys.iter().enumerate() {
                for &y1 in &ys[k + 1..] {
                    out.push(Rect::from_corners(x0, y0, x1, y1).expect("boundaries strictly increase"));
                }
            }
        }
    }
    out
}

/// Weighted room candidates from the sub-area arrangement, keeping blocks with
/// both sides at least `min_side` and a nonzero room weight.
pub fn wbr_candidates(
    classified: &ClassifiedGrid,
    hough: &HoughParams,
    min_side: usize,
    cap: usize,
) -> Result<Vec<RoomCandidate>, Error> {
    let (xs, ys) = arrangement_lines(classified, hough);
    let count = block_count(xs.len(), ys.len());
    if count > cap {
        return Err(Error::CandidateExplosion { count, cap });
    }
    Ok(subarea_blocks(&xs, &ys)
        .into_iter()
        .filter(|r| r.min_side() >= min_side)
        .filter_map(|rect| {
            let weight = room_weight(&rect, classified);
            (weight > 0.0).then_some(RoomCandidate { rect, weight })
        })
        .collect())
}
