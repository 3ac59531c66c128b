//! Axis-aligned Hough line detection over occupied cells.
//!
//! Worlds are axis-aligned, so only the 0° and 90° accumulator columns are
//! read. Every line (row or column) of the region votes with its occupied
//! cells; lines are grouped into bins of `rho_resolution` cells. Each bin at or
//! above `accumulator_threshold` votes is scanned for runs of occupied cells
//! with gaps of at most `max_gap`. A run becomes a segment when it spans at
//! least `min_segment_len`, holds at least that many occupied cells, and at
//! least `min_fill` of its cells are occupied.

use alloc::vec::Vec;

use crate::geometry::{Axis, CellBox, Segment};
use crate::grid::{CellClass, ClassifiedGrid};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HoughParams {
    /// Accumulator bin width in cells.
    pub rho_resolution: usize,
    /// Angular bin width in degrees; must divide 90 so both axis bins exist.
    pub theta_resolution: f64,
    pub accumulator_threshold: usize,
    pub min_segment_len: usize,
    pub max_gap: usize,
    /// Smallest share of occupied cells within a run.
    pub min_fill: f64,
}

impl Default for HoughParams {
    fn default() -> Self {
        Self {
            rho_resolution: 1,
            theta_resolution: 1.0,
            accumulator_threshold: 20,
            min_segment_len: 10,
            max_gap: 3,
            min_fill: 0.6,
        }
    }
}

impl HoughParams {
    pub fn validate(&self) -> Result<(), Error> {
        if self.rho_resolution == 0 {
            return Err(Error::InvalidParameter("rho_resolution must be positive"));
        }
        let t = self.theta_resolution;
        if !(t > 0.0 && t <= 90.0) || libm::fmod(90.0, t) != 0.0 {
            return Err(Error::InvalidParameter("theta_resolution must divide 90 degrees"));
        }
        if self.accumulator_threshold == 0 || self.min_segment_len == 0 || self.max_gap == 0 {
            return Err(Error::InvalidParameter("hough thresholds must be positive"));
        }
        if !(0.0..=1.0).contains(&self.min_fill) {
            return Err(Error::InvalidParameter("min_fill must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Axis-aligned segments fitted to occupied cells inside `region` (the whole
/// grid when `None`). Vertical segments come first, ordered by column, then
/// horizontal ones by row.
pub fn hough_segments(classified: &ClassifiedGrid, region: Option<CellBox>, params: &HoughParams) -> Vec<Segment> {
    let full = CellBox::grid(classified.width(), classified.height());
    let region = match region {
        Some(r) => match r.intersect(&full) {
            Some(r) => r,
            None => return Vec::new(),
        },
        None => full,
    };
    let mut out = Vec::new();
    for axis in [Axis::Vertical, Axis::Horizontal] {
        // lines are columns for vertical segments, rows for horizontal ones
        let (line_lo, line_hi, lo, hi) = match axis {
            Axis::Vertical => (region.x0, region.x1, region.y0, region.y1),
            Axis::Horizontal => (region.y0, region.y1, region.x0, region.x1),
        };
        let mut bin_start = line_lo;
        while bin_start <= line_hi {
            let bin_end = (bin_start + params.rho_resolution - 1).min(line_hi);
            let mut votes = 0;
            let mut best = (0, bin_start);
            for line in bin_start..=bin_end {
                let v = classified.count_range(axis, line, lo, hi, CellClass::Occupied);
                votes += v;
                if v > best.0 {
                    best = (v, line);
                }
            }
            if votes >= params.accumulator_threshold {
                scan_bin(classified, axis, bin_start..=bin_end, best.1, lo, hi, params, &mut out);
            }
            bin_start = bin_end + 1;
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn scan_bin(
    classified: &ClassifiedGrid,
    axis: Axis,
    lines: core::ops::RangeInclusive<usize>,
    snap: usize,
    lo: usize,
    hi: usize,
    params: &HoughParams,
    out: &mut Vec<Segment>,
) {
    let mut emit = |start: usize, end: usize, votes: usize| {
        let cells = end - start + 1;
        if end - start >= params.min_segment_len
            && votes >= params.min_segment_len
            && votes as f64 >= params.min_fill * cells as f64
        {
            out.push(Segment::on_line(axis, snap, start, end).expect("run spans at least min_segment_len"));
        }
    };
    // (start, last hit position, hits)
    let mut run: Option<(usize, usize, usize)> = None;
    for t in lo..=hi {
        // the bin is projected onto the line direction: a position is hit when any of its lines is occupied
        if !lines
            .clone()
            .any(|l| classified.along(axis, l, t) == CellClass::Occupied)
        {
            continue;
        }
        let votes = 1;
        run = match run {
            Some((s, last, v)) if t - last - 1 <= params.max_gap => Some((s, t, v + votes)),
            Some((s, last, v)) => {
                emit(s, last, v);
                Some((t, t, votes))
            }
            None => Some((t, t, votes)),
        };
    }
    if let Some((s, last, v)) = run {
        emit(s, last, v);
    }
}
