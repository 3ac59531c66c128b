//! Door candidates along facing walls of neighbouring rooms.
//!
//! Each wall is trimmed at both ends and thickened into a band. Where bands of
//! two rooms overlap, windows along the facing wall lines that look like free
//! space are verified and joined into openings.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::detectors::components::{component_extents, connected_components};
use crate::detectors::weights::door_weight;
use crate::geometry::{Axis, CellBox, Segment, Side};
use crate::grid::{CellClass, ClassifiedGrid};
use crate::world::{RoomId, World, WALL_ADJACENCY};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoorParams {
    /// Band half-width around a wall, and how far its ends are trimmed.
    pub expansion_depth: usize,
    /// Chunk length in cells.
    pub segment_len: usize,
    /// A chunk is verified when its door weight exceeds this.
    pub verify_threshold: f64,
    /// Verified chunks separated by fewer cells are joined.
    pub gap_threshold: usize,
    /// Shortest door, as a segment length.
    pub min_door_len: f64,
}

impl Default for DoorParams {
    fn default() -> Self {
        Self {
            expansion_depth: 5,
            segment_len: 4,
            verify_threshold: 0.6,
            gap_threshold: 2,
            min_door_len: 3.0,
        }
    }
}

impl DoorParams {
    pub fn validate(&self) -> Result<(), Error> {
        if self.segment_len < 2 {
            return Err(Error::InvalidParameter("door segment_len must be at least 2"));
        }
        if !(0.0..=1.0).contains(&self.verify_threshold) {
            return Err(Error::InvalidParameter("door verify_threshold must lie in [0, 1]"));
        }
        if !(self.min_door_len >= 1.0) {
            return Err(Error::InvalidParameter("min_door_len must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DoorCandidate {
    /// Opening on the first host wall.
    pub span: Segment,
    pub rooms: (RoomId, RoomId),
    pub walls: (Side, Side),
    pub weight: f64,
}

struct Band {
    room: RoomId,
    side: Side,
    line: usize,
    lo: usize,
    hi: usize,
    area: CellBox,
}

fn bands(world: &World, depth: usize, width: usize, height: usize) -> Vec<Band> {
    let mut out = Vec::new();
    for room in world.rooms() {
        for side in Side::ALL {
            let (lo, hi) = room.rect.span(side);
            let (lo, hi) = (lo + depth + 1, hi.saturating_sub(depth + 1));
            if lo > hi {
                continue;
            }
            let line = room.rect.line(side);
            let (p0, p1) = (line.saturating_sub(depth), line + depth);
            let area = match side.axis() {
                Axis::Horizontal => CellBox::new(lo, p0, hi, p1),
                Axis::Vertical => CellBox::new(p0, lo, p1, hi),
            };
            if let Some(area) = area.clip(width, height) {
                out.push(Band {
                    room: room.id,
                    side,
                    line,
                    lo,
                    hi,
                    area,
                });
            }
        }
    }
    out
}

/// Along-wall range of a box for walls on `axis`.
fn along(b: &CellBox, axis: Axis) -> (usize, usize) {
    match axis {
        Axis::Horizontal => (b.x0, b.x1),
        Axis::Vertical => (b.y0, b.y1),
    }
}

/// Free cells at position `t` on the distinct lines of `lines`.
fn free_at(classified: &ClassifiedGrid, axis: Axis, lines: &[usize], t: usize) -> usize {
    lines
        .iter()
        .filter(|&&l| classified.along(axis, l, t) == CellClass::Free)
        .count()
}

/// Openings through the wall lines `lines` within `lo..=hi`.
///
/// Every window of `segment_len` positions is scored by the free fraction of
/// its cells on all lines; positions under a verified window are joined
/// across gaps shorter than `gap_threshold` and trimmed to their outermost
/// free cells.
fn door_spans(
    classified: &ClassifiedGrid,
    axis: Axis,
    lines: &[usize],
    lo: usize,
    hi: usize,
    p: &DoorParams,
) -> Vec<(usize, usize)> {
    if hi < lo + p.segment_len - 1 {
        return Vec::new();
    }
    let n = hi - lo + 1;
    let free: Vec<usize> = (lo..=hi).map(|t| free_at(classified, axis, lines, t)).collect();
    let cells = (p.segment_len * lines.len()) as f64;
    let mut covered = vec![false; n];
    let mut sum: usize = free[..p.segment_len].iter().sum();
    for s in 0..=n - p.segment_len {
        if s > 0 {
            sum = sum + free[s + p.segment_len - 1] - free[s - 1];
        }
        if sum as f64 / cells > p.verify_threshold {
            covered[s..s + p.segment_len].iter_mut().for_each(|c| *c = true);
        }
    }
    let mut joined: Vec<(usize, usize)> = Vec::new();
    for t in (0..n).filter(|&t| covered[t]) {
        match joined.last_mut() {
            Some(last) if t - last.1 - 1 < p.gap_threshold.max(1) => last.1 = t,
            _ => joined.push((t, t)),
        }
    }
    let open = |t: usize| free[t] > 0;
    joined
        .into_iter()
        .filter_map(|(s, e)| {
            let s2 = (s..=e).find(|&t| open(t))?;
            let e2 = (s..=e).rev().find(|&t| open(t))?;
            Some((s2 + lo, e2 + lo))
        })
        .collect()
}

/// Door candidates between every pair of rooms whose trimmed wall bands overlap.
pub fn door_candidates(world: &World, classified: &ClassifiedGrid, params: &DoorParams) -> Vec<DoorCandidate> {
    let (w, h) = (classified.width(), classified.height());
    let bands = bands(world, params.expansion_depth, w, h);
    let Some(hull) = bands.iter().map(|b| b.area).reduce(|a, b| a.hull(&b)) else {
        return Vec::new();
    };
    let (hw, hh) = (hull.width(), hull.height());
    let mut count = vec![0u8; hw * hh];
    for b in &bands {
        for c in b.area.cells() {
            let i = (c.y - hull.y0) * hw + (c.x - hull.x0);
            count[i] = count[i].saturating_add(1);
        }
    }
    let mask: Vec<bool> = count.iter().map(|&n| n >= 2).collect();
    let (labels, n) = connected_components(&mask, hw, hh);

    let mut pairs = BTreeSet::new();
    for (local, _) in component_extents(&labels, hw, n) {
        let comp = CellBox::new(
            local.x0 + hull.x0,
            local.y0 + hull.y0,
            local.x1 + hull.x0,
            local.y1 + hull.y0,
        );
        let touching: Vec<usize> = (0..bands.len())
            .filter(|&i| bands[i].area.intersect(&comp).is_some())
            .collect();
        for (k, &i) in touching.iter().enumerate() {
            for &j in &touching[k + 1..] {
                let (a, b) = (&bands[i], &bands[j]);
                if a.room == b.room || a.side.opposite() != b.side || a.line.abs_diff(b.line) > WALL_ADJACENCY {
                    continue;
                }
                if let Some(overlap) = a.area.intersect(&b.area).and_then(|o| o.intersect(&comp)) {
                    let (lo, hi) = along(&overlap, a.side.axis());
                    pairs.insert((i, j, lo.max(a.lo).max(b.lo), hi.min(a.hi).min(b.hi)));
                }
            }
        }
    }

    let mut out = Vec::new();
    for (i, j, lo, hi) in pairs {
        if lo > hi {
            continue;
        }
        let (a, b) = (&bands[i], &bands[j]);
        let axis = a.side.axis();
        let lines: Vec<usize> = if a.line == b.line {
            vec![a.line]
        } else {
            vec![a.line, b.line]
        };
        for (s, e) in door_spans(classified, axis, &lines, lo, hi, params) {
            if e <= s || ((e - s) as f64) < params.min_door_len {
                continue;
            }
            let weight = lines
                .iter()
                .map(|&l| {
                    door_weight(
                        &Segment::on_line(axis, l, s, e).expect("span is non-degenerate"),
                        classified,
                    )
                })
                .sum::<f64>()
                / lines.len() as f64;
            out.push(DoorCandidate {
                span: Segment::on_line(axis, a.line, s, e).expect("span is non-degenerate"),
                rooms: (a.room, b.room),
                walls: (a.side, b.side),
                weight,
            });
        }
    }
    out
}
