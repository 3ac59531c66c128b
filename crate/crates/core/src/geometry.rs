//! Cell-lattice primitives: indices, axis-aligned segments, rooms' rectangles
//! and the inclusive boxes used to describe changed regions.

use alloc::vec::Vec;
use core::cmp::{max, min};

use crate::Error;

/// A grid cell, column `x` and row `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CellIndex {
    pub x: usize,
    pub y: usize,
}

impl CellIndex {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    /// Constant row; runs along x.
    Horizontal,
    /// Constant column; runs along y.
    Vertical,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::Horizontal => Axis::Vertical,
            Axis::Vertical => Axis::Horizontal,
        }
    }
}

/// Axis-aligned segment between two distinct lattice cells, `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Segment {
    a: CellIndex,
    b: CellIndex,
}

impl Segment {
    pub fn new(a: CellIndex, b: CellIndex) -> Result<Self, Error> {
        if a == b {
            return Err(Error::DegenerateSegment { x: a.x, y: a.y });
        }
        if a.x != b.x && a.y != b.y {
            return Err(Error::NotAxisAligned);
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        Ok(Self { a, b })
    }

    /// Segment on `line` (row for horizontal, column for vertical) covering `lo..=hi`.
    pub fn on_line(axis: Axis, line: usize, lo: usize, hi: usize) -> Result<Self, Error> {
        match axis {
            Axis::Horizontal => Self::new(CellIndex::new(lo, line), CellIndex::new(hi, line)),
            Axis::Vertical => Self::new(CellIndex::new(line, lo), CellIndex::new(line, hi)),
        }
    }

    pub fn a(&self) -> CellIndex {
        self.a
    }

    pub fn b(&self) -> CellIndex {
        self.b
    }

    pub fn axis(&self) -> Axis {
        if self.a.y == self.b.y {
            Axis::Horizontal
        } else {
            Axis::Vertical
        }
    }

    /// The fixed coordinate: row of a horizontal segment, column of a vertical one.
    pub fn line(&self) -> usize {
        match self.axis() {
            Axis::Horizontal => self.a.y,
            Axis::Vertical => self.a.x,
        }
    }

    /// Inclusive coordinate range along the segment's direction.
    pub fn range(&self) -> (usize, usize) {
        match self.axis() {
            Axis::Horizontal => (self.a.x, self.b.x),
            Axis::Vertical => (self.a.y, self.b.y),
        }
    }

    /// Euclidean distance between the end points.
    pub fn length(&self) -> f64 {
        let (lo, hi) = self.range();
        (hi - lo) as f64
    }

    /// Lattice cells on the segment, end points included (`length + 1` of them).
    pub fn cell_count(&self) -> usize {
        let (lo, hi) = self.range();
        hi - lo + 1
    }

    pub fn cells(&self) -> impl Iterator<Item = CellIndex> + '_ {
        let (lo, hi) = self.range();
        let axis = self.axis();
        let line = self.line();
        (lo..=hi).map(move |t| match axis {
            Axis::Horizontal => CellIndex::new(t, line),
            Axis::Vertical => CellIndex::new(line, t),
        })
    }

    pub fn to_box(&self) -> CellBox {
        CellBox::new(self.a.x, self.a.y, self.b.x, self.b.y)
    }
}

/// Length of a segment.
pub fn segment_length(s: &Segment) -> f64 {
    s.length()
}

/// One side of a rectangle, in wall-index order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    /// `y == min.y`
    North,
    /// `x == max.x`
    East,
    /// `y == max.y`
    South,
    /// `x == min.x`
    West,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::North, Side::East, Side::South, Side::West];

    pub fn index(self) -> usize {
        match self {
            Side::North => 0,
            Side::East => 1,
            Side::South => 2,
            Side::West => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Side> {
        Side::ALL.get(i).copied()
    }

    pub fn axis(self) -> Axis {
        match self {
            Side::North | Side::South => Axis::Horizontal,
            Side::East | Side::West => Axis::Vertical,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::North => Side::South,
            Side::East => Side::West,
            Side::South => Side::North,
            Side::West => Side::East,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::North => "north",
            Side::East => "east",
            Side::South => "south",
            Side::West => "west",
        }
    }
}

/// A room's footprint: inclusive corners, perimeter cells are its walls.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rect {
    min: CellIndex,
    max: CellIndex,
}

impl Rect {
    pub fn new(min: CellIndex, max: CellIndex) -> Result<Self, Error> {
        if min.x >= max.x || min.y >= max.y {
            return Err(Error::InvalidRect(min.x, min.y, max.x, max.y));
        }
        Ok(Self { min, max })
    }

    pub fn from_corners(x0: usize, y0: usize, x1: usize, y1: usize) -> Result<Self, Error> {
        Self::new(CellIndex::new(x0, y0), CellIndex::new(x1, y1))
    }

    pub fn min(&self) -> CellIndex {
        self.min
    }

    pub fn max(&self) -> CellIndex {
        self.max
    }

    /// Length of the north and south walls.
    pub fn width(&self) -> usize {
        self.max.x - self.min.x
    }

    /// Length of the east and west walls.
    pub fn height(&self) -> usize {
        self.max.y - self.min.y
    }

    pub fn min_side(&self) -> usize {
        min(self.width(), self.height())
    }

    /// Cells in the closed rectangle, perimeter included.
    pub fn area_cells(&self) -> usize {
        (self.width() + 1) * (self.height() + 1)
    }

    pub fn contains(&self, c: CellIndex) -> bool {
        c.x >= self.min.x && c.x <= self.max.x && c.y >= self.min.y && c.y <= self.max.y
    }

    pub fn on_perimeter(&self, c: CellIndex) -> bool {
        self.contains(c) && (c.x == self.min.x || c.x == self.max.x || c.y == self.min.y || c.y == self.max.y)
    }

    pub fn in_interior(&self, c: CellIndex) -> bool {
        c.x > self.min.x && c.x < self.max.x && c.y > self.min.y && c.y < self.max.y
    }

    pub fn fits(&self, width: usize, height: usize) -> bool {
        self.max.x < width && self.max.y < height
    }

    /// Coordinate of the wall line of `side`.
    pub fn line(&self, side: Side) -> usize {
        match side {
            Side::North => self.min.y,
            Side::East => self.max.x,
            Side::South => self.max.y,
            Side::West => self.min.x,
        }
    }

    /// Inclusive range spanned by the wall on `side`.
    pub fn span(&self, side: Side) -> (usize, usize) {
        match side.axis() {
            Axis::Horizontal => (self.min.x, self.max.x),
            Axis::Vertical => (self.min.y, self.max.y),
        }
    }

    pub fn wall(&self, side: Side) -> Segment {
        let (lo, hi) = self.span(side);
        Segment::on_line(side.axis(), self.line(side), lo, hi).expect("rect sides are non-degenerate")
    }

    pub fn walls(&self) -> [Segment; 4] {
        Side::ALL.map(|s| self.wall(s))
    }

    pub fn center(&self) -> (f64, f64) {
        (
            (self.min.x + self.max.x) as f64 / 2.0,
            (self.min.y + self.max.y) as f64 / 2.0,
        )
    }

    /// Smallest rectangle containing both.
    pub fn bounding(&self, other: &Rect) -> Rect {
        Rect {
            min: CellIndex::new(min(self.min.x, other.min.x), min(self.min.y, other.min.y)),
            max: CellIndex::new(max(self.max.x, other.max.x), max(self.max.y, other.max.y)),
        }
    }

    /// Moves the wall on `side` inward by `offset` cells (outward when negative).
    ///
    /// Returns `None` when the result would be inverted or leave the first quadrant.
    pub fn shift_wall(&self, side: Side, offset: i64) -> Option<Rect> {
        let (mut x0, mut y0, mut x1, mut y1) = (
            self.min.x as i64,
            self.min.y as i64,
            self.max.x as i64,
            self.max.y as i64,
        );
        match side {
            Side::North => y0 += offset,
            Side::East => x1 -= offset,
            Side::South => y1 -= offset,
            Side::West => x0 += offset,
        }
        if x0 < 0 || y0 < 0 {
            return None;
        }
        Rect::from_corners(x0 as usize, y0 as usize, x1 as usize, y1 as usize).ok()
    }

    pub fn to_box(&self) -> CellBox {
        CellBox::new(self.min.x, self.min.y, self.max.x, self.max.y)
    }

    /// Cells strictly inside the perimeter, if any.
    pub fn interior(&self) -> Option<CellBox> {
        if self.width() < 2 || self.height() < 2 {
            return None;
        }
        Some(CellBox::new(
            self.min.x + 1,
            self.min.y + 1,
            self.max.x - 1,
            self.max.y - 1,
        ))
    }

    /// Intersection-over-union of the closed cell sets.
    pub fn iou(&self, other: &Rect) -> f64 {
        let inter = self.to_box().intersect(&other.to_box()).map_or(0, |b| b.cell_count());
        let union = self.area_cells() + other.area_cells() - inter;
        inter as f64 / union as f64
    }
}

/// Inclusive cell box; unlike [`Rect`] it may be a single row, column or cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellBox {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl CellBox {
    /// Panics if the corners are inverted.
    pub fn new(x0: usize, y0: usize, x1: usize, y1: usize) -> Self {
        assert!(x0 <= x1 && y0 <= y1, "inverted cell box");
        Self { x0, y0, x1, y1 }
    }

    pub fn grid(width: usize, height: usize) -> Self {
        Self::new(0, 0, width - 1, height - 1)
    }

    pub fn width(&self) -> usize {
        self.x1 - self.x0 + 1
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0 + 1
    }

    pub fn cell_count(&self) -> usize {
        self.width() * self.height()
    }

    pub fn contains(&self, c: CellIndex) -> bool {
        c.x >= self.x0 && c.x <= self.x1 && c.y >= self.y0 && c.y <= self.y1
    }

    /// Grows by `n` on every side; the low side saturates at 0.
    pub fn expand(&self, n: usize) -> Self {
        Self {
            x0: self.x0.saturating_sub(n),
            y0: self.y0.saturating_sub(n),
            x1: self.x1 + n,
            y1: self.y1 + n,
        }
    }

    pub fn intersect(&self, other: &CellBox) -> Option<CellBox> {
        let x0 = max(self.x0, other.x0);
        let y0 = max(self.y0, other.y0);
        let x1 = min(self.x1, other.x1);
        let y1 = min(self.y1, other.y1);
        (x0 <= x1 && y0 <= y1).then_some(CellBox { x0, y0, x1, y1 })
    }

    pub fn clip(&self, width: usize, height: usize) -> Option<CellBox> {
        if width == 0 || height == 0 {
            return None;
        }
        self.intersect(&CellBox::grid(width, height))
    }

    pub fn hull(&self, other: &CellBox) -> CellBox {
        CellBox {
            x0: min(self.x0, other.x0),
            y0: min(self.y0, other.y0),
            x1: max(self.x1, other.x1),
            y1: max(self.y1, other.y1),
        }
    }

    /// `self` minus `other`, as up to four disjoint boxes.
    pub fn subtract(&self, other: &CellBox) -> Vec<CellBox> {
        let Some(cut) = self.intersect(other) else {
            return alloc::vec![*self];
        };
        let mut out = Vec::with_capacity(4);
        if cut.y0 > self.y0 {
            out.push(CellBox::new(self.x0, self.y0, self.x1, cut.y0 - 1));
        }
        if cut.y1 < self.y1 {
            out.push(CellBox::new(self.x0, cut.y1 + 1, self.x1, self.y1));
        }
        if cut.x0 > self.x0 {
            out.push(CellBox::new(self.x0, cut.y0, cut.x0 - 1, cut.y1));
        }
        if cut.x1 < self.x1 {
            out.push(CellBox::new(cut.x1 + 1, cut.y0, self.x1, cut.y1));
        }
        out
    }

    pub fn cells(&self) -> impl Iterator<Item = CellIndex> + '_ {
        (self.y0..=self.y1).flat_map(move |y| (self.x0..=self.x1).map(move |x| CellIndex::new(x, y)))
    }
}

/// Rewrites a set of possibly overlapping boxes as pairwise disjoint boxes
/// covering exactly the same cells.
pub fn disjoint_cover(boxes: &[CellBox]) -> Vec<CellBox> {
    let mut out: Vec<CellBox> = Vec::new();
    for b in boxes {
        let mut pieces = alloc::vec![*b];
        for kept in &out {
            pieces = pieces.iter().flat_map(|p| p.subtract(kept)).collect();
            if pieces.is_empty() {
                break;
            }
        }
        out.extend(pieces);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn seg(ax: usize, ay: usize, bx: usize, by: usize) -> Result<Segment, Error> {
        Segment::new(CellIndex::new(ax, ay), CellIndex::new(bx, by))
    }

    #[test]
    fn segment_lengths() {
        assert_eq!(segment_length(&seg(0, 0, 0, 10).unwrap()), 10.0);
        assert_eq!(segment_length(&seg(2, 5, 9, 5).unwrap()), 7.0);
        assert_eq!(seg(3, 4, 3, 4), Err(Error::DegenerateSegment { x: 3, y: 4 }));
        assert_eq!(seg(0, 0, 2, 3), Err(Error::NotAxisAligned));
    }

    #[test]
    fn segment_orders_endpoints() {
        let s = seg(9, 5, 2, 5).unwrap();
        assert_eq!(s.a(), CellIndex::new(2, 5));
        assert_eq!(s.cell_count(), 8);
        assert_eq!(s.cells().count(), 8);
        assert_eq!(s.axis(), Axis::Horizontal);
        assert_eq!(s.line(), 5);
    }

    #[test]
    fn rect_walls_and_regions() {
        let r = Rect::from_corners(2, 2, 8, 6).unwrap();
        assert_eq!(r.wall(Side::North), seg(2, 2, 8, 2).unwrap());
        assert_eq!(r.wall(Side::East), seg(8, 2, 8, 6).unwrap());
        assert_eq!(r.area_cells(), 7 * 5);
        assert!(r.on_perimeter(CellIndex::new(2, 4)));
        assert!(r.in_interior(CellIndex::new(3, 3)));
        assert!(!r.in_interior(CellIndex::new(8, 3)));
        assert_eq!(r.interior(), Some(CellBox::new(3, 3, 7, 5)));
        assert!(Rect::from_corners(2, 2, 2, 6).is_err());
    }

    #[test]
    fn shift_wall_moves_one_side() {
        let r = Rect::from_corners(10, 10, 20, 30).unwrap();
        assert_eq!(r.shift_wall(Side::East, 3), Rect::from_corners(10, 10, 17, 30).ok());
        assert_eq!(r.shift_wall(Side::West, -4), Rect::from_corners(6, 10, 20, 30).ok());
        assert_eq!(r.shift_wall(Side::North, 25), None);
        assert_eq!(r.shift_wall(Side::West, -11), None);
    }

    #[test]
    fn iou_of_shifted_square() {
        let a = Rect::from_corners(0, 0, 9, 9).unwrap();
        let b = Rect::from_corners(1, 0, 10, 9).unwrap();
        assert!((a.iou(&b) - 90.0 / 110.0).abs() < 1e-12);
        assert_eq!(a.iou(&a), 1.0);
    }

    fn cellset(boxes: &[CellBox]) -> BTreeSet<CellIndex> {
        boxes.iter().flat_map(|b| b.cells().collect::<Vec<_>>()).collect()
    }

    prop_compose! {
        fn arb_box()(x0 in 0usize..12, y0 in 0usize..12, w in 0usize..6, h in 0usize..6) -> CellBox {
            CellBox::new(x0, y0, x0 + w, y0 + h)
        }
    }

    proptest! {
        #[test]
        fn disjoint_cover_is_exact(boxes in proptest::collection::vec(arb_box(), 0..6)) {
            let cover = disjoint_cover(&boxes);
            let total: usize = cover.iter().map(|b| b.cell_count()).sum();
            let cells = cellset(&cover);
            prop_assert_eq!(total, cells.len());
            prop_assert_eq!(cells, cellset(&boxes));
        }
    }
}
