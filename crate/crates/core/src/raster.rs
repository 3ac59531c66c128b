//! Rasterization of a world into predicted cell states, and the bookkeeping
//! that lets the model re-evaluate only the cells a transition touched.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{disjoint_cover, CellBox, Rect, Side};
use crate::world::World;
use crate::Error;

/// Expected state of a cell under a world.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PredictedClass {
    Wall,
    Unknown,
    Free,
    Door,
}

impl PredictedClass {
    /// Row of the sensor table; a doorway is observed like free space.
    pub fn row(self) -> usize {
        match self {
            PredictedClass::Wall => 0,
            PredictedClass::Unknown => 1,
            PredictedClass::Free | PredictedClass::Door => 2,
        }
    }

    /// Precedence Door > Wall > Free > Unknown over per-cell counts.
    #[inline]
    pub fn from_counts(coverage: u16, walls: u16, doors: u16) -> Self {
        if doors > 0 {
            PredictedClass::Door
        } else if walls > 0 {
            PredictedClass::Wall
        } else if coverage > 0 {
            PredictedClass::Free
        } else {
            PredictedClass::Unknown
        }
    }
}

/// Per-cell counts over an inclusive box: rooms containing the cell, room
/// perimeters through it, and door openings over it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Counts {
    pub(crate) extent: CellBox,
    pub(crate) coverage: Vec<u16>,
    pub(crate) walls: Vec<u16>,
    pub(crate) doors: Vec<u16>,
}

impl Counts {
    pub(crate) fn zeros(extent: CellBox) -> Self {
        let n = extent.cell_count();
        Self {
            extent,
            coverage: vec![0; n],
            walls: vec![0; n],
            doors: vec![0; n],
        }
    }

    /// Counts of `world` restricted to `extent`.
    pub(crate) fn of_world(world: &World, extent: CellBox) -> Self {
        let mut c = Self::zeros(extent);
        c.paint_world(world, 1);
        c
    }

    fn paint_world(&mut self, world: &World, delta: i16) {
        for room in world.rooms() {
            self.paint_room(&room.rect, delta);
        }
        for door in world.doors() {
            self.paint_door(door.opening(), delta);
        }
    }

    #[inline]
    fn offset(&self, x: usize, y: usize) -> usize {
        (y - self.extent.y0) * self.extent.width() + (x - self.extent.x0)
    }

    fn bump(buf: &mut [u16], i: usize, delta: i16) {
        buf[i] = buf[i].wrapping_add_signed(delta);
    }

    pub(crate) fn paint_room(&mut self, rect: &Rect, delta: i16) {
        let Some(b) = rect.to_box().intersect(&self.extent) else {
            return;
        };
        for y in b.y0..=b.y1 {
            let row = self.offset(b.x0, y);
            for i in row..row + b.width() {
                Self::bump(&mut self.coverage, i, delta);
            }
        }
        for side in Side::ALL {
            let Some(w) = rect.wall(side).to_box().intersect(&self.extent) else {
                continue;
            };
            for c in w.cells() {
                // corners belong to two sides; count each perimeter cell once
                let corner_dup =
                    matches!(side, Side::East | Side::West) && (c.y == rect.min().y || c.y == rect.max().y);
                if !corner_dup {
                    let i = self.offset(c.x, c.y);
                    Self::bump(&mut self.walls, i, delta);
                }
            }
        }
    }

    pub(crate) fn paint_door(&mut self, opening: CellBox, delta: i16) {
        let Some(b) = opening.intersect(&self.extent) else {
            return;
        };
        for c in b.cells() {
            let i = self.offset(c.x, c.y);
            Self::bump(&mut self.doors, i, delta);
        }
    }

    #[inline]
    pub(crate) fn class_at(&self, i: usize) -> PredictedClass {
        PredictedClass::from_counts(self.coverage[i], self.walls[i], self.doors[i])
    }
}

/// Rasterized world over the full map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredictedGrid {
    width: usize,
    height: usize,
    counts: Counts,
}

impl PredictedGrid {
    /// A grid where every cell is `Unknown`.
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            counts: Counts::zeros(CellBox::grid(width, height)),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn class(&self, x: usize, y: usize) -> PredictedClass {
        self.counts.class_at(y * self.width + x)
    }

    #[inline]
    pub fn class_at(&self, index: usize) -> PredictedClass {
        self.counts.class_at(index)
    }

    /// Number of rooms whose closed rectangle contains the cell.
    pub fn coverage(&self, x: usize, y: usize) -> u16 {
        self.counts.coverage[y * self.width + x]
    }

    pub fn coverage_slice(&self) -> &[u16] {
        &self.counts.coverage
    }

    pub fn classes(&self) -> impl Iterator<Item = PredictedClass> + '_ {
        (0..self.len()).map(|i| self.counts.class_at(i))
    }

    /// Recomputes the cells of `region` from `world`, leaving the rest untouched.
    pub fn refresh(&mut self, world: &World, region: &[CellBox]) {
        for b in region {
            let Some(b) = b.clip(self.width, self.height) else {
                continue;
            };
            let local = Counts::of_world(world, b);
            for y in b.y0..=b.y1 {
                let dst = y * self.width + b.x0;
                let src = (y - b.y0) * b.width();
                let n = b.width();
                self.counts.coverage[dst..dst + n].copy_from_slice(&local.coverage[src..src + n]);
                self.counts.walls[dst..dst + n].copy_from_slice(&local.walls[src..src + n]);
                self.counts.doors[dst..dst + n].copy_from_slice(&local.doors[src..src + n]);
            }
        }
    }
}

/// Rasterizes `world` onto a `width` x `height` grid.
pub fn rasterize(world: &World, width: usize, height: usize) -> Result<PredictedGrid, Error> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyGrid { width, height });
    }
    if world.rooms().iter().any(|r| !r.rect.fits(width, height)) {
        return Err(Error::OutOfBounds { width, height });
    }
    Ok(PredictedGrid {
        width,
        height,
        counts: Counts::of_world(world, CellBox::grid(width, height)),
    })
}

/// Boxes covering every cell whose predicted class or coverage may differ
/// between the two worlds. The boxes are pairwise disjoint and are not
/// clipped to any grid.
pub fn diff_region(before: &World, after: &World) -> Vec<CellBox> {
    let mut boxes = Vec::new();
    for r0 in before.rooms() {
        match after.room(r0.id) {
            None => boxes.push(r0.rect.to_box().expand(1)),
            Some(r1) if r1.rect != r0.rect => match wall_shift_band(&r0.rect, &r1.rect) {
                Some(band) => boxes.push(band.expand(1)),
                None => {
                    boxes.push(r0.rect.to_box().expand(1));
                    boxes.push(r1.rect.to_box().expand(1));
                }
            },
            Some(_) => {}
        }
    }
    for r1 in after.rooms() {
        if before.room(r1.id).is_none() {
            boxes.push(r1.rect.to_box().expand(1));
        }
    }
    for d0 in before.doors() {
        match after.door(d0.id) {
            Some(d1) if d1.opening() == d0.opening() => {}
            Some(d1) => {
                boxes.push(d0.opening().expand(1));
                boxes.push(d1.opening().expand(1));
            }
            None => boxes.push(d0.opening().expand(1)),
        }
    }
    for d1 in after.doors() {
        if before.door(d1.id).is_none() {
            boxes.push(d1.opening().expand(1));
        }
    }
    disjoint_cover(&boxes)
}

/// When `b` is `a` with exactly one wall moved, the band swept by that wall.
fn wall_shift_band(a: &Rect, b: &Rect) -> Option<CellBox> {
    let moved: Vec<Side> = Side::ALL.into_iter().filter(|&s| a.line(s) != b.line(s)).collect();
    let [side] = moved[..] else {
        return None;
    };
    let l0 = a.line(side).min(b.line(side));
    let l1 = a.line(side).max(b.line(side));
    let (lo, hi) = a.span(side);
    Some(match side {
        Side::North | Side::South => CellBox::new(lo, l0, hi, l1),
        Side::East | Side::West => CellBox::new(l0, lo, l1, hi),
    })
}
