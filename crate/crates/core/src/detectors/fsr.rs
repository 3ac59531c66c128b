//! Free-space room candidates: observed free regions the current world leaves
//! unexplained, boxed by their bounding rectangles.

use alloc::vec::Vec;

use crate::detectors::components::{component_extents, connected_components};
use crate::detectors::wbr::RoomCandidate;
use crate::detectors::weights::room_weight;
use crate::geometry::Rect;
use crate::grid::{CellClass, ClassifiedGrid};
use crate::raster::{PredictedClass, PredictedGrid};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FsrParams {
    /// Lower bound on a candidate's weight.
    pub weight_floor: f64,
    /// Regions with fewer cells are treated as sensor noise.
    pub min_region_cells: usize,
}

impl Default for FsrParams {
    fn default() -> Self {
        Self {
            weight_floor: 0.05,
            min_region_cells: 25,
        }
    }
}

/// One candidate per unexplained free region.
///
/// The region's bounding box is grown by one cell so the enclosing walls sit
/// on the candidate's perimeter.
pub fn fsr_candidates(
    classified: &ClassifiedGrid,
    predicted: &PredictedGrid,
    params: &FsrParams,
    min_side: usize,
) -> Vec<RoomCandidate> {
    let (w, h) = (classified.width(), classified.height());
    let mask: Vec<bool> = classified
        .classes()
        .iter()
        .zip(predicted.classes())
        .map(|(&c, p)| c == CellClass::Free && p == PredictedClass::Unknown)
        .collect();
    let (labels, count) = connected_components(&mask, w, h);
    component_extents(&labels, w, count)
        .into_iter()
        .filter(|&(_, cells)| cells >= params.min_region_cells)
        .filter_map(|(bbox, _)| {
            let b = bbox.expand(1).clip(w, h)?;
            let rect = Rect::from_corners(b.x0, b.y0, b.x1, b.y1).ok()?;
            (rect.min_side() >= min_side).then(|| RoomCandidate {
                rect,
                weight: room_weight(&rect, classified).max(params.weight_floor),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::rasterize;
    use crate::World;

    fn map(w: usize, h: usize, free: impl Fn(usize, usize) -> bool) -> ClassifiedGrid {
        let classes = (0..w * h)
            .map(|i| {
                if free(i % w, i / w) {
                    CellClass::Free
                } else {
                    CellClass::Unexplained
                }
            })
            .collect();
        ClassifiedGrid::from_classes(w, h, classes).unwrap()
    }

    #[test]
    fn covered_map_yields_nothing() {
        let g = map(20, 20, |_, _| true);
        let mut world = World::new();
        world.add_room(Rect::from_corners(0, 0, 19, 19).unwrap());
        let p = rasterize(&world, 20, 20).unwrap();
        assert!(fsr_candidates(&g, &p, &FsrParams::default(), 3).is_empty());
    }

    #[test]
    fn single_region_is_boxed() {
        let g = map(40, 30, |x, y| (10..20).contains(&x) && (5..13).contains(&y));
        let p = PredictedGrid::empty(40, 30);
        let c = fsr_candidates(&g, &p, &FsrParams::default(), 3);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].rect, Rect::from_corners(9, 4, 20, 13).unwrap());
        assert_eq!(c[0].weight, 0.05);
    }

    #[test]
    fn two_regions_and_explained_cells() {
        let free = |x: usize, y: usize| (2..12).contains(&y) && ((2..12).contains(&x) || (20..30).contains(&x));
        let g = map(40, 20, free);
        let p = PredictedGrid::empty(40, 20);
        assert_eq!(fsr_candidates(&g, &p, &FsrParams::default(), 3).len(), 2);
        let mut world = World::new();
        world.add_room(Rect::from_corners(1, 1, 12, 12).unwrap());
        let p = rasterize(&world, 40, 20).unwrap();
        let c = fsr_candidates(&g, &p, &FsrParams::default(), 3);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].rect, Rect::from_corners(19, 1, 30, 12).unwrap());
    }

    #[test]
    fn specks_are_ignored() {
        let g = map(30, 30, |x, y| x % 7 == 0 && y % 7 == 0);
        assert!(fsr_candidates(&g, &PredictedGrid::empty(30, 30), &FsrParams::default(), 3).is_empty());
    }
}
