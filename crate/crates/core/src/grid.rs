//! Raw occupancy rasters and their three-way classification.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{Axis, Segment};
use crate::Error;

/// Default cell size when no map metadata is available.
pub const DEFAULT_RESOLUTION: f64 = 0.05;

/// An 8-bit occupancy raster, row-major, as produced by a SLAM front end.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    intensities: Vec<u8>,
    resolution: f64,
}

impl OccupancyGrid {
    pub fn new(width: usize, height: usize, intensities: Vec<u8>) -> Result<Self, Error> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyGrid { width, height });
        }
        if intensities.len() != width * height {
            return Err(Error::CellCountMismatch {
                expected: width * height,
                actual: intensities.len(),
            });
        }
        Ok(Self {
            width,
            height,
            intensities,
            resolution: DEFAULT_RESOLUTION,
        })
    }

    /// Meters per cell. Metadata only; never used by the model.
    pub fn with_resolution(mut self, resolution: f64) -> Self {
        self.resolution = resolution;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn intensities(&self) -> &[u8] {
        &self.intensities
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.intensities[y * self.width + x]
    }
}

/// Observation class of one map cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellClass {
    Occupied,
    Unexplained,
    Free,
}

impl CellClass {
    pub const ALL: [CellClass; 3] = [CellClass::Occupied, CellClass::Unexplained, CellClass::Free];

    /// Column of this class in the sensor table.
    pub fn index(self) -> usize {
        match self {
            CellClass::Occupied => 0,
            CellClass::Unexplained => 1,
            CellClass::Free => 2,
        }
    }

    /// Canonical intensity used when a class is written back as a graymap.
    pub fn intensity(self) -> u8 {
        match self {
            CellClass::Occupied => 0,
            CellClass::Unexplained => 205,
            CellClass::Free => 254,
        }
    }
}

/// Intensity bands separating occupied, unexplained and free cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassifierThresholds {
    occupied: u8,
    unexplained: u8,
}

impl ClassifierThresholds {
    pub fn new(occupied: u8, unexplained: u8) -> Result<Self, Error> {
        if occupied >= unexplained {
            return Err(Error::InvalidThresholds { occupied, unexplained });
        }
        Ok(Self { occupied, unexplained })
    }

    pub fn occupied(&self) -> u8 {
        self.occupied
    }

    pub fn unexplained(&self) -> u8 {
        self.unexplained
    }

    pub fn class_of(&self, intensity: u8) -> CellClass {
        if intensity <= self.occupied {
            CellClass::Occupied
        } else if intensity <= self.unexplained {
            CellClass::Unexplained
        } else {
            CellClass::Free
        }
    }
}

impl Default for ClassifierThresholds {
    fn default() -> Self {
        Self {
            occupied: 100,
            unexplained: 230,
        }
    }
}

/// The observed map reduced to [`CellClass`] labels.
///
/// Row and column prefix counts of occupied and free cells are kept so that
/// detector weights along axis-aligned segments are O(1).
#[derive(Clone, Debug)]
pub struct ClassifiedGrid {
    width: usize,
    height: usize,
    classes: Vec<CellClass>,
    // row_occupied[y * (width + 1) + x] = occupied cells in row y with column < x
    row_occupied: Vec<u32>,
    row_free: Vec<u32>,
    // col_occupied[x * (height + 1) + y] = occupied cells in column x with row < y
    col_occupied: Vec<u32>,
    col_free: Vec<u32>,
}

impl PartialEq for ClassifiedGrid {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height && self.classes == other.classes
    }
}

impl ClassifiedGrid {
    pub fn from_classes(width: usize, height: usize, classes: Vec<CellClass>) -> Result<Self, Error> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyGrid { width, height });
        }
        if classes.len() != width * height {
            return Err(Error::CellCountMismatch {
                expected: width * height,
                actual: classes.len(),
            });
        }
        let mut row_occupied = vec![0u32; (width + 1) * height];
        let mut row_free = vec![0u32; (width + 1) * height];
        let mut col_occupied = vec![0u32; (height + 1) * width];
        let mut col_free = vec![0u32; (height + 1) * width];
        for y in 0..height {
            for x in 0..width {
                let c = classes[y * width + x];
                let occ = u32::from(c == CellClass::Occupied);
                let free = u32::from(c == CellClass::Free);
                let r = y * (width + 1) + x;
                row_occupied[r + 1] = row_occupied[r] + occ;
                row_free[r + 1] = row_free[r] + free;
                let k = x * (height + 1) + y;
                col_occupied[k + 1] = col_occupied[k] + occ;
                col_free[k + 1] = col_free[k] + free;
            }
        }
        Ok(Self {
            width,
            height,
            classes,
            row_occupied,
            row_free,
            col_occupied,
            col_free,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[CellClass] {
        &self.classes
    }

    pub fn get(&self, x: usize, y: usize) -> CellClass {
        self.classes[y * self.width + x]
    }

    /// Number of cells of `class` on the lattice cells of `segment`.
    ///
    /// Only `Occupied` and `Free` are indexed; `Unexplained` falls back to a scan.
    pub fn count_on(&self, segment: &Segment, class: CellClass) -> usize {
        let (lo, hi) = segment.range();
        self.count_range(segment.axis(), segment.line(), lo, hi, class)
    }

    /// Cells of `class` on row `line` (horizontal) or column `line` (vertical)
    /// between `lo` and `hi` inclusive.
    pub fn count_range(&self, axis: Axis, line: usize, lo: usize, hi: usize, class: CellClass) -> usize {
        let (table, stride) = match (axis, class) {
            (Axis::Horizontal, CellClass::Occupied) => (&self.row_occupied, self.width + 1),
            (Axis::Horizontal, CellClass::Free) => (&self.row_free, self.width + 1),
            (Axis::Vertical, CellClass::Occupied) => (&self.col_occupied, self.height + 1),
            (Axis::Vertical, CellClass::Free) => (&self.col_free, self.height + 1),
            (Axis::Horizontal, CellClass::Unexplained) => {
                return (lo..=hi).filter(|&x| self.get(x, line) == class).count();
            }
            (Axis::Vertical, CellClass::Unexplained) => {
                return (lo..=hi).filter(|&y| self.get(line, y) == class).count();
            }
        };
        let base = line * stride;
        (table[base + hi + 1] - table[base + lo]) as usize
    }

    /// Class at position `t` along row/column `line`.
    pub fn along(&self, axis: Axis, line: usize, t: usize) -> CellClass {
        match axis {
            Axis::Horizontal => self.get(t, line),
            Axis::Vertical => self.get(line, t),
        }
    }
}

/// Maps every intensity to its class. Dimensions are preserved.
pub fn classify(grid: &OccupancyGrid, thresholds: ClassifierThresholds) -> ClassifiedGrid {
    let classes = grid.intensities().iter().map(|&v| thresholds.class_of(v)).collect();
    ClassifiedGrid::from_classes(grid.width(), grid.height(), classes)
        .expect("occupancy grid dimensions are validated at construction")
}
