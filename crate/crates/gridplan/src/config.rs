//! TOML run configuration.
//!
//! Every section and key is optional; missing values take the library
//! defaults. Relative paths are resolved against the config file's directory.
//!
//! ```toml
//! [map]
//! path = "map.pgm"
//!
//! [run]
//! seed = 7
//! iterations = 15000
//!
//! [[schedule.phase]]
//! until = 1000
//! add = 0.8
//! remove = 0.2
//!
//! [[schedule.phase]]
//! add = 0.5
//! remove = 0.5
//! ```

use std::path::{Path, PathBuf};

use gridplan_core::detectors::{DoorParams, FsrParams, HoughParams};
use gridplan_core::mcmc::{ChainConfig, KernelKind, KernelParams, Phase, Schedule};
use gridplan_core::{ClassifierThresholds, PriorParams, SensorModel};
use serde::{Deserialize, Serialize};

use crate::Error;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapSection {
    pub path: Option<PathBuf>,
    /// `key: value` metadata with `resolution`; defaults to the map's sidecar.
    pub metadata: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seed: u64,
    pub iterations: u64,
    /// Independent chains with seeds `seed, seed + 1, ...`.
    pub chains: usize,
    pub out_dir: PathBuf,
    /// Overlay snapshot every this many iterations; 0 disables snapshots.
    pub snapshot_every: u64,
    pub verify: bool,
    pub fsr_activation: u64,
    pub trace_window: usize,
}

impl Default for RunSection {
    fn default() -> Self {
        let c = ChainConfig::default();
        Self {
            seed: c.seed,
            iterations: c.iterations,
            chains: 1,
            out_dir: PathBuf::from("out"),
            snapshot_every: 0,
            verify: c.verify,
            fsr_activation: c.fsr_activation,
            trace_window: c.trace_window,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierSection {
    pub occupied: u8,
    pub unexplained: u8,
}

impl Default for ClassifierSection {
    fn default() -> Self {
        let t = ClassifierThresholds::default();
        Self {
            occupied: t.occupied(),
            unexplained: t.unexplained(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PriorSection {
    pub psi1: f64,
    pub psi2: f64,
    pub psi3: f64,
    pub right_angle_tolerance: f64,
}

impl Default for PriorSection {
    fn default() -> Self {
        let p = PriorParams::default();
        Self {
            psi1: p.psi1,
            psi2: p.psi2,
            psi3: p.psi3,
            right_angle_tolerance: p.right_angle_tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorSection {
    /// Rows: predicted wall, unknown, free. Columns: observed occupied, unexplained, free.
    pub table: [[f64; 3]; 3],
}

impl Default for SensorSection {
    fn default() -> Self {
        Self {
            table: *SensorModel::default().table(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HoughSection {
    pub rho_resolution: usize,
    pub theta_resolution: f64,
    pub accumulator_threshold: usize,
    pub min_segment_len: usize,
    pub max_gap: usize,
    pub min_fill: f64,
}

impl Default for HoughSection {
    fn default() -> Self {
        let h = HoughParams::default();
        Self {
            rho_resolution: h.rho_resolution,
            theta_resolution: h.theta_resolution,
            accumulator_threshold: h.accumulator_threshold,
            min_segment_len: h.min_segment_len,
            max_gap: h.max_gap,
            min_fill: h.min_fill,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DoorSection {
    pub expansion_depth: usize,
    pub segment_len: usize,
    pub verify_threshold: f64,
    pub gap_threshold: usize,
    pub min_door_len: f64,
}

impl Default for DoorSection {
    fn default() -> Self {
        let d = DoorParams::default();
        Self {
            expansion_depth: d.expansion_depth,
            segment_len: d.segment_len,
            verify_threshold: d.verify_threshold,
            gap_threshold: d.gap_threshold,
            min_door_len: d.min_door_len,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FsrSection {
    pub weight_floor: f64,
    pub min_region_cells: usize,
}

impl Default for FsrSection {
    fn default() -> Self {
        let f = FsrParams::default();
        Self {
            weight_floor: f.weight_floor,
            min_region_cells: f.min_region_cells,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSection {
    pub min_room_side: usize,
    /// h_b
    pub remove_weight_cap: f64,
    /// h_v
    pub shift_weight_cap: f64,
    /// h_g
    pub delete_weight_cap: f64,
    pub shift_sigma: f64,
    pub candidate_cap: usize,
}

impl Default for KernelSection {
    fn default() -> Self {
        let k = KernelParams::default();
        Self {
            min_room_side: k.min_room_side,
            remove_weight_cap: k.remove_weight_cap,
            shift_weight_cap: k.shift_weight_cap,
            delete_weight_cap: k.delete_weight_cap,
            shift_sigma: k.shift_sigma,
            candidate_cap: k.candidate_cap,
        }
    }
}

/// Kernel probabilities up to iteration `until`; omit `until` on the last phase.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub until: Option<u64>,
    pub add: f64,
    pub remove: f64,
    pub split: f64,
    pub merge: f64,
    pub shrink: f64,
    pub dilate: f64,
    pub allocate: f64,
    pub delete: f64,
}

impl PhaseSection {
    fn from_phase(p: &Phase) -> Self {
        let q = |k: KernelKind| p.probabilities[k.index()];
        Self {
            until: p.until,
            add: q(KernelKind::Add),
            remove: q(KernelKind::Remove),
            split: q(KernelKind::Split),
            merge: q(KernelKind::Merge),
            shrink: q(KernelKind::Shrink),
            dilate: q(KernelKind::Dilate),
            allocate: q(KernelKind::Allocate),
            delete: q(KernelKind::Delete),
        }
    }

    fn to_phase(&self) -> Phase {
        Phase {
            until: self.until,
            probabilities: [
                self.add,
                self.remove,
                self.split,
                self.merge,
                self.shrink,
                self.dilate,
                self.allocate,
                self.delete,
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleSection {
    pub phase: Vec<PhaseSection>,
}

impl Default for ScheduleSection {
    fn default() -> Self {
        Self {
            phase: Schedule::default()
                .phases()
                .iter()
                .map(PhaseSection::from_phase)
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub map: MapSection,
    pub run: RunSection,
    pub classifier: ClassifierSection,
    pub prior: PriorSection,
    pub sensor: SensorSection,
    pub hough: HoughSection,
    pub doors: DoorSection,
    pub fsr: FsrSection,
    pub kernels: KernelSection,
    pub schedule: ScheduleSection,
}

fn config_error(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(config_error)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    /// Reads a config file; relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
            _ => Error::Io {
                path: path.to_path_buf(),
                source: e,
            },
        })?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = cfg.map.path.as_mut() {
            resolve(p);
        }
        if let Some(p) = cfg.map.metadata.as_mut() {
            resolve(p);
        }
        resolve(&mut cfg.run.out_dir);
        Ok(cfg)
    }

    pub fn thresholds(&self) -> Result<ClassifierThresholds, Error> {
        ClassifierThresholds::new(self.classifier.occupied, self.classifier.unexplained).map_err(config_error)
    }

    /// Chain configuration for chain number `index` (seed offset by the index).
    pub fn chain_config(&self, index: usize) -> Result<ChainConfig, Error> {
        let h = &self.hough;
        let d = &self.doors;
        let k = &self.kernels;
        let p = &self.prior;
        let cfg = ChainConfig {
            iterations: self.run.iterations,
            seed: self.run.seed.wrapping_add(index as u64),
            schedule: Schedule::new(self.schedule.phase.iter().map(PhaseSection::to_phase).collect())
                .map_err(config_error)?,
            kernels: KernelParams {
                hough: HoughParams {
                    rho_resolution: h.rho_resolution,
                    theta_resolution: h.theta_resolution,
                    accumulator_threshold: h.accumulator_threshold,
                    min_segment_len: h.min_segment_len,
                    max_gap: h.max_gap,
                    min_fill: h.min_fill,
                },
                fsr: FsrParams {
                    weight_floor: self.fsr.weight_floor,
                    min_region_cells: self.fsr.min_region_cells,
                },
                doors: DoorParams {
                    expansion_depth: d.expansion_depth,
                    segment_len: d.segment_len,
                    verify_threshold: d.verify_threshold,
                    gap_threshold: d.gap_threshold,
                    min_door_len: d.min_door_len,
                },
                min_room_side: k.min_room_side,
                remove_weight_cap: k.remove_weight_cap,
                shift_weight_cap: k.shift_weight_cap,
                delete_weight_cap: k.delete_weight_cap,
                shift_sigma: k.shift_sigma,
                candidate_cap: k.candidate_cap,
            },
            prior: PriorParams::new(p.psi1, p.psi2, p.psi3, p.right_angle_tolerance).map_err(config_error)?,
            sensor: SensorModel::new(self.sensor.table).map_err(config_error)?,
            fsr_activation: self.run.fsr_activation,
            verify: self.run.verify,
            trace_window: self.run.trace_window,
        };
        cfg.validate().map_err(config_error)?;
        Ok(cfg)
    }

    /// Checks every section without touching the file system.
    pub fn validate(&self) -> Result<(), Error> {
        self.thresholds()?;
        self.chain_config(0)?;
        if self.run.chains == 0 {
            return Err(Error::Config("chains must be at least 1".into()));
        }
        Ok(())
    }
}
