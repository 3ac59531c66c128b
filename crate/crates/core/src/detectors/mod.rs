//! Bottom-up detectors that turn the classified map (and the current world)
//! into weighted proposals for the chain.

pub mod components;
pub mod doors;
pub mod fsr;
pub mod hough;
pub mod sampling;
pub mod wbr;
pub mod weights;

pub use components::connected_components;
pub use doors::{door_candidates, DoorCandidate, DoorParams};
pub use fsr::{fsr_candidates, FsrParams};
pub use hough::{hough_segments, HoughParams};
pub use sampling::{sample_weighted, CandidateSet, WeightedCandidate};
pub use wbr::{wbr_candidates, RoomCandidate};
pub use weights::{door_weight, room_weight, wall_weight};
