//! Turns one coarse bird's-eye-view click per object into box- or mask-level
//! pseudo-labels for LiDAR 3D detection, and refines those labels with
//! predictions from an external detector.
//!
//! Pipeline: [`sequence`] decides whether a clicked object is static or
//! moving, [`labelgen`] fits a box from multi-frame points (static) or
//! extracts a single-frame point mask (moving), and [`refinement`] upgrades
//! and expands the labels from detector output. [`data`] holds file formats,
//! click simulation, the synthetic scene generator and label evaluation.

pub mod clustering;
pub mod data;
pub mod error;
pub mod geometry;
pub mod labelgen;
pub mod refinement;
pub mod rng;
pub mod sequence;

pub use error::{Error, Result};
