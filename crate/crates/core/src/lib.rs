//! Planar simulation of a two-finger gripper with proximity and contact
//! reflexes, plus the experiments that compare it against a sensorless
//! closing baseline.

pub mod baseline;
pub mod config;
pub mod error;
pub mod experiments;
pub mod finger;
pub mod geometry;
pub mod perception;
pub mod reflex;
pub mod sensing;
pub mod world;

pub use config::{load_config, ReflexConfig};
pub use error::Error;
pub use geometry::{DiskObject, GripperFrame, PlanarVec};
