//! Construction, classification, flexion and 3D realization of quadrangular
//! Kokotsakis polyhedra of equimodular elliptic type.

pub mod angles;
pub mod catalog;
pub mod classify;
pub mod elliptic;
pub mod error;
pub mod geometry;
pub mod kinematics;
pub mod qsnet;
pub mod search;

pub use error::{Error, Result};
