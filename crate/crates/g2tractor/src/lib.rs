//! Split G₂ exterior algebra and conformal tractor calculus for almost
//! Einstein (2,3,5) distributions.

#![allow(clippy::needless_range_loop)]

pub mod chart;
pub mod forms;
pub mod g2core;
pub mod linalg;
pub mod scalars;
pub mod stabilizer;
pub mod suites;
pub mod gallery;
