//! Allocation-only core of a 2D frontier-selection navigation stack.
//!
//! The crate is `no_std` (it needs `alloc`) and contains every algorithm of
//! the stack: the ground-truth grid world, occupancy mapping and frontier
//! extraction, grid planning and the ground-truth labelers, prompt-sample
//! construction, dataset rollouts, and the closed-loop episode runtime with
//! its SR/SPL metrics. File formats, the HTTP policy client and the CLI live
//! in the `frontier-nav` companion crate.
//!
//! Coordinates: cell `(col, row)` covers `[col*res, (col+1)*res) x
//! [row*res, (row+1)*res)` in world meters. Headings are in degrees, 0 along
//! +x and counterclockwise positive.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod datagen;
pub mod error;
pub mod grid;
pub mod harness;
pub mod mapping;
pub mod math;
pub mod planning;
pub mod policy;
pub mod world;

pub use error::NavError;
pub use grid::{Cell, Grid};
pub use math::Vec2;
