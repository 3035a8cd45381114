//! Exact T-systems, Y-systems and cluster mutation belts attached to tamely
//! laced generalized Cartan matrices.

// index loops mirror the matrix notation
#![allow(clippy::needless_range_loop)]

pub mod acceptance;
pub mod cartan;
pub mod cluster;
pub mod error;
pub mod exactmath;
pub mod io;
pub mod period;
pub mod report;
pub mod table;
pub mod tsystem;
pub mod ysystem;

pub use cartan::{CartanMatrix, Parity};
pub use error::{Error, Result};
pub use table::{LatticeVar, SystemKind, ValueTable, Window};
