//! Grid diagrams, the grid poset, and the combinatorics around it: knot
//! Floer homology over F2, EL-labelings of intervals, and the PL flow
//! category built from chains.

pub mod cli_io;
pub mod complex;
pub mod corpus;
pub mod domains;
pub mod error;
pub mod flowcat;
pub mod grid;
pub mod homology;
pub mod poset;
pub mod shelling;
pub mod states;

pub use error::{Error, Result};
pub use grid::{parse_grid, GridDiagram};
pub use states::{Generator, GridState};
