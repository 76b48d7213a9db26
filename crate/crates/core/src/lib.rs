//! Exact rational workbench for operadic homotopy theory over the rationals:
//! chain complexes, cofree cocommutative coalgebras, symmetric sequences,
//! operads, bar and cobar constructions, realizations of simplicial operads,
//! comonadic resolutions and the Dold-Kan transfer of operads.

pub mod error;
pub mod exactlin;
pub mod label;
pub mod chain;
pub mod algebra;
pub mod coalg;
pub mod multi;
pub mod symseq;
pub mod tree;
pub mod operad;
pub mod frame;
pub mod barcobar;
pub mod realize;
pub mod oprealize;
pub mod resolution;
pub mod doldkan;
pub mod report;

pub use error::{Error, Result};
pub use exactlin::{Q, RatMatrix};
pub use label::Label;
