//! Relative constructible functions on finite cell complexes.
//!
//! Values live in explicit Grothendieck-ring models ([`kring`]); functions
//! are cellwise on finite regular cell complexes ([`cellspace`], [`cfun`]).
//! [`ksheaf`] computes the Euler–Poincaré index of virtual relative sheaves
//! and its inverse, and [`xform`] implements kernel transforms, including
//! incidence (Radon-type) kernels and the Fourier–Mukai action on K₀.
//!
//! All arithmetic is exact over `i64`.

pub mod cellspace;
pub mod cfun;
pub mod demo;
pub mod error;
pub mod io;
pub mod kring;
pub mod ksheaf;
pub mod xform;

pub use cellspace::{CellComplex, CellIdx, CellSet, CellularMap, LocallyClosedSet, ProductComplex};
pub use cfun::CFunction;
pub use error::{Error, Result};
pub use kring::{AbelianGroupDescriptor, RingModel, RingValue};
pub use ksheaf::{CellwiseComplex, ElementaryTerm, VirtualSheaf};
pub use xform::{IncidenceGeometry, Kernel};
