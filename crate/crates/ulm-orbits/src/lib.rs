//! Orbits of tuples under automorphisms of finite modules over discrete
//! valuation rings.
//!
//! The objects are finite torsion modules `A = ⊕ (R/p^α)^{m_α}` where `R` is
//! either the integers localised at a prime `p` or `F_q[t]` localised at `t`.
//! For an `n`-tuple of elements the crate computes the canonical height-table
//! fingerprint that classifies the tuple up to automorphisms of `A`, decides
//! degeneration (existence of an endomorphism carrying one tuple to another),
//! builds the witnessing maps, enumerates orbits, and exposes the order
//! theory behind the classification: Ulm sequences, the fundamental poset,
//! and the lattice of order ideals it generates.
//!
//! Everything is exact integer computation.  Expensive searches are
//! data-parallel via rayon when the default `parallel` feature is on; with
//! `--no-default-features` the same code paths run sequentially.

pub mod cli;
pub mod error;
pub mod exec;
pub mod linear;
pub mod module;
pub mod oracle;
pub mod orbits;
pub mod posets;
pub mod ring;
pub mod schema;
pub mod verify;

pub use error::{Error, Result};
pub use linear::SubmoduleForm;
pub use orbits::{HomTable, OrbitInfo};
pub use module::{Element, ElementTuple, ModuleShape, UlmSequence};
pub use posets::{FinitePoset, OrderIdeal, PElem};
pub use ring::{Backend, Height, RingSpec, Scalar};
pub use schema::{ElementDoc, HomTableDoc, ShapeDocument};
