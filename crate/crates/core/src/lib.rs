//! Computational additive combinatorics on explicit finite abelian groups.
//!
//! The crate provides exact group and set arithmetic, an expectation-normalized
//! Fourier layer, Bourgain systems (Bohr sets, coset progressions and their
//! dilates, intersections and images), spectral annihilation, 3AP counting with
//! a density-increment driver, a dense Bogolyubov surrogate, and a pipeline
//! that finds long arithmetic progressions or cosets inside sumsets. Structural
//! claims come back as certificates that can be re-checked with plain group
//! arithmetic.

pub mod bench;
pub mod bogolyubov;
pub mod certificate;
pub mod constants;
pub mod error;
pub mod exact;
pub mod group;
pub mod harmonic;
pub mod longaps;
pub mod roth;
pub mod spectrum;
pub mod systems;

pub use certificate::Certificate;
pub use constants::Constants;
pub use error::{Error, Result};
pub use group::{Element, GroupSet, GroupSpec};
pub use harmonic::{DenseFunction, Measure};
pub use systems::BourgainSystem;
