//! Maximal atomic irredundant sets (MARS) for tiled polyhedral programs
//! under affine dependences.
//!
//! * [`linalg`]: exact rational linear algebra.
//! * [`iset`]: integer sets with exact intersection, difference and images.
//! * [`model`]: programs, dependences and tilings.
//! * [`mars`]: offset families, the MARS partition and diagnostics.
//! * [`oracle`]: brute-force enumeration used to check the symbolic results.

pub mod iset;
pub mod linalg;
pub mod mars;
pub mod model;
pub mod oracle;

pub use iset::{Cell, ISet, SetError};
pub use linalg::{RatMatrix, RatVector, Rational, SubspaceBasis};
pub use mars::{
    build_mars, check_partition, classify, combined_footprint, exclude_within, fd_partition,
    offset_families, tiled_destination_condition, verify_invariance, BuildOptions, DepClass,
    FamilyIndex, Invariance, MarsError, MarsPartition, OffsetFamily, Verdict,
};
pub use model::{load_program, AffineFn, ModelError, Program, Space, SpaceKind, TilingSpec};
