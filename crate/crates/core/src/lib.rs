//! Laboratory for Golomb Costas permutations over finite fields.

pub mod bounds;
pub mod counting;
pub mod error;
pub mod ff;
pub mod golomb;
pub mod numtheory;
pub mod xcorr;

pub use bounds::{BoundKind, BoundMode, BoundReport, ExponentPair, FamilyBound};
pub use counting::{CountResult, ShiftSet};
pub use error::{Error, Result};
pub use ff::{CharacterSpec, Field, FieldDescription, FieldElement};
pub use golomb::{CostasPermutation, GolombPair, PermutationRecord};
pub use numtheory::{SafeClass, SafeKind};
pub use xcorr::{FamilyMaxReport, Shift};
