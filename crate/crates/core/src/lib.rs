//! Doodles on closed oriented surfaces.
//!
//! Diagrams are stored as combinatorial maps ([`DoodleMap`]); the ambient
//! surface is the closure of the map by disks glued into its faces. Doodle
//! equality is decided by reducing both diagrams to their unique minimal
//! form and comparing canonical codes.

pub mod canonical;
pub mod codec;
pub mod confluence;
pub mod enumeration;
pub mod families;
pub mod map;
pub mod moves;
pub mod virtualization;

pub use canonical::{canonical_code, doodle_equal, genus_of_doodle, is_trivial_doodle, CanonicalCode, Mode};
pub use map::{Dart, DoodleMap, Face, FaceVector, MapError};
