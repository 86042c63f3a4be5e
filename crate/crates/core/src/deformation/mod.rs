//! Deformation theory of graded algebras and complexes: sign conventions for
//! shifted tensor powers, supertraces of chain endomorphisms, the truncated
//! cotangent complex with Kodaira–Spencer classes, and Atiyah classes with
//! their obstruction and semiregularity maps.

pub mod atiyah;
pub mod cotangent;
pub mod signs;
pub mod trace;

pub use atiyah::{atiyah_class, atiyah_power, obstruction_class, Atiyah, P1Bundle};
pub use cotangent::{kodaira_spencer, ArtinianFamily, CotangentWeight, KsClass, SquareZeroExtension, TruncatedCotangent};
pub use trace::{super_trace, ChainEndo};
