//! Computational group theory for finitely presented groups: free words,
//! presentations, Todd–Coxeter coset enumeration, Reidemeister–Schreier
//! subgroup presentations, and the ladder of exponent-`p` layers.

pub mod coset;
pub mod error;
pub mod free_layers;
pub mod free_product;
pub mod kurosh;
pub mod linalg;
pub mod omega;
pub mod presentation;
pub mod pseries;
pub mod schreier;
pub mod word;

pub use coset::{enumerate, table_from_homomorphism, CosetTable, EnumLimits, Enumeration};
pub use error::{Error, LimitExceeded, Result};
pub use presentation::{parse_presentation, Alphabet, Presentation};
pub use word::{commutator, Letter, Word};
