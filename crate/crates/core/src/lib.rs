//! Exact algebra for obstruction theory: divided powers, de Rham complexes,
//! Atiyah classes and semiregularity, Chern characters, Gauss–Manin
//! connections and Hochschild–Kostant–Rosenberg checks.

pub mod acceptance;
pub mod chern;
pub mod corpus;
pub mod deformation;
pub mod derham;
pub mod divided_powers;
pub mod error;
pub mod exact;
pub mod gauss_manin;
pub mod hochschild;

pub use error::{Error, Result};
