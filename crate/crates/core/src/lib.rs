//! Exact homological algebra over `Z/N`.

pub mod butterfly;
pub mod cache;
pub mod cech;
pub mod error;
pub mod ext;
pub mod faults;
pub mod linalg;
pub mod module;
pub mod squarezero;

pub use error::{Error, Result};
pub use linalg::{MatZN, Modulus};
pub use module::{Complex, FPModule, ModuleMap};
