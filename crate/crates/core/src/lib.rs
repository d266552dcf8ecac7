//! Exact computations for double Kodaira fibrations: virtual invariants, abelian
//! monodromy obstructions, homology of finite covers of orbifold surface groups,
//! numerical classification searches and fixed-point-free cyclic actions.

pub mod abelian;
pub mod error;
pub mod enumeration;
pub mod fibration;
pub mod fpf;
pub mod golden;
pub mod group;
pub mod linalg;
pub mod monodromy;
pub mod par;
pub mod poly;
pub mod surface;

pub use abelian::{element_order, AbelianElement, FiniteAbelianGroup};
pub use error::{Error, Result};
pub use linalg::{char_poly, image_cardinality, snf, IntMatrix, ModularMap, SmithDecomposition};
pub use poly::IntPoly;
