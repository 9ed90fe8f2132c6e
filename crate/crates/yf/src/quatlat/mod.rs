//! Definite quaternion algebras, Eichler orders, ideal classes and short vectors.

pub mod algebra;
pub mod classes;
pub mod lattice;
pub mod order;
pub mod short;

pub use algebra::{build_algebra, Quat, QuaternionAlgebra};
pub use classes::{class_set, eichler_mass, IdealClassSet};
pub use lattice::Lattice;
pub use order::{build_order, QuatOrder};
pub use short::short_vectors;
