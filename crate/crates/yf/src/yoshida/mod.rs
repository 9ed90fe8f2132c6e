//! Yoshida lifts: the map 𝒫, Fourier coefficient tables, Hecke operators and
//! the canonical normalization.

pub mod forms;
pub mod hecke;
pub mod lift;
pub mod norms;
pub mod pmap;
pub mod table;

pub use forms::{reduce, reduced_forms, Form, Mat2};
pub use hecke::{apply_T_p, hecke_cosets, verify_eigen, EigenCertificate, HeckeCoset};
pub use lift::{yoshida_lift, LiftTerms, YoshidaLift};
pub use norms::{automorphic_norm, canonical_lift, canonical_scale};
pub use pmap::{binary_coeffs, binary_poly, marker_vars, p_map, p_map_at, pmap_vars, PMapImage};
pub use table::SiegelCoeffTable;
