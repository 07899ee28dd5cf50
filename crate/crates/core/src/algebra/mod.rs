//! Exact arithmetic over Q and polynomial algebra.

mod algnum;
pub mod bezout;
mod bipoly;
pub mod linalg;
pub mod nt;
mod rat;
pub mod resultant;
pub mod ring;
pub mod roots;
mod unipoly;

pub use algnum::{mahler_height, root_multiset_height, split_factors, AlgNum, FactorSplit};
pub use bezout::{bezout_certificates, BezoutCertificate, BinaryForm};
pub use bipoly::BiPoly;
pub use rat::{ln_biguint, valuation_int, Rat};
pub use resultant::{poly_gcd, poly_resultant};
pub use roots::{complex_roots, rational_roots, ComplexApprox};
pub use unipoly::UniPoly;
