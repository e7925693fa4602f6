//! Symbolic-numeric analysis of monodromic singularities of planar polynomial
//! vector fields: weighted polar blow-up, Laurent inverse integrating factors,
//! principal values by residues, and a numeric return-map oracle.

pub mod scalar;
pub mod numeric;
pub mod trigfun;
pub mod residue_pv;
pub mod newton;
pub mod polar;
pub mod expansion;
pub mod poincare;
pub mod cli;
pub mod fixtures;

pub use newton::{Poly2, PolyVectorField};
pub use polar::PolarField;

pub use num_complex::Complex64;

/// Exact rationals.
pub type Rat = num_rational::BigRational;
/// Gaussian rationals, the coefficient field for trigonometric polynomials.
pub type GaussRat = num_complex::Complex<Rat>;

pub use trigfun::{LaurentPoly, RationalTrig, TrigPoly};


