//! Exact-arithmetic substrate: rationals, sparse multivariate polynomials,
//! affine-factored rational functions, Laurent fractions and the dense
//! integer kernel.

pub mod affine;
pub mod dense;
pub mod laurent;
pub mod poly;
pub mod rat;
pub mod ratfun;

pub use affine::{
    divides, exact_div_affine, mul_affine, restrict_to_hyperplane, restrict_to_locus, AffineForm,
    DivisionError,
};
pub use dense::{IntForm, IntPoly2};
pub use laurent::{EExp, LaurentFrac, LaurentPoly};
pub use poly::{poly_shift, Coeff, Degree, Mono, MultiPoly};
pub use rat::Rat;
pub use ratfun::{FactoredRatFun, ResidueError};
