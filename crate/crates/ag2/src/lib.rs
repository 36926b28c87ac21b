//! Exact symbolic engine for the AG2 generalised Calogero-Moser-Sutherland
//! system: constructs the Baker-Akhiezer function by iterated application of
//! dual Macdonald-Ruijsenaars difference operators and verifies the
//! eigen-equations, quasi-invariance axioms and operator identities in exact
//! arithmetic.

pub mod algebra;
pub mod ba;
pub mod diffop;
pub mod io;
pub mod lattice;
pub mod quasi;
pub mod reductions;
