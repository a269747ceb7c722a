//! Boundary combinatorics of the moduli spaces of stable genus-0 curves
//! with marked points, and numerical certification of multiple ζ-value
//! period representations.
//!
//! The crate models the label set `{0, 1, inf, s1, …, sn}`, stable
//! 2-partitions (boundary divisors), dual trees of boundary strata,
//! associahedron face lattices attached to cyclic orders, the singularity
//! and cell-boundary divisors of the standard logarithmic forms, and
//! numeric evaluation of multiple ζ-values by truncated series and by
//! double-exponential quadrature of iterated integrals.

pub mod divisors;
pub mod labels;
pub mod partitions;
mod quad;
pub mod stasheff;
pub mod trees;
pub mod periods;
