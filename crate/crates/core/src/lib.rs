//! Exact tools for counting lattice points in rational polyhedral cones below
//! moving hyperplanes: cone geometry and Gorenstein certification, slice
//! polytope volumes with analytic derivatives, exact enumeration, periodic
//! quasi-polynomial fitting, canonical Reeb direction search by volume
//! minimization, chart-level correction sums for the periodic coefficients,
//! and a verifier assembling the coefficient identities and the lower-bound
//! inequality per residue class.

pub mod cones;
pub mod counting;
pub mod error;
pub mod orbifold;
pub mod quasifit;
pub mod ratmath;
pub mod reeb;
pub mod slices;
pub mod verify;

pub use cones::{dual, faces, gorenstein_check, make_cone, q_ratio, Cone, GorensteinData};
pub use error::{Error, Result};
pub use ratmath::{Int, IntMat, IntVec, Rat, RatVec};
