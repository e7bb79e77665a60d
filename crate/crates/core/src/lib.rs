//! Exact verification laboratory for expanding dynamical systems.
//!
//! The crate models compact metric systems (Y, d, g) over representable dense
//! subsets with exact rational arithmetic, checks the two local-expansion
//! axioms exhaustively on finite nets, builds truncated inverse-limit points
//! with certified interval metrics, runs the bracket construction, and
//! verifies the quotient/conjugacy pipeline for shifts of finite type.

pub mod axioms;
pub mod config;
pub mod gasket;
pub mod inverse_limit;
pub mod quotient;
pub mod rational;
pub mod report;
pub mod runner;
pub mod sampling;
pub mod shift_union;
pub mod smale;
pub mod solenoid;
pub mod symbolic;
pub mod system;

pub use rational::{Rational, RationalInterval};
pub use system::{iterate, preimages_k, AxiomConstants, System, SystemError};
