//! Gelfand-Zetlin bases and matrix representations of `U_q(sl(N))`, at
//! generic `q` and at odd roots of unity.

pub mod atypical;
pub mod genrep;
pub mod gzbasis;
pub mod io;
pub mod puiseux;
pub mod qarith;
pub mod sparse;
pub mod verify;

pub use genrep::{build_flat_sl3, build_generic_rep, Convention, GeneratorSet};
pub use gzbasis::{enumerate_basis, generic_dimension, GZPattern, ModuleBasis, TopRow};
pub use qarith::{q_bracket, QPoint, UnityOrder};
