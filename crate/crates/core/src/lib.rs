//! Computational toolkit for free groups of finite rank.
//!
//! The crate is organised bottom-up:
//!
//! * [`words`]: reduced words, the text grammar, cyclic reduction and roots.
//! * [`maps`]: endomorphisms given by generator images, automorphism
//!   validation and inversion, innerness, orders and abelianization.
//! * [`stallings`]: folded subgroup graphs (membership, rank, intersection).
//! * [`whitehead`]: Whitehead moves, orbit minimization and primitivity.
//! * [`involutions`]: involutions in canonical form and the constructive
//!   constructions around them.
//! * [`harness`]: seeded verification suites with machine-readable reports.
//! * [`interpretation`]: free-factor handles, basis extraction and the
//!   encoding of finite functions by automorphisms.

pub mod error;
pub mod harness;
pub mod interpretation;
pub mod involutions;
pub mod maps;
pub mod stallings;
pub mod whitehead;
pub mod words;

pub use error::{Error, Result};

pub use maps::{GeneratorMap, IntMatrix, Mod2Matrix};
pub use stallings::SubgroupGraph;
pub use words::{FreeGroupContext, Word};
