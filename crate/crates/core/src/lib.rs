//! Finite-group engine for unmixed Beauville structures.
//!
//! Groups are fully enumerated ([`group`]), built from a small spec language
//! or permutation files ([`catalog`]), and analysed through their
//! automorphisms ([`morphisms`]), generating triples ([`triples`]) and the
//! braid action on them ([`braid`]). [`beauville`] counts Beauville
//! structures up to equivalence; [`invariants`] holds the numerical side.

pub mod beauville;
pub mod braid;
pub mod catalog;
pub mod dsu;
pub mod error;
pub mod group;
pub mod invariants;
pub mod limits;
pub mod morphisms;
pub mod oracle;
pub mod par;
pub mod report;
pub mod triples;
pub mod verify;

pub use error::{Error, Result};
pub use group::{Elem, FiniteGroup, Subgroup};
pub use limits::Limits;
