//! Inverse systems of sets and groups over directed sets.
//!
//! The crate builds free and free abelian inverse limits with explicit basis
//! decompositions, the relational structure whose automorphism group is the
//! limit of a finite system of groups, tree and restriction systems, and the
//! ascent game on directed sets. Every construction comes with a brute-force
//! check that can be run on finite instances.

pub mod poset;
pub mod words;
pub mod invsys;
pub mod grouplimit;
pub mod model;
pub mod io;
