//! Combinatorics of the spine of Outer space at executable scale.
//!
//! * [`free_words`]: words, conjugacy classes, the ordered class list and
//!   automorphisms of free groups.
//! * [`graphs`]: half-edge graphs, forest collapse, bridges, spanning trees
//!   and the tree-replacement permutation.
//! * [`marked_graphs`]: markings, tight loops, translation lengths, rose
//!   norms and their comparison.
//! * [`folds`]: graph morphisms, Stallings folds and paths in the spine from
//!   any marked rose to the standard one.
//! * [`whitehead`]: star graphs, ideal edges and trees, blowups, reductive
//!   pairs, the Key Lemma and norm descent.
//! * [`complexes`]: posets, order complexes, Quillen retractions, mod-2
//!   homology and the retraction of the reductive subcomplex of a star.

pub mod complexes;
pub mod config;
pub mod error;
pub mod folds;
pub mod free_words;
pub mod graphs;
pub mod marked_graphs;
pub mod sampling;
pub mod verify;
pub mod whitehead;

pub use config::Limits;
pub use error::{Error, Result};
