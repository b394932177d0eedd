//! Finite-scale machinery around the rainbow Ramsey theorem for bounded
//! colorings: normal forms, viable-number rainbow extension, bounded rainbow
//! trees with brute-force counting verifiers, Galvin's dual coloring and the
//! triples-to-pairs limit-coloring reduction.

pub mod coloring;
pub mod error;
pub mod format;
pub mod generate;
pub mod normal;
pub mod rainbow;
pub mod reductions;
pub mod report;
pub mod schedule;
pub mod block;
pub mod tree;
pub mod verify;

pub use coloring::{is_k_tail_rainbow, is_rainbow, is_tail_rainbow, Coloring};
pub use error::{Error, Result};
pub use tuple::{encode_tuple, IncreasingTuple, TupleCode};

pub mod tuple;
