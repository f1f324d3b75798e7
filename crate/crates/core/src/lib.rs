//! Executable first-order interpretations, two-way transducers with origin
//! semantics, and the pebble/blind combinator hierarchy over finite words.

pub mod error;
pub mod func;
pub mod interp;
pub mod langlab;
pub mod logic;
pub mod par;
pub mod pebble;
pub mod psi;
pub mod sexpr;
pub mod twoway;
pub mod words;

pub use error::{Error, Result};
pub use words::{Alphabet, MarkedWord, OriginWord, Symbol, Word};
