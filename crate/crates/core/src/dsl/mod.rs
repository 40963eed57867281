//! Textual model format.
//!
//! ```text
//! sphere Manufacturer {
//!   machine Storage of Stock {
//!     stages: create, process
//!     note "stock level check"
//!   }
//!   sphere Nested { ... }
//! }
//! flow Manufacturer.Storage.create -> Manufacturer.Storage.process
//! trigger Manufacturer.Storage.process -> Other.Place.create when "lack_of_stock"
//! ```
//!
//! `#` starts a comment that runs to end of line. Strings are double quoted
//! and know exactly two escapes, `\"` and `\\`. Keywords (declaration words
//! and the seven stage names) are reserved and cannot name spheres,
//! machines, or things.
//!
//! [`serialize`] prints the canonical form: two-space indent, one
//! declaration per line, sphere annotations first, then machines, then
//! child spheres, and all flows before all triggers after the sphere tree.
//! Parsing then serializing a canonical file reproduces it byte for byte.

mod lexer;
mod parser;
mod printer;

pub use lexer::LexError;
pub use parser::{parse, ParseError};
pub use printer::{serialize, SerializeError};
