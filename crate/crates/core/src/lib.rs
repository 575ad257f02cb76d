//! Closed directed trails through prescribed vertex sets.

pub mod connectivity;
pub mod constructor;
pub mod digraph;
pub mod error;
pub mod format;
pub mod generators;
pub mod matching;
pub mod search;
pub mod theorems;
pub mod trails;
pub mod validator;

pub use digraph::{Arc, Digraph, UndirectedGraph, VertexId};
pub use error::{Error, Result};
pub use search::{Budget, Meter, Search};
pub use trails::{ClosedDitrail, Ditrail};
