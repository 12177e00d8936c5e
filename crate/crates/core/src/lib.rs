//! Call-by-value λμ-calculus with let-associativity: reduction, the sight
//! measure, CPS translations into a sorted target calculus, and intersection
//! typing on both sides.

pub mod canon;
pub mod corpus;
pub mod cps;
pub mod error;
pub mod graph;
pub mod measure;
pub mod name;
pub mod reduce;
pub mod parse;
pub mod target;
pub mod subst;
pub mod suite;
pub mod term;
pub mod types;

pub use error::CcvError;
pub use name::{CoName, Fresh, Name};
pub use term::{Expr, Jump, Term};
