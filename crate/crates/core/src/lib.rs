//! Entropic size bounds for conjunctive queries: polymatroid and normal
//! bounds with exact LP certificates, worst-case instance construction,
//! worst-case optimal joins, query domination and constraint implication.

pub mod bounds;
pub mod error;
pub mod domination;
pub mod engine;
pub mod expr;
pub mod implication;
pub mod inequality;
pub mod lp;
pub mod polymatroid;
pub mod query;
pub mod rational;
pub mod relation;
pub mod setfn;
pub mod vars;

pub use error::{Error, Result};
pub use expr::LinExpr;
pub use query::Query;
pub use rational::{int, rat, Rational};
pub use relation::{Database, Distribution, Relation, Value};
pub use setfn::SetFunction;
pub use vars::{VarSet, VarUniverse};
