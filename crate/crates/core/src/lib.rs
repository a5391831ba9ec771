pub mod classify;
pub mod cli;
pub mod corpus;
pub mod embed;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod seed;
pub mod tagger;
pub mod text;
pub mod thesaurus;
pub mod vecmath;

pub use error::{Error, Result};
