//! Manhattan (L1) embeddings of preference profiles: explicit constructions,
//! an exact verifier, forbidden-configuration tests and a complete exact
//! recognizer for the plane.

pub mod cli;
pub mod constructive;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod geometry;
pub mod lp;
pub mod obstructions;
pub mod profile;
pub mod rational;
pub mod recognizer;
pub mod render;

pub use error::{Error, Result};
pub use geometry::{Embedding, Metric, Point, Verdict};
pub use profile::PreferenceProfile;
pub use rational::Rational;
