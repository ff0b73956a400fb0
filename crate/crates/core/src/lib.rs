//! Sparse ternary coding with ambiguization for privacy-preserving
//! identification, plus the attacks and authorized reconstruction used to
//! evaluate it.

pub mod attack;
pub mod cli;
pub mod authorized;
pub mod codec;
pub mod config;
pub mod data;
pub mod error;
pub mod experiment;
pub mod fmt;
pub mod linalg;
pub mod nn;
pub mod pack;
pub mod rd;
pub mod seed;

pub use codec::{code_rate, protect, ProtectedTemplate, StcaParams, TernaryCode};
pub use error::{Result, StcaError};
pub use pack::ProjectionPack;
pub use seed::SeedSpec;
