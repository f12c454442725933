//! Sentiment composition workbench for opposing-polarity phrases.
//!
//! The crate covers the whole offline pipeline: lexicon and corpus ingestion,
//! Best-Worst Scaling design and scoring, composition-pattern mining, rule
//! baselines, kernel SVM/SVR training, and repeated cross-validation.

pub mod bws;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod features;
pub mod io;
pub mod lexicon;
pub mod models;
pub mod patterns;
pub mod pos;

pub use error::{Error, Result};
