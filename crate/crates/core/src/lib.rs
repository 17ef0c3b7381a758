//! Data-side machinery for LLM-based multilingual machine translation.
//!
//! The crate covers the stages that sit around (but never inside) model
//! training:
//!
//! * [`bpe`]: byte-level BPE training, encoding and the vocab/merges file
//!   formats.
//! * [`vocab`]: training an extension vocabulary on underrepresented
//!   languages and appending it to a base tokenizer without moving base ids.
//! * [`efficiency`]: per-language length ratios over an English-centric
//!   multi-parallel corpus.
//! * [`sampling`]: temperature-based language sampling plans, a seeded
//!   corpus mixer and fixed-length sequence packing.
//! * [`dataprep`]: parallel fine-tuning data with per-source direction
//!   policies, statistics and length-limited prompt formatting.
//!
//! Data-parallel loops run on rayon when the `parallel` feature is enabled
//! (the default) and fall back to plain iterators otherwise; see [`Execution`].

pub mod bpe;
pub mod cli;
pub mod dataprep;
pub mod efficiency;
mod error;
mod exec;
pub mod io;
pub mod sampling;
pub mod vocab;

pub use bpe::{Normalization, TokenId, Tokenizer, TrainParams};
pub use error::{Error, Result};
pub use exec::Execution;
