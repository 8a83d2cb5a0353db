//! Encodings of moving features (MF-CSV, MF-XML and MF-JSON), lossy
//! transcoding between them, and the `mf` command-line tool.

pub mod cli;
pub mod csv;
pub mod error;
pub mod format;
pub mod json;
pub mod segments;
pub mod timefmt;
pub mod transcode;
pub mod xml;

use mf_core::{Diagnostic, FeatureCollection};

pub use error::{CodecError, Result};
pub use format::{load, load_str, Format, LoadError};
pub use transcode::{transcode, TranscodeReport, Transcoded};

/// A decoded document plus any non-fatal findings of the decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed {
    pub collection: FeatureCollection,
    pub diagnostics: Vec<Diagnostic>,
}
