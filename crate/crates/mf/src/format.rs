//! Format selection and whole-file loading and saving.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use mf_core::FeatureCollection;
use thiserror::Error;

use crate::error::{CodecError, Result};
use crate::{csv, json, xml, Parsed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Csv,
    Xml,
    Json,
}

impl Format {
    pub const ALL: [Format; 3] = [Format::Csv, Format::Xml, Format::Json];

    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Xml => "xml",
            Format::Json => "json",
        }
    }

    pub fn from_extension(path: &Path) -> Option<Format> {
        let ext = path.extension()?.to_str()?;
        ext.parse().ok()
    }

    /// Guesses from the first non-blank character.
    pub fn sniff(doc: &str) -> Option<Format> {
        match doc.trim_start_matches('\u{feff}').trim_start().chars().next()? {
            '@' => Some(Format::Csv),
            '<' => Some(Format::Xml),
            '{' | '[' => Some(Format::Json),
            _ => None,
        }
    }

    /// Extension first, then content.
    pub fn detect(path: Option<&Path>, doc: &str) -> Option<Format> {
        path.and_then(Format::from_extension).or_else(|| Format::sniff(doc))
    }

    pub fn parse(self, doc: &str) -> Result<Parsed> {
        match self {
            Format::Csv => csv::parse_csv(doc),
            Format::Xml => xml::parse_xml(doc),
            Format::Json => json::parse_json(doc),
        }
    }

    pub fn write(self, c: &FeatureCollection) -> Result<String> {
        match self {
            Format::Csv => csv::write_csv(c),
            Format::Xml => xml::write_xml(c),
            Format::Json => json::write_json(c),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown format {0:?} (expected csv, xml or json)")]
pub struct UnknownFormat(pub String);

impl FromStr for Format {
    type Err = UnknownFormat;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "xml" => Ok(Format::Xml),
            "json" => Ok(Format::Json),
            _ => Err(UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: cannot tell the format from the extension or the content")]
    UnknownFormat { path: PathBuf },
    #[error("{path}: {source}")]
    Codec {
        path: PathBuf,
        #[source]
        source: CodecError,
    },
}

/// Parses a document, detecting its format unless one is given.
pub fn load_str(doc: &str, format: Option<Format>) -> Result<(Parsed, Format), LoadError> {
    let path = PathBuf::from("<input>");
    let format = format
        .or_else(|| Format::sniff(doc))
        .ok_or_else(|| LoadError::UnknownFormat { path: path.clone() })?;
    let parsed = format.parse(doc).map_err(|source| LoadError::Codec { path, source })?;
    Ok((parsed, format))
}

pub fn load(path: &Path, format: Option<Format>) -> Result<(Parsed, Format), LoadError> {
    let doc = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let format = format
        .or_else(|| Format::detect(Some(path), &doc))
        .ok_or_else(|| LoadError::UnknownFormat {
            path: path.to_path_buf(),
        })?;
    let parsed = format.parse(&doc).map_err(|source| LoadError::Codec {
        path: path.to_path_buf(),
        source,
    })?;
    Ok((parsed, format))
}
