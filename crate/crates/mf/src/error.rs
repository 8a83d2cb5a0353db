use mf_core::InterpolationMode;
use thiserror::Error;

/// Failure to read or write one of the encodings. `at` locates the problem
/// in the document ("line 7", "trajectory LT0003", "feature A").
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodecError {
    #[error("{at}: malformed header: {reason}")]
    MalformedHeader { at: String, reason: String },
    #[error("{at}: unknown column type {ty:?}")]
    UnknownColumnType { at: String, ty: String },
    #[error("{at}: {reason}")]
    MalformedLine { at: String, reason: String },
    #[error("{at}: {count} coordinate values do not form {dims}D points (need at least 2 points)")]
    BadCoordinateArity { at: String, count: usize, dims: usize },
    #[error("{at}: segment end must be after its start")]
    NonChronologicalSegment { at: String },
    #[error("{at}: segment overlaps the previous segment of feature {feature}")]
    OverlappingSegments { at: String, feature: String },
    #[error(
        "{at}: discontinuous junction: position differs from the end of the previous segment of feature {feature}"
    )]
    DiscontinuousJunction { at: String, feature: String },
    #[error("{at}: bad time {value:?}")]
    BadTime { at: String, value: String },
    #[error("{at}: bad value {value:?} for type {ty}")]
    BadValue { at: String, value: String, ty: String },
    #[error("document has no mf:STBoundedBy")]
    MissingSTBoundedBy,
    #[error("{at}: mfIdRef {id:?} names no mf:MovingFeature member")]
    UnknownMfIdRef { at: String, id: String },
    #[error("{at}: {found} mf:Attr values for {expected} attribute definitions")]
    AttrCountMismatch { at: String, expected: usize, found: usize },
    #[error("{at}: bad posList: {reason}")]
    BadPosList { at: String, reason: String },
    #[error("{at}: unexpected element <{name}>")]
    UnknownElement { at: String, name: String },
    #[error("XML syntax error: {0}")]
    Xml(String),
    #[error("JSON syntax error: {0}")]
    Json(String),
    #[error("{at}: {reason}")]
    Structure { at: String, reason: String },
    #[error("{at}: {first} has {first_len} entries but {second} has {second_len}")]
    ParallelArrayLengthMismatch {
        at: String,
        first: &'static str,
        first_len: usize,
        second: &'static str,
        second_len: usize,
    },
    #[error("{at}: unknown interpolation {value:?}")]
    UnknownInterpolation { at: String, value: String },
    #[error("{at}: datetimes are not strictly increasing")]
    NonIncreasingDatetimes { at: String },
    #[error("{at}: unsupported geometry type {ty:?}, only MovingPoint is supported")]
    UnsupportedGeometryType { at: String, ty: String },
    #[error("{at}: {mode} interpolation cannot be encoded here")]
    UnsupportedInterpolation { at: String, mode: InterpolationMode },
    #[error("features mix 2D and 3D positions")]
    MixedDimensionality,
    #[error("{at}: attribute {name:?} of type {ty} cannot be encoded with {mode} interpolation")]
    AttrTypeUnsupported {
        at: String,
        name: String,
        ty: String,
        mode: InterpolationMode,
    },
    #[error("{at}: feature has {tracks} tracks; temporal gaps cannot be encoded")]
    GapNotRepresentable { at: String, tracks: usize },
    #[error("{at}: features must share the same temporal attributes ({reason})")]
    InconsistentAttributes { at: String, reason: String },
    #[error("{at}: attribute {name:?} has no value at {time}")]
    UndefinedAttribute { at: String, name: String, time: String },
    #[error("{at}: value {value:?} cannot be written without a quoting mechanism")]
    UnrepresentableValue { at: String, value: String },
    #[error("{at}: a linear track needs at least 2 samples")]
    TrackTooShort { at: String },
}

impl CodecError {
    pub fn code(&self) -> &'static str {
        match self {
            CodecError::MalformedHeader { .. } => "MALFORMED_HEADER",
            CodecError::UnknownColumnType { .. } => "UNKNOWN_COLUMN_TYPE",
            CodecError::MalformedLine { .. } => "MALFORMED_LINE",
            CodecError::BadCoordinateArity { .. } => "BAD_COORDINATE_ARITY",
            CodecError::NonChronologicalSegment { .. } => "NON_CHRONOLOGICAL_SEGMENT",
            CodecError::OverlappingSegments { .. } => "OVERLAPPING_SEGMENTS",
            CodecError::DiscontinuousJunction { .. } => "DISCONTINUOUS_JUNCTION",
            CodecError::BadTime { .. } => "BAD_TIME",
            CodecError::BadValue { .. } => "BAD_VALUE",
            CodecError::MissingSTBoundedBy => "MISSING_STBOUNDEDBY",
            CodecError::UnknownMfIdRef { .. } => "UNKNOWN_MFIDREF",
            CodecError::AttrCountMismatch { .. } => "ATTR_COUNT_MISMATCH",
            CodecError::BadPosList { .. } => "BAD_POSLIST",
            CodecError::UnknownElement { .. } => "UNKNOWN_ELEMENT",
            CodecError::Xml(_) => "XML_SYNTAX",
            CodecError::Json(_) => "JSON_SYNTAX",
            CodecError::Structure { .. } => "BAD_STRUCTURE",
            CodecError::ParallelArrayLengthMismatch { .. } => "PARALLEL_ARRAY_LENGTH_MISMATCH",
            CodecError::UnknownInterpolation { .. } => "UNKNOWN_INTERPOLATION",
            CodecError::NonIncreasingDatetimes { .. } => "NON_INCREASING_DATETIMES",
            CodecError::UnsupportedGeometryType { .. } => "UNSUPPORTED_GEOMETRY_TYPE",
            CodecError::UnsupportedInterpolation { .. } => "UNSUPPORTED_INTERPOLATION",
            CodecError::MixedDimensionality => "MIXED_DIMENSIONALITY",
            CodecError::AttrTypeUnsupported { .. } => "ATTR_TYPE_UNSUPPORTED",
            CodecError::GapNotRepresentable { .. } => "GAP_NOT_REPRESENTABLE",
            CodecError::InconsistentAttributes { .. } => "INCONSISTENT_ATTRIBUTES",
            CodecError::UndefinedAttribute { .. } => "UNDEFINED_ATTRIBUTE",
            CodecError::UnrepresentableValue { .. } => "UNREPRESENTABLE_VALUE",
            CodecError::TrackTooShort { .. } => "TRACK_TOO_SHORT",
        }
    }
}

pub type Result<T, E = CodecError> = std::result::Result<T, E>;
