use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("null or zero vector has no angle or unit direction")]
    NullInput,
    #[error("split quaternion has vanishing norm form ({0:e})")]
    DegenerateQuaternion(f64),
    #[error("split quaternion is not unit timelike: N(q) = {0}")]
    NotUnitTimelike(f64),
    #[error("scale factor mu must be non-zero")]
    ZeroScale,
    #[error("grid has {0} nodes, at least 7 are required")]
    GridTooCoarse(usize),
    #[error("parameter grid is not strictly increasing at node {0}")]
    NonMonotoneGrid(usize),
    #[error("channel length {got} does not match {expected} grid nodes")]
    ChannelLength { expected: usize, got: usize },
    #[error("tangent is lightlike at node {0}")]
    LightlikeTangent(usize),
    #[error("tangent changes causal character at node {0}")]
    CharacterChange(usize),
    #[error("curvature vanishes at node {0}")]
    VanishingCurvature(usize),
    #[error("principal normal is lightlike at node {0}")]
    LightlikeNormal(usize),
    #[error("torsion vanishes at node {0}")]
    VanishingTorsion(usize),
    #[error("osculating plane degenerates at node {0}")]
    DegenerateOsculating(usize),
    #[error("sample {node} is off the unit sphere by {deviation:e}")]
    NotOnSphere { node: usize, deviation: f64 },
    #[error("spherical curve is not unit speed at node {node} (|t| = {speed})")]
    NotUnitSpeed { node: usize, speed: f64 },
    #[error("unknown built-in curve '{0}'")]
    UnknownExample(String),
    #[error("invalid constants: {0}")]
    InvalidConstants(String),
    #[error("sigma ranges overlap on fewer than 3 nodes")]
    NoOverlap,
    #[error("pseudo-orthonormal frame drifted by {0:e}")]
    FrameDegenerate(f64),
    #[error("initial frame does not match the causal case: {0}")]
    CaseMismatch(String),
    #[error("p-shapes differ: distance {distance:e} exceeds {threshold:e}")]
    PShapeMismatch { distance: f64, threshold: f64 },
    #[error("curves have different causal characters")]
    CausalMismatch,
    #[error("linear part is not a split-quaternion rotation: {matrix:?}")]
    QuaternionExtractionFailure { matrix: [[f64; 3]; 3] },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable identifier, used in the CLI's error JSON.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NullInput => "null_input",
            Error::DegenerateQuaternion(_) => "degenerate_quaternion",
            Error::NotUnitTimelike(_) => "not_unit_timelike",
            Error::ZeroScale => "zero_scale",
            Error::GridTooCoarse(_) => "grid_too_coarse",
            Error::NonMonotoneGrid(_) => "non_monotone_grid",
            Error::ChannelLength { .. } => "channel_length",
            Error::LightlikeTangent(_) => "lightlike_tangent",
            Error::CharacterChange(_) => "character_change",
            Error::VanishingCurvature(_) => "vanishing_curvature",
            Error::LightlikeNormal(_) => "lightlike_normal",
            Error::VanishingTorsion(_) => "vanishing_torsion",
            Error::DegenerateOsculating(_) => "degenerate_osculating",
            Error::NotOnSphere { .. } => "not_on_sphere",
            Error::NotUnitSpeed { .. } => "not_unit_speed",
            Error::UnknownExample(_) => "unknown_example",
            Error::InvalidConstants(_) => "invalid_constants",
            Error::NoOverlap => "no_overlap",
            Error::FrameDegenerate(_) => "frame_degenerate",
            Error::CaseMismatch(_) => "case_mismatch",
            Error::PShapeMismatch { .. } => "pshape_mismatch",
            Error::CausalMismatch => "causal_mismatch",
            Error::QuaternionExtractionFailure { .. } => "quaternion_extraction_failure",
            Error::InvalidInput(_) => "invalid_input",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    /// True for errors that come from the geometry of the input rather than
    /// from malformed files or arguments.
    pub fn is_geometric(&self) -> bool {
        !matches!(
            self,
            Error::Io(_)
                | Error::Json(_)
                | Error::Csv(_)
                | Error::InvalidInput(_)
                | Error::UnknownExample(_)
                | Error::InvalidConstants(_)
                | Error::NonMonotoneGrid(_)
                | Error::ChannelLength { .. }
                | Error::GridTooCoarse(_)
        )
    }
}
