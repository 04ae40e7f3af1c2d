use thiserror::Error;

/// Which metric axiom a [`Error::MetricViolation`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricAxiom {
    Definiteness,
    Symmetry,
    Nonnegativity,
    Triangle,
}

impl std::fmt::Display for MetricAxiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MetricAxiom::Definiteness => "definiteness",
            MetricAxiom::Symmetry => "symmetry",
            MetricAxiom::Nonnegativity => "nonnegativity",
            MetricAxiom::Triangle => "triangle",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    // system model
    #[error("system-model: MetricViolation({axiom}, ({}))", .points.join(","))]
    MetricViolation { axiom: MetricAxiom, points: Vec<String> },
    #[error("system-model: PartialMap: {0}")]
    PartialMap(String),
    #[error("system-model: InvalidPoint: {0}")]
    InvalidPoint(String),
    #[error("system-model: invalid SFT graph: {0}")]
    InvalidGraph(String),
    #[error("system-model: invalid grid spec: {0}")]
    InvalidGrid(String),
    #[error("system-model: NoConvergence after {iterations} iterations (bracket width {width:e})")]
    NoConvergence { iterations: usize, width: f64 },
    #[error("spec: {0}")]
    Spec(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    // chain structure / cyclic decomposition
    #[error("cyclic-proximal: NotAComponent: node set {0:?} is not a chain component")]
    NotAComponent(Vec<usize>),
    #[error("cyclic-proximal: NotInComponent: node {0} is not in the component")]
    NotInComponent(usize),
    #[error("cyclic-proximal: ModelInconsistency: {0}")]
    ModelInconsistency(String),
    #[error("cyclic-proximal: CapExceeded: no saturation up to cap {cap} (coverage {covered}/{total})")]
    CapExceeded { cap: usize, covered: usize, total: usize },
    #[error("cyclic-proximal: EmptyLadder")]
    EmptyLadder,

    // basins
    #[error("basin-partition: OmegaNotInComponent: omega-limit of node {0} is not inside a chain component")]
    OmegaNotInComponent(usize),

    // furstenberg
    #[error("furstenberg: HorizonTooSmall: {0}")]
    HorizonTooSmall(String),
    #[error("furstenberg: MonotonicityBug: {0}")]
    MonotonicityBug(String),

    // shadowing
    #[error("shadowing: StepViolation({index}, {error})")]
    StepViolation { index: usize, error: String },
    #[error("shadowing: PrecisionViolation at step {index}: error {error} exceeds 2^-{depth}")]
    PrecisionViolation { index: usize, error: String, depth: u32 },
    #[error("shadowing: AdmissibilityBug: {0}")]
    AdmissibilityBug(String),
    #[error("shadowing: ClassMismatch: {0}")]
    ClassMismatch(String),
    #[error("NotIrreducible: the SFT graph has {0} strongly connected components")]
    NotIrreducible(usize),

    // shared
    #[error("BudgetExceeded: {what} exceeded cap {cap}")]
    BudgetExceeded { what: String, cap: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal invariant failure: {0}")]
    Invariant(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this error: 2 validation, 3 budget, 4 internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } | Error::CapExceeded { .. } | Error::NoConvergence { .. } => 3,
            Error::MonotonicityBug(_)
            | Error::AdmissibilityBug(_)
            | Error::Invariant(_)
            | Error::OmegaNotInComponent(_) => 4,
            _ => 2,
        }
    }

    pub(crate) fn step_violation(index: usize, error: impl std::fmt::Display) -> Self {
        Error::StepViolation { index, error: error.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn budget(what: &str, cap: usize) -> Error {
    Error::BudgetExceeded { what: what.to_string(), cap }
}
