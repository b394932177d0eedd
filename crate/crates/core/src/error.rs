use thiserror::Error;

/// A pair of tuples that witnesses a failed predicate.
pub type TuplePair = (Vec<usize>, Vec<usize>);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("tuple {0:?} is not strictly increasing")]
    NotIncreasing(Vec<usize>),

    #[error("tuple arity {found} does not match expected arity {expected}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("tuple {tuple:?} is outside the domain [0, {n})")]
    OutOfDomain { tuple: Vec<usize>, n: usize },

    #[error("color {color} is used {count} times, exceeding bound {bound}")]
    BoundViolation { color: u64, count: usize, bound: usize },

    #[error("table has {found} entries but C({n},{arity}) = {expected}")]
    TableSize {
        n: usize,
        arity: usize,
        expected: usize,
        found: usize,
    },

    #[error("unsupported arity {0} (supported: 1..=4)")]
    UnsupportedArity(usize),

    #[error("tail width {width} out of range 1..={arity}")]
    TailWidth { width: usize, arity: usize },

    #[error("{what}: tuples {:?} and {:?} collide", .witness.0, .witness.1)]
    Precondition {
        what: &'static str,
        witness: TuplePair,
    },

    #[error("sequence {0:?} is not a rainbow")]
    NotRainbow(Vec<usize>),

    #[error("coloring is not in the required normal form: {0}")]
    WrongNormalForm(&'static str),

    #[error("reservoir element {element} is not viable for {sigma:?}")]
    NotAcceptable { sigma: Vec<usize>, element: usize },

    #[error("max(sigma) = {sigma_max} is not below min(reservoir) = {reservoir_min}")]
    ContextOrder { sigma_max: usize, reservoir_min: usize },

    #[error("tree would need {required} nodes, over the budget of {budget}")]
    NodeBudget { required: u128, budget: u128 },

    #[error("domain of size {n} is smaller than the required {required}")]
    DomainTooSmall { n: usize, required: usize },

    #[error("level {level} is not full ({found} of {expected} nodes)")]
    LevelNotFull {
        level: usize,
        found: usize,
        expected: u128,
    },

    #[error("no reservoir element lies above level {level}")]
    NoEligibleCandidate { level: usize },

    #[error("branching {0} at some level is not a power of two")]
    NotPowerOfTwo(u64),

    #[error("requested level {level} but tree depth is {depth}")]
    LevelOutOfRange { level: usize, depth: usize },

    #[error("pair ({x},{y}) does not stabilize: f_bar takes {first} at s={s_first} and {second} at s={s_second}")]
    NotStabilized {
        x: usize,
        y: usize,
        s_first: usize,
        first: u64,
        s_second: usize,
        second: u64,
    },

    #[error("cohesive thinning left an empty set")]
    DegenerateThinning,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Innermost error, looking through stage tags.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
