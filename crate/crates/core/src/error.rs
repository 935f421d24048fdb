use thiserror::Error;

/// Errors raised by the library.
///
/// Variants fall into two groups: input errors (bad words, invalid
/// automorphisms, malformed subsets) and defects. A defect means an internal
/// consistency check failed; see [`Error::is_defect`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },

    #[error("word reduces to the identity")]
    IdentityWord,

    #[error("rank must be at least 2, got {0}")]
    RankTooSmall(usize),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("malformed graph: {0}")]
    MalformedGraph(String),

    #[error("edge set is not a forest")]
    NotAForest,

    #[error("edge {0} does not exist")]
    NoSuchEdge(usize),

    #[error("no tree-replacement matching exists")]
    NoMatching,

    #[error("malformed marking: {0}")]
    MalformedMarking(String),

    #[error("petal data does not define an automorphism: {0}")]
    NotInvertible(String),

    #[error("invalid fold witness: {0}")]
    InvalidWitness(String),

    #[error("subsets are not disjoint")]
    NotDisjoint,

    #[error("subset must be nonempty and proper")]
    DegenerateSubset,

    #[error("ideal edges are not pairwise compatible")]
    IncompatibleEdges,

    #[error("not a nontrivial ideal edge: {0}")]
    NotIdeal(String),

    #[error("key lemma hypotheses violated: {0}")]
    HypothesesViolated(String),

    #[error("key lemma conclusion failed: {0}")]
    ConclusionFailed(String),

    #[error("lexicographic comparison undetermined up to class length {0}")]
    UndeterminedComparison(usize),

    #[error("poset map is not monotone")]
    NotMonotone,

    #[error("poset map violates the requested direction")]
    DirectionViolated,

    #[error("poset map leaves the poset")]
    MapLeavesPoset,

    #[error("relation is not a partial order: {0}")]
    NotAPartialOrder(String),

    #[error("pipeline defect: {0}")]
    PipelineDefect(String),

    #[error("descent did not terminate within {0} steps")]
    DescentCapExceeded(usize),

    #[error("complex too large: {0} simplices")]
    TooLarge(usize),
}

impl Error {
    /// True for internal-consistency failures, as opposed to bad input.
    pub fn is_defect(&self) -> bool {
        matches!(
            self,
            Error::NoMatching
                | Error::ConclusionFailed(_)
                | Error::UndeterminedComparison(_)
                | Error::PipelineDefect(_)
                | Error::DescentCapExceeded(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
