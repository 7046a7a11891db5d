//! Error type shared by the whole crate.

/// Everything that can go wrong when building rings and shapes, parsing
/// input, or running an enumeration that outgrows its budget.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// A ring description was rejected (bad prime, bad prime power, or a
    /// precision so large that residue codes would overflow).
    #[error("invalid ring: {0}")]
    InvalidRing(String),

    /// A module shape was rejected (zero exponent, overflow, ...).
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    /// Two objects built over different rings were combined.
    #[error("mismatched rings: {0}")]
    RingMismatch(String),

    /// An element or tuple does not live in the shape it was used with.
    #[error("element does not fit shape: {0}")]
    ShapeMismatch(String),

    /// An enumeration would visit more states than the configured bound.
    #[error("enumeration bound exceeded: needs {needed} states, bound is {bound}")]
    BoundExceeded { needed: u128, bound: u64 },

    /// `extend_homomorphism` was asked for a map that cannot exist: some
    /// coefficient vector produces a combination whose height would drop.
    /// The witness holds the offending coefficient codes.
    #[error("no height-increasing extension: combination with coefficients {witness:?} drops height")]
    NotHeightIncreasing { witness: Vec<u64> },

    /// `build_automorphism` was asked to connect tuples in different orbits.
    #[error("tuples lie in different orbits")]
    NotSameOrbit,

    /// The zero module has no atoms and no generators to speak of.
    #[error("operation is undefined on the zero module")]
    ZeroModule,

    /// A height sequence is not realised by any element of the shape.
    #[error("sequence is not admissible for this shape: {0}")]
    NotAdmissible(String),

    /// An order ideal used a point outside the shape's support poset.
    #[error("point outside the support poset: {0}")]
    OutsidePoset(String),

    /// Poset comparison needs distinct labels on both sides.
    #[error("poset has duplicate labels")]
    DuplicateLabels,

    /// A relation handed to the poset builder broke a partial-order axiom.
    #[error("not a valid finite poset: {0}")]
    InvalidPoset(String),

    /// Free-form input (CLI literals, JSON documents) failed to parse.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
