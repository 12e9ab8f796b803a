//! Exact computation in valued fields.
//!
//! The library works with truncated Hahn series over rational-function
//! coefficients, valued in lexicographically ordered groups Q^r. On top
//! of the field arithmetic it provides the ultrametric C-relation and its
//! axiom checks, ball traces over finitely generated subfields, separated
//! sequences and bases, extremum searches over witness-enumerable
//! coefficient sets, pseudo-Cauchy machinery, 1-type classification, and
//! a configurable counterexample tower exhibiting a non-definable type
//! over a subfield all of whose smaller-arity types are definable.
//!
//! All arithmetic is exact; truncation is propagated conservatively so an
//! operation never claims a coefficient beyond what its inputs justify.

pub mod counterexample;
pub mod crel;
pub mod scalars;
pub mod search;
pub mod separated;
pub mod series;
pub mod subfield;
pub mod valgroup;

pub use counterexample::{
    build_scenario, claim1_cofinality, claim2_subsets, classify_last, default_schedule,
    Claim1Report, Claim2Report, CounterexampleScenario, CxError, SubsetReport,
};
pub use crel::{
    c_rel, check_axioms_with, check_c_axioms, limit_nested_family, trace_ball, AxiomReport,
    AxiomViolation, Ball, BallKind, BallRadius, CrelError, FamilyOutcome, NestedFamily,
    TraceResult,
};
pub use scalars::{field_ops, ratfunc_equal, FieldOp, MPoly, Monomial, Rat, RatFunc, ScalarError};
pub use search::{
    classify_point, in_search, pc_check, pseudo_limit_search, Obstruction, PCSequence,
    PcCheckReport, PcViolation, PseudoLimitOutcome, SearchError, SearchOutcome, TypeVerdict,
};
pub use separated::{
    decompose_polynomial, express_in_basis, is_separated, quotient_subfield, separated_basis,
    sepquotient_transfer, trace_inequality, BasisParameter, Decomposition, DisjunctKey,
    ExpressQuality, InequalityReport, SepError, SeparatedBasisOutcome, SeparationCheck,
    SeriesPolynomial, TransferGroup, TransferReport, ViolatingCombo,
};
pub use subfield::{SubfieldDescription, SubfieldError, WitnessPolicy};
pub use series::{
    newton_polygon, series_add, series_inv, series_mul, CoarsePair, SeriesError, Trunc,
    TruncatedSeries, Val, ValBound,
};
pub use valgroup::{
    coarsen_value, cut_type, cut_type_lattice, lex_compare, ms_condition4, ms_contiguity,
    Condition4Report, ContiguityReport, ConvexSubgroup, CoordSubgroup, CutType, GroupElement,
    GroupError,
};
