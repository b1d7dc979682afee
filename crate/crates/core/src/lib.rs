//! Certified covering structure and entropy lower bounds for entire
//! functions of one complex variable.
//!
//! The crate locates, for a concrete function, a bounded open region that
//! its image covers several times over, verifies the covering count by
//! argument-principle winding integrals, and converts the verified covering
//! into lower bounds for topological entropy via separated sets of backward
//! orbits. All numerical steps either succeed with stated tolerances or
//! report an honest structured failure.

pub mod cjson;
pub mod engine;
pub mod entropy;
pub mod function_model;
pub mod hyperbolic;
pub mod plane_domains;
pub mod report;
pub mod solver;
pub mod svg;
pub mod winding;

pub use engine::{
    find_self_covering_v, CaseTag, CoveringCertificate, DichotomyOutcome, DichotomyVariant,
    EngineError, EngineParams, HypothesisCheck, StepTrace, SublevelSet, Witnesses,
};
pub use entropy::{
    BackwardOrbitParams, CertificateBound, CompactSet, CriticalData, CriticalPoint,
    EntropyError, EntropyEstimate, EntropyTableEntry,
};
pub use function_model::{CircleWitness, FunctionError, FunctionSpec, LogSample};
pub use hyperbolic::{
    AnnulusBounds, DiameterEstimate, HyperbolicConfig, HyperbolicError, MeasureParams,
    MeasureScenario,
};
pub use plane_domains::{BaseRegion, Contour, DomainError, PlanarDomain, RemovedDisk, Slit};
pub use solver::{isolate_preimages, Preimage, Rect, SolveParams, SolverError};
pub use winding::{
    CoveringGridReport, GridCount, PreimageCount, PreparedBoundary, RoucheCertificate,
    WindingError,
};
