//! Numerics for state-local measurement error.
//!
//! A measurement `M` (a POVM) pinned at a state `rho` transports observables
//! to outcome functions and back. The norm lost on the way is the quantum
//! error of the measurement, and the errors of two observables obey an
//! uncertainty relation whose bound is computed by [`relations`]. The
//! [`indirect`] module compares these errors with Ozawa's error for explicit
//! system-ancilla models, and [`verify`] runs randomized property suites over
//! instances from [`generate`].
//!
//! ```
//! use errgeom_core::{quantum_error, DensityOperator, LocalContext, Observable, Povm};
//!
//! let povm = Povm::unsharp_qubit([0.0, 0.0, 1.0], 0.6).unwrap();
//! let ctx = LocalContext::new(povm, DensityOperator::maximally_mixed(2)).unwrap();
//! let eps = quantum_error(&ctx, &Observable::pauli_z()).unwrap();
//! assert!((eps - 0.8).abs() < 1e-12);
//! ```

pub mod error;
pub mod generate;
pub mod indirect;
pub mod linalg;
pub mod measurement;
pub mod measurement_error;
pub mod relations;
pub mod state;
pub mod tolerance;
pub mod transport;
pub mod verify;

pub use error::{Error, Result};
pub use generate::{GenConfig, Mixedness, Scenario, RNG_ALGORITHM};
pub use indirect::{ChainReport, IndirectModel};
pub use linalg::CMatrix;
pub use measurement::{ContractivityReport, MeasurementKind, Povm};
pub use measurement_error::{
    errorless_check, f_error, quantum_error, squared_quantum_error, verify_minimality, ErrorBreakdown, ErrorlessReport,
    MinimalityReport,
};
pub use relations::{
    evaluate_relation, evaluate_relation_with, proof_device_check, schroedinger_reduction, ImagVariant,
    ProofDeviceReport, RelationReport, SchroedingerReport,
};
pub use state::{DensityOperator, Distribution, Observable, OutcomeFunction, OutcomeSpace};
pub use tolerance::Tolerances;
pub use transport::{ContractionReport, LocalContext};
pub use verify::{Fault, SuiteResult, VerifyOptions, VerifyReport};
