//! Symplectic contraction of unitary-group spaces, computed at desk scale.
//!
//! The crate covers:
//!
//! * [`matrix`]: small dense complex matrices, Hermitian eigendecomposition,
//!   polar decomposition and the right momentum map `B ↦ B*B`.
//! * [`flow`]: the gradient-Hamiltonian vector field of `det` and its
//!   normalizations, integrated from `det = 1` down to `det = 0`.
//! * [`contraction`]: the closed-form contraction `B = UP ↦ U sqrt(P² - λ_min I)`,
//!   normal forms of contracted cotangent points and the fiber relation.
//! * [`gt`]: Gel'fand-Tsetlin patterns, polytope enumeration, the Weyl
//!   dimension formula and Poisson brackets of GT momenta.
//! * [`branching`]: exact Clebsch-Gordan, Pieri, polygon and tree semigroup
//!   combinatorics.
//! * [`polygon`]: closed polygons in R³ and their bending flows.
//! * [`io`]: the JSON and CSV file formats shared with the command-line tool.

pub mod branching;
pub mod config;
pub mod contraction;
pub mod error;
pub mod flow;
pub mod gt;
pub mod io;
pub mod matrix;
pub mod polygon;
pub mod verify;

pub use branching::TreeGraph;
pub use config::Tolerances;
pub use contraction::{BlockPartition, ContractedPoint, CotangentPoint};
pub use error::{Error, Result};
pub use flow::{FlowConfig, FlowSample, FlowTrajectory, StepStats};
pub use gt::{GtPattern, HighestWeight, OrbitFunction};
pub use matrix::{ComplexMatrix, HermitianMatrix, Spectrum, UnitaryMatrix};
pub use polygon::{Diagonal, PolygonConfig, Triangulation};

pub use num_complex::Complex64;
