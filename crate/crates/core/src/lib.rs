//! Numerical exploration of entropic inequalities for two-qubit pairs:
//! analytic extremes of relative entropy over unitary orbits, the Δ
//! differences between joint and margin divergences, Riemannian ascent on
//! the unitary group, and seeded Monte Carlo campaigns tying it together.
//!
//! Layering, bottom up:
//!
//! * [`linalg`] — dense complex matrices (dim ≤ 8), Jacobi Hermitian
//!   eigendecomposition, log₂, Kronecker/partial trace, Haar and Ginibre
//!   sampling, validated [`DensityMatrix`].
//! * [`entropy`] — Shannon/von Neumann entropy and classical/quantum
//!   relative entropy in bits, with explicit zero and support conventions.
//! * [`marginal`] — two-qubit joint/margin spectrum admissibility and
//!   samplers for admissible triples.
//! * [`orbit`] — min/max of S(UρU†‖σ) over unitaries, plus empirical
//!   interval verification.
//! * [`deltas`] — the Δ_min/Δ_max/Δ_mix/Δ/barΔ differences and △S.
//! * [`unitary_opt`] — gradient ascent/descent over U(d) and U(2)⊗U(2).
//! * [`campaign`] — reproducible experiment drivers with CSV/JSON/SVG
//!   emission.

pub mod campaign;
pub mod deltas;
pub mod entropy;
pub mod linalg;
pub mod marginal;
pub mod orbit;
pub mod unitary_opt;

pub use deltas::{compute_deltas, delta_s, DeltaInputs, DeltaReport};
pub use entropy::{
    relative_entropy_classical, relative_entropy_quantum, shannon_entropy, von_neumann_entropy,
    RelEntropy, Spectrum,
};
pub use linalg::{
    eig_hermitian, kron, matrix_log2, partial_trace, sample_haar_unitary, sample_random_density,
    ComplexMatrix, DensityMatrix, HermitianEigen, Subsystem,
};
pub use marginal::{
    bravyi_admissible, margins_of_state, sample_admissible_margins, sample_joint_spectrum,
    QubitMarginTriple,
};
pub use orbit::{orbit_extremes, verify_orbit_interval, OrbitExtremes};
pub use unitary_opt::{
    optimize_full, optimize_local, riemannian_gradient, Manifold, Mode, OptimizerConfig,
    OptimizerTrace,
};
