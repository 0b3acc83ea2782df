//! Classical simulation toolkit for quantum walks on flat-band diamond lattices.
//!
//! The crate covers the full pipeline from lattice geometry to figure-ready
//! data files:
//!
//! - [`lattice`] - diamond-chain, single-plaquette and embedded-chain builders
//!   plus the three-band Bloch band structure of the diamond chain.
//! - [`hamiltonian`] - the spin (hardcore-boson) Hamiltonian as real-coefficient
//!   Pauli strings: XY-type hopping on every lattice bond and optional
//!   nearest-neighbour density-density interactions.
//! - [`circuit`] - two-qubit-gate circuits, first-order Trotter decomposition
//!   with greedy bond coloring, depth and compression-ratio accounting.
//! - [`simulator`] - statevector evolution, an exact-diagonalization evolution
//!   oracle in fixed particle-number sectors, measurement-shot sampling,
//!   particle-number post-selection, and stochastic Pauli noise trajectories.
//! - [`compressor`] - variational compression of deep Trotter circuits into
//!   bounded-depth brick-wall circuits by quasi-Newton fidelity maximization
//!   with adaptive depth growth.
//! - [`metrics`] - site densities, Bhattacharyya fidelity, overlap, FFT
//!   spectra, and transmission coefficients.
//! - [`experiment`] - scenario configuration, experiment runner and parameter
//!   sweeps emitting CSV data plus a reproducible run manifest.
//!
//! Throughout, energies are in units of the hopping strength `J` and times in
//! units of `1/J`. Qubit `q` of a basis-state index is bit `q` (bitstrings are
//! written with qubit 0 leftmost), and `|1>` marks an occupied site.

pub mod circuit;
pub mod compressor;
pub mod error;
pub mod experiment;
pub mod hamiltonian;
pub mod lattice;
mod lbfgs;
pub(crate) mod linalg;
pub mod metrics;
pub mod simulator;

pub use circuit::{compression_ratio, trotter_circuit, trotter_step, Circuit, Gate};
pub use compressor::{compress, compress_incremental, AnsatzCircuit, CompressConfig, CompressionResult};
pub use error::{Error, Result};
pub use hamiltonian::{hopping_terms, interaction_terms, HamiltonianTerms, Pauli, PauliTerm};
pub use lattice::{
    band_structure, build_diamond_chain, build_embedded_chain, build_single_plaquette,
    BandStructure, LatticeSpec,
};
pub use metrics::{fidelity_bc, overlap, DensitySeries, Spectrum};
pub use simulator::{
    apply_circuit, apply_noisy_circuit, exact_evolve, post_select, sample_shots, ShotRecord,
    StateVector,
};
