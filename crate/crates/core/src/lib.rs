//! Simulation of non-Hermitian quantum dynamics inside fully Hermitian
//! tight-binding networks.
//!
//! A discrete mode coupled uniformly to an equispaced set of levels (a
//! Wigner–Weisskopf star) decays exponentially; Lanczos tridiagonalization
//! turns that star into a finite 1-D chain realizable as a waveguide array.
//! Attaching such a chain to one site of a coupler produces a
//! parity–time-symmetric dimer whose post-selected dynamics follow the
//! non-Hermitian propagator e^{-iH_eff z} — here simulated exactly at the
//! single- and two-photon level and validated against an independent
//! Lindblad integration.

pub mod chain;
pub mod error;
pub mod lanczos;
pub mod lindblad;
pub mod multiphoton;
pub mod network;
pub mod propagator;
pub mod spectrum;
pub mod table;

pub use chain::ChainHamiltonian;
pub use error::{Error, Result};
pub use lanczos::{
    max_safe_length, tridiagonalize, verify_reduction, LanczosResult, ReductionReport,
    DEFAULT_BREAKDOWN_TOL,
};
pub use lindblad::{
    build_generators, integrate, lindblad_rhs, DimerGenerators, FockBasis, FockDensityMatrix,
    PopulationTrace,
};
pub use multiphoton::{
    entanglement_entropy, entanglement_peak, entanglement_peak_with, entropy_trace,
    evolve_two_photon, evolve_two_photon_with, output_amplitude, PhotonConfig, TwoPhotonState,
    MAX_PHOTONS,
};
pub use network::{
    attach_chain_bath, build_coupler, build_star, DimerSpec, NetworkHamiltonian, StarBathSpec,
};
pub use propagator::{
    dimer_intensity_trace, dimer_propagator, fit_decay, site_intensities, transfer_length,
    transfer_matrix, uniform_grid, DecayFit, IntensityTrace, Propagator, TransferMatrix,
};
pub use spectrum::SpectralDecomp;
