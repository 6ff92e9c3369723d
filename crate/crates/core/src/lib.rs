//! Sparsification of frequency-hopping (FHSS) signals in the Hermite and
//! Fourier domains, and recovery of missing samples with an adaptive
//! variable-step gradient algorithm.
//!
//! The crate is organised bottom-up:
//!
//! * [`signal`] generates multi-hop complex sinusoid test signals.
//! * [`bases`] builds the discrete Hermite transform (Gauss-Hermite
//!   quadrature) and the DFT as dense analysis/synthesis matrix pairs.
//! * [`sensing`] draws seeded random sample subsets and the partial
//!   synthesis matrix.
//! * [`recon`] recovers the missing samples by minimising the l1 norm of the
//!   transform coefficients.
//! * [`metrics`] measures sparsity and reconstruction error and runs the
//!   MSE-versus-measurements sweep.
//! * [`io`] reads and writes the CSV file formats shared by the CLI.

pub mod bases;
pub mod error;
pub mod io;
pub mod metrics;
pub mod recon;
pub mod sensing;
pub mod signal;

pub use bases::{build_basis, hermite_function, hermite_roots, BasisKind, BasisPair};
pub use error::{Error, Result};
pub use metrics::{mse, mse_sweep, sparsity_report, SparsityReport, SweepRow, SweepTable};
pub use recon::{reconstruct, InitialStep, ReconConfig, ReconResult};
pub use sensing::{measure, partial_matrix, select_indices, MeasurementSet};
pub use signal::{generate_fhss, generate_sinusoid, FhssConfig, Hop, Signal};

pub use num_complex::Complex64;
