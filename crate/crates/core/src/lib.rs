//! Multi-slice clustering (MSC) of third-order tensors and its DBSCAN
//! refinement (MSC-DBSCAN), with a planted-cluster generator and the
//! evaluation metrics used to benchmark them.
//!
//! The per-mode pipeline is
//! [`slice_spectra`](msc::slice_spectra) → [`similarity_matrix`](msc::similarity_matrix)
//! → [`initial_cluster_by_gap`](msc::initial_cluster_by_gap) →
//! [`refine_cluster`](msc::refine_cluster) → [`split_cluster`](dbscan::split_cluster),
//! driven for all three modes by [`pipeline::run_msc_dbscan`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dbscan;
pub mod error;
pub mod io;
pub mod metrics;
pub mod msc;
pub mod par;
pub mod pipeline;
pub mod report;
pub mod spectral;
pub mod synth;
pub mod tensor;

pub use error::{Error, Result};
pub use msc::{LogBase, MscConfig};
pub use par::Execution;
pub use spectral::{EigConfig, EigMethod};
pub use tensor::{IndexSet, Matrix, Mode, Tensor3};
