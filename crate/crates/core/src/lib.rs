//! Multi-criteria online subset selection.
//!
//! Given a batch of incoming frames and the current representative set, pick
//! which incoming frames become representatives by balancing a pairwise
//! criterion (dissimilarity) against a pointwise one (per-frame loss).
//!
//! Three solvers share one instance model:
//! - [`mcoss`]: the baseline convex relaxation with a group-norm penalty;
//! - [`thresh`]: the thresholded convex formulation with a cardinality budget;
//! - [`submodular`]: randomized greedy minimization of a facility-location style set function.
//!
//! [`oracle`] enumerates integral optima for small instances and checks the
//! selection conditions; [`stream`] runs the online loop; [`bench`] generates
//! synthetic instances and compares the solvers.

pub mod bench;
pub mod error;
pub mod exec;
pub mod instance;
pub mod lp;
pub mod matrix;

pub use error::{OssError, Result};
pub use exec::Execution;
pub use instance::{build_q, FrameRecord, Norm, QMatrices, SelectionConfig, SelectionInstance};
pub use matrix::Matrix;
pub use stream::Method;

pub mod mcoss;
pub mod oracle;
pub mod stream;
pub mod submodular;
pub mod thresh;

mod formulation;

pub use formulation::Assignment;
