//! Traces and partial traces on corolla-ordered graphs, dense tensors and
//! sampled smooth kernels.
//!
//! The central abstraction is [`Trap`]: a family of spaces `P(k, l)` with
//! symmetric-group actions on inputs and outputs, a horizontal product `*`,
//! and partial traces `t_{i,j}` gluing input `i` to output `j`. Backends:
//!
//! * [`graph::GraphTrap`]: decorated graphs, the free object.
//! * [`homv::HomV`]: linear maps `V^{⊗k} → V^{⊗l}` as dense arrays.
//! * [`kernel::KernelTrap`]: kernels on flat tori with quadrature traces.
//! * [`upgr::UTrap`]: the unitary completion of any of the above.
//!
//! [`amplitude`] evaluates a decorated graph in its backend.

pub mod amplitude;
pub mod axioms;
mod dense;
pub mod dsl;
pub mod error;
pub mod graph;
pub mod homv;
pub mod kernel;
pub mod perm;
pub mod trapcore;
pub mod upgr;

pub use dense::Scalar;
pub use num_complex;
pub use error::{Result, TrapError};
pub use graph::Graph;
pub use perm::Permutation;
pub use trapcore::{gtrace, vconcat, Trap};
