//! Learning dynamics for periodic zero-sum games played on the simplex.
//!
//! The crate is organised around four layers:
//!
//! * [`simplex`], [`game`] and [`state`]: mixed strategies stored in log space,
//!   payoff matrices, periodic schedules and the joint KL-divergence.
//! * [`dynamics`]: the MWU, Optimistic MWU and Extra-gradient MWU update rules,
//!   trajectory execution and the reduced four-dimensional OMWU maps of the
//!   2×2 alternating game.
//! * [`equilibrium`]: small exact zero-sum solvers, equilibrium certificates and
//!   a generator for games sharing a prescribed interior equilibrium.
//! * [`analysis`]: Jacobians, eigenvalues and trajectory property checkers used
//!   to verify convergence and divergence claims numerically.
//!
//! Player 1 (rows) maximises `x1ᵀ A x2`, player 2 (columns) minimises it.

pub mod analysis;
pub mod dynamics;
pub mod equilibrium;
mod error;
pub mod game;
pub mod linalg;
pub mod simplex;
pub mod state;
pub mod trajectory;

pub use error::{Error, Result};
pub use game::{PayoffMatrix, PeriodicGame};
pub use simplex::Simplex;
pub use state::{kl_divergence, JointState};
pub use trajectory::{Trajectory, TrajectoryStep};
