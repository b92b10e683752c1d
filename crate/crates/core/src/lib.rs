//! Physics-informed networks for singularly perturbed elliptic problems.
//!
//! The solution is split into a smooth part and boundary-layer parts. Each
//! part is a single-hidden-layer sigmoid block; layer blocks see the level-set
//! distance to their boundary divided by ε, so the steep profile becomes an
//! O(1) function of the block input. Training minimises a weighted
//! least-squares residual with Levenberg–Marquardt.
//!
//! ```no_run
//! use blpinn::experiment::{run_trial, TrialConfig};
//! use blpinn::problems::ProblemId;
//!
//! let outcome = run_trial(&TrialConfig::defaults(ProblemId::Ex1, 1e-8, 0)).unwrap();
//! println!("{:?}", outcome.errors.unwrap().rel_l2);
//! ```

pub mod autodiff;
pub mod error;
pub mod experiment;
pub mod levelset;
pub mod loss;
pub mod metrics;
pub mod network;
pub mod optimizer;
pub mod problems;
pub mod sampling;

pub use error::{Error, Result};
