//! Sampling and linear optimization over convex bodies by barrier-driven
//! random walks.
//!
//! The central object is a walk whose Gaussian proposal at `x` has
//! covariance proportional to the inverse Hessian of a self-concordant
//! barrier, so steps are large in roomy directions and shrink
//! automatically near the boundary. Bodies are intersections of linear
//! constraints `Ax ≤ b`, a semidefinite slice `∑ xᵢAᵢ ⪯ B`, and
//! ellipsoids `‖Aⱼ⁻¹(x − cⱼ)‖ < 1`.
//!
//! What's here:
//! - [`body`]: body specifications and membership, JSON parsing;
//! - [`barrier`]: barrier values, gradients, Hessians, the weighted
//!   aggregate and its complexity parameter;
//! - [`geometry`]: chords, the Hilbert metric, symmetric gauge, and a
//!   discretized Riemannian distance;
//! - [`chain`]: the Metropolis-filtered walk with per-step accounting;
//! - [`optimizer`]: Las Vegas linear optimization through a projective
//!   transform and hat barriers;
//! - [`baselines`]: Hit-and-Run and the Ball walk for comparisons;
//! - [`diagnostics`]: uniformity reports, autocorrelation proxies, the
//!   direct-product experiment and startup checks;
//! - [`io`]: manifests, atomic writes and the CSV stream format.
//!
//! ```
//! use dikin_core::body::BodySpec;
//! use dikin_core::chain::{run_chain, ChainConfig};
//! use nalgebra::DVector;
//!
//! let square = BodySpec::cube(2, 1.0).unwrap();
//! let config = ChainConfig { max_steps: 500, seed: 7, ..ChainConfig::default() };
//! let run = run_chain(&square, &square.weights(), &config, &DVector::zeros(2)).unwrap();
//! assert!(run.samples.iter().all(|x| square.contains(x)));
//! ```

pub mod barrier;
pub mod baselines;
pub mod body;
pub mod chain;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod optimizer;

pub use error::{Error, Result};
