//! Component size distributions of configuration-model random graphs.
//!
//! Given a degree distribution `u(k)`, the probability that a randomly chosen node
//! belongs to a finite component of size `n` is
//!
//! ```text
//! w(1) = u(0),    w(n) = mu1 / (n - 1) * u1^{*n}(n - 2)   (n > 1)
//! ```
//!
//! where `u1(k) = (k + 1) u(k + 1) / mu1` is the excess degree distribution and
//! `^{*n}` denotes the `n`-fold convolution power. The crate evaluates this exactly
//! ([`size_dist`]), describes its large-`n` behaviour for light and heavy tailed
//! degree laws ([`asymptotics`]) and checks both against simulated graphs ([`mc`]).

pub mod asymptotics;
pub mod conv;
pub mod degree;
pub mod error;
pub mod io;
pub mod mc;
pub mod size_dist;
pub mod special;

pub use asymptotics::{AsymptoteModel, Case, Classification};
pub use degree::{DegreeDistribution, ExcessDistribution, Family, MomentSummary, TailSpec, ThetaBranch};
pub use error::{Error, Result};
pub use mc::{ensemble_estimate, EnsembleEstimate};
pub use size_dist::{component_sizes, ClosedForm, ComponentSizeResult};
