//! Simulation and exact verification toolkit for the discrete
//! self-repelling walk with local-time initial condition `a(e) = −1{|e|−1/2 odd}`.
//!
//! * [`walk`]: the walk, its edge local times and coin times `N(k)`.
//! * [`web`]: the same walk as a maze explorer of the discrete web.
//! * [`observables`]: the modified local time `f`, the admissible interval
//!   `I(f)` and the event weights.
//! * [`oracle`]: exact laws by enumeration of the coin tree.
//! * [`montecarlo`]: the geometrically randomized observation and the
//!   uniformity, scaling and hidden-burglar experiments.
//! * [`analytics`]: Gamma and Airy functions and the constant
//!   `1 − 9√3 Γ(2/3)⁶/(4π³) ≈ 0.2251`.
//! * [`app`]: the `tsrm` command line.
//!
//! ```
//! use tsrm::{observables, rng::SeedSpec, walk};
//!
//! let trace = walk::run(1000, SeedSpec::new(7));
//! trace.check_coin_time_identity().unwrap();
//! let f = observables::ModifiedProfile::initial();
//! assert_eq!(f.interval().unwrap().len(), 1);
//! ```

pub mod analytics;
pub mod app;
pub mod export;
pub mod montecarlo;
pub mod observables;
pub mod oracle;
pub mod rng;
pub mod stats;
pub mod walk;
pub mod web;
