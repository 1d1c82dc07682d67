//! Jack measures on partitions realized as discrete beta-ensembles.
//!
//! The crate has an exact layer and a numeric layer. The exact layer
//! ([`partition`], [`jack`]) does rational arithmetic end to end: Jack
//! symmetric functions in the power-sum basis, closed-form evaluations at
//! homogeneous specializations, and the small-instance oracles built from
//! them ([`oracle`]). The numeric layer ([`ensemble`], [`mcmc`],
//! [`equilibrium`], [`asymptotics`]) works in `f64`: beta-ensemble
//! log-weights through log-Gamma, Metropolis sampling of partitions, the
//! six explicit limit densities, CLT covariances and edge rate functions.

pub mod asymptotics;
pub mod ensemble;
pub mod equilibrium;
pub mod error;
pub mod jack;
pub mod mcmc;
pub mod oracle;
pub mod partition;
pub mod poly;
pub mod quad;

pub use error::{Error, Result};
pub use partition::Partition;
