//! Bounded divergence measures and information-theoretic cost-benefit
//! analysis for visualization processes.
//!
//! - [`pmf`]: alphabets, PMFs, entropy and the special PMF constructors.
//! - [`divergence`]: KL, cross entropy, JS, conditional entropy, `D_new`,
//!   `D_ncm` and Minkowski distance, each with a per-letter breakdown.
//! - [`costbenefit`]: alphabet compression, potential distortion, benefit
//!   and cost-benefit ratio.
//! - [`coding`]: Huffman and Shannon code lengths, and the bound on
//!   conceptual cross entropy.
//! - [`curves`]: parameter sweeps over the two-letter PMF family.
//! - [`mcda`]: score sums and staged elimination for choosing a measure.
//! - [`scenarios`]: scenario bundles and survey ingestion for the case
//!   studies.
//! - [`io`] and [`reproduce`]: fixture loading and golden-value checks.
//!
//! All logarithms are base 2.

pub mod coding;
pub mod costbenefit;
pub mod curves;
pub mod divergence;
pub mod error;
pub mod io;
pub mod mcda;
pub mod pmf;
pub mod reproduce;
pub mod scenarios;
mod serde_f64;

pub use coding::{CodeStats, PrefixCode};
pub use costbenefit::BenefitBreakdown;
pub use divergence::{DivergenceResult, MeasureId};
pub use error::{Error, Result};
pub use pmf::{Alphabet, JointPmf, Pmf};
pub use scenarios::ScenarioBundle;
