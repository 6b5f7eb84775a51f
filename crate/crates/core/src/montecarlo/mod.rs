//! Seeded Monte Carlo validation.
//!
//! A [`NoiseScenario`] fixes a noiseless matrix (through `basis_seed` and the
//! spectrum) and a stream of noise draws (trial `i` uses `noise_seed + i`).
//! [`Experiment`] prepares the noiseless split and the bound once and then
//! runs trials independently, so trials can execute in any order or in
//! parallel and still produce identical records.

mod coverage;
mod gaussianity;
pub mod io;
mod noise;
mod scenario;
mod tails;
mod trial;

pub use coverage::{coverage_report, CoverageReport, CoverageVerdict};
pub use gaussianity::{gaussianity_diagnostics, EntryDiagnostics, GaussianityReport};
pub use noise::{
    random_orthogonal, random_orthogonal_from, sample_noise, seeded_rng, standard_normal_matrix,
};
pub use scenario::{NoiseConvention, NoiseScenario};
pub use tails::{
    empirical_block_budget, empirical_product_tail, empirical_szarek, mgf_oracle, BudgetCheck,
    EmpiricalTail, MgfCheck,
};
pub use trial::{run_trial, Experiment, TrialFlags, TrialOutcome, TrialRecord};
