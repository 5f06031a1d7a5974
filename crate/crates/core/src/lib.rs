//! Tax competition between a non-haven and `H` symmetric tax havens under a global minimum
//! tax (GMT) that covers only large multinationals.
//!
//! - [`model`]: parameters, tax schedules, profit shifting and the welfare objectives.
//! - [`equilibrium`]: switching rates and closed-form equilibria, Regime 0 through Regime 4.
//! - [`oracle`]: brute-force solver of the commitment game, used as ground truth.
//! - [`statics`]: welfare effects of introducing or raising the GMT, and of wider coverage.
//! - [`extensions`]: havens that decide one by one; pre-tax profits that respond to taxes.
//! - [`calibration`]: recovering (λ, δ) from Regime-0 moments.
//! - [`report`]: config files, reform tables, sweeps, conformance runs.
//!
//! # Examples
//!
//! The library is meant to be driven from code; each capability has one runnable program.
//!
//! ```text
//! examples/
//! ├── basics/               # Getting started
//! │   ├── calibrate.rs
//! │   └── regime_path.rs
//! ├── policy/               # Counterfactual reforms
//! │   ├── reform_tables.rs
//! │   ├── decentralised.rs
//! │   └── real_response.rs
//! ├── analysis/             # Marginal effects and sweeps
//! │   ├── comparative_statics.rs
//! │   └── sweep.rs
//! └── verification/         # Checking the closed forms
//!     ├── oracle_check.rs
//!     └── verify.rs
//! ```
//!
//! ## Basics
//!
//! - **`calibrate`** - recover (λ, δ) from the status-quo tax rate and shifted-profit share
//! - **`regime_path`** - rates and regime labels as t_M rises from 0 to 50%
//!
//! ```bash
//! cargo run -p gmt-core --example calibrate
//! cargo run -p gmt-core --example regime_path
//! ```
//!
//! ## Policy
//!
//! - **`reform_tables`** - welfare, revenue and profit changes from a 15%/16% GMT; full coverage net of compliance costs
//! - **`decentralised`** - havens committing one by one, the multiplicity band and selection
//! - **`real_response`** - pre-tax profits that shrink with the home rate
//!
//! ```bash
//! cargo run -p gmt-core --example reform_tables
//! cargo run -p gmt-core --example decentralised
//! cargo run -p gmt-core --example real_response
//! ```
//!
//! ## Analysis
//!
//! - **`comparative_statics`** - derivatives in t_M and coverage, jumps at the switching rates
//! - **`sweep`** - a t_M grid written to CSV, one file per coverage level
//!
//! ```bash
//! cargo run -p gmt-core --example comparative_statics
//! cargo run -p gmt-core --example sweep -- /tmp/gmt-sweep
//! ```
//!
//! ## Verification
//!
//! - **`oracle_check`** - brute-force subgame-perfect equilibria next to the closed forms
//! - **`verify`** - the full self-check suite, and what a wrong derivative looks like to it
//!
//! ```bash
//! cargo run -p gmt-core --release --example oracle_check
//! cargo run -p gmt-core --release --example verify
//! ```
//!
//! The `gmt` binary wraps the same calls for files on disk:
//! `gmt calibrate | solve | reform | sweep | verify`.

pub mod calibration;
pub mod equilibrium;
pub mod error;
pub mod extensions;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod report;
pub mod statics;

pub use error::{Error, Result};
