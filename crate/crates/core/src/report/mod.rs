//! Config files, reform tables, sweep datasets and conformance runs — the pieces behind the
//! `gmt` binary, usable directly from code.

pub mod config;
pub mod reform;
pub mod sweep;
pub mod tables;
pub mod verify;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::equilibrium::{equilibrium, regime_thresholds, unconstrained_equilibrium, EquilibriumOutcome};
use crate::error::{Error, Result};
use crate::extensions::{
    decentralised_equilibrium, real_response_equilibrium, real_response_regime0, RealResponseParams, Selection,
};
use crate::model::{ModelParams, ProfitResponse};

pub use config::{load_moments, load_params, output_dir, MomentsFile, ParamsFile, OUT_DIR_ENV};
pub use reform::{compliance_cost, reform, ComplianceAdjustment, GroupRow, ReformReport};
pub use sweep::{sweep, SweepDataset, SweepRow};
pub use tables::{calibration_text, solve_report, SolveReport};
pub use verify::{verify, ClosedForm, EquilibriumSource, VerifyOptions, VerifyReport};

/// Model variant a report is computed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    #[default]
    Baseline,
    Decentralised,
    RealResponse,
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(Variant::Baseline),
            "decentralised" | "decentralized" => Ok(Variant::Decentralised),
            "real-response" | "real_response" => Ok(Variant::RealResponse),
            _ => Err(Error::param(
                "variant",
                format!("unknown variant {s:?} (baseline|decentralised|real-response)"),
            )),
        }
    }
}

/// A parameterised model variant that can be solved at any t_M.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    /// Under the real-response variant `total_profits` is ignored in favour of Π^b.
    pub params: ModelParams,
    pub baseline_profits: Option<f64>,
    pub law: ProfitResponse,
    pub variant: Variant,
    pub selection: Selection,
}

impl Scenario {
    pub fn baseline(params: ModelParams) -> Self {
        Scenario {
            params,
            baseline_profits: None,
            law: ProfitResponse::Inverse,
            variant: Variant::Baseline,
            selection: Selection::Commit,
        }
    }

    pub fn from_file(file: &ParamsFile, variant: Variant, selection: Selection) -> Self {
        Scenario {
            params: file.params,
            baseline_profits: file.baseline_profits,
            law: file.law,
            variant,
            selection,
        }
    }

    pub fn with_coverage(mut self, phi: f64) -> Result<Self> {
        self.params = self.params.with_coverage(phi)?;
        Ok(self)
    }

    pub fn real_response(&self) -> Result<RealResponseParams> {
        let pb = self
            .baseline_profits
            .ok_or_else(|| Error::schema("Pi_b", "the real-response variant needs baseline profits Pi_b"))?;
        Ok(RealResponseParams::new(
            self.params.lambda(),
            self.params.delta(),
            self.params.havens(),
            self.params.coverage(),
            pb,
        )?
        .with_law(self.law))
    }

    /// Regime-0 equilibrium, the reference point of every reform.
    pub fn status_quo(&self) -> Result<EquilibriumOutcome> {
        match self.variant {
            Variant::RealResponse => Ok(real_response_regime0(&self.real_response()?)?.outcome),
            _ => Ok(unconstrained_equilibrium(&self.params)),
        }
    }

    /// Equilibrium at `t_M`. Decentralised havens are only modelled on `[t_M0, t_M2]`; outside
    /// that window the collective outcome is used, which is the same game there.
    pub fn solve(&self, t_m: f64) -> Result<EquilibriumOutcome> {
        match self.variant {
            Variant::Baseline => equilibrium(t_m, &self.params),
            Variant::RealResponse => real_response_equilibrium(t_m, &self.real_response()?),
            Variant::Decentralised => {
                let ts = regime_thresholds(&self.params)?;
                if self.params.coverage() < 1.0 && (ts.t_m0..=ts.t_m2).contains(&t_m) {
                    Ok(decentralised_equilibrium(t_m, &self.params, self.selection)?.selected)
                } else {
                    equilibrium(t_m, &self.params)
                }
            }
        }
    }
}
