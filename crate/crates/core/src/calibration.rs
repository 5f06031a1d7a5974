//! Recovering (λ, δ) — and Π^b when profits respond to taxes — from Regime-0 moments.
//!
//! In the baseline the two targets pin the parameters exactly: the shifted share is
//! `H·t_n0/(2δ)` and, substituting the Regime-0 rate, equals `(λ−1)/(3λ−1)`.

use serde::{Deserialize, Serialize};

use crate::equilibrium::unconstrained_rates;
use crate::error::{Error, Result};
use crate::extensions::real_response::{real_response_regime0, RealResponseParams};
use crate::model::{ModelParams, ProfitResponse};
use crate::numerics::{bisect, nelder_mead_2d};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CalibrationVariant {
    #[default]
    Baseline,
    #[serde(alias = "real_response")]
    RealResponse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentTargets {
    pub t_n0: f64,
    pub shifted_share: f64,
    /// Weights on the squared rate and share gaps.
    #[serde(default = "unit_weights")]
    pub weights: [f64; 2],
}

fn unit_weights() -> [f64; 2] {
    [1.0, 1.0]
}

impl MomentTargets {
    pub fn new(t_n0: f64, shifted_share: f64) -> Result<Self> {
        let t = MomentTargets {
            t_n0,
            shifted_share,
            weights: unit_weights(),
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_n0 > 0.0 && self.t_n0 < 1.0) {
            return Err(Error::param("t_n0", format!("must lie in (0, 1), got {}", self.t_n0)));
        }
        if !(self.shifted_share > 0.0 && self.shifted_share < 1.0) {
            return Err(Error::param(
                "shifted_share",
                format!("must lie in (0, 1), got {}", self.shifted_share),
            ));
        }
        if !self.weights.iter().all(|w| *w > 0.0 && w.is_finite()) {
            return Err(Error::param("weights", "must be positive"));
        }
        Ok(())
    }

    fn distance(&self, m: &Moments) -> f64 {
        self.weights[0] * (m.t_n0 - self.t_n0).powi(2) + self.weights[1] * (m.shifted_share - self.shifted_share).powi(2)
    }
}

/// Parameters held fixed during calibration. `total_profits` is the realised Π.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedParams {
    #[serde(rename = "H")]
    pub havens: u32,
    #[serde(rename = "phi")]
    pub coverage: f64,
    #[serde(rename = "Pi")]
    pub total_profits: f64,
}

/// Regime-0 moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub t_n0: f64,
    pub t_h0: f64,
    pub shifted_share: f64,
    /// t_n0 · shifted_share · Π, billion USD.
    pub revenue_loss: f64,
}

/// Closed-form Regime-0 moments of the baseline model.
pub fn model_moments(params: &ModelParams) -> Moments {
    let (t_n, t_h) = unconstrained_rates(params);
    let share = params.h() * (t_n - t_h) / params.delta();
    Moments {
        t_n0: t_n,
        t_h0: t_h,
        shifted_share: share,
        revenue_loss: t_n * share * params.total_profits(),
    }
}

/// Regime-0 moments with tax-responsive profits; `revenue_loss` uses realised Π.
pub fn real_response_moments(rr: &RealResponseParams) -> Result<Moments> {
    let z = real_response_regime0(rr)?;
    Ok(Moments {
        t_n0: z.t_n0,
        t_h0: z.t_h0,
        shifted_share: z.shifted_share,
        revenue_loss: z.t_n0 * z.shifted_share * z.outcome.profits,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationResult {
    pub variant: CalibrationVariant,
    pub lambda_hat: f64,
    pub delta_hat: f64,
    /// Π^b for the real-response variant.
    pub baseline_profits: Option<f64>,
    pub fixed: FixedParams,
    pub targets: MomentTargets,
    /// Weighted squared distance between model and target moments.
    pub residual: f64,
    pub moments_model: Moments,
}

impl CalibrationResult {
    /// Parameters for the equilibrium solvers; Π is the realised level.
    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(
            self.lambda_hat,
            self.delta_hat,
            self.fixed.havens,
            self.fixed.coverage,
            self.fixed.total_profits,
        )
    }

    pub fn real_response_params(&self) -> Option<RealResponseParams> {
        self.baseline_profits.map(|pb| RealResponseParams {
            lambda: self.lambda_hat,
            delta: self.delta_hat,
            havens: self.fixed.havens,
            coverage: self.fixed.coverage,
            baseline_profits: pb,
            law: ProfitResponse::Inverse,
        })
    }
}

fn infeasible(targets: &MomentTargets, fixed: &FixedParams, why: &str) -> Error {
    Error::Infeasible(format!(
        "no λ > 1, δ ∈ (0, 3H/2) matches t_n0 = {}, shifted share = {} with H = {}: {why}",
        targets.t_n0, targets.shifted_share, fixed.havens
    ))
}

pub fn calibrate(
    targets: &MomentTargets,
    fixed: &FixedParams,
    variant: CalibrationVariant,
) -> Result<CalibrationResult> {
    targets.validate()?;
    // also validates H, φ, Π
    ModelParams::new(2.0, 1.0, fixed.havens, fixed.coverage, fixed.total_profits)?;
    let h = fixed.havens as f64;
    let (s, t) = (targets.shifted_share, targets.t_n0);
    // havens halve the non-haven's rate in either variant, so δ follows from the share
    let delta = h * t / (2.0 * s);
    if !(delta < 1.5 * h) {
        return Err(infeasible(targets, fixed, &format!("implied δ = {delta} ≥ 3H/2 (needs t_n0 < 3·share)")));
    }
    match variant {
        CalibrationVariant::Baseline => {
            if !(s < 1.0 / 3.0) {
                return Err(infeasible(targets, fixed, "a shifted share of 1/3 or more needs λ = ∞"));
            }
            let lambda = (1.0 - s) / (1.0 - 3.0 * s);
            let objective = |x: [f64; 2]| {
                match ModelParams::new(x[0], x[1], fixed.havens, fixed.coverage, fixed.total_profits) {
                    Ok(p) => targets.distance(&model_moments(&p)),
                    Err(_) => f64::INFINITY,
                }
            };
            let start = [lambda, delta];
            let (x, fx) = nelder_mead_2d(objective, start, [1e-6 * lambda, 1e-6 * delta], 1e-30, 400);
            let best = if fx < objective(start) { x } else { start };
            let p = ModelParams::new(best[0], best[1], fixed.havens, fixed.coverage, fixed.total_profits)?;
            let m = model_moments(&p);
            Ok(CalibrationResult {
                variant,
                lambda_hat: best[0],
                delta_hat: best[1],
                baseline_profits: None,
                fixed: *fixed,
                targets: *targets,
                residual: targets.distance(&m),
                moments_model: m,
            })
        }
        CalibrationVariant::RealResponse => {
            // Π^b only rescales objectives, so λ can be found at any Π^b and Π^b set afterwards
            let rr = |lambda: f64, pb: f64| RealResponseParams::new(lambda, delta, fixed.havens, fixed.coverage, pb);
            let gap = |lambda: f64| {
                rr(lambda, fixed.total_profits)
                    .and_then(|p| real_response_regime0(&p))
                    .map_or(f64::NAN, |z| z.t_n0 - t)
            };
            let lambda = bisect(gap, 1.0 + 1e-9, 1e4, 1e-13)
                .map_err(|_| infeasible(targets, fixed, "the non-haven rate target is out of reach for any λ"))?;
            let pb = fixed.total_profits * (1.0 + t);
            let p = rr(lambda, pb)?;
            let z = real_response_regime0(&p)?;
            // refine Π^b against the numeric rate
            let pb = fixed.total_profits * (1.0 + z.t_n0);
            let p = rr(lambda, pb)?;
            let m = real_response_moments(&p)?;
            Ok(CalibrationResult {
                variant,
                lambda_hat: lambda,
                delta_hat: delta,
                baseline_profits: Some(pb),
                fixed: *fixed,
                targets: *targets,
                residual: targets.distance(&m),
                moments_model: m,
            })
        }
    }
}
