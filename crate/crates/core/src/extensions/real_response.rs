//! Pre-tax profits that fall with the non-haven's rate, `Π = Π^b/(1 + t_n)` (or the linear
//! alternative `Π^b(1 − t_n)`).
//!
//! Havens take realised profits as given, so they still halve the non-haven's rate on the
//! untaxed segment; the non-haven's own problem has no tidy closed form and is solved numerically.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{EquilibriumOutcome, Regime};
use crate::error::{Error, Result};
use crate::model::{evaluate_segment, HavenGroup, ModelParams, ProfitResponse, TaxSchedule};
use crate::numerics::{bisect, bisect_switch, slope_bisection_max};
use crate::oracle::{stage1_spe_report, GridSpec, SpeReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealResponseParams {
    pub lambda: f64,
    pub delta: f64,
    #[serde(rename = "H")]
    pub havens: u32,
    #[serde(rename = "phi")]
    pub coverage: f64,
    /// Π^b, pre-tax profits at a zero non-haven rate.
    #[serde(rename = "Pi_b")]
    pub baseline_profits: f64,
    #[serde(default = "default_law")]
    pub law: ProfitResponse,
}

fn default_law() -> ProfitResponse {
    ProfitResponse::Inverse
}

impl RealResponseParams {
    pub fn new(lambda: f64, delta: f64, havens: u32, coverage: f64, baseline_profits: f64) -> Result<Self> {
        let p = RealResponseParams {
            lambda,
            delta,
            havens,
            coverage,
            baseline_profits,
            law: ProfitResponse::Inverse,
        };
        p.model()?;
        Ok(p)
    }

    pub fn with_law(mut self, law: ProfitResponse) -> Self {
        self.law = law;
        self
    }

    /// Baseline parameters carrying Π^b in place of Π.
    pub fn model(&self) -> Result<ModelParams> {
        ModelParams::new(self.lambda, self.delta, self.havens, self.coverage, self.baseline_profits)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeZero {
    pub outcome: EquilibriumOutcome,
    pub t_n0: f64,
    pub t_h0: f64,
    /// Σθ = H(t_n − t_h)/δ.
    pub shifted_share: f64,
    /// The printed square-root formula for t_n0 (inverse law only).
    pub closed_form_t_n0: Option<f64>,
    /// `closed_form_t_n0 − t_n0`.
    pub closed_form_residual: Option<f64>,
}

/// The square-root closed form printed for the inverse law.
pub fn printed_closed_form(lambda: f64, delta: f64, h: f64) -> f64 {
    let (l, d) = (lambda, delta);
    let inner = h * ((16.0 * d + 9.0 * h) * l * l - (38.0 * d - 6.0 * h) * l + 12.0 * d + h);
    2.0 * (inner.sqrt() - h * (3.0 * l - 1.0)) / (h * (8.0 * l - 3.0))
}

/// Non-haven's uniform best response to a uniform haven rate.
fn nonhaven_best_response(t_h: f64, p: &ModelParams, law: ProfitResponse) -> f64 {
    let g = |u: f64| {
        (0..2)
            .map(|seg| evaluate_segment(seg, u, &[(p.havens(), t_h)], p, law).g_nonhaven)
            .sum::<f64>()
    };
    // beyond t_h + δ/H all profit is shifted and the objective goes flat; a rate of 1 also
    // wipes out profits under the linear law
    let hi = (t_h + p.delta() / p.h()).min(1.0 - 1e-9);
    slope_bisection_max(g, t_h, hi, 1e-14)
}

/// Regime-0 equilibrium: the fixed point of the non-haven's numeric best response against
/// havens at half its rate.
pub fn real_response_regime0(rr: &RealResponseParams) -> Result<RegimeZero> {
    let p = rr.model()?;
    let gap = |t: f64| nonhaven_best_response(0.5 * t, &p, rr.law) - t;
    let t_n = bisect(gap, 0.0, 1.0 - 1e-9, 1e-14)
        .map_err(|e| Error::Numeric(format!("regime-0 fixed point not bracketed: {e}")))?;
    let t_h = 0.5 * t_n;
    let outcome = EquilibriumOutcome::from_groups(
        Regime::R0,
        0.0,
        TaxSchedule::uniform(t_n),
        &[HavenGroup {
            count: p.havens(),
            schedule: TaxSchedule::uniform(t_h),
        }],
        &p,
        rr.law,
    );
    let closed = (rr.law == ProfitResponse::Inverse).then(|| printed_closed_form(rr.lambda, rr.delta, p.h()));
    Ok(RegimeZero {
        outcome,
        t_n0: t_n,
        t_h0: t_h,
        shifted_share: p.h() * (t_n - t_h) / rr.delta,
        closed_form_t_n0: closed,
        closed_form_residual: closed.map(|c| c - t_n),
    })
}

fn spe(t_m: f64, rr: &RealResponseParams) -> Result<SpeReport> {
    stage1_spe_report(t_m, &rr.model()?, rr.law, &GridSpec::default())
}

/// Subgame-perfect equilibrium at `t_M`, solved numerically cell by cell.
pub fn real_response_equilibrium(t_m: f64, rr: &RealResponseParams) -> Result<EquilibriumOutcome> {
    Ok(spe(t_m, rr)?.outcome)
}

/// A change of regime along the t_M axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwitchPoint {
    pub from: Regime,
    pub to: Regime,
    pub t_m: f64,
}

/// Regime switches on `[0, 1]`: a scan at `scan_step` followed by bisection to `tol`.
pub fn real_response_thresholds(rr: &RealResponseParams, scan_step: f64, tol: f64) -> Result<Vec<SwitchPoint>> {
    if !(scan_step > 0.0 && tol > 0.0) {
        return Err(Error::param("scan_step", "scan step and tolerance must be positive"));
    }
    let n = (1.0 / scan_step).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| (i as f64 * scan_step).min(1.0)).collect();
    let labels = grid
        .iter()
        .map(|&t| real_response_equilibrium(t, rr).map(|o| o.regime))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 1..grid.len() {
        let (from, to) = (labels[i - 1], labels[i]);
        if from == to {
            continue;
        }
        let t = bisect_switch(
            |t| Ok(real_response_equilibrium(t, rr)?.regime.ordinal() >= to.ordinal()),
            grid[i - 1],
            grid[i],
            tol,
        )?;
        out.push(SwitchPoint { from, to, t_m: t });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{equilibrium, unconstrained_rates};

    fn calibrated() -> RealResponseParams {
        RealResponseParams::new(6.0, 17.7, 40, 0.9, 5480.0).unwrap()
    }

    #[test]
    fn regime0_matches_calibrated_moments() {
        let z = real_response_regime0(&calibrated()).unwrap();
        assert!((z.t_n0 - 0.186).abs() < 2e-3, "{}", z.t_n0);
        assert!((z.shifted_share - 0.209).abs() < 3e-3, "{}", z.shifted_share);
        assert!((z.outcome.profits - 4623.0).abs() < 10.0, "{}", z.outcome.profits);
        assert!(z.closed_form_residual.unwrap().abs() > 1e-6);
    }

    #[test]
    fn profit_scale_is_irrelevant_for_rates() {
        let a = real_response_regime0(&calibrated()).unwrap();
        let mut b = calibrated();
        b.baseline_profits *= 2.0;
        let b = real_response_regime0(&b).unwrap();
        assert!((a.t_n0 - b.t_n0).abs() < 1e-12);
    }

    #[test]
    fn fixed_law_recovers_baseline() {
        let rr = calibrated().with_law(ProfitResponse::Fixed);
        let z = real_response_regime0(&rr).unwrap();
        let (tn, _) = unconstrained_rates(&rr.model().unwrap());
        assert!((z.t_n0 - tn).abs() < 1e-10, "{} vs {tn}", z.t_n0);
        let p = rr.model().unwrap();
        for t in [0.12, 0.2, 0.4] {
            let a = real_response_equilibrium(t, &rr).unwrap();
            let b = equilibrium(t, &p).unwrap();
            assert_eq!(a.regime, b.regime);
            assert!((a.welfare_world - b.welfare_world).abs() <= 1e-6 * b.welfare_world.abs());
        }
    }

    #[test]
    fn havens_halve_on_the_small_segment() {
        let rr = calibrated();
        for t in [0.15, 0.17, 0.3] {
            let r = spe(t, &rr).unwrap();
            for c in &r.cells {
                let n = c.stage2.rates.nonhaven;
                let h = c.haven_schedule();
                if !c.havens_committed {
                    assert!((h.small_rate - 0.5 * n.small_rate).abs() < 1e-8, "{t}: {n:?} {h:?}");
                }
            }
        }
    }

    #[test]
    fn linear_law_is_supported() {
        let rr = calibrated().with_law(ProfitResponse::Linear);
        let z = real_response_regime0(&rr).unwrap();
        assert!(z.closed_form_t_n0.is_none());
        assert!(z.t_n0 > 0.0 && z.t_n0 < 1.0);
    }
}
