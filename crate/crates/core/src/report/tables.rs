//! Plain-text renderings of calibration and single-equilibrium results.

use std::fmt::Write as _;

use serde::Serialize;

use crate::calibration::{CalibrationResult, CalibrationVariant};
use crate::equilibrium::{regime_thresholds, EquilibriumOutcome, ThresholdSet};
use crate::error::Result;

use super::Scenario;

pub fn calibration_text(r: &CalibrationResult) -> String {
    let mut s = String::new();
    let m = &r.moments_model;
    writeln!(s, "Parameter                          Value").unwrap();
    writeln!(s, "phi   GMT coverage                 {:.2}", r.fixed.coverage).unwrap();
    writeln!(s, "H     number of havens             {}", r.fixed.havens).unwrap();
    match r.baseline_profits {
        Some(pb) => writeln!(s, "Pi_b  baseline pre-tax profits     {pb:.0} bUSD").unwrap(),
        None => writeln!(s, "Pi    pre-tax profits of MNEs      {:.0} bUSD", r.fixed.total_profits).unwrap(),
    }
    writeln!(s, "lambda  value of public funds      {:.4}  (calibrated)", r.lambda_hat).unwrap();
    writeln!(s, "delta   cost of profit shifting    {:.4}  (calibrated)", r.delta_hat).unwrap();
    writeln!(s).unwrap();
    writeln!(s, "Targeted moment                    Model     Data").unwrap();
    if r.variant == CalibrationVariant::RealResponse {
        writeln!(s, "Pre-tax profits Pi (bUSD)          {:<9.0} {:.0}", r.fixed.total_profits, r.fixed.total_profits).unwrap();
    }
    writeln!(s, "Non-haven tax rate t_n0            {:<9} {:.1}%", format!("{:.1}%", 100.0 * m.t_n0), 100.0 * r.targets.t_n0).unwrap();
    writeln!(
        s,
        "Share of shifted profits           {:<9} {:.1}%",
        format!("{:.1}%", 100.0 * m.shifted_share),
        100.0 * r.targets.shifted_share
    )
    .unwrap();
    writeln!(s).unwrap();
    writeln!(s, "Non-targeted moment                Model").unwrap();
    writeln!(s, "Haven tax rate t_h0                {:.1}%", 100.0 * m.t_h0).unwrap();
    writeln!(s, "Non-haven revenue loss (bUSD)      {:.0}", m.revenue_loss).unwrap();
    writeln!(s).unwrap();
    writeln!(s, "Squared-distance residual: {:.3e}", r.residual).unwrap();
    s
}

/// One solved equilibrium with the switching rates it sits between.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub thresholds: ThresholdSet,
    pub status_quo: EquilibriumOutcome,
    pub outcome: EquilibriumOutcome,
}

pub fn solve_report(scenario: &Scenario, t_m: f64) -> Result<SolveReport> {
    Ok(SolveReport {
        thresholds: regime_thresholds(&scenario.params)?,
        status_quo: scenario.status_quo()?,
        outcome: scenario.solve(t_m)?,
    })
}

impl SolveReport {
    pub fn to_text(&self) -> String {
        let o = &self.outcome;
        let t = &self.thresholds;
        let pct = |x: f64| format!("{:.2}%", 100.0 * x);
        let mut s = String::new();
        writeln!(s, "t_M = {}, phi = {:.2}: {} ({})", pct(o.gmt_rate), o.coverage, o.regime, o.regime.description()).unwrap();
        writeln!(s, "non-haven rate  small {:>8}  large {:>8}", pct(o.nonhaven.small_rate), pct(o.nonhaven.large_rate)).unwrap();
        for g in &o.haven_groups {
            writeln!(
                s,
                "{:>3} haven(s)    small {:>8}  large {:>8}",
                g.count,
                pct(g.schedule.small_rate),
                pct(g.schedule.large_rate)
            )
            .unwrap();
        }
        writeln!(s, "welfare / lambda (bUSD): non-haven {:.1}, havens {:.1}, world {:.1}", o.welfare_nonhaven, o.welfare_haven_total, o.welfare_world).unwrap();
        writeln!(s, "revenue (bUSD): non-haven {:.1}, havens {:.1}", o.revenue_nonhaven, o.revenue_haven_total).unwrap();
        writeln!(s, "shifted profits: {:.1} bUSD", o.shifted_profits_total).unwrap();
        writeln!(
            s,
            "switching rates: t_M0 {}  t_M1 {}  t_M2 {}  t_M3 {}  t_Mf {}",
            pct(t.t_m0),
            pct(t.t_m1),
            pct(t.t_m2),
            pct(t.t_m3),
            pct(t.t_mf)
        )
        .unwrap();
        s
    }
}
