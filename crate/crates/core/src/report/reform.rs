//! Reform reports: the equilibrium at a GMT rate against the no-GMT status quo, by group.

use std::fmt::Write as _;

use serde::Serialize;

use crate::equilibrium::{EquilibriumOutcome, Regime};
use crate::error::Result;
use crate::model::TaxSchedule;

use super::{Scenario, Variant};

/// One-time GMT implementation cost per newly covered firm (million EUR), the number of
/// small MNEs brought in by full coverage, and the exchange rate used to convert.
pub const COMPLIANCE_EUR_M_PER_FIRM: f64 = 1.6;
pub const NEWLY_COVERED_FIRMS: f64 = 6000.0;
pub const USD_PER_EUR: f64 = 1.1;

/// Compliance cost in billion USD.
pub fn compliance_cost(eur_m_per_firm: f64, firms: f64, usd_per_eur: f64) -> f64 {
    eur_m_per_firm * firms * usd_per_eur / 1000.0
}

/// Change against the status quo, in billion USD and percent of the status-quo level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Delta {
    pub before: f64,
    pub after: f64,
    pub change: f64,
    /// `None` when the status-quo level is zero.
    pub percent: Option<f64>,
}

impl Delta {
    fn new(before: f64, after: f64) -> Self {
        let change = after - before;
        Delta {
            before,
            after,
            change,
            percent: (before != 0.0).then(|| 100.0 * change / before),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupRow {
    pub group: &'static str,
    /// `None` for the world row.
    pub schedule: Option<TaxSchedule>,
    pub welfare: Delta,
    pub revenue: Delta,
    /// Profits booked in the group (non-haven: retained; havens: shifted in). The non-haven's
    /// percentage is taken over status-quo shifted profits.
    pub booked_profits: Delta,
}

/// Gains from moving coverage from the scenario's φ to the report's φ at the same t_M.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageExtension {
    pub from_phi: f64,
    pub to_phi: f64,
    pub welfare_nonhaven: f64,
    pub welfare_world: f64,
    pub revenue_nonhaven: f64,
    pub revenue_world: f64,
}

/// Gains net of a compliance cost, applied to the coverage extension when there is one and
/// to the reform itself otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplianceAdjustment {
    pub cost: f64,
    pub net_welfare_nonhaven: f64,
    pub net_welfare_world: f64,
    pub net_revenue_nonhaven: f64,
    pub net_revenue_world: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReformReport {
    pub scenario: String,
    pub variant: Variant,
    #[serde(rename = "t_M")]
    pub t_m: f64,
    pub phi: f64,
    pub regime: Regime,
    /// Non-haven, havens (all together), world.
    pub rows: Vec<GroupRow>,
    pub status_quo: TaxSchedule,
    pub status_quo_haven: TaxSchedule,
    pub coverage_extension: Option<CoverageExtension>,
    pub compliance: Option<ComplianceAdjustment>,
}

fn rows(before: &EquilibriumOutcome, after: &EquilibriumOutcome) -> Vec<GroupRow> {
    let booked_n = |e: &EquilibriumOutcome| e.profits - e.shifted_profits_total;
    vec![
        GroupRow {
            group: "non-haven",
            schedule: Some(after.nonhaven),
            welfare: Delta::new(before.welfare_nonhaven, after.welfare_nonhaven),
            revenue: Delta::new(before.revenue_nonhaven, after.revenue_nonhaven),
            booked_profits: Delta {
                percent: (before.shifted_profits_total != 0.0)
                    .then(|| 100.0 * (booked_n(after) - booked_n(before)) / before.shifted_profits_total),
                ..Delta::new(booked_n(before), booked_n(after))
            },
        },
        GroupRow {
            group: "havens",
            schedule: Some(after.haven),
            welfare: Delta::new(before.welfare_haven_total, after.welfare_haven_total),
            revenue: Delta::new(before.revenue_haven_total, after.revenue_haven_total),
            booked_profits: Delta::new(before.shifted_profits_total, after.shifted_profits_total),
        },
        GroupRow {
            group: "world",
            schedule: None,
            welfare: Delta::new(before.welfare_world, after.welfare_world),
            revenue: Delta::new(before.revenue_world(), after.revenue_world()),
            booked_profits: Delta::new(before.profits, after.profits),
        },
    ]
}

/// Builds the report for `scenario` at `t_M`, with coverage `phi` (defaults to the scenario's).
///
/// If `phi` differs from the scenario's coverage the report also carries the gains of that
/// coverage change; `compliance_cost` (billion USD) is then netted off those gains.
pub fn reform(scenario: &Scenario, t_m: f64, phi: Option<f64>, compliance_cost: Option<f64>) -> Result<ReformReport> {
    let base_phi = scenario.params.coverage();
    let phi = phi.unwrap_or(base_phi);
    let target = scenario.with_coverage(phi)?;
    let before = target.status_quo()?;
    let after = target.solve(t_m)?;
    let extension = if phi != base_phi {
        let reference = scenario.solve(t_m)?;
        Some(CoverageExtension {
            from_phi: base_phi,
            to_phi: phi,
            welfare_nonhaven: after.welfare_nonhaven - reference.welfare_nonhaven,
            welfare_world: after.welfare_world - reference.welfare_world,
            revenue_nonhaven: after.revenue_nonhaven - reference.revenue_nonhaven,
            revenue_world: after.revenue_world() - reference.revenue_world(),
        })
    } else {
        None
    };
    let rows = rows(&before, &after);
    let compliance = compliance_cost.map(|cost| {
        let (wn, ww, rn, rw) = match &extension {
            Some(x) => (x.welfare_nonhaven, x.welfare_world, x.revenue_nonhaven, x.revenue_world),
            None => (rows[0].welfare.change, rows[2].welfare.change, rows[0].revenue.change, rows[2].revenue.change),
        };
        ComplianceAdjustment {
            cost,
            net_welfare_nonhaven: wn - cost,
            net_welfare_world: ww - cost,
            net_revenue_nonhaven: rn - cost,
            net_revenue_world: rw - cost,
        }
    });
    let variant = scenario.variant;
    Ok(ReformReport {
        scenario: format!(
            "{}-tm{:.4}-phi{:.4}",
            match variant {
                Variant::Baseline => "baseline",
                Variant::Decentralised => "decentralised",
                Variant::RealResponse => "real-response",
            },
            t_m,
            phi
        ),
        variant,
        t_m,
        phi,
        regime: after.regime,
        rows,
        status_quo: before.nonhaven,
        status_quo_haven: before.haven,
        coverage_extension: extension,
        compliance,
    })
}

fn pct(x: f64) -> String {
    format!("{:.1}%", 100.0 * x)
}

fn schedule_cell(s: &TaxSchedule) -> String {
    if (s.small_rate - s.large_rate).abs() <= 1e-8 {
        format!("{} for all", pct(s.large_rate))
    } else {
        format!("{} small / {} large", pct(s.small_rate), pct(s.large_rate))
    }
}

fn delta_cell(d: &Delta) -> String {
    match d.percent {
        Some(p) => format!("{:.1} ({:.1}%)", d.change, p),
        None => format!("{:.1} (-)", d.change),
    }
}

impl ReformReport {
    /// Aligned plain-text table; numbers are rounded to one decimal.
    pub fn to_text(&self) -> String {
        let mut table: Vec<[String; 4]> = vec![[
            format!("GMT {} with phi={:.2} ({})", pct(self.t_m), self.phi, self.regime.label()),
            "Non-haven".into(),
            "Havens".into(),
            "World".into(),
        ]];
        let r = &self.rows;
        table.push([
            "Tax rate after GMT".into(),
            schedule_cell(r[0].schedule.as_ref().unwrap()),
            schedule_cell(r[1].schedule.as_ref().unwrap()),
            "-".into(),
        ]);
        for (label, get) in [
            ("Welfare change, bUSD (%)", (|g: &GroupRow| g.welfare) as fn(&GroupRow) -> Delta),
            ("Revenue change, bUSD (%)", |g: &GroupRow| g.revenue),
            ("Profit change, bUSD (%)", |g: &GroupRow| g.booked_profits),
        ] {
            table.push([label.into(), delta_cell(&get(&r[0])), delta_cell(&get(&r[1])), delta_cell(&get(&r[2]))]);
        }
        let widths: Vec<usize> = (0..4)
            .map(|c| table.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (i, row) in table.iter().enumerate() {
            let line: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(c, cell)| format!("{cell:<w$}", w = widths[c]))
                .collect();
            writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
            if i == 0 {
                writeln!(out, "{}", "-".repeat(widths.iter().sum::<usize>() + 6)).unwrap();
            }
        }
        writeln!(
            out,
            "Status quo: non-haven {}, havens {}.",
            pct(self.status_quo.large_rate),
            pct(self.status_quo_haven.large_rate)
        )
        .unwrap();
        if let Some(x) = &self.coverage_extension {
            writeln!(
                out,
                "Coverage {:.2} -> {:.2}: revenue {:.1} (non-haven) / {:.1} (world), welfare {:.1} / {:.1} bUSD.",
                x.from_phi, x.to_phi, x.revenue_nonhaven, x.revenue_world, x.welfare_nonhaven, x.welfare_world
            )
            .unwrap();
        }
        if let Some(c) = &self.compliance {
            writeln!(
                out,
                "Net of {:.1} bUSD compliance cost: revenue {:.1} / {:.1}, welfare {:.1} / {:.1} bUSD (non-haven / world).",
                c.cost, c.net_revenue_nonhaven, c.net_revenue_world, c.net_welfare_nonhaven, c.net_welfare_world
            )
            .unwrap();
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;

    fn scenario() -> Scenario {
        Scenario::baseline(ModelParams::new(2.1, 17.8, 40, 0.9, 4623.0).unwrap())
    }

    #[test]
    fn table_a_rows() {
        let r = reform(&scenario(), 0.15, None, None).unwrap();
        assert_eq!(r.regime, Regime::R1);
        let w: Vec<f64> = r.rows.iter().map(|g| g.welfare.change).collect();
        assert!((w[0] - 95.6).abs() < 0.1 && (w[1] + 3.6).abs() < 0.1 && (w[2] - 92.0).abs() < 0.1, "{w:?}");
        assert!((r.rows[0].booked_profits.change - 393.0).abs() < 0.5);
        assert!(r.rows[2].booked_profits.change.abs() < 1e-9);
        assert!((r.rows[0].welfare.percent.unwrap() - 3.8).abs() < 0.1);
        assert!((r.rows[0].booked_profits.percent.unwrap() - 41.0).abs() < 0.1);
        assert!((r.rows[1].booked_profits.percent.unwrap() + 41.0).abs() < 0.1);
    }

    #[test]
    fn world_row_adds_up() {
        for t in [0.1, 0.15, 0.16, 0.3, 0.5] {
            let r = reform(&scenario(), t, None, None).unwrap();
            for get in [|g: &GroupRow| g.welfare.change, |g: &GroupRow| g.revenue.change, |g: &GroupRow| g.booked_profits.change] {
                assert!((get(&r.rows[2]) - get(&r.rows[0]) - get(&r.rows[1])).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn full_coverage_net_of_compliance() {
        let cost = compliance_cost(COMPLIANCE_EUR_M_PER_FIRM, NEWLY_COVERED_FIRMS, USD_PER_EUR);
        assert!((cost - 10.56).abs() < 1e-12);
        let r = reform(&scenario(), 0.16, Some(1.0), Some(10.5)).unwrap();
        let x = r.coverage_extension.unwrap();
        assert!((x.revenue_world - 16.0).abs() < 0.1, "{}", x.revenue_world);
        let c = r.compliance.unwrap();
        assert!((c.net_revenue_world - 5.5).abs() < 0.1);
        assert!((c.net_welfare_world + 0.5).abs() < 0.1);
    }

    #[test]
    fn text_shows_the_json_values() {
        let r = reform(&scenario(), 0.16, None, Some(10.5)).unwrap();
        let text = r.to_text();
        for g in &r.rows {
            assert!(text.contains(&format!("{:.1}", g.welfare.change)), "{text}");
            assert!(text.contains(&format!("{:.1}", g.revenue.change)));
        }
        assert!(text.contains("10.3% small / 16.0% large"), "{text}");
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(v["rows"][0]["welfare"]["change"].as_f64().unwrap(), r.rows[0].welfare.change);
    }
}
