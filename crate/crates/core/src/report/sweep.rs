//! Equilibria along a grid of GMT rates, as plot-ready CSV.

use std::io::Write;

use serde::Serialize;

use crate::equilibrium::Regime;
use crate::error::{Error, Result};

use super::Scenario;

/// One grid point. Field order is the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "t_M")]
    pub t_m: f64,
    pub regime: Regime,
    pub t_n_small: f64,
    pub t_n_large: f64,
    pub t_h_small: f64,
    pub t_h_large: f64,
    #[serde(rename = "G_n_over_lambda")]
    pub g_n_over_lambda: f64,
    #[serde(rename = "G_h_total_over_lambda")]
    pub g_h_total_over_lambda: f64,
    pub shifted_profits: f64,
}

pub const COLUMNS: [&str; 9] = [
    "t_M",
    "regime",
    "t_n_small",
    "t_n_large",
    "t_h_small",
    "t_h_large",
    "G_n_over_lambda",
    "G_h_total_over_lambda",
    "shifted_profits",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepDataset {
    pub phi: f64,
    pub rows: Vec<SweepRow>,
}

/// `lo, lo + step, …` up to `hi` (inclusive, within rounding).
fn grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::param("step", format!("must be > 0, got {step}")));
    }
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
        return Err(Error::param("range", format!("need 0 ≤ lo ≤ hi ≤ 1, got [{lo}, {hi}]")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    // rounded so that 0.1 + 2·0.1 prints as 0.3
    Ok((0..=n)
        .map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12)
        .map(|t| t.min(hi))
        .collect())
}

/// Solves `scenario` at every grid point of `[lo, hi]`.
pub fn sweep(scenario: &Scenario, lo: f64, hi: f64, step: f64) -> Result<SweepDataset> {
    let rows = grid(lo, hi, step)?
        .into_iter()
        .map(|t| {
            let e = scenario.solve(t)?;
            Ok(SweepRow {
                t_m: t,
                regime: e.regime,
                t_n_small: e.nonhaven.small_rate,
                t_n_large: e.nonhaven.large_rate,
                t_h_small: e.haven.small_rate,
                t_h_large: e.haven.large_rate,
                g_n_over_lambda: e.welfare_nonhaven,
                g_h_total_over_lambda: e.welfare_haven_total,
                shifted_profits: e.shifted_profits_total,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepDataset {
        phi: scenario.params.coverage(),
        rows,
    })
}

impl SweepDataset {
    /// Writes CSV with a header row, `.` decimals and `\n` line endings.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        for r in &self.rows {
            w.serialize(r)?;
        }
        if self.rows.is_empty() {
            w.write_record(COLUMNS)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }

    /// Regimes in order of appearance, one entry per contiguous run.
    pub fn regime_runs(&self) -> Vec<Regime> {
        let mut runs: Vec<Regime> = Vec::new();
        for r in &self.rows {
            if runs.last() != Some(&r.regime) {
                runs.push(r.regime);
            }
        }
        runs
    }

    /// Whether each regime occupies one interval and they appear in increasing order.
    pub fn labels_contiguous_and_ordered(&self) -> bool {
        let runs = self.regime_runs();
        runs.windows(2).all(|w| w[0].ordinal() < w[1].ordinal())
    }

    /// Grid intervals `(t_before, t_after)` where a small-segment rate (non-haven or haven)
    /// falls by more than `min_drop`.
    pub fn downward_jumps(&self, min_drop: f64) -> Vec<(f64, f64)> {
        self.rows
            .windows(2)
            .filter(|w| {
                w[0].t_n_small - w[1].t_n_small > min_drop || w[0].t_h_small - w[1].t_h_small > min_drop
            })
            .map(|w| (w[0].t_m, w[1].t_m))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{regime_thresholds, unconstrained_rates};
    use crate::model::ModelParams;

    fn params() -> ModelParams {
        ModelParams::new(2.1, 17.8, 40, 0.9, 4623.0).unwrap()
    }

    #[test]
    fn header_and_line_endings() {
        let d = sweep(&Scenario::baseline(params()), 0.0, 0.02, 0.01).unwrap();
        let s = d.to_csv_string().unwrap();
        assert!(s.starts_with(&(COLUMNS.join(",") + "\n")), "{s}");
        assert!(!s.contains('\r'));
        assert_eq!(s.lines().count(), 4);
        assert!(s.lines().nth(1).unwrap().starts_with("0.0,R0,"));
    }

    #[test]
    fn calibrated_sweep_structure() {
        let p = params();
        let d = sweep(&Scenario::baseline(p), 0.0, 1.0, 1e-3).unwrap();
        assert_eq!(d.regime_runs(), [Regime::R0, Regime::R1, Regime::R2, Regime::R3, Regime::R4]);
        assert!(d.labels_contiguous_and_ordered());
        let ts = regime_thresholds(&p).unwrap();
        let jumps = d.downward_jumps(0.01);
        assert_eq!(jumps.len(), 2, "{jumps:?}");
        assert!(jumps[0].0 <= ts.t_m1 && ts.t_m1 <= jumps[0].1);
        assert!(jumps[1].0 <= ts.t_m3 && ts.t_m3 <= jumps[1].1);
        // R4: small rates back at their Regime-0 values
        let (tn, th) = unconstrained_rates(&p);
        let last = d.rows.last().unwrap();
        assert_eq!((last.t_n_small, last.t_h_small), (tn, th));
    }

    #[test]
    fn full_coverage_sweep_has_no_early_jump() {
        let p = params().with_coverage(1.0).unwrap();
        let d = sweep(&Scenario::baseline(p), 0.0, 1.0, 1e-3).unwrap();
        let tf = regime_thresholds(&p).unwrap().t_mf;
        assert!(d.downward_jumps(0.01).iter().all(|j| j.1 > tf));
        assert!(d.labels_contiguous_and_ordered());
    }

    #[test]
    fn bad_step() {
        assert!(sweep(&Scenario::baseline(params()), 0.0, 1.0, 0.0).is_err());
        assert!(sweep(&Scenario::baseline(params()), 0.5, 0.2, 0.1).is_err());
    }
}
