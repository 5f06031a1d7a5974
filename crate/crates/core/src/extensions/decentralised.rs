//! Havens choose individually whether to commit to a single rate.
//!
//! With `H_M` committed havens the non-haven keeps a single rate `t_n(H_M)`, committed havens
//! sit at `t_M` and splitting havens charge `t_n/2` to small MNEs and `t_M` to large ones.
//! A haven commits when `ΔG(H_M) = G_h¹(H_M) − G_h²(H_M − 1) ≥ 0`, whose sign is that of the
//! linear form `Θ(H_M) = A·H_M + B`.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::equilibrium::{equilibrium, regime_outcome, regime_thresholds, EquilibriumOutcome, Regime};
use crate::error::{Error, Result};
use crate::model::{HavenGroup, ModelParams, ProfitResponse, TaxSchedule};

/// Which equilibrium to report inside the multiplicity band `(t_M_a, t_M_b]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    /// All havens commit until `t_M_b`.
    #[default]
    Commit,
    /// All havens split from `t_M_a`.
    Split,
    /// Report every equilibrium; the selected one follows `Commit`.
    All,
}

impl FromStr for Selection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "commit" => Ok(Selection::Commit),
            "split" => Ok(Selection::Split),
            "all" => Ok(Selection::All),
            _ => Err(Error::param("selection", format!("unknown rule {s:?} (commit|split|all)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecentralisedThresholds {
    #[serde(rename = "t_M_a")]
    pub t_m_a: f64,
    #[serde(rename = "t_M_b")]
    pub t_m_b: f64,
    #[serde(rename = "t_M_c")]
    pub t_m_c: f64,
    /// Slope and intercept of Θ(H_M); these depend on t_M.
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl DecentralisedThresholds {
    /// Θ(H_M) = A·H_M + B.
    pub fn theta(&self, committed: f64) -> f64 {
        self.a * committed + self.b
    }

    /// Least commitment count at which committing pays, when that is strictly interior.
    pub fn interior_count(&self, havens: u32) -> Option<u32> {
        if self.a <= 0.0 {
            return None;
        }
        let root = -self.b / self.a;
        let k = root.ceil();
        (k >= 2.0 && k <= havens as f64 && root > 1.0).then_some(k as u32)
    }
}

fn coefficients(t: f64, p: &ModelParams) -> DecentralisedThresholds {
    let (l, d, h, phi) = (p.lambda(), p.delta(), p.h(), p.coverage());
    let bracket = d * (l - 1.0) - t * (h * (3.0 * l - 1.0) - 2.0 * (l - 1.0));
    let a = (l - 1.0) * (1.0 - phi) * bracket;
    let b = h * (phi * (l - 1.0) + 3.0 * l - 1.0) * bracket - 2.0 * t * (l - 1.0).powi(2) * (1.0 - phi);
    let c = d * (l - 1.0) * (phi * (l - 1.0) * (h - 1.0) + l * (3.0 * h + 1.0) - (h + 1.0));
    let dd = h * phi * (l - 1.0) * (l * (3.0 * h - 5.0) - (h - 3.0))
        + h * (3.0 * l - 1.0) * (l * (3.0 * h - 1.0) - (h - 1.0));
    let e = d * h * (2.0 * l - 1.0) * (l - 1.0);
    let f = (6.0 * h * h - 4.0 * h + 1.0) * l * l - (5.0 * h * h - 6.0 * h + 2.0) * l + (h - 1.0).powi(2)
        - phi * (l - 1.0).powi(2);
    DecentralisedThresholds {
        t_m_a: c / dd,
        t_m_b: e / f,
        t_m_c: d * (l - 1.0) / (h * (3.0 * l - 1.0) - 2.0 * (l - 1.0)),
        a,
        b,
        c,
        d: dd,
        e,
        f,
    }
}

fn check_range(t_m: f64, p: &ModelParams) -> Result<()> {
    let ts = regime_thresholds(p)?;
    if !(ts.t_m0..=ts.t_m2).contains(&t_m) {
        return Err(Error::Domain(format!(
            "decentralised analysis covers t_M ∈ [{:.6}, {:.6}], got {t_m}",
            ts.t_m0, ts.t_m2
        )));
    }
    Ok(())
}

/// Coefficients and thresholds at `t_M ∈ [t_M0, t_M2]`; needs φ < 1.
pub fn decentralised_thresholds(t_m: f64, params: &ModelParams) -> Result<DecentralisedThresholds> {
    if !(params.coverage() < 1.0) {
        return Err(Error::Domain("no splitting, hence no commitment choice, at φ = 1".into()));
    }
    check_range(t_m, params)?;
    let k = coefficients(t_m, params);
    let ts = regime_thresholds(params)?;
    if !(k.c > 0.0 && k.d > 0.0 && k.e > 0.0 && k.f > 0.0) {
        return Err(Error::ThresholdOrdering(format!("non-positive coefficient in {k:?}")));
    }
    // at H = 1 the band collapses: t_a = t_b = t_1
    let tight = params.havens() == 1;
    let rel = 1e-12 * ts.t_m1;
    let ok = ts.t_m0 < k.t_m_a
        && if tight {
            (k.t_m_a - k.t_m_b).abs() <= rel && (k.t_m_b - ts.t_m1).abs() <= rel
        } else {
            k.t_m_a < k.t_m_b && k.t_m_b < ts.t_m1
        }
        && k.t_m_b < k.t_m_c;
    if !ok {
        return Err(Error::ThresholdOrdering(format!(
            "expected t_M0 < t_M_a < t_M_b < t_M1 and t_M_b < t_M_c, got {} / {} / {} / {} / {}",
            ts.t_m0, k.t_m_a, k.t_m_b, ts.t_m1, k.t_m_c
        )));
    }
    Ok(k)
}

/// Denominator of the non-haven rate when `k` havens commit.
fn rate_denominator(k: f64, t: f64, p: &ModelParams) -> (f64, f64) {
    let (l, d, h, phi) = (p.lambda(), p.delta(), p.h(), p.coverage());
    let num = 2.0 * (l - 1.0) * (phi * t * (h - k) + k * t + d);
    let den = phi * (l - 1.0) * (h - k) + l * (3.0 * h + k) - (h + k);
    (num, den)
}

/// Non-haven rate `t_n(k)` when `k` havens commit.
pub fn nonhaven_rate(committed: u32, t_m: f64, params: &ModelParams) -> f64 {
    let (n, d) = rate_denominator(committed as f64, t_m, params);
    n / d
}

fn groups(committed: u32, t_m: f64, t_n: f64, p: &ModelParams) -> Vec<HavenGroup> {
    let split = TaxSchedule {
        small_rate: 0.5 * t_n,
        large_rate: t_m,
    };
    [(committed, TaxSchedule::uniform(t_m)), (p.havens() - committed, split)]
        .into_iter()
        .filter(|&(c, _)| c > 0)
        .map(|(count, schedule)| HavenGroup { count, schedule })
        .collect()
}

/// Stage-2 outcome when exactly `committed` havens commit.
pub fn outcome_with_committed(committed: u32, t_m: f64, params: &ModelParams) -> Result<EquilibriumOutcome> {
    let h = params.havens();
    if committed > h {
        return Err(Error::Domain(format!("{committed} committed havens out of {h}")));
    }
    let t_n = nonhaven_rate(committed, t_m, params);
    let regime = match committed {
        c if c == h => Regime::R1,
        0 => Regime::R2,
        _ => Regime::MixedCommitment,
    };
    Ok(EquilibriumOutcome::from_groups(
        regime,
        t_m,
        TaxSchedule::uniform(t_n),
        &groups(committed, t_m, t_n, params),
        params,
        ProfitResponse::Fixed,
    ))
}

/// ΔG(H_M) from its factored closed form, in welfare units (G/λ).
pub fn commitment_gain(committed: u32, t_m: f64, params: &ModelParams) -> Result<f64> {
    let h = params.havens();
    if committed < 1 || committed > h {
        return Err(Error::Domain(format!("H_M = {committed} outside 1..={h}")));
    }
    check_range(t_m, params)?;
    let (l, d, hh, phi, pi) = (
        params.lambda(),
        params.delta(),
        params.h(),
        params.coverage(),
        params.total_profits(),
    );
    let k = committed as f64;
    let co = coefficients(t_m, params);
    let (_, d1) = rate_denominator(k, t_m, params);
    let (_, d2) = rate_denominator(k - 1.0, t_m, params);
    let lead = hh * t_m * (3.0 * l - 1.0) - d * (l - 1.0);
    Ok((1.0 - phi) * pi * lead * co.theta(k) / (d * d1 * d2 * d2))
}

/// ΔG(H_M) by evaluating both configurations directly, in welfare units.
pub fn commitment_gain_direct(committed: u32, t_m: f64, params: &ModelParams) -> Result<f64> {
    let h = params.havens();
    if committed < 1 || committed > h {
        return Err(Error::Domain(format!("H_M = {committed} outside 1..={h}")));
    }
    let with = outcome_with_committed(committed, t_m, params)?;
    let without = outcome_with_committed(committed - 1, t_m, params)?;
    // the committed group is listed first; with no committed havens the only group splits
    let g_committed = crate::model::evaluate(
        &with.nonhaven,
        &with.haven_groups,
        params,
        ProfitResponse::Fixed,
    )
    .g_haven[0];
    let ev = crate::model::evaluate(&without.nonhaven, &without.haven_groups, params, ProfitResponse::Fixed);
    let g_split = ev.g_haven[without.haven_groups.len() - 1];
    Ok((g_committed - g_split) / params.lambda())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecentralisedOutcome {
    pub selection: Selection,
    pub selected: EquilibriumOutcome,
    /// Every equilibrium at this t_M (one unless inside the multiplicity band).
    pub set: Vec<EquilibriumOutcome>,
    pub thresholds: Option<DecentralisedThresholds>,
    pub interior_count: Option<u32>,
}

/// Equilibrium when havens decide on commitment individually.
///
/// At φ = 1 splitting is moot and the full-coverage equilibrium is returned.
pub fn decentralised_equilibrium(
    t_m: f64,
    params: &ModelParams,
    selection: Selection,
) -> Result<DecentralisedOutcome> {
    if params.coverage() >= 1.0 {
        let eq = equilibrium(t_m, params)?;
        return Ok(DecentralisedOutcome {
            selection,
            selected: eq.clone(),
            set: vec![eq],
            thresholds: None,
            interior_count: None,
        });
    }
    let th = decentralised_thresholds(t_m, params)?;
    let r1 = || regime_outcome(Regime::R1, t_m, params);
    let r2 = || regime_outcome(Regime::R2, t_m, params);
    let (selected, set, interior) = if t_m <= th.t_m_a {
        let o = r1()?;
        (o.clone(), vec![o], None)
    } else if t_m > th.t_m_b {
        let o = r2()?;
        (o.clone(), vec![o], None)
    } else {
        let (a, b) = (r1()?, r2()?);
        let k = th.interior_count(params.havens());
        let mut set = vec![a.clone(), b.clone()];
        if let Some(k) = k.filter(|&k| k < params.havens()) {
            set.push(outcome_with_committed(k, t_m, params)?);
        }
        let pick = if selection == Selection::Split { b } else { a };
        (pick, set, k)
    };
    Ok(DecentralisedOutcome {
        selection,
        selected,
        set,
        thresholds: Some(th),
        interior_count: interior,
    })
}
