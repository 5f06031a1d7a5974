//! Closed-form subgame-perfect equilibria: regime thresholds, classification and schedules.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    evaluate, HavenGroup, ModelParams, PolicyEnvironment, ProfitResponse, TaxSchedule,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    R0,
    R1,
    R2,
    R3,
    R4,
    R1f,
    R2f,
    /// Decentralised havens: some commit, the rest split.
    #[serde(rename = "Rmix")]
    MixedCommitment,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::R0 => "R0",
            Regime::R1 => "R1",
            Regime::R2 => "R2",
            Regime::R3 => "R3",
            Regime::R4 => "R4",
            Regime::R1f => "R1f",
            Regime::R2f => "R2f",
            Regime::MixedCommitment => "Rmix",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Regime::R0 => "GMT not binding; unconstrained uniform rates",
            Regime::R1 => "non-haven single non-GMT rate, havens single GMT rate",
            Regime::R2 => "non-haven single non-GMT rate, havens split",
            Regime::R3 => "non-haven single GMT rate, havens split",
            Regime::R4 => "both split; small-MNE rates at their unconstrained levels",
            Regime::R1f => "full coverage: non-haven above GMT, havens at GMT",
            Regime::R2f => "full coverage: both at the GMT rate",
            Regime::MixedCommitment => "some havens commit to a single GMT rate, the rest split",
        }
    }

    /// Position along the t_M path; full-coverage regimes share the rank of their analogue.
    pub fn ordinal(self) -> u8 {
        match self {
            Regime::R0 => 0,
            Regime::R1 | Regime::R1f => 2,
            Regime::MixedCommitment => 3,
            Regime::R2 | Regime::R2f => 4,
            Regime::R3 => 6,
            Regime::R4 => 8,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "R0" => Regime::R0,
            "R1" => Regime::R1,
            "R2" => Regime::R2,
            "R3" => Regime::R3,
            "R4" => Regime::R4,
            "R1f" => Regime::R1f,
            "R2f" => Regime::R2f,
            "Rmix" => Regime::MixedCommitment,
            other => return Err(Error::Domain(format!("unknown regime label {other:?}"))),
        })
    }
}

/// Regime-switching and welfare sign-switching GMT rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSet {
    #[serde(rename = "t_M0")]
    pub t_m0: f64,
    #[serde(rename = "t_M1")]
    pub t_m1: f64,
    #[serde(rename = "t_M2")]
    pub t_m2: f64,
    #[serde(rename = "t_M3")]
    pub t_m3: f64,
    #[serde(rename = "t_M_plus")]
    pub t_m_plus: f64,
    #[serde(rename = "t_M_plusplus")]
    pub t_m_plusplus: f64,
    #[serde(rename = "t_Mf")]
    pub t_mf: f64,
}

/// Welfare-relevant aggregates in raw (λ-weighted) units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RawWelfare {
    pub nonhaven: f64,
    pub haven_per_haven: f64,
    pub haven_total: f64,
    pub world: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumOutcome {
    pub regime: Regime,
    pub gmt_rate: f64,
    pub coverage: f64,
    pub nonhaven: TaxSchedule,
    /// Schedule of the representative haven (the committed group when havens differ).
    pub haven: TaxSchedule,
    /// Haven groups; a single group unless havens decided individually.
    pub haven_groups: Vec<HavenGroup>,
    pub theta_small: f64,
    pub theta_large: f64,
    pub shifted_profits_total: f64,
    pub welfare_nonhaven: f64,
    pub welfare_haven_total: f64,
    pub welfare_world: f64,
    pub revenue_nonhaven: f64,
    pub revenue_haven_total: f64,
    /// Realised pre-tax profits.
    pub profits: f64,
    pub raw: RawWelfare,
}

impl EquilibriumOutcome {
    /// Evaluates the objectives at the given schedules and packages the result.
    pub fn from_groups(
        regime: Regime,
        gmt_rate: f64,
        nonhaven: TaxSchedule,
        groups: &[HavenGroup],
        params: &ModelParams,
        law: ProfitResponse,
    ) -> Self {
        let ev = evaluate(&nonhaven, groups, params, law);
        let lambda = params.lambda();
        EquilibriumOutcome {
            regime,
            gmt_rate,
            coverage: params.coverage(),
            nonhaven,
            haven: groups[0].schedule,
            haven_groups: groups.to_vec(),
            theta_small: ev.theta[0][0],
            theta_large: ev.theta[0][1],
            shifted_profits_total: ev.shifted_profits,
            welfare_nonhaven: ev.g_nonhaven / lambda,
            welfare_haven_total: ev.g_haven_total / lambda,
            welfare_world: ev.g_world() / lambda,
            revenue_nonhaven: ev.revenue_nonhaven,
            revenue_haven_total: ev.revenue_haven_total,
            profits: ev.profits,
            raw: RawWelfare {
                nonhaven: ev.g_nonhaven,
                haven_per_haven: ev.g_haven[0],
                haven_total: ev.g_haven_total,
                world: ev.g_world(),
            },
        }
    }

    pub fn symmetric(
        regime: Regime,
        gmt_rate: f64,
        nonhaven: TaxSchedule,
        haven: TaxSchedule,
        params: &ModelParams,
    ) -> Self {
        let group = HavenGroup {
            count: params.havens(),
            schedule: haven,
        };
        Self::from_groups(regime, gmt_rate, nonhaven, &[group], params, ProfitResponse::Fixed)
    }

    pub fn revenue_world(&self) -> f64 {
        self.revenue_nonhaven + self.revenue_haven_total
    }
}

/// Regime-0 rates `(t_n^0, t_h^0)`.
pub fn unconstrained_rates(params: &ModelParams) -> (f64, f64) {
    let (l, d, h) = (params.lambda(), params.delta(), params.h());
    let tn = 2.0 * d * (l - 1.0) / (h * (3.0 * l - 1.0));
    (tn, tn / 2.0)
}

pub fn unconstrained_equilibrium(params: &ModelParams) -> EquilibriumOutcome {
    let (tn, th) = unconstrained_rates(params);
    EquilibriumOutcome::symmetric(
        Regime::R0,
        0.0,
        TaxSchedule::uniform(tn),
        TaxSchedule::uniform(th),
        params,
    )
}

/// Non-haven best response to all havens levying `t_h`.
pub fn best_response_nonhaven_uniform(t_h: f64, params: &ModelParams) -> f64 {
    let (l, d, h) = (params.lambda(), params.delta(), params.h());
    (l - 1.0) * (h * t_h + d) / (h * (2.0 * l - 1.0))
}

/// Haven best response: half the non-haven rate.
pub fn best_response_haven_uniform(t_n: f64) -> f64 {
    t_n / 2.0
}

pub fn regime_thresholds(params: &ModelParams) -> Result<ThresholdSet> {
    let (l, d, h, phi) = (params.lambda(), params.delta(), params.h(), params.coverage());
    let ts = ThresholdSet {
        t_m0: d * (l - 1.0) / (h * (3.0 * l - 1.0)),
        t_m1: d * (l - 1.0) * (2.0 * l - 1.0)
            / (h * (l * (3.0 * l - 1.0) - phi * (l - 1.0).powi(2))),
        t_m2: 2.0 * d * (l - 1.0) / (h * (3.0 * l - 1.0 - phi * (l - 1.0))),
        t_m3: 2.0 * d * (l - 1.0) * (8.0 * l - 3.0)
            / (h * (3.0 * l - 1.0) * (4.0 * l - 1.0)),
        t_m_plus: d * (l - 1.0) * (2.0 * l - 1.0) / (h * l * (3.0 * l - 1.0)),
        t_m_plusplus: d * (l - 1.0) / (2.0 * h * l),
        t_mf: d * (l - 1.0) / (h * l),
    };
    let chains: [(&[(&str, f64)], bool); 3] = [
        (
            &[("t_M0", ts.t_m0), ("t_M1", ts.t_m1), ("t_M2", ts.t_m2), ("t_M3", ts.t_m3)],
            // at φ = 1 the t_M1..t_M3 chain degenerates into the full-coverage path
            phi < 1.0,
        ),
        (
            &[
                ("t_M0", ts.t_m0),
                ("t_M_plusplus", ts.t_m_plusplus),
                ("t_M_plus", ts.t_m_plus),
                ("t_M1", ts.t_m1),
            ],
            true,
        ),
        (&[("t_M1", ts.t_m1), ("t_Mf", ts.t_mf)], true),
    ];
    for (chain, active) in chains {
        if !active {
            continue;
        }
        for w in chain.windows(2) {
            if !(w[0].1 < w[1].1) {
                return Err(Error::ThresholdOrdering(format!(
                    "{} = {} is not below {} = {}",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
    }
    Ok(ts)
}

fn check_rate(t_m: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t_m) {
        return Err(Error::Domain(format!("GMT rate {t_m} outside [0, 1]")));
    }
    Ok(())
}

/// Regime for `t_M` given the closed/open interval pattern; boundaries go to the lower regime
/// except at t_M0, where the GMT starts binding.
pub fn classify_regime(t_m: f64, params: &ModelParams) -> Result<Regime> {
    check_rate(t_m)?;
    let ts = regime_thresholds(params)?;
    Ok(classify_with(t_m, &ts, params.coverage()))
}

pub(crate) fn classify_with(t_m: f64, ts: &ThresholdSet, phi: f64) -> Regime {
    if t_m < ts.t_m0 {
        Regime::R0
    } else if phi >= 1.0 {
        if t_m <= ts.t_mf {
            Regime::R1f
        } else {
            Regime::R2f
        }
    } else if t_m <= ts.t_m1 {
        Regime::R1
    } else if t_m <= ts.t_m2 {
        Regime::R2
    } else if t_m <= ts.t_m3 {
        Regime::R3
    } else {
        Regime::R4
    }
}

/// Closed-form schedules `(non-haven, haven)` of `regime` at `t_M`, whether or not `regime`
/// is the equilibrium there. Used for one-sided limits and derivative checks.
pub fn regime_schedules(
    regime: Regime,
    t_m: f64,
    params: &ModelParams,
) -> Result<(TaxSchedule, TaxSchedule)> {
    let (l, d, h, phi) = (params.lambda(), params.delta(), params.h(), params.coverage());
    let (tn0, th0) = unconstrained_rates(params);
    let (n, hv) = match regime {
        Regime::R0 => ((tn0, tn0), (th0, th0)),
        Regime::R1 | Regime::R1f => {
            let tn = best_response_nonhaven_uniform(t_m, params);
            ((tn, tn), (t_m, t_m))
        }
        Regime::R2 => {
            let tn = 2.0 * (l - 1.0) * (phi * h * t_m + d) / (h * (l * (3.0 + phi) - (1.0 + phi)));
            ((tn, tn), (tn / 2.0, t_m))
        }
        Regime::R2f => ((t_m, t_m), (t_m, t_m)),
        Regime::R3 => ((t_m, t_m), (t_m / 2.0, t_m)),
        Regime::R4 => ((tn0, t_m), (th0, t_m)),
        Regime::MixedCommitment => {
            return Err(Error::Domain(
                "mixed commitment has no representative closed form; see extensions".into(),
            ))
        }
    };
    let make = |(s, l): (f64, f64), who: &str| {
        TaxSchedule::new(s, l).map_err(|_| {
            Error::Domain(format!(
                "closed-form {who} rates ({s}, {l}) of {regime} at t_M = {t_m} leave [0, 1]"
            ))
        })
    };
    Ok((make(n, "non-haven")?, make(hv, "haven")?))
}

/// Outcome of `regime`'s closed forms at `t_M`.
pub fn regime_outcome(regime: Regime, t_m: f64, params: &ModelParams) -> Result<EquilibriumOutcome> {
    let (n, h) = regime_schedules(regime, t_m, params)?;
    Ok(EquilibriumOutcome::symmetric(regime, t_m, n, h, params))
}

/// Subgame-perfect equilibrium at GMT rate `t_M`.
///
/// Fails with a domain error where the interior closed forms would put a rate above 1
/// (possible for δ close to 3H/2 and large λ).
pub fn equilibrium(t_m: f64, params: &ModelParams) -> Result<EquilibriumOutcome> {
    let regime = classify_regime(t_m, params)?;
    regime_outcome(regime, t_m, params)
}

/// Equilibrium under a policy environment (the no-GMT benchmark is Regime 0).
pub fn equilibrium_under(env: &PolicyEnvironment, params: &ModelParams) -> Result<EquilibriumOutcome> {
    if env.gmt_applies {
        equilibrium(env.gmt_rate, params)
    } else {
        Ok(unconstrained_equilibrium(params))
    }
}
