//! Welfare effects of introducing and raising the GMT, jump terms at regime switches, and
//! coverage effects. Everything returned here is in reporting units (G/λ, billion USD).

use serde::Serialize;

use crate::equilibrium::{
    classify_regime, equilibrium, regime_outcome, regime_thresholds, unconstrained_equilibrium,
    EquilibriumOutcome, Regime, ThresholdSet,
};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::central_difference;

/// Predicted sign of an effect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
    Zero,
    /// No sign is claimed here.
    Unclaimed,
}

impl Sign {
    /// Whether `x` is consistent with the sign, allowing `tol` slack around zero.
    pub fn admits(self, x: f64, tol: f64) -> bool {
        match self {
            Sign::Positive => x > 0.0 || x > -tol && tol > 0.0,
            Sign::Negative => x < 0.0 || x < tol && tol > 0.0,
            Sign::Zero => x.abs() <= tol,
            Sign::Unclaimed => true,
        }
    }
}

/// Per-group values: non-haven, all havens together, world.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupValues {
    pub nonhaven: f64,
    pub haven_total: f64,
    pub world: f64,
}

impl GroupValues {
    fn raw(nonhaven: f64, haven_total: f64, world: f64, lambda: f64) -> Self {
        GroupValues {
            nonhaven: nonhaven / lambda,
            haven_total: haven_total / lambda,
            world: world / lambda,
        }
    }

    pub fn welfare_of(eq: &EquilibriumOutcome) -> Self {
        GroupValues {
            nonhaven: eq.welfare_nonhaven,
            haven_total: eq.welfare_haven_total,
            world: eq.welfare_world,
        }
    }

    pub fn revenue_of(eq: &EquilibriumOutcome) -> Self {
        GroupValues {
            nonhaven: eq.revenue_nonhaven,
            haven_total: eq.revenue_haven_total,
            world: eq.revenue_world(),
        }
    }

    pub fn minus(&self, o: &GroupValues) -> Self {
        GroupValues {
            nonhaven: self.nonhaven - o.nonhaven,
            haven_total: self.haven_total - o.haven_total,
            world: self.world - o.world,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.nonhaven, self.haven_total, self.world]
    }

    /// `world − (nonhaven + haven_total)`, relative to the largest magnitude.
    pub fn additivity_gap(&self) -> f64 {
        let scale = self.as_array().iter().fold(1e-300_f64, |a, b| a.max(b.abs()));
        (self.world - self.nonhaven - self.haven_total).abs() / scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WelfareDelta {
    pub d_nonhaven: f64,
    pub d_haven_total: f64,
    pub d_world: f64,
    /// Predicted signs (non-haven, havens, world).
    pub signs: [Sign; 3],
    /// Whether the sign claims apply, i.e. φ ∈ (3/4, 1).
    pub applicable: bool,
}

/// The introduction hypothesis: coverage strictly between 3/4 and 1.
pub fn introduction_claims_apply(params: &ModelParams) -> bool {
    params.coverage() > 0.75 && params.coverage() < 1.0
}

/// Welfare change from Regime 0 to the equilibrium at `t_M`.
pub fn introduction_effects(t_m: f64, params: &ModelParams) -> Result<WelfareDelta> {
    let ts = regime_thresholds(params)?;
    if t_m < ts.t_m0 {
        return Err(Error::Domain(format!(
            "t_M = {t_m} is below t_M0 = {}: the GMT does not bind",
            ts.t_m0
        )));
    }
    let d = GroupValues::welfare_of(&equilibrium(t_m, params)?)
        .minus(&GroupValues::welfare_of(&unconstrained_equilibrium(params)));
    let applicable = introduction_claims_apply(params);
    let haven = if !applicable {
        Sign::Unclaimed
    } else if t_m < ts.t_m_plus {
        Sign::Positive
    } else {
        Sign::Negative
    };
    Ok(WelfareDelta {
        d_nonhaven: d.nonhaven,
        d_haven_total: d.haven_total,
        d_world: d.world,
        signs: [Sign::Positive, haven, Sign::Positive],
        applicable,
    })
}

/// Regime-1 introduction effects from their factored closed forms (G/λ).
pub fn introduction_r1_closed_form(t_m: f64, params: &ModelParams) -> GroupValues {
    let (l, d, h, pi) = (params.lambda(), params.delta(), params.h(), params.total_profits());
    let k = h * t_m * (3.0 * l - 1.0) - d * (l - 1.0);
    let den = d * h * (2.0 * l - 1.0) * (3.0 * l - 1.0).powi(2);
    let n = k * (h * t_m * l * l * (3.0 * l - 1.0) + d * (l - 1.0) * (7.0 * l * l - 8.0 * l + 2.0))
        / (2.0 * den);
    let hv = l * k * (d * (l - 1.0) * (2.0 * l - 1.0) - h * t_m * l * (3.0 * l - 1.0)) / den;
    let w = k * (d * (l - 1.0) * (11.0 * l * l - 10.0 * l + 2.0) - h * t_m * l * l * (3.0 * l - 1.0))
        / (2.0 * den);
    GroupValues::raw(n * pi, hv * pi, w * pi, l)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginalEffects {
    pub regime: Regime,
    pub derivative: GroupValues,
    pub signs: [Sign; 3],
}

fn switching_rates(ts: &ThresholdSet, phi: f64) -> Vec<(&'static str, f64)> {
    if phi >= 1.0 {
        vec![("t_M0", ts.t_m0), ("t_Mf", ts.t_mf)]
    } else {
        vec![("t_M0", ts.t_m0), ("t_M1", ts.t_m1), ("t_M2", ts.t_m2), ("t_M3", ts.t_m3)]
    }
}

fn refuse_switch(t_m: f64, ts: &ThresholdSet, phi: f64) -> Result<()> {
    for (name, x) in switching_rates(ts, phi) {
        if (t_m - x).abs() <= 1e-12 * x.max(1.0) {
            return Err(Error::AtSwitchingRate { t_m, threshold: name });
        }
    }
    Ok(())
}

/// Analytic dG/dt_M of `regime`'s closed forms at `t_M` (G/λ), regardless of whether `regime`
/// is the equilibrium there.
pub fn regime_rate_derivative(regime: Regime, t_m: f64, params: &ModelParams) -> Result<GroupValues> {
    let (l, d, h, phi, pi) = (
        params.lambda(),
        params.delta(),
        params.h(),
        params.coverage(),
        params.total_profits(),
    );
    let t = t_m;
    let (n, hv) = match regime {
        Regime::R0 => (0.0, 0.0),
        Regime::R1 | Regime::R1f => (
            (h * l * l * t + d * (l - 1.0).powi(2)) / (d * (2.0 * l - 1.0)),
            l * (d * (l - 1.0) - 2.0 * h * l * t) / (d * (2.0 * l - 1.0)),
        ),
        Regime::R2 => {
            let dd = l * (3.0 + phi) - (1.0 + phi);
            let dd2 = d * dd * dd;
            (
                phi * (h * t * (phi * (l - 1.0) * (8.0 * l * l - 5.0 * l + 1.0) + (3.0 * l - 1.0).powi(2))
                    + d * (l - 1.0).powi(2) * (8.0 * l - 3.0 - phi))
                    / dd2,
                2.0 * l * phi
                    * (2.0 * d * (l - 1.0) * (2.0 * l - 1.0)
                        - h * t * ((3.0 * l - 1.0).powi(2) - phi * (l - 1.0).powi(2)))
                    / dd2,
            )
        }
        Regime::R2f => (l - 1.0, 0.0),
        Regime::R3 => (
            (4.0 * d * (l - 1.0) - h * t * (1.0 - phi) * (4.0 * l - 1.0)) / (4.0 * d),
            h * l * t * (1.0 - phi) / (2.0 * d),
        ),
        Regime::R4 => ((l - 1.0) * phi, 0.0),
        Regime::MixedCommitment => {
            return Err(Error::Domain("no closed-form derivative for mixed commitment".into()))
        }
    };
    Ok(GroupValues::raw(n * pi, hv * pi, (n + hv) * pi, l))
}

/// Marginal effect of raising `t_M` on equilibrium welfare.
pub fn marginal_rate_effects(t_m: f64, params: &ModelParams) -> Result<MarginalEffects> {
    let ts = regime_thresholds(params)?;
    refuse_switch(t_m, &ts, params.coverage())?;
    let regime = classify_regime(t_m, params)?;
    let derivative = regime_rate_derivative(regime, t_m, params)?;
    let haven = match regime {
        Regime::R0 | Regime::R4 | Regime::R2f => Sign::Zero,
        Regime::R1 | Regime::R1f if t_m < ts.t_m_plusplus => Sign::Positive,
        Regime::R1 | Regime::R1f if t_m == ts.t_m_plusplus => Sign::Zero,
        Regime::R1 | Regime::R1f | Regime::R2 => Sign::Negative,
        Regime::R3 => Sign::Positive,
        Regime::MixedCommitment => Sign::Unclaimed,
    };
    let other = if regime == Regime::R0 { Sign::Zero } else { Sign::Positive };
    Ok(MarginalEffects {
        regime,
        derivative,
        signs: [other, haven, other],
    })
}

/// Welfare discontinuities `G(above) − G(below)` at the switching rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwitchJumps {
    pub at_t_m1: GroupValues,
    pub at_t_m2: GroupValues,
    pub at_t_m3: GroupValues,
}

pub fn regime_switch_jumps(params: &ModelParams) -> Result<SwitchJumps> {
    let phi = params.coverage();
    if !(phi < 1.0) {
        return Err(Error::Domain("jump terms need coverage below 1".into()));
    }
    let (l, d, h, pi) = (params.lambda(), params.delta(), params.h(), params.total_profits());
    let x = l * (3.0 * l - 1.0) * (3.0 * l - 2.0) - phi * (l - 1.0).powi(3);
    let y = l * (3.0 * l - 1.0) - phi * (l - 1.0).powi(2);
    let j1 = -d * (l - 1.0).powi(3) * x * (1.0 - phi) * pi / (2.0 * h * (2.0 * l - 1.0) * y * y);
    let j3 = -8.0 * d * l * (l - 1.0).powi(2) * (2.0 * l - 1.0) * (1.0 - phi) * pi
        / (h * (3.0 * l - 1.0) * (4.0 * l - 1.0).powi(2));
    Ok(SwitchJumps {
        at_t_m1: GroupValues::raw(j1, 0.0, j1, l),
        at_t_m2: GroupValues::raw(0.0, 0.0, 0.0, l),
        at_t_m3: GroupValues::raw(0.0, j3, j3, l),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageEffects {
    pub regime: Regime,
    /// `None` when a small change in φ would itself switch the regime.
    pub derivative: Option<GroupValues>,
    pub regime_switch: bool,
    pub signs: [Sign; 3],
}

/// Analytic dG/dφ of `regime`'s closed forms (G/λ).
pub fn regime_coverage_derivative(regime: Regime, t_m: f64, params: &ModelParams) -> Result<GroupValues> {
    let (l, d, h, phi, pi) = (
        params.lambda(),
        params.delta(),
        params.h(),
        params.coverage(),
        params.total_profits(),
    );
    let t = t_m;
    let (n, hv, w) = match regime {
        Regime::R0 | Regime::R1 | Regime::R1f => (0.0, 0.0, 0.0),
        Regime::R2 => {
            let k = h * t * (3.0 * l - 1.0) - d * (l - 1.0);
            let dd3 = (3.0 * l - 1.0 + phi * (l - 1.0)).powi(3);
            let th_n = phi * (h * t * (l - 1.0) * (16.0 * l * l - 13.0 * l + 3.0) - d * (l - 1.0).powi(2))
                + h * t * (3.0 * l - 1.0).powi(2)
                + d * (l - 1.0) * (16.0 * l * l - 19.0 * l + 5.0);
            let th_h = phi * (h * t * (l - 1.0) * (5.0 * l - 3.0) - d * (l - 1.0).powi(2))
                - h * t * (3.0 * l - 1.0).powi(2)
                + d * (l - 1.0) * (5.0 * l - 3.0);
            let th_w = phi
                * (h * t * (l - 1.0) * (2.0 * l - 1.0) * (13.0 * l - 3.0)
                    - d * (l - 1.0).powi(2) * (2.0 * l + 1.0))
                - h * t * (3.0 * l - 1.0).powi(2) * (2.0 * l - 1.0)
                + d * (l - 1.0) * (26.0 * l * l - 25.0 * l + 5.0);
            (
                th_n * k / (2.0 * d * h * dd3),
                l * th_h * k / (d * h * dd3),
                th_w * k / (2.0 * d * h * dd3),
            )
        }
        Regime::R3 => (
            h * (4.0 * l - 1.0) * t * t / (8.0 * d),
            -h * l * t * t / (4.0 * d),
            h * (2.0 * l - 1.0) * t * t / (8.0 * d),
        ),
        Regime::R4 => {
            let den = 2.0 * h * (3.0 * l - 1.0).powi(2);
            let a = 2.0 * h * t * (3.0 * l - 1.0).powi(2);
            (
                (l - 1.0) * (a - d * (l - 1.0) * (8.0 * l - 3.0)) / den,
                -2.0 * d * l * (l - 1.0).powi(2) / den,
                (l - 1.0) * (a - d * (l - 1.0) * (10.0 * l - 3.0)) / den,
            )
        }
        Regime::R2f | Regime::MixedCommitment => {
            return Err(Error::Domain(format!("no coverage derivative for {regime}")))
        }
    };
    Ok(GroupValues::raw(n * pi, hv * pi, w * pi, l))
}

/// Marginal effect of raising coverage φ on equilibrium welfare at fixed `t_M`.
pub fn marginal_coverage_effects(t_m: f64, params: &ModelParams) -> Result<CoverageEffects> {
    let phi = params.coverage();
    if !(phi < 1.0) {
        return Err(Error::Domain("coverage effects need φ < 1".into()));
    }
    let ts = regime_thresholds(params)?;
    refuse_switch(t_m, &ts, phi)?;
    let regime = classify_regime(t_m, params)?;
    let eps = 1e-6_f64.min(0.5 * phi).min(0.5 * (1.0 - phi));
    let switches = [phi - eps, phi + eps].iter().any(|&p| {
        params
            .with_coverage(p)
            .and_then(|q| classify_regime(t_m, &q))
            .map_or(true, |r| r != regime)
    });
    let signs = match regime {
        Regime::R0 | Regime::R1 => [Sign::Zero; 3],
        _ => [Sign::Positive, Sign::Negative, Sign::Positive],
    };
    let derivative = if switches {
        None
    } else {
        Some(regime_coverage_derivative(regime, t_m, params)?)
    };
    Ok(CoverageEffects {
        regime,
        derivative,
        regime_switch: switches,
        signs,
    })
}

/// Partial-coverage equilibrium against its full-coverage counterpart at the same `t_M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageComparison {
    pub partial: EquilibriumOutcome,
    pub full: EquilibriumOutcome,
    /// full − partial
    pub welfare_gap: GroupValues,
    pub revenue_gap: GroupValues,
    pub shifted_gap: f64,
}

pub fn full_coverage_comparison(t_m: f64, params: &ModelParams) -> Result<CoverageComparison> {
    let partial = equilibrium(t_m, params)?;
    let full = equilibrium(t_m, &params.with_coverage(1.0)?)?;
    Ok(CoverageComparison {
        welfare_gap: GroupValues::welfare_of(&full).minus(&GroupValues::welfare_of(&partial)),
        revenue_gap: GroupValues::revenue_of(&full).minus(&GroupValues::revenue_of(&partial)),
        shifted_gap: full.shifted_profits_total - partial.shifted_profits_total,
        partial,
        full,
    })
}

/// Central finite difference in `t_M` of `regime`'s welfare (G/λ).
pub fn finite_difference_rate(regime: Regime, t_m: f64, params: &ModelParams, step: f64) -> Result<GroupValues> {
    // validate once so the closures can unwrap
    regime_outcome(regime, t_m, params)?;
    let at = |t: f64, k: usize| {
        regime_outcome(regime, t.clamp(0.0, 1.0), params)
            .map(|e| GroupValues::welfare_of(&e).as_array()[k])
            .unwrap_or(f64::NAN)
    };
    let v: Vec<f64> = (0..3).map(|k| central_difference(|t| at(t, k), t_m, step)).collect();
    Ok(GroupValues {
        nonhaven: v[0],
        haven_total: v[1],
        world: v[2],
    })
}

/// Central finite difference in φ of `regime`'s welfare (G/λ).
pub fn finite_difference_coverage(regime: Regime, t_m: f64, params: &ModelParams, step: f64) -> Result<GroupValues> {
    regime_outcome(regime, t_m, params)?;
    let at = |phi: f64, k: usize| {
        params
            .with_coverage(phi)
            .and_then(|q| regime_outcome(regime, t_m, &q))
            .map(|e| GroupValues::welfare_of(&e).as_array()[k])
            .unwrap_or(f64::NAN)
    };
    let v: Vec<f64> = (0..3)
        .map(|k| central_difference(|p| at(p, k), params.coverage(), step))
        .collect();
    Ok(GroupValues {
        nonhaven: v[0],
        haven_total: v[1],
        world: v[2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::regime_outcome;

    fn calibrated() -> ModelParams {
        ModelParams::new(2.1, 17.8, 40, 0.9, 4623.0).unwrap()
    }

    #[test]
    fn calibrated_introduction_effects() {
        let a = introduction_effects(0.15, &calibrated()).unwrap();
        assert!((a.d_nonhaven - 95.6).abs() < 0.1);
        assert!((a.d_haven_total + 3.6).abs() < 0.1);
        assert!((a.d_world - 92.0).abs() < 0.1);
        assert!(a.applicable);
        assert_eq!(a.signs[1], Sign::Negative);
        let b = introduction_effects(0.16, &calibrated()).unwrap();
        assert!((b.d_nonhaven - 104.4).abs() < 0.1);
        assert!((b.d_haven_total + 8.8).abs() < 0.1);
        assert!((b.d_world - 95.6).abs() < 0.1);
        assert!(introduction_effects(0.05, &calibrated()).is_err());
    }

    #[test]
    fn introduction_vanishes_at_binding_point() {
        let p = calibrated();
        let t0 = regime_thresholds(&p).unwrap().t_m0;
        let d = introduction_effects(t0, &p).unwrap();
        for x in [d.d_nonhaven, d.d_haven_total, d.d_world] {
            assert!(x.abs() < 1e-9, "{x}");
        }
    }

    #[test]
    fn r1_closed_form_matches_evaluation() {
        let p = calibrated();
        for t in [0.1, 0.12, 0.15] {
            let d = introduction_effects(t, &p).unwrap();
            let c = introduction_r1_closed_form(t, &p);
            assert!((d.d_nonhaven - c.nonhaven).abs() < 1e-9);
            assert!((d.d_haven_total - c.haven_total).abs() < 1e-9);
            assert!((d.d_world - c.world).abs() < 1e-9);
        }
    }

    #[test]
    fn low_coverage_makes_no_haven_claim() {
        let p = calibrated().with_coverage(0.5).unwrap();
        let d = introduction_effects(0.15, &p).unwrap();
        assert!(!d.applicable);
        assert_eq!(d.signs[1], Sign::Unclaimed);
    }

    #[test]
    fn r4_haven_derivative_is_zero_and_r1_root_at_plusplus() {
        let p = ModelParams::new(2.0, 1.0, 1, 0.9, 1.0).unwrap();
        let m = marginal_rate_effects(0.8, &p).unwrap();
        assert_eq!(m.regime, Regime::R4);
        assert_eq!(m.derivative.haven_total, 0.0);
        let ts = regime_thresholds(&p).unwrap();
        let d = regime_rate_derivative(Regime::R1, ts.t_m_plusplus, &p).unwrap();
        assert!(d.haven_total.abs() < 1e-15);
    }

    #[test]
    fn derivative_refused_at_switch() {
        let p = calibrated();
        let ts = regime_thresholds(&p).unwrap();
        assert!(matches!(
            marginal_rate_effects(ts.t_m1, &p),
            Err(Error::AtSwitchingRate { threshold: "t_M1", .. })
        ));
        assert!(marginal_coverage_effects(ts.t_m3, &p).is_err());
    }

    #[test]
    fn jumps_match_two_sided_limits() {
        for p in [calibrated(), ModelParams::new(2.0, 1.0, 1, 0.9, 1.0).unwrap()] {
            let ts = regime_thresholds(&p).unwrap();
            let j = regime_switch_jumps(&p).unwrap();
            let e = 1e-8;
            let scale = p.total_profits();
            for (t, below, above, jump) in [
                (ts.t_m1, Regime::R1, Regime::R2, j.at_t_m1),
                (ts.t_m2, Regime::R2, Regime::R3, j.at_t_m2),
                (ts.t_m3, Regime::R3, Regime::R4, j.at_t_m3),
            ] {
                if t + e > 1.0 {
                    continue;
                }
                let lo = GroupValues::welfare_of(&equilibrium(t - e, &p).unwrap());
                let hi = GroupValues::welfare_of(&equilibrium(t + e, &p).unwrap());
                assert_eq!(equilibrium(t - e, &p).unwrap().regime, below);
                assert_eq!(equilibrium(t + e, &p).unwrap().regime, above);
                let got = hi.minus(&lo);
                for (a, b) in got.as_array().iter().zip(jump.as_array()) {
                    assert!((a - b).abs() < 1e-6 * scale, "{a} vs {b} at {t}");
                }
                // exact one-sided closed forms at the switching rate
                let exact = GroupValues::welfare_of(&regime_outcome(above, t, &p).unwrap())
                    .minus(&GroupValues::welfare_of(&regime_outcome(below, t, &p).unwrap()));
                for (a, b) in exact.as_array().iter().zip(jump.as_array()) {
                    assert!((a - b).abs() <= 1e-9 * scale.max(b.abs()), "{a} vs {b}");
                }
            }
            assert!(j.at_t_m1.nonhaven < 0.0 && j.at_t_m1.haven_total == 0.0);
            assert!(j.at_t_m3.haven_total < 0.0 && j.at_t_m3.nonhaven == 0.0);
            assert_eq!(j.at_t_m3.world, j.at_t_m3.haven_total);
        }
    }

    #[test]
    fn unit_jump_at_t3() {
        // λ=2, δ=1, H=1, φ=0.9: −8·2·3·0.1/(5·49), divided by λ
        let j = regime_switch_jumps(&ModelParams::new(2.0, 1.0, 1, 0.9, 1.0).unwrap()).unwrap();
        assert!((j.at_t_m3.world + 4.8 / 245.0 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn r1_coverage_effects_vanish_and_r3_haven_form() {
        let p = calibrated();
        let c = marginal_coverage_effects(0.12, &p).unwrap();
        assert_eq!(c.derivative.unwrap().as_array(), [0.0; 3]);
        let q = ModelParams::new(2.0, 1.0, 1, 0.9, 1.0).unwrap();
        let c = marginal_coverage_effects(0.6, &q).unwrap();
        assert_eq!(c.regime, Regime::R3);
        // per-haven −λt²Π/(4δ) with H = 1, reported over λ
        assert!((c.derivative.unwrap().haven_total + 0.36 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn coverage_switch_is_flagged() {
        let p = calibrated();
        let t1 = regime_thresholds(&p).unwrap().t_m1;
        let c = marginal_coverage_effects(t1 + 1e-9, &p).unwrap();
        assert!(c.regime_switch && c.derivative.is_none());
    }

    #[test]
    fn full_coverage_gap() {
        let p = calibrated();
        let c = full_coverage_comparison(0.16, &p).unwrap();
        assert!((c.revenue_gap.world - 16.0).abs() < 0.1, "{}", c.revenue_gap.world);
        let same = full_coverage_comparison(0.15, &p).unwrap();
        assert_eq!(same.partial.nonhaven, same.full.nonhaven);
        assert!(same.welfare_gap.world.abs() < 1e-9);
        let low = full_coverage_comparison(0.05, &p).unwrap();
        assert_eq!(low.partial.nonhaven, low.full.nonhaven);
    }

    #[test]
    fn derivatives_match_finite_differences_at_calibrated_point() {
        let p = calibrated();
        for t in [0.12, 0.17, 0.25, 0.4, 0.6] {
            let Ok(m) = marginal_rate_effects(t, &p) else { continue };
            let fd = finite_difference_rate(m.regime, t, &p, 1e-6).unwrap();
            for (a, b) in m.derivative.as_array().iter().zip(fd.as_array()) {
                assert!((a - b).abs() <= 1e-4 * a.abs().max(1e-6 * p.total_profits()), "{t}: {a} vs {b}");
            }
        }
    }
}
