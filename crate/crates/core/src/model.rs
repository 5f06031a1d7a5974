//! Parameters, tax schedules, the firms' shifting rule and the three welfare objectives.
//!
//! All objectives are *raw* (λ-weighted) values; reports divide by λ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Most haven groups an evaluation distinguishes (committed vs split havens).
pub const MAX_GROUPS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct ModelParams {
    lambda: f64,
    delta: f64,
    havens: u32,
    coverage: f64,
    total_profits: f64,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    lambda: f64,
    delta: f64,
    havens: u32,
    coverage: f64,
    total_profits: f64,
}

impl TryFrom<RawParams> for ModelParams {
    type Error = Error;
    fn try_from(r: RawParams) -> Result<Self> {
        ModelParams::new(r.lambda, r.delta, r.havens, r.coverage, r.total_profits)
    }
}

impl From<ModelParams> for RawParams {
    fn from(p: ModelParams) -> Self {
        RawParams {
            lambda: p.lambda,
            delta: p.delta,
            havens: p.havens,
            coverage: p.coverage,
            total_profits: p.total_profits,
        }
    }
}

impl ModelParams {
    pub fn new(
        lambda: f64,
        delta: f64,
        havens: u32,
        coverage: f64,
        total_profits: f64,
    ) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 1.0) {
            return Err(Error::param("lambda", format!("must be > 1, got {lambda}")));
        }
        if havens < 1 {
            return Err(Error::param("havens", "need at least one haven"));
        }
        let upper = 1.5 * havens as f64;
        if !(delta.is_finite() && delta > 0.0 && delta < upper) {
            return Err(Error::param(
                "delta",
                format!("must lie in (0, 3H/2) = (0, {upper}), got {delta}"),
            ));
        }
        if !(coverage > 0.0 && coverage <= 1.0) {
            return Err(Error::param(
                "coverage",
                format!("must lie in (0, 1], got {coverage}"),
            ));
        }
        if !(total_profits.is_finite() && total_profits > 0.0) {
            return Err(Error::param(
                "total_profits",
                format!("must be > 0, got {total_profits}"),
            ));
        }
        Ok(ModelParams {
            lambda,
            delta,
            havens,
            coverage,
            total_profits,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn havens(&self) -> u32 {
        self.havens
    }
    /// H as a float, for formulas.
    pub fn h(&self) -> f64 {
        self.havens as f64
    }
    pub fn coverage(&self) -> f64 {
        self.coverage
    }
    pub fn total_profits(&self) -> f64 {
        self.total_profits
    }

    pub fn with_coverage(&self, coverage: f64) -> Result<Self> {
        Self::new(self.lambda, self.delta, self.havens, coverage, self.total_profits)
    }
    pub fn with_total_profits(&self, total_profits: f64) -> Result<Self> {
        Self::new(self.lambda, self.delta, self.havens, self.coverage, total_profits)
    }
    pub fn with_lambda_delta(&self, lambda: f64, delta: f64) -> Result<Self> {
        Self::new(lambda, delta, self.havens, self.coverage, self.total_profits)
    }
}

/// Rates a country levies on MNEs below and at/above the GMT size threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaxSchedule {
    pub small_rate: f64,
    pub large_rate: f64,
}

impl TaxSchedule {
    pub fn new(small_rate: f64, large_rate: f64) -> Result<Self> {
        for (field, r) in [("small_rate", small_rate), ("large_rate", large_rate)] {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::param(field, format!("rate {r} outside [0, 1]")));
            }
        }
        Ok(TaxSchedule {
            small_rate,
            large_rate,
        })
    }

    pub fn uniform(rate: f64) -> Self {
        TaxSchedule {
            small_rate: rate,
            large_rate: rate,
        }
    }

    pub fn is_uniform(&self) -> bool {
        self.small_rate == self.large_rate
    }

    /// Rate applying to segment 0 (small) or 1 (large).
    pub fn rate(&self, segment: usize) -> f64 {
        if segment == 0 {
            self.small_rate
        } else {
            self.large_rate
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyEnvironment {
    pub gmt_rate: f64,
    pub gmt_applies: bool,
}

impl PolicyEnvironment {
    pub fn new(gmt_rate: f64, gmt_applies: bool) -> Result<Self> {
        if !(0.0..=1.0).contains(&gmt_rate) {
            return Err(Error::param("gmt_rate", format!("{gmt_rate} outside [0, 1]")));
        }
        Ok(PolicyEnvironment {
            gmt_rate,
            gmt_applies,
        })
    }

    /// The no-GMT benchmark.
    pub fn none() -> Self {
        PolicyEnvironment {
            gmt_rate: 0.0,
            gmt_applies: false,
        }
    }

    /// Effective floor on large-MNE rates (0 without a GMT).
    pub fn floor(&self) -> f64 {
        if self.gmt_applies {
            self.gmt_rate
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegmentOutcome {
    pub theta_per_haven: f64,
    pub retained_share: f64,
    pub segment_weight: f64,
}

/// How realised pre-tax profits respond to the non-haven's rate.
///
/// With `Fixed`, `total_profits` is Π itself; otherwise it is the no-tax level Π^b.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfitResponse {
    #[default]
    Fixed,
    /// Π^b / (1 + t_n)
    Inverse,
    /// Π^b · (1 − t_n)
    Linear,
}

impl ProfitResponse {
    pub fn factor(self, t_n: f64) -> f64 {
        match self {
            ProfitResponse::Fixed => 1.0,
            ProfitResponse::Inverse => 1.0 / (1.0 + t_n),
            ProfitResponse::Linear => 1.0 - t_n,
        }
    }
}

/// A set of `count` havens that all levy the same schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HavenGroup {
    pub count: u32,
    pub schedule: TaxSchedule,
}

/// Everything the objectives need, evaluated once for a rate profile.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Evaluation {
    /// Raw non-haven objective G_n.
    pub g_nonhaven: f64,
    /// Raw objective of one haven in each group.
    pub g_haven: [f64; MAX_GROUPS],
    /// Σ over havens of G_h.
    pub g_haven_total: f64,
    pub revenue_nonhaven: f64,
    pub revenue_haven_total: f64,
    pub private_income: f64,
    pub shifted_profits: f64,
    /// Realised pre-tax profits (Π under `Fixed`).
    pub profits: f64,
    /// Per-haven shifting share in each segment, for each group.
    pub theta: [[f64; 2]; MAX_GROUPS],
}

impl Evaluation {
    pub fn g_world(&self) -> f64 {
        self.g_nonhaven + self.g_haven_total
    }
}

/// Optimal per-haven shifting share, `max(0, (t_n − t_h)/δ)`.
pub fn shifting_share(t_n: f64, t_h: f64, delta: f64) -> Result<f64> {
    Ok(shifting_share_unclamped(t_n, t_h, delta)?.max(0.0))
}

/// `(t_n − t_h)/δ` without the no-reverse-shifting clamp.
pub fn shifting_share_unclamped(t_n: f64, t_h: f64, delta: f64) -> Result<f64> {
    if !(t_n.is_finite() && t_h.is_finite() && delta.is_finite()) {
        return Err(Error::Domain("non-finite shifting-share input".into()));
    }
    if delta <= 0.0 {
        return Err(Error::Domain(format!("delta must be > 0, got {delta}")));
    }
    Ok((t_n - t_h) / delta)
}

/// Per-haven shares for each group; if firms would shift more than all their profit, the
/// adding-up constraint binds and a common shadow cost `mu` is subtracted.
fn group_shares(t_n: f64, rates: &[(u32, f64)], delta: f64, out: &mut [f64; MAX_GROUPS]) {
    let share = |mu: f64, t_h: f64| ((t_n - t_h - mu) / delta).max(0.0);
    let total = |mu: f64| -> f64 { rates.iter().map(|&(c, t)| c as f64 * share(mu, t)).sum() };
    let mut mu = 0.0;
    if total(0.0) > 1.0 {
        let (mut lo, mut hi) = (0.0, t_n + 1.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if total(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        mu = hi;
    }
    for (i, &(_, t)) in rates.iter().enumerate() {
        out[i] = share(mu, t);
    }
}

/// One segment's contribution to the objectives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SegmentEval {
    pub g_nonhaven: f64,
    /// Raw objective of one haven in each group, from this segment.
    pub g_haven: [f64; MAX_GROUPS],
    pub revenue_nonhaven: f64,
    pub revenue_haven_total: f64,
    pub private_income: f64,
    pub shifted_profits: f64,
    pub profits: f64,
    pub theta: [f64; MAX_GROUPS],
}

/// Objectives restricted to segment `seg` (0 small, 1 large) with non-haven rate `t_n` and
/// `(count, rate)` per haven group.
pub fn evaluate_segment(
    seg: usize,
    t_n: f64,
    rates: &[(u32, f64)],
    params: &ModelParams,
    law: ProfitResponse,
) -> SegmentEval {
    let weight = if seg == 0 {
        1.0 - params.coverage
    } else {
        params.coverage
    };
    let mut out = SegmentEval::default();
    if weight == 0.0 {
        return out;
    }
    let lambda = params.lambda;
    let delta = params.delta;
    let profits = weight * params.total_profits * law.factor(t_n);
    group_shares(t_n, rates, delta, &mut out.theta);

    let mut shifted = 0.0;
    let mut private = 0.0;
    for (i, &(count, t_h)) in rates.iter().enumerate() {
        let c = count as f64;
        let th = out.theta[i];
        shifted += c * th;
        private += c * ((1.0 - t_h) * th - 0.5 * delta * th * th);
        let per_haven = t_h * th * profits;
        out.g_haven[i] = lambda * per_haven;
        out.revenue_haven_total += c * per_haven;
    }
    let retained = 1.0 - shifted;
    private += (1.0 - t_n) * retained;
    out.private_income = private * profits;
    out.revenue_nonhaven = t_n * retained * profits;
    out.g_nonhaven = out.private_income + lambda * out.revenue_nonhaven;
    out.shifted_profits = shifted * profits;
    out.profits = profits;
    out
}

/// Evaluates all objectives for a non-haven schedule against haven groups.
///
/// Group counts should add up to H.
pub fn evaluate(
    nonhaven: &TaxSchedule,
    groups: &[HavenGroup],
    params: &ModelParams,
    law: ProfitResponse,
) -> Evaluation {
    assert!(groups.len() <= MAX_GROUPS, "at most {MAX_GROUPS} haven groups");
    debug_assert_eq!(
        groups.iter().map(|g| g.count).sum::<u32>(),
        params.havens,
        "haven groups must cover all havens"
    );
    let mut ev = Evaluation::default();
    for seg in 0..2 {
        let mut rates = [(0u32, 0.0); MAX_GROUPS];
        for (i, g) in groups.iter().enumerate() {
            rates[i] = (g.count, g.schedule.rate(seg));
        }
        let se = evaluate_segment(seg, nonhaven.rate(seg), &rates[..groups.len()], params, law);
        ev.g_nonhaven += se.g_nonhaven;
        for i in 0..MAX_GROUPS {
            ev.g_haven[i] += se.g_haven[i];
            ev.theta[i][seg] = se.theta[i];
        }
        ev.revenue_nonhaven += se.revenue_nonhaven;
        ev.revenue_haven_total += se.revenue_haven_total;
        ev.private_income += se.private_income;
        ev.shifted_profits += se.shifted_profits;
        ev.profits += se.profits;
    }
    ev.g_haven_total = params.lambda * ev.revenue_haven_total;
    ev
}

/// Evaluation with every haven levying `haven`.
pub fn evaluate_symmetric(
    nonhaven: &TaxSchedule,
    haven: &TaxSchedule,
    params: &ModelParams,
    law: ProfitResponse,
) -> Evaluation {
    let group = HavenGroup {
        count: params.havens,
        schedule: *haven,
    };
    evaluate(nonhaven, &[group], params, law)
}

/// Raw G_n.
pub fn nonhaven_objective(nonhaven: &TaxSchedule, haven: &TaxSchedule, params: &ModelParams) -> f64 {
    evaluate_symmetric(nonhaven, haven, params, ProfitResponse::Fixed).g_nonhaven
}

/// Raw G_h of a single (representative) haven.
pub fn haven_objective(nonhaven: &TaxSchedule, haven: &TaxSchedule, params: &ModelParams) -> f64 {
    evaluate_symmetric(nonhaven, haven, params, ProfitResponse::Fixed).g_haven[0]
}

/// Raw G_W = G_n + H·G_h.
pub fn world_objective(nonhaven: &TaxSchedule, haven: &TaxSchedule, params: &ModelParams) -> f64 {
    evaluate_symmetric(nonhaven, haven, params, ProfitResponse::Fixed).g_world()
}

/// Per-segment shifting outcome (small segment first).
pub fn segment_outcomes(
    nonhaven: &TaxSchedule,
    haven: &TaxSchedule,
    params: &ModelParams,
) -> [SegmentOutcome; 2] {
    let ev = evaluate_symmetric(nonhaven, haven, params, ProfitResponse::Fixed);
    let w = [1.0 - params.coverage, params.coverage];
    [0, 1].map(|s| SegmentOutcome {
        theta_per_haven: ev.theta[0][s],
        retained_share: 1.0 - params.h() * ev.theta[0][s],
        segment_weight: w[s],
    })
}

/// Tax-base elasticity `t_n / (δ − H(t_n − t_h))`; identical for every firm size.
pub fn tax_base_elasticity(t_n: f64, t_h: f64, params: &ModelParams) -> Result<f64> {
    let den = params.delta - params.h() * (t_n - t_h);
    if den <= 0.0 {
        return Err(Error::Domain(format!(
            "tax base exhausted: δ − H(t_n − t_h) = {den} ≤ 0"
        )));
    }
    Ok(t_n / den)
}

/// After-tax profit of one firm with true profit `pi` that books `theta` in each of `havens`
/// havens taxing at `t_h`.
pub fn firm_after_tax_profit(t_n: f64, t_h: f64, theta: f64, havens: f64, delta: f64, pi: f64) -> f64 {
    ((1.0 - t_n) * (1.0 - havens * theta) + havens * (1.0 - t_h) * theta
        - havens * 0.5 * delta * theta * theta)
        * pi
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> ModelParams {
        ModelParams::new(2.0, 1.0, 1, 1.0, 1.0).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(1.0, 1.0, 1, 0.5, 1.0).is_err());
        assert!(ModelParams::new(2.0, 1.5, 1, 0.5, 1.0).is_err());
        assert!(ModelParams::new(2.0, 1.0, 0, 0.5, 1.0).is_err());
        assert!(ModelParams::new(2.0, 1.0, 1, 0.0, 1.0).is_err());
        assert!(ModelParams::new(2.0, 1.0, 1, 1.0, 0.0).is_err());
        assert!(ModelParams::new(2.0, 59.9, 40, 1.0, 1.0).is_ok());
        let err = serde_json::from_str::<ModelParams>(
            r#"{"lambda":0.5,"delta":1,"havens":1,"coverage":0.5,"total_profits":1}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("lambda"));
    }

    #[test]
    fn schedule_validation_and_uniformity() {
        assert!(TaxSchedule::new(-0.1, 0.2).is_err());
        assert!(TaxSchedule::new(0.1, 1.2).is_err());
        assert!(TaxSchedule::uniform(0.3).is_uniform());
        assert!(!TaxSchedule::new(0.3, 0.30000000000000004).unwrap().is_uniform());
        assert!(PolicyEnvironment::new(1.5, true).is_err());
        assert_eq!(PolicyEnvironment::none().floor(), 0.0);
    }

    #[test]
    fn shifting_share_examples() {
        let s = shifting_share(0.186, 0.093, 17.8).unwrap();
        assert!((s - 0.005_224_7).abs() < 1e-7);
        assert!((40.0 * s - 0.209).abs() < 1e-3);
        assert_eq!(shifting_share(0.3, 0.3, 2.0).unwrap(), 0.0);
        // regime-0 rates at λ=2, δ=1, H=1: aggregate share (λ−1)/(3λ−1)
        assert!((shifting_share(0.4, 0.2, 1.0).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(shifting_share(0.1, 0.2, 1.0).unwrap(), 0.0);
        assert!((shifting_share_unclamped(0.1, 0.2, 1.0).unwrap() + 0.1).abs() < 1e-15);
        assert!(shifting_share(0.1, 0.2, 0.0).is_err());
        assert!(shifting_share(f64::NAN, 0.2, 1.0).is_err());
    }

    #[test]
    fn objective_examples() {
        let p = unit();
        let n = TaxSchedule::uniform(0.4);
        let h = TaxSchedule::uniform(0.2);
        // θ = 0.2: private 0.6·0.8 + 0.8·0.2 − 0.02 = 0.62, revenue 0.32, G_n = 0.62 + 0.64
        assert!((nonhaven_objective(&n, &h, &p) - 1.26).abs() < 1e-14);
        assert!((haven_objective(&n, &h, &p) - 0.08).abs() < 1e-15);
        let z = TaxSchedule::uniform(0.0);
        assert_eq!(nonhaven_objective(&z, &z, &p), 1.0);
        assert_eq!(world_objective(&z, &z, &p), 1.0);
        assert_eq!(haven_objective(&n, &z, &p), 0.0);
        assert_eq!(haven_objective(&n, &n, &p), 0.0);
    }

    #[test]
    fn elasticity_examples() {
        let p = unit();
        assert_eq!(tax_base_elasticity(0.0, 0.0, &p).unwrap(), 0.0);
        assert!((tax_base_elasticity(0.4, 0.2, &p).unwrap() - 0.5).abs() < 1e-15);
        let tight = ModelParams::new(2.0, 0.1, 1, 1.0, 1.0).unwrap();
        assert!(tax_base_elasticity(0.5, 0.0, &tight).is_err());
    }

    #[test]
    fn calibrated_revenue_loss() {
        let p = ModelParams::new(2.1, 17.8, 40, 0.9, 4623.0).unwrap();
        let tn0 = 2.0 * 17.8 * 1.1 / (40.0 * 5.3);
        let ev = evaluate_symmetric(
            &TaxSchedule::uniform(tn0),
            &TaxSchedule::uniform(tn0 / 2.0),
            &p,
            ProfitResponse::Fixed,
        );
        let loss = tn0 * ev.shifted_profits;
        assert!((loss - 180.0).abs() < 3.0, "{loss}");
        let segs = segment_outcomes(&TaxSchedule::uniform(tn0), &TaxSchedule::uniform(tn0 / 2.0), &p);
        assert!((segs[1].segment_weight - 0.9).abs() < 1e-15);
        assert!((segs[0].retained_share + 40.0 * segs[0].theta_per_haven - 1.0).abs() < 1e-15);
    }

    #[test]
    fn adding_up_constraint_caps_shifting() {
        let p = ModelParams::new(2.0, 0.1, 5, 1.0, 1.0).unwrap();
        let ev = evaluate_symmetric(
            &TaxSchedule::uniform(1.0),
            &TaxSchedule::uniform(0.0),
            &p,
            ProfitResponse::Fixed,
        );
        assert!((ev.shifted_profits - 1.0).abs() < 1e-12);
        assert!(ev.revenue_nonhaven.abs() < 1e-12);
    }

    fn arb_params() -> impl Strategy<Value = ModelParams> {
        (1.01f64..10.0, 1u32..50, 0.01f64..1.0, 0.05f64..1.0, 1.0f64..1e4).prop_map(
            |(l, h, dfrac, phi, pi)| {
                ModelParams::new(l, dfrac * 1.5 * h as f64, h, phi, pi).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn uniform_schedules_reduce_to_single_segment(p in arb_params(), tn in 0.0f64..1.0, th in 0.0f64..1.0) {
            let n = TaxSchedule::uniform(tn);
            let h = TaxSchedule::uniform(th);
            let full = p.with_coverage(1.0).unwrap();
            let a = evaluate_symmetric(&n, &h, &p, ProfitResponse::Fixed);
            let b = evaluate_symmetric(&n, &h, &full, ProfitResponse::Fixed);
            prop_assert!((a.g_nonhaven - b.g_nonhaven).abs() <= 1e-12 * b.g_nonhaven.abs().max(1.0));
            prop_assert!((a.g_haven[0] - b.g_haven[0]).abs() <= 1e-12 * b.g_haven[0].abs().max(1.0));
        }

        #[test]
        fn objectives_homogeneous_in_profits(p in arb_params(), r in prop::array::uniform4(0.0f64..1.0), k in 0.1f64..10.0) {
            let n = TaxSchedule::new(r[0], r[1]).unwrap();
            let h = TaxSchedule::new(r[2], r[3]).unwrap();
            let q = p.with_total_profits(p.total_profits() * k).unwrap();
            for (a, b) in [
                (nonhaven_objective(&n, &h, &p), nonhaven_objective(&n, &h, &q)),
                (haven_objective(&n, &h, &p), haven_objective(&n, &h, &q)),
                (world_objective(&n, &h, &p), world_objective(&n, &h, &q)),
            ] {
                prop_assert!((a * k - b).abs() <= 1e-10 * b.abs().max(1.0));
            }
        }

        #[test]
        fn world_is_additive(p in arb_params(), r in prop::array::uniform4(0.0f64..1.0)) {
            let n = TaxSchedule::new(r[0], r[1]).unwrap();
            let h = TaxSchedule::new(r[2], r[3]).unwrap();
            let w = world_objective(&n, &h, &p);
            let sum = nonhaven_objective(&n, &h, &p) + p.h() * haven_objective(&n, &h, &p);
            prop_assert!((w - sum).abs() <= 1e-12 * w.abs().max(1.0));
        }

        #[test]
        fn zero_differential_nullity(p in arb_params(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let s = TaxSchedule::new(a, b).unwrap();
            prop_assert_eq!(haven_objective(&s, &s, &p), 0.0);
        }

        #[test]
        fn private_income_matches_firm_problem(
            p in arb_params(),
            tn in 0.0f64..0.6,
            frac in 0.0f64..1.0,
            sizes in prop::collection::vec(0.01f64..1.0, 1..20),
        ) {
            let th = tn * frac;
            let theta = shifting_share(tn, th, p.delta()).unwrap();
            prop_assume!(p.h() * theta <= 1.0);
            // spread Π over an arbitrary firm-size distribution
            let norm: f64 = sizes.iter().sum();
            let firms: f64 = sizes
                .iter()
                .map(|s| firm_after_tax_profit(tn, th, theta, p.h(), p.delta(), s / norm * p.total_profits()))
                .sum();
            let ev = evaluate_symmetric(&TaxSchedule::uniform(tn), &TaxSchedule::uniform(th), &p, ProfitResponse::Fixed);
            prop_assert!((ev.private_income - firms).abs() <= 1e-12 * firms.abs().max(1.0));
        }

        #[test]
        fn segment_shares_bounded(p in arb_params(), r in prop::array::uniform4(0.0f64..1.0)) {
            let n = TaxSchedule::new(r[0], r[1]).unwrap();
            let h = TaxSchedule::new(r[2], r[3]).unwrap();
            for s in segment_outcomes(&n, &h, &p) {
                let tot = p.h() * s.theta_per_haven;
                prop_assert!((0.0..=1.0 + 1e-12).contains(&tot));
            }
        }
    }
}
