//! Brute-force solver of the three-stage game, independent of the closed forms.
//!
//! Stage 3 (shifting) is analytic; stage 2 iterates best responses found by exhaustive grid
//! search; stage 1 compares the stage-2 payoffs of every commitment cell.

use serde::Serialize;

use crate::equilibrium::{EquilibriumOutcome, Regime};
use crate::error::{Error, Result};
use crate::model::{evaluate_segment, HavenGroup, ModelParams, ProfitResponse, TaxSchedule};
use crate::numerics::slope_bisection_max;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CommitmentProfile {
    /// Non-haven levies one rate on all MNEs.
    pub nonhaven_committed: bool,
    /// Havens that levy one rate on all MNEs; the others split.
    pub havens_committed_count: u32,
}

impl CommitmentProfile {
    pub fn new(nonhaven_committed: bool, havens_committed_count: u32, params: &ModelParams) -> Result<Self> {
        if havens_committed_count > params.havens() {
            return Err(Error::param(
                "havens_committed_count",
                format!("{havens_committed_count} exceeds H = {}", params.havens()),
            ));
        }
        Ok(CommitmentProfile {
            nonhaven_committed,
            havens_committed_count,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub step: f64,
    pub max_iters: usize,
    pub damping: f64,
    /// Refine each grid arg-max within one step (bisection on the slope sign) to this tolerance.
    /// `None` gives a pure grid search.
    pub polish: Option<f64>,
    /// Scan every `coarse_stride`-th grid point first, then the fine grid around the best one;
    /// 0 scans the whole fine grid. Own-rate objectives are concave, so both find the same point.
    pub coarse_stride: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            step: 1e-4,
            max_iters: 10_000,
            damping: 1.0,
            // grid payoffs alone are too coarse for stage-1 comparisons when 1 − φ is small
            polish: Some(1e-13),
            coarse_stride: 50,
        }
    }
}

impl GridSpec {
    /// Coarse grid plus golden-section refinement: continuous best responses.
    pub fn polished(step: f64, tol: f64) -> Self {
        GridSpec {
            step,
            polish: Some(tol),
            ..Self::default()
        }
    }

    /// Plain grid search without refinement.
    pub fn coarse(step: f64) -> Self {
        GridSpec {
            step,
            polish: None,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step <= 1.0) {
            return Err(Error::param("step", format!("must be in (0, 1], got {}", self.step)));
        }
        if self.max_iters < 1 {
            return Err(Error::param("max_iters", "must be at least 1"));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::param("damping", format!("must be in (0, 1], got {}", self.damping)));
        }
        Ok(())
    }

    /// Largest move still counted as converged.
    fn tolerance(&self) -> f64 {
        match self.polish {
            Some(tol) => (10.0 * tol).max(1e-9),
            None => self.step * (1.0 + 1e-9),
        }
    }

    /// Arg-max of `f` over `[lo, 1]`: `lo` itself plus every multiple of `step` above it.
    fn argmax<F: Fn(f64) -> f64>(&self, f: F, lo: f64) -> f64 {
        let n = (1.0 / self.step + 1e-9).floor() as usize;
        let first = (lo / self.step).floor() as usize + 1;
        let point = |k: usize| if k < first { lo } else { (k as f64 * self.step).min(1.0) };
        let scan = |from: usize, to: usize, by: usize| {
            let mut best = (first - 1, f64::NEG_INFINITY);
            let mut k = from;
            while k <= to {
                let fx = f(point(k));
                if fx > best.1 {
                    best = (k, fx);
                }
                k += by;
            }
            best
        };
        // index first − 1 stands for `lo` itself
        let (best_k, best_f) = if self.coarse_stride > 1 && n + 1 - first > 4 * self.coarse_stride {
            let (kc, _) = scan(first - 1, n, self.coarse_stride);
            let from = kc.saturating_sub(self.coarse_stride).max(first - 1);
            scan(from, (kc + self.coarse_stride).min(n), 1)
        } else {
            scan(first - 1, n, 1)
        };
        let best_x = point(best_k);
        match self.polish {
            Some(tol) => {
                let a = (best_x - self.step).max(lo);
                let b = (best_x + self.step).min(1.0);
                let x = slope_bisection_max(&f, a, b, tol);
                if f(x) >= best_f {
                    x
                } else {
                    best_x
                }
            }
            None => best_x,
        }
    }
}

/// Stage-2 rates of every player type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stage2Rates {
    pub nonhaven: TaxSchedule,
    /// Uniform rate of the committed havens.
    pub committed: f64,
    /// Schedule of the splitting havens.
    pub split: TaxSchedule,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stage2Result {
    pub rates: Stage2Rates,
    pub iterations: usize,
    /// Raw non-haven objective at the fixed point.
    pub g_nonhaven: f64,
    /// Raw objective of one committed haven (0 if none commit).
    pub g_committed: f64,
    /// Raw objective of one splitting haven (0 if none split).
    pub g_split: f64,
}

struct Game<'a> {
    profile: CommitmentProfile,
    t_m: f64,
    params: &'a ModelParams,
    law: ProfitResponse,
    grid: GridSpec,
}

impl Game<'_> {
    fn counts(&self) -> (u32, u32) {
        let c = self.profile.havens_committed_count;
        (c, self.params.havens() - c)
    }

    fn rates(&self, seg: usize, committed: f64, split: &TaxSchedule) -> ([(u32, f64); 2], usize) {
        let (c, s) = self.counts();
        let mut out = [(0, 0.0); 2];
        let mut k = 0;
        if c > 0 {
            out[k] = (c, committed);
            k += 1;
        }
        if s > 0 {
            out[k] = (s, split.rate(seg));
            k += 1;
        }
        (out, k)
    }

    fn nonhaven_payoff_seg(&self, seg: usize, t_n: f64, committed: f64, split: &TaxSchedule) -> f64 {
        let (r, k) = self.rates(seg, committed, split);
        evaluate_segment(seg, t_n, &r[..k], self.params, self.law).g_nonhaven
    }

    /// Payoff of one committed (`which = 0`) or splitting (`which = 1`) haven in a segment.
    fn haven_payoff_seg(&self, seg: usize, n: &TaxSchedule, committed: f64, split: &TaxSchedule, which: usize) -> f64 {
        let (r, k) = self.rates(seg, committed, split);
        let idx = if which == 0 || self.counts().0 == 0 { 0 } else { 1 };
        evaluate_segment(seg, n.rate(seg), &r[..k], self.params, self.law).g_haven[idx]
    }

    fn best_nonhaven(&self, committed: f64, split: &TaxSchedule) -> TaxSchedule {
        let g = &self.grid;
        if self.profile.nonhaven_committed {
            let u = g.argmax(
                |u| self.nonhaven_payoff_seg(0, u, committed, split) + self.nonhaven_payoff_seg(1, u, committed, split),
                self.t_m,
            );
            TaxSchedule::uniform(u)
        } else {
            let s = g.argmax(|u| self.nonhaven_payoff_seg(0, u, committed, split), 0.0);
            let l = g.argmax(|u| self.nonhaven_payoff_seg(1, u, committed, split), self.t_m);
            TaxSchedule {
                small_rate: s,
                large_rate: l,
            }
        }
    }

    fn best_committed(&self, n: &TaxSchedule, split: &TaxSchedule) -> f64 {
        self.grid.argmax(
            |u| self.haven_payoff_seg(0, n, u, split, 0) + self.haven_payoff_seg(1, n, u, split, 0),
            self.t_m,
        )
    }

    fn best_split(&self, n: &TaxSchedule, committed: f64, split: &TaxSchedule) -> TaxSchedule {
        let s = self.grid.argmax(
            |u| {
                let sch = TaxSchedule { small_rate: u, ..*split };
                self.haven_payoff_seg(0, n, committed, &sch, 1)
            },
            0.0,
        );
        let l = self.grid.argmax(
            |u| {
                let sch = TaxSchedule { large_rate: u, ..*split };
                self.haven_payoff_seg(1, n, committed, &sch, 1)
            },
            self.t_m,
        );
        TaxSchedule {
            small_rate: s,
            large_rate: l,
        }
    }

    fn payoffs(&self, r: &Stage2Rates) -> (f64, f64, f64) {
        let mut out = (0.0, 0.0, 0.0);
        let (c, s) = self.counts();
        for seg in 0..2 {
            out.0 += self.nonhaven_payoff_seg(seg, r.nonhaven.rate(seg), r.committed, &r.split);
            if c > 0 {
                out.1 += self.haven_payoff_seg(seg, &r.nonhaven, r.committed, &r.split, 0);
            }
            if s > 0 {
                out.2 += self.haven_payoff_seg(seg, &r.nonhaven, r.committed, &r.split, 1);
            }
        }
        out
    }

    fn solve(&self, start: Stage2Rates) -> Result<Stage2Result> {
        let d = self.grid.damping;
        let mix = |old: f64, new: f64| if d == 1.0 { new } else { old + d * (new - old) };
        let mix_s = |old: TaxSchedule, new: TaxSchedule| TaxSchedule {
            small_rate: mix(old.small_rate, new.small_rate),
            large_rate: mix(old.large_rate, new.large_rate),
        };
        let mut r = start;
        r.committed = r.committed.max(self.t_m);
        r.split.large_rate = r.split.large_rate.max(self.t_m);
        let tol = self.grid.tolerance();
        let (c, s) = self.counts();
        for it in 1..=self.grid.max_iters {
            // Gauss–Seidel sweep: non-haven, then committed havens, then splitting havens
            let n = mix_s(r.nonhaven, self.best_nonhaven(r.committed, &r.split));
            let committed = if c > 0 { mix(r.committed, self.best_committed(&n, &r.split)) } else { r.committed };
            let split = if s > 0 { mix_s(r.split, self.best_split(&n, committed, &r.split)) } else { r.split };
            let moved = [
                (n.small_rate - r.nonhaven.small_rate).abs(),
                (n.large_rate - r.nonhaven.large_rate).abs(),
                (committed - r.committed).abs(),
                (split.small_rate - r.split.small_rate).abs(),
                (split.large_rate - r.split.large_rate).abs(),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            r = Stage2Rates {
                nonhaven: n,
                committed,
                split,
            };
            if moved <= tol {
                let (g_n, g_c, g_s) = self.payoffs(&r);
                return Ok(Stage2Result {
                    rates: r,
                    iterations: it,
                    g_nonhaven: g_n,
                    g_committed: g_c,
                    g_split: g_s,
                });
            }
        }
        Err(Error::NoConvergence {
            iterations: self.grid.max_iters,
            last: r,
        })
    }
}

fn default_start(t_m: f64) -> Stage2Rates {
    Stage2Rates {
        nonhaven: TaxSchedule::uniform(0.5_f64.max(t_m)),
        committed: t_m,
        split: TaxSchedule {
            small_rate: 0.0,
            large_rate: t_m,
        },
    }
}

/// Stage-2 Nash equilibrium for a commitment profile, from a neutral starting point.
pub fn stage2_nash(
    profile: CommitmentProfile,
    t_m: f64,
    params: &ModelParams,
    grid: &GridSpec,
) -> Result<Stage2Result> {
    stage2_nash_with(profile, t_m, params, ProfitResponse::Fixed, grid, default_start(t_m))
}

/// Stage-2 Nash equilibrium from a chosen starting profile under a given profit law.
pub fn stage2_nash_with(
    profile: CommitmentProfile,
    t_m: f64,
    params: &ModelParams,
    law: ProfitResponse,
    grid: &GridSpec,
    start: Stage2Rates,
) -> Result<Stage2Result> {
    grid.validate()?;
    if !(0.0..=1.0).contains(&t_m) {
        return Err(Error::Domain(format!("GMT rate {t_m} outside [0, 1]")));
    }
    if profile.havens_committed_count > params.havens() {
        return Err(Error::Domain("more committed havens than havens".into()));
    }
    Game {
        profile,
        t_m,
        params,
        law,
        grid: *grid,
    }
    .solve(start)
}

/// One cell of the stage-1 commitment game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellOutcome {
    pub nonhaven_committed: bool,
    pub havens_committed: bool,
    pub stage2: Stage2Result,
}

impl CellOutcome {
    fn haven_payoff(&self) -> f64 {
        if self.havens_committed {
            self.stage2.g_committed
        } else {
            self.stage2.g_split
        }
    }

    pub fn haven_schedule(&self) -> TaxSchedule {
        if self.havens_committed {
            TaxSchedule::uniform(self.stage2.rates.committed)
        } else {
            self.stage2.rates.split
        }
    }
}

/// Detailed stage-1 result: every cell, which were Nash, and the selected one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeReport {
    pub cells: Vec<CellOutcome>,
    pub nash: Vec<bool>,
    pub selected: usize,
    pub outcome: EquilibriumOutcome,
}

/// Rates closer than this are treated as one uniform rate when labelling.
const SAME_RATE: f64 = 1e-8;

/// Labels a rate pattern with its regime; patterns of the excluded cells are errors.
///
/// A binding rate is one equal to `t_M`, which the solver always hits exactly.
pub fn label_pattern(n: &TaxSchedule, h: &TaxSchedule, t_m: f64, full_coverage: bool) -> Result<Regime> {
    let uniform = |s: &TaxSchedule| (s.small_rate - s.large_rate).abs() <= SAME_RATE;
    let excluded = || {
        Error::Domain(format!(
            "rate pattern non-haven {n:?}, haven {h:?} at t_M = {t_m} is an excluded cell"
        ))
    };
    if full_coverage {
        return Ok(if h.large_rate > t_m {
            Regime::R0
        } else if n.large_rate > t_m {
            Regime::R1f
        } else {
            Regime::R2f
        });
    }
    let haven_binding = h.large_rate <= t_m;
    match (uniform(n), uniform(h)) {
        (true, true) if !haven_binding => Ok(Regime::R0),
        (true, true) if n.large_rate > t_m => Ok(Regime::R1),
        (true, false) if haven_binding && n.large_rate > t_m => Ok(Regime::R2),
        (true, false) if haven_binding => Ok(Regime::R3),
        (false, false) if haven_binding => Ok(Regime::R4),
        _ => Err(excluded()),
    }
}

/// Subgame-perfect outcome found by enumerating all commitment cells.
pub fn stage1_spe(t_m: f64, params: &ModelParams, grid: &GridSpec) -> Result<EquilibriumOutcome> {
    Ok(stage1_spe_report(t_m, params, ProfitResponse::Fixed, grid)?.outcome)
}

/// Stage-1 enumeration with full diagnostics.
///
/// A cell is Nash when neither the non-haven nor the havens (deciding collectively) gain by
/// switching; ties favour commitment, so the first Nash cell in the order
/// (C,C), (C,S), (S,C), (S,S) is selected.
pub fn stage1_spe_report(
    t_m: f64,
    params: &ModelParams,
    law: ProfitResponse,
    grid: &GridSpec,
) -> Result<SpeReport> {
    let full = params.coverage() >= 1.0;
    let h = params.havens();
    let order: &[(bool, bool)] = if full {
        // splitting is meaningless without small MNEs
        &[(true, true)]
    } else {
        &[(true, true), (true, false), (false, true), (false, false)]
    };
    let mut cells = Vec::with_capacity(order.len());
    for &(nc, hc) in order {
        let profile = CommitmentProfile {
            nonhaven_committed: nc,
            havens_committed_count: if hc { h } else { 0 },
        };
        let stage2 = stage2_nash_with(profile, t_m, params, law, grid, default_start(t_m))?;
        cells.push(CellOutcome {
            nonhaven_committed: nc,
            havens_committed: hc,
            stage2,
        });
    }
    let scale = params.lambda() * params.total_profits();
    let tol = 1e-12 * scale;
    let find = |nc: bool, hc: bool| cells.iter().find(|c| c.nonhaven_committed == nc && c.havens_committed == hc);
    let nash: Vec<bool> = cells
        .iter()
        .map(|c| {
            let n_ok = find(!c.nonhaven_committed, c.havens_committed)
                .map_or(true, |o| c.stage2.g_nonhaven >= o.stage2.g_nonhaven - tol);
            let h_ok = find(c.nonhaven_committed, !c.havens_committed)
                .map_or(true, |o| c.haven_payoff() >= o.haven_payoff() - tol);
            n_ok && h_ok
        })
        .collect();
    let selected = nash
        .iter()
        .position(|&b| b)
        .ok_or_else(|| Error::Numeric(format!("no pure-strategy equilibrium at t_M = {t_m}")))?;
    let cell = &cells[selected];
    let n = cell.stage2.rates.nonhaven;
    let hs = cell.haven_schedule();
    let regime = label_pattern(&n, &hs, t_m, full)?;
    let group = HavenGroup {
        count: h,
        schedule: hs,
    };
    let outcome = EquilibriumOutcome::from_groups(regime, t_m, n, &[group], params, law);
    Ok(SpeReport {
        cells,
        nash,
        selected,
        outcome,
    })
}

/// Equilibria of the game in which each haven decides individually whether to commit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecentralisedSet {
    /// ΔG(H_M) for H_M = 1..=H (index 0 is H_M = 1), raw units per haven.
    pub commitment_gain: Vec<f64>,
    pub all_commit: bool,
    pub all_split: bool,
    /// Interior counts where the gain vanishes within tolerance.
    pub interior: Vec<u32>,
    /// `(k, k+1)` where the gain turns from negative to non-negative, if anywhere.
    pub sign_change: Option<(u32, u32)>,
}

/// Gain for one haven from committing when `committed − 1` others commit, found numerically.
pub fn commitment_gain_numeric(
    committed: u32,
    t_m: f64,
    params: &ModelParams,
    grid: &GridSpec,
) -> Result<f64> {
    let h = params.havens();
    if committed < 1 || committed > h {
        return Err(Error::Domain(format!("H_M = {committed} outside 1..={h}")));
    }
    let with = stage2_nash(CommitmentProfile::new(true, committed, params)?, t_m, params, grid)?;
    let without = stage2_nash(CommitmentProfile::new(true, committed - 1, params)?, t_m, params, grid)?;
    Ok(with.g_committed - without.g_split)
}

/// Decentralised commitment game; the non-haven keeps a single rate throughout.
pub fn stage1_decentralised(t_m: f64, params: &ModelParams, grid: &GridSpec) -> Result<DecentralisedSet> {
    let h = params.havens();
    let gains = (1..=h)
        .map(|k| commitment_gain_numeric(k, t_m, params, grid))
        .collect::<Result<Vec<_>>>()?;
    let tol = 1e-9 * params.total_profits();
    let interior = (1..h)
        .filter(|&k| gains[k as usize - 1].abs() < tol)
        .collect();
    let sign_change = (1..h)
        .find(|&k| gains[k as usize - 1] < 0.0 && gains[k as usize] >= 0.0)
        .map(|k| (k, k + 1));
    Ok(DecentralisedSet {
        all_commit: gains[h as usize - 1] >= 0.0,
        all_split: gains[0] < 0.0,
        commitment_gain: gains,
        interior,
        sign_change,
    })
}
