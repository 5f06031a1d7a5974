//! Marginal effects of raising t_M or coverage, the jumps at the switching
//! rates, and a finite-difference cross-check.
//!
//! ```bash
//! cargo run -p gmt-core --example comparative_statics
//! ```

use gmt_core::equilibrium::regime_thresholds;
use gmt_core::model::ModelParams;
use gmt_core::statics::{
    finite_difference_rate, introduction_effects, marginal_coverage_effects, marginal_rate_effects,
    regime_switch_jumps,
};

fn main() -> gmt_core::Result<()> {
    let p = ModelParams::new(2.1, 17.8, 40, 0.9, 4623.0)?;
    let ts = regime_thresholds(&p)?;

    // midpoints of each regime
    let points = [
        0.5 * (ts.t_m0 + ts.t_m1),
        0.5 * (ts.t_m1 + ts.t_m2),
        0.5 * (ts.t_m2 + ts.t_m3),
        ts.t_m3 + 0.05,
    ];
    for t in points {
        let m = marginal_rate_effects(t, &p)?;
        let fd = finite_difference_rate(m.regime, t, &p, 1e-6)?;
        let c = marginal_coverage_effects(t, &p)?;
        println!(
            "{} at {:.2}%: dW/dt_M {:?} (fd {:?}), signs {:?}; dW/dphi {:?}",
            m.regime,
            100.0 * t,
            m.derivative.as_array().map(|x| (x * 10.0).round() / 10.0),
            fd.as_array().map(|x| (x * 10.0).round() / 10.0),
            m.signs,
            c.derivative.map(|d| d.as_array().map(|x| (x * 10.0).round() / 10.0)),
        );
    }

    let j = regime_switch_jumps(&p)?;
    println!("jump at t_M1 {:?}", j.at_t_m1.as_array());
    println!("jump at t_M3 {:?}", j.at_t_m3.as_array());

    let d = introduction_effects(0.15, &p)?;
    println!(
        "introducing 15%: non-haven {:+.1}, havens {:+.1}, world {:+.1}",
        d.d_nonhaven, d.d_haven_total, d.d_world
    );
    Ok(())
}
