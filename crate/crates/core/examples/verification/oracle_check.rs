//! Solve the three-stage game by brute force and compare with the closed form.
//!
//! ```bash
//! cargo run -p gmt-core --release --example oracle_check
//! ```

use gmt_core::equilibrium::equilibrium;
use gmt_core::model::ModelParams;
use gmt_core::oracle::{stage1_spe_report, GridSpec};
use gmt_core::model::ProfitResponse;

fn main() -> gmt_core::Result<()> {
    let p = ModelParams::new(2.1, 17.8, 40, 0.9, 4623.0)?;
    let grid = GridSpec::default();

    for t in [0.05, 0.12, 0.2, 0.3, 0.4] {
        let r = stage1_spe_report(t, &p, ProfitResponse::Fixed, &grid)?;
        let cf = equilibrium(t, &p)?;
        println!(
            "t_M {:.0}%: oracle {} (n {:.4}/{:.4}, h {:.4}/{:.4}), closed form {} (n {:.4}/{:.4}, h {:.4}/{:.4})",
            100.0 * t,
            r.outcome.regime,
            r.outcome.nonhaven.small_rate,
            r.outcome.nonhaven.large_rate,
            r.outcome.haven.small_rate,
            r.outcome.haven.large_rate,
            cf.regime,
            cf.nonhaven.small_rate,
            cf.nonhaven.large_rate,
            cf.haven.small_rate,
            cf.haven.large_rate,
        );
    }
    Ok(())
}
