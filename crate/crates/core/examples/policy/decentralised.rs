//! Havens choosing individually whether to commit to the GMT rate.
//!
//! Inside the band (t_M_a, t_M_b] several equilibria coexist; `Selection`
//! chooses which one the report uses. With 40 havens the band is a sliver,
//! so a three-haven economy is shown as well.
//!
//! ```bash
//! cargo run -p gmt-core --example decentralised
//! ```

use gmt_core::equilibrium::regime_thresholds;
use gmt_core::extensions::{commitment_gain, decentralised_equilibrium, decentralised_thresholds, Selection};
use gmt_core::model::ModelParams;

fn main() -> gmt_core::Result<()> {
    for p in [
        ModelParams::new(2.1, 17.8, 40, 0.9, 4623.0)?,
        ModelParams::new(2.0, 1.5, 3, 0.6, 100.0)?,
    ] {
        let th = decentralised_thresholds(0.15, &p)?;
        println!(
            "H = {}: only \"all commit\" up to {:.6}%, only \"all split\" above {:.6}%",
            p.havens(),
            100.0 * th.t_m_a,
            100.0 * th.t_m_b
        );
        let t0 = regime_thresholds(&p)?.t_m0;
        for t in [0.5 * (t0 + th.t_m_a), 0.5 * (th.t_m_a + th.t_m_b), th.t_m_b + 1e-3] {
            let eq = decentralised_equilibrium(t, &p, Selection::All)?;
            let kinds: Vec<String> = eq.set.iter().map(|o| o.regime.to_string()).collect();
            println!(
                "  t_M {:.4}%: equilibria {:?}, gain to a lone committer {:+.5}",
                100.0 * t,
                kinds,
                commitment_gain(1, t, &p)?
            );
        }
    }

    let p = ModelParams::new(2.1, 17.8, 40, 0.9, 4623.0)?;
    let eq = decentralised_equilibrium(0.15, &p, Selection::Commit)?;
    let h = eq.selected.haven;
    println!(
        "at 15% with 40 havens: split {:.1}% / {:.1}%, world welfare {:.1}",
        100.0 * h.small_rate,
        100.0 * h.large_rate,
        eq.selected.welfare_world
    );
    Ok(())
}
