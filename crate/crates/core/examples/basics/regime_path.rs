//! Walk t_M from 0 to 50% and print which commitment regime the game lands in.
//!
//! ```bash
//! cargo run -p gmt-core --example regime_path
//! ```

use gmt_core::equilibrium::{equilibrium, regime_thresholds};
use gmt_core::model::ModelParams;

fn main() -> gmt_core::Result<()> {
    let p = ModelParams::new(2.1, 17.8, 40, 0.9, 4623.0)?;
    let ts = regime_thresholds(&p)?;
    println!(
        "switching rates: {:.2}% {:.2}% {:.2}% {:.2}%",
        100.0 * ts.t_m0,
        100.0 * ts.t_m1,
        100.0 * ts.t_m2,
        100.0 * ts.t_m3
    );

    println!("{:>6}  {:<4} {:>16} {:>16}", "t_M", "", "non-haven", "haven");
    for i in 0..=25 {
        let t = 0.02 * i as f64;
        let e = equilibrium(t, &p)?;
        println!(
            "{:>5.1}%  {:<4} {:>7.2}%/{:>6.2}% {:>7.2}%/{:>6.2}%",
            100.0 * t,
            e.regime.to_string(),
            100.0 * e.nonhaven.small_rate,
            100.0 * e.nonhaven.large_rate,
            100.0 * e.haven.small_rate,
            100.0 * e.haven.large_rate,
        );
    }
    Ok(())
}
