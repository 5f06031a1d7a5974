//! Run the whole self-check suite, then against a deliberately wrong source.
//!
//! ```bash
//! cargo run -p gmt-core --release --example verify
//! ```

use gmt_core::equilibrium::Regime;
use gmt_core::model::ModelParams;
use gmt_core::report::{verify, ClosedForm, EquilibriumSource, VerifyOptions};
use gmt_core::statics::{regime_rate_derivative, GroupValues};

/// Closed forms with the R2 non-haven derivative off by 1%.
struct Skewed;

impl EquilibriumSource for Skewed {
    fn rate_derivative(&self, regime: Regime, t_m: f64, p: &ModelParams) -> gmt_core::Result<GroupValues> {
        let mut d = regime_rate_derivative(regime, t_m, p)?;
        if regime == Regime::R2 {
            d.nonhaven *= 1.01;
            d.world = d.nonhaven + d.haven_total;
        }
        Ok(d)
    }
}

fn main() -> gmt_core::Result<()> {
    let p = ModelParams::new(2.1, 17.8, 40, 0.9, 4623.0)?;
    let opts = VerifyOptions {
        sample_size: 40,
        ..VerifyOptions::default()
    };
    println!("{}", verify(&p, &opts, &ClosedForm)?.to_text());
    println!("{}", verify(&p, &opts, &Skewed)?.to_text());
    Ok(())
}
