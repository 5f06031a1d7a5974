//! Recover (λ, δ) from the two targeted moments, then do the same with
//! tax-responsive profits.
//!
//! ```bash
//! cargo run -p gmt-core --example calibrate
//! ```

use gmt_core::calibration::{calibrate, CalibrationVariant, FixedParams, MomentTargets};
use gmt_core::report::calibration_text;

fn main() -> gmt_core::Result<()> {
    let targets = MomentTargets::new(0.186, 0.209)?;
    let fixed = FixedParams {
        havens: 40,
        coverage: 0.9,
        total_profits: 4623.0,
    };

    let base = calibrate(&targets, &fixed, CalibrationVariant::Baseline)?;
    println!("{}", calibration_text(&base));

    let rr = calibrate(&targets, &fixed, CalibrationVariant::RealResponse)?;
    println!(
        "tax-responsive profits: lambda {:.3}, delta {:.2}, untaxed profits {:.0} bUSD",
        rr.lambda_hat,
        rr.delta_hat,
        rr.baseline_profits.unwrap_or(f64::NAN)
    );
    Ok(())
}
