//! Profits that shrink with the home tax rate: Π(t_n) = Π_b / (1 + t_n).
//!
//! ```bash
//! cargo run -p gmt-core --example real_response
//! ```

use gmt_core::extensions::{real_response_equilibrium, real_response_regime0, real_response_thresholds, RealResponseParams};

fn main() -> gmt_core::Result<()> {
    let rr = RealResponseParams::new(6.0, 17.7, 40, 0.9, 5480.0)?;

    let z = real_response_regime0(&rr)?;
    println!(
        "status quo: non-haven {:.2}%, havens {:.2}%, shifted share {:.1}%",
        100.0 * z.t_n0,
        100.0 * z.t_h0,
        100.0 * z.shifted_share
    );

    for s in real_response_thresholds(&rr, 0.01, 1e-7)? {
        println!("{} -> {} at {:.2}%", s.from, s.to, 100.0 * s.t_m);
    }

    let e = real_response_equilibrium(0.15, &rr)?;
    println!(
        "t_M 15%: {} with non-haven {:.2}%, world welfare {:.1}",
        e.regime,
        100.0 * e.nonhaven.large_rate,
        e.welfare_world
    );
    Ok(())
}
