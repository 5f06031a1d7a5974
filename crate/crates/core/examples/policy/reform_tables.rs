//! Welfare, revenue and booked-profit changes from a 15% and a 16% GMT,
//! plus what extending coverage to all firms would add.
//!
//! ```bash
//! cargo run -p gmt-core --example reform_tables
//! ```

use gmt_core::model::ModelParams;
use gmt_core::report::{compliance_cost, reform, Scenario};

fn main() -> gmt_core::Result<()> {
    let s = Scenario::baseline(ModelParams::new(2.1, 17.8, 40, 0.9, 4623.0)?);

    println!("{}\n", reform(&s, 0.15, None, None)?.to_text());
    println!("{}\n", reform(&s, 0.16, None, None)?.to_text());

    // extension to every firm, net of what small firms would pay to comply
    let cost = compliance_cost(1.6, 6000.0, 1.1);
    println!("{}", reform(&s, 0.16, Some(1.0), Some(cost))?.to_text());
    Ok(())
}
