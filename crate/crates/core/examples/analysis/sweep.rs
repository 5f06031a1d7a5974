//! Sweep t_M over [0, 1] and write one CSV per coverage level.
//!
//! ```bash
//! cargo run -p gmt-core --example sweep -- /tmp/gmt-sweep
//! ```

use std::path::PathBuf;

use gmt_core::model::ModelParams;
use gmt_core::report::{sweep, Scenario};

fn main() -> gmt_core::Result<()> {
    let dir = std::env::args().nth(1).map_or_else(std::env::temp_dir, PathBuf::from);
    std::fs::create_dir_all(&dir).map_err(|source| gmt_core::Error::Io { path: dir.clone(), source })?;
    let p = ModelParams::new(2.1, 17.8, 40, 0.9, 4623.0)?;

    for phi in [0.5, 0.9, 1.0] {
        let d = sweep(&Scenario::baseline(p.with_coverage(phi)?), 0.0, 1.0, 0.001)?;
        let path = dir.join(format!("sweep-phi{phi:.3}.csv"));
        let file = std::fs::File::create(&path).map_err(|source| gmt_core::Error::Io { path: path.clone(), source })?;
        d.write_csv(file)?;
        println!("phi {phi}: regimes {:?}, drops {:?} -> {}", d.regime_runs(), d.downward_jumps(0.01), path.display());
    }
    Ok(())
}
