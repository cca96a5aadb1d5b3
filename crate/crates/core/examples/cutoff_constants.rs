//! Log-cutoff test functions `φ_R` and the constant-mode expansion of the
//! index form: `Q(Σ cᵢ φ_R)` approaches the θ prediction like `1/log R`.

use ysurface::classify::{cross_check_constants, ConstantsOutcome, ThetaReport};
use ysurface::cli::{cutoff_half_height, ycatenoid_truncation_for_radius};
use ysurface::geometry::{make_catenoid, make_ycatenoid, Resolution};
use ysurface::quadform::build_log_cutoff;

fn main() -> ysurface::Result<()> {
    let catenoid = make_catenoid(1.0, cutoff_half_height(1.0, 1e8), Resolution::new(0.05))?;
    for r in [10.0, 100.0, 1e4] {
        let c = build_log_cutoff(&catenoid, r)?;
        println!("R = {r:>7}: sup |x||∇φ| log R = {:.4} (C = {})", c.sup_scaled_gradient, c.c_bound);
    }

    let u = ycatenoid_truncation_for_radius(1.0, 1e4);
    let surface = make_ycatenoid(1.0, u, Resolution::new(0.08))?;
    match cross_check_constants(&surface, &ThetaReport::new(&surface), &[10.0, 100.0])? {
        ConstantsOutcome::Computed(check) => {
            for row in &check.rows {
                println!("R = {:>5} c = {:?}: Q = {:+.4}, θ-prediction = {:+.4}, gap = {:.4}", row.r, row.c, row.q_value, row.theta_prediction, row.gap);
            }
        }
        ConstantsOutcome::NotApplicable { reason } => println!("not applicable: {reason}"),
    }
    Ok(())
}
