//! θ invariants of each face and the index-one case analysis, both on a
//! meshed Y-catenoid and on synthetic inputs.

use std::f64::consts::PI;

use ysurface::classify::{classify_report, reduced_constant_form, classify_theta, ThetaReport};
use ysurface::geometry::{make_ycatenoid, Resolution};

fn main() -> ysurface::Result<()> {
    let surface = make_ycatenoid(1.0, 6.0, Resolution::new(0.05))?;
    let report = ThetaReport::new(&surface);
    for (i, f) in report.faces.iter().enumerate() {
        println!(
            "face {i}: α/π = {:+.4}  β/π = {:+.4}  θ/π = {:+.4}  (tail-extrapolated {:+.4})",
            f.alpha / PI,
            f.beta / PI,
            f.theta / PI,
            f.theta_extrapolated / PI
        );
    }
    let verdict = classify_report(&report, 1)?;
    for step in &verdict.rules {
        println!("  {:<4} {:<5} {}", step.rule, step.fired, step.outcome);
    }
    println!("conclusion: {}", verdict.conclusion_text);

    for theta in [[-3.0 * PI, -3.0 * PI, -PI], [-5.0 * PI, -PI, PI], [-3.0 * PI, -2.5 * PI, 0.5 * PI]] {
        let form = reduced_constant_form(theta);
        let v = classify_theta(theta, None, 1)?;
        println!("θ/π = {:?}: trace {:+.3}, det {:+.3} → {}", theta.map(|t| t / PI), form.trace, form.determinant, v.conclusion_text);
    }
    Ok(())
}
