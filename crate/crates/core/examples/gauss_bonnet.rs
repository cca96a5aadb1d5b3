//! Discrete Gauss–Bonnet balance per face under mesh refinement.

use ysurface::geometry::{gauss_bonnet_report, make_catenoid, make_ycatenoid, Resolution};

fn main() -> ysurface::Result<()> {
    for h in [0.1, 0.05, 0.025] {
        let res = Resolution::new(h);
        for surface in [make_catenoid(1.0, 3.0, res)?, make_ycatenoid(1.0, 3.0, res)?] {
            for (fi, face) in surface.faces.iter().enumerate() {
                let gb = gauss_bonnet_report(face, &surface.junction_terms(fi))?;
                println!(
                    "h = {h:<5} {:<10} face {fi}: ∫K = {:+.6}  χ = {}  relative residual {:.2e}",
                    surface.label, gb.int_k, gb.chi, gb.relative_residual
                );
            }
        }
    }
    Ok(())
}
