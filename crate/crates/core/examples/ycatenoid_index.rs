//! Morse index of the Y-catenoid: two catenoidal halves and a flat disk
//! meeting at 120° along a circle.

use ysurface::geometry::{check_y_configuration, make_ycatenoid, Resolution};
use ysurface::spectra::{compute_spectrum, SpectrumOptions};

fn main() -> ysurface::Result<()> {
    let h: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.06);
    for u in [2.0, 3.0, 4.0] {
        let surface = make_ycatenoid(1.0, u, Resolution::new(h))?;
        let y = check_y_configuration(&surface, 0.1)?;
        assert!(y.passed);
        let spec = compute_spectrum(&surface, &SpectrumOptions { truncation: Some(u), ..Default::default() })?;
        println!(
            "u = {u}: {} nodes, index {}, nullity {}, λ₁ = {:.6}, λ₂ = {:.6}",
            surface.total_nodes(),
            spec.morse_index,
            spec.nullity,
            spec.eigenvalues[0],
            spec.eigenvalues[1]
        );
    }
    Ok(())
}
