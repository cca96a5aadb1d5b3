//! The flat Y-cone: three half-planes along a line. Every term of the index
//! form except the Dirichlet energy vanishes, so the index is zero.

use ysurface::geometry::{density_report, make_flat_ycone, DensityCenter, Resolution};
use ysurface::spectra::{compute_spectrum, SpectrumOptions};

fn main() -> ysurface::Result<()> {
    let surface = make_flat_ycone(1.0, 2.0, Resolution::new(0.05))?;
    let spec = compute_spectrum(&surface, &SpectrumOptions::default())?;
    println!("index {}  λ = {:.6?}", spec.morse_index, spec.eigenvalues);

    let density = density_report(&surface, DensityCenter::Point(nalgebra::Vector3::zeros()), &[0.25, 0.5, 0.9])?;
    println!("density at the junction: {:?}", density.ratios);
    Ok(())
}
