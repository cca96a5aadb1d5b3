//! Rotationally symmetric surfaces split into angular modes `cos kφ`,
//! `sin kφ`; each mode is a one-dimensional eigenproblem along the profile.

use ysurface::geometry::{make_catenoid, make_ycatenoid, Resolution};
use ysurface::quadform::NormalField;
use ysurface::spectra::{angular_power, fourier_index, spectrum_with_modes, SpectrumOptions};

fn main() -> ysurface::Result<()> {
    let res = Resolution::new(0.05);
    for surface in [make_catenoid(1.0, 3.0, res)?, make_ycatenoid(1.0, 3.0, res)?] {
        let fi = fourier_index(&surface, 10, None)?;
        println!("{}: total index {} (certified above k = {}: {})", surface.label, fi.total_index, fi.cap, fi.certified_above_cap);
        for m in fi.modes.iter().take(4) {
            println!("  k = {}: {} negative, lowest {:.5?}", m.mode, m.negative, &m.lowest[..3.min(m.lowest.len())]);
        }
        let (_, modes, form) = spectrum_with_modes(&surface, &SpectrumOptions::default())?;
        let field = NormalField::from_stacked(&surface, &form.reducer.expand(&modes[0].vector))?;
        let power = angular_power(&surface, &field, 3)?;
        println!("  lowest 2-D mode, angular power by k: {power:.4?}");
    }
    Ok(())
}
