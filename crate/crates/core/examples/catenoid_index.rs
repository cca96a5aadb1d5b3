//! Morse index of the catenoid `r = cosh z`, truncated at several heights.
//!
//! ```text
//! cargo run --release --example catenoid_index -- 0.06
//! ```

use ysurface::geometry::{make_catenoid, Resolution};
use ysurface::spectra::{morse_index_sweep, SpectrumOptions};

fn main() -> ysurface::Result<()> {
    let h: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.06);
    let opts = SpectrumOptions { mesh_size: Some(h), ..Default::default() };
    let report = morse_index_sweep(|z| make_catenoid(1.0, z, Resolution::new(h)), &[1.5, 2.0, 3.0], &opts, 1)?;
    for row in &report.rows {
        let s = row.spectrum.as_ref().expect("catenoid spectra converge");
        println!("|z| ≤ {:<4} dim {:>6}  index {}  λ = {:.6?}", row.truncation, s.dimension, s.morse_index, s.eigenvalues);
    }
    println!("stabilized index: {:?}", report.stabilized_index);
    Ok(())
}
