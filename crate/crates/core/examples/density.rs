//! Area-density ratios `area(Σ ∩ B_r) / πr²` at a junction point and at
//! infinity.

use ysurface::geometry::{density_report, make_catenoid, make_plane, DensityCenter, Resolution};

fn main() -> ysurface::Result<()> {
    let plane = make_plane(2.0, Resolution::new(0.2))?;
    let d = density_report(&plane, DensityCenter::Point(nalgebra::Vector3::zeros()), &[0.5, 1.0, 1.5])?;
    println!("plane: {:?}", d.ratios);

    let catenoid = make_catenoid(1.0, 7.0, Resolution::new(0.1))?;
    let d = density_report(&catenoid, DensityCenter::Infinity, &[10.0, 50.0, 200.0, 500.0])?;
    println!("catenoid, growing balls: {:.4?} → {:.4}", d.ratios, d.limit_estimate());
    Ok(())
}
