//! Writing a surface as a JSON mesh document and reading it back.

use ysurface::geometry::{make_ycatenoid, Resolution};
use ysurface::mesh_io::{from_json, to_json};

fn main() -> ysurface::Result<()> {
    let surface = make_ycatenoid(1.0, 2.0, Resolution::new(0.1))?;
    let text = to_json(&surface)?;
    let back = from_json(&text)?;
    assert_eq!(back, surface);
    assert_eq!(to_json(&back)?, text);
    println!("{}: {} bytes, byte-identical after a round trip", surface.label, text.len());

    let path = std::env::temp_dir().join("ycatenoid.json");
    ysurface::mesh_io::write_mesh(&surface, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}
