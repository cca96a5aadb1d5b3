//! Area ratios `area(Σ ∩ B_r(p)) / (π r²)` by exact clipping of each flat
//! triangle against the ball.

use std::f64::consts::PI;

use nalgebra::Vector2;

use super::{Vec3, YSurface};
use crate::error::{argument, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityCenter {
    Point(Vec3),
    /// Ratios about the origin; the value at the largest radius estimates the
    /// density at infinity.
    Infinity,
}

impl DensityCenter {
    fn point(&self) -> Vec3 {
        match self {
            DensityCenter::Point(p) => *p,
            DensityCenter::Infinity => Vec3::zeros(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub center: DensityCenter,
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `max_r area(Σ ∩ B_r) / r²` over the sampled radii.
    pub growth_constant: f64,
}

impl DensityReport {
    /// Ratio at the largest sampled radius.
    pub fn limit_estimate(&self) -> f64 {
        *self.ratios.last().expect("radii are nonempty")
    }
}

pub fn density_report(surface: &YSurface, center: DensityCenter, radii: &[f64]) -> Result<DensityReport> {
    if radii.is_empty() {
        return Err(argument("density report needs at least one radius"));
    }
    if radii[0] <= 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(argument("radii must be positive and strictly increasing"));
    }
    let p = center.point();
    // bounding sphere per triangle, for a cheap in/out test
    let tris: Vec<([Vec3; 3], Vec3, f64)> = surface
        .faces
        .iter()
        .flat_map(|f| f.elements.iter().map(move |t| [f.nodes[t[0]], f.nodes[t[1]], f.nodes[t[2]]]))
        .map(|v| {
            let c = (v[0] + v[1] + v[2]) / 3.0;
            let rad = v.iter().map(|x| (x - c).norm()).fold(0.0, f64::max);
            (v, c, rad)
        })
        .collect();

    let mut ratios = Vec::with_capacity(radii.len());
    let mut growth_constant: f64 = 0.0;
    for &r in radii {
        let mut area = 0.0;
        for (v, c, rad) in &tris {
            let d = (c - p).norm();
            if d - rad >= r {
                continue;
            }
            area += if d + rad <= r {
                0.5 * (v[1] - v[0]).cross(&(v[2] - v[0])).norm()
            } else {
                triangle_ball_area(v, &p, r)
            };
        }
        ratios.push(area / (PI * r * r));
        growth_constant = growth_constant.max(area / (r * r));
    }
    Ok(DensityReport { center, radii: radii.to_vec(), ratios, growth_constant })
}

/// Area of the flat triangle `v` inside the ball `B_r(center)`.
pub fn triangle_ball_area(v: &[Vec3; 3], center: &Vec3, r: f64) -> f64 {
    let n = (v[1] - v[0]).cross(&(v[2] - v[0]));
    let nn = n.norm();
    if nn == 0.0 {
        return 0.0;
    }
    let n = n / nn;
    let d = (center - v[0]).dot(&n);
    if d.abs() >= r {
        return 0.0;
    }
    let rho = (r * r - d * d).sqrt();
    let foot = center - d * n;
    let e1 = (v[1] - v[0]).normalize();
    let e2 = n.cross(&e1);
    let q: Vec<Vector2<f64>> = v
        .iter()
        .map(|x| {
            let y = x - foot;
            Vector2::new(y.dot(&e1), y.dot(&e2))
        })
        .collect();
    (0..3).map(|k| disk_wedge_area(q[k], q[(k + 1) % 3], rho)).sum::<f64>().abs()
}

fn cross2(a: Vector2<f64>, b: Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Signed area of the disk of radius `r` about the origin intersected with the
/// triangle `(0, a, b)`.
fn disk_wedge_area(a: Vector2<f64>, b: Vector2<f64>, r: f64) -> f64 {
    let sector = |u: Vector2<f64>, w: Vector2<f64>| 0.5 * r * r * cross2(u, w).atan2(u.dot(&w));
    let r2 = r * r;
    let (aa, bb) = (a.norm_squared(), b.norm_squared());
    if aa <= r2 && bb <= r2 {
        return 0.5 * cross2(a, b);
    }
    let d = b - a;
    let dd = d.norm_squared();
    if dd == 0.0 {
        return 0.0;
    }
    let ad = a.dot(&d);
    let disc = ad * ad - dd * (aa - r2);
    if disc <= 0.0 {
        return sector(a, b);
    }
    let s = disc.sqrt();
    let (t1, t2) = ((-ad - s) / dd, (-ad + s) / dd);
    if t2 <= 0.0 || t1 >= 1.0 {
        return sector(a, b);
    }
    let p1 = a + t1.max(0.0) * d;
    let p2 = a + t2.min(1.0) * d;
    let first = if t1 > 0.0 { sector(a, p1) } else { 0.0 };
    let last = if t2 < 1.0 { sector(p2, b) } else { 0.0 };
    first + 0.5 * cross2(p1, p2) + last
}
