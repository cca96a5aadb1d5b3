//! Canonical surfaces: plane, catenoid, flat Y-cone and the Y-catenoid.
//!
//! Surfaces of revolution are meshed on a conformal grid: catenoidal faces are
//! sampled uniformly in the catenary parameter `u` (where the metric is
//! `a² cosh² u (du² + dθ²)`) and the flat disk uniformly in `log ρ`, with the
//! same angular step, so every cell is close to a right isosceles pair of
//! triangles. The mesh size `h` is that conformal step.

use std::f64::consts::PI;

use super::{
    fundamental_forms, BoundaryLoop, FacePatch, JunctionCurve, LoopTag, ProfileCurve,
    ProfileSample, Revolution, Topology, Vec3, YSurface,
};
use crate::error::{argument, Result};

/// Mesh resolution: conformal step `h` and optional angular sample count
/// (default `max(24, ⌈2π/h⌉)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolution {
    pub h: f64,
    pub angular: Option<usize>,
}

impl Resolution {
    pub fn new(h: f64) -> Self {
        Self { h, angular: None }
    }

    pub fn with_angular(mut self, n: usize) -> Self {
        self.angular = Some(n);
        self
    }

    pub fn angular_count(&self) -> usize {
        self.angular.unwrap_or_else(|| ((2.0 * PI / self.h).ceil() as usize).max(24))
    }

    fn check(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(argument(format!("mesh size must be positive, got {}", self.h)));
        }
        Ok(())
    }
}

/// Samples a catenary `r = a cosh u` for `u ∈ [u_start, u_end]` in `steps`
/// uniform intervals. The axial coordinate is `z = z_sign · a (u − u_shift)`.
/// Returns the profile and `|A|² = 2 / (a² cosh⁴ u)` per sample.
pub fn catenary_profile(
    a: f64,
    u_start: f64,
    u_end: f64,
    steps: usize,
    z_sign: f64,
    u_shift: f64,
) -> Result<(ProfileCurve, Vec<f64>)> {
    let mut samples = Vec::with_capacity(steps + 1);
    let mut a2 = Vec::with_capacity(steps + 1);
    let s0 = u_start.sinh();
    for k in 0..=steps {
        let u = u_start + (u_end - u_start) * k as f64 / steps as f64;
        let c = u.cosh();
        samples.push(ProfileSample {
            s: a * (u.sinh() - s0),
            r: a * c,
            z: z_sign * a * (u - u_shift),
            dr_ds: u.tanh(),
            dz_ds: z_sign / c,
        });
        a2.push(2.0 / (a * a * c.powi(4)));
    }
    Ok((ProfileCurve::new(samples)?, a2))
}

/// Revolves a profile about the z-axis with `angular` samples per ring.
///
/// The normal is `sign · (−dz/ds e_r + dr/ds e_z)`, the left normal of the
/// profile direction. A final sample with `r = 0` becomes a single apex node.
/// Closed boundary loops are emitted for the first ring (`start_tag`) and the
/// last ring when it is not an apex (`end_tag`).
#[allow(clippy::too_many_arguments)]
pub fn revolve_profile(
    profile: &ProfileCurve,
    a_norm_sq: &[f64],
    mean_curvature: Option<&[f64]>,
    normal_sign: f64,
    angular: usize,
    topology: Topology,
    start_tag: Option<LoopTag>,
    end_tag: Option<LoopTag>,
) -> Result<FacePatch> {
    if angular < 3 {
        return Err(argument("need at least 3 angular samples"));
    }
    let samples = &profile.samples;
    let apex = samples.last().map(|p| p.r == 0.0).unwrap_or(false);
    let ring_count = if apex { samples.len() - 1 } else { samples.len() };

    let mut nodes = Vec::new();
    let mut normal = Vec::new();
    let mut a2 = Vec::new();
    let mut hm = Vec::new();
    let mut rings = Vec::with_capacity(samples.len());
    for (k, p) in samples.iter().enumerate().take(ring_count) {
        let mut ring = Vec::with_capacity(angular);
        for j in 0..angular {
            let phi = 2.0 * PI * j as f64 / angular as f64;
            let (s, c) = phi.sin_cos();
            ring.push(nodes.len());
            nodes.push(Vec3::new(p.r * c, p.r * s, p.z));
            normal.push(normal_sign * Vec3::new(-p.dz_ds * c, -p.dz_ds * s, p.dr_ds));
            a2.push(a_norm_sq[k]);
            hm.push(mean_curvature.map(|h| h[k]).unwrap_or(0.0));
        }
        rings.push(ring);
    }
    if apex {
        let p = samples.last().unwrap();
        rings.push(vec![nodes.len()]);
        nodes.push(Vec3::new(0.0, 0.0, p.z));
        normal.push(normal_sign * Vec3::new(0.0, 0.0, p.dr_ds.signum()));
        a2.push(*a_norm_sq.last().unwrap());
        hm.push(mean_curvature.map(|h| *h.last().unwrap()).unwrap_or(0.0));
    }

    let mut elements = Vec::new();
    for k in 0..ring_count - 1 {
        let (r0, r1) = (&rings[k], &rings[k + 1]);
        for j in 0..angular {
            let jn = (j + 1) % angular;
            let (a, b, c, d) = (r0[j], r0[jn], r1[j], r1[jn]);
            elements.push([a, b, d]);
            elements.push([a, d, c]);
        }
    }
    if apex {
        let last = &rings[ring_count - 1];
        let tip = rings[ring_count][0];
        for j in 0..angular {
            elements.push([last[j], last[(j + 1) % angular], tip]);
        }
    }

    let mut loops = Vec::new();
    if let Some(tag) = start_tag {
        loops.push(BoundaryLoop::closed(tag, rings[0].clone()));
    }
    if let (Some(tag), false) = (end_tag, apex) {
        loops.push(BoundaryLoop::closed(tag, rings[ring_count - 1].clone()));
    }

    // `hm` is all zeros when no curvature was supplied (the profiles are minimal)
    let face = FacePatch::new(nodes, elements, normal, a2, topology, loops)?.with_mean_curvature(hm)?;
    Ok(face.with_revolution(Revolution { profile: profile.clone(), angular, rings }))
}

/// Catenoid `r = a cosh(z/a)` truncated to `|z| ≤ half_height`.
pub fn make_catenoid(neck_radius: f64, half_height: f64, res: Resolution) -> Result<YSurface> {
    if !(neck_radius > 0.0) || !(half_height > 0.0) {
        return Err(argument("catenoid needs positive neck radius and half height"));
    }
    res.check()?;
    let a = neck_radius;
    let u_max = half_height / a;
    let steps = (2.0 * u_max / res.h).ceil() as usize;
    let angular = res.angular_count();
    if steps + 1 < 16 || angular < 24 {
        return Err(argument(format!(
            "resolution too coarse: {} profile samples (need 16), {angular} angular (need 24)",
            steps + 1
        )));
    }
    let (profile, a2) = catenary_profile(a, -u_max, u_max, steps, 1.0, 0.0)?;
    let face = revolve_profile(
        &profile,
        &a2,
        None,
        1.0,
        angular,
        Topology::new(0, 2, 2),
        Some(LoopTag::Truncation),
        Some(LoopTag::Truncation),
    )?;
    YSurface::new("catenoid", vec![face], vec![])
}

/// Catenary data of the rotationally symmetric Y-catenoid whose flat disk has
/// radius `r0` in the plane `z = 0`.
///
/// The catenoidal faces are `r = a cosh((±z − z_offset)/a)` and start at the
/// junction with parameter `u0`, where `sinh u0 = tan 30°` so that the three
/// conormals balance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YCatenoidParams {
    pub a: f64,
    pub u0: f64,
    pub z_offset: f64,
}

pub fn ycatenoid_profile(neck_radius: f64) -> YCatenoidParams {
    let u0 = (1.0 / 3f64.sqrt()).asinh();
    let a = neck_radius / u0.cosh();
    YCatenoidParams { a, u0, z_offset: -a * u0 }
}

/// Y-catenoid: flat disk (face 2) and two catenoidal annuli (faces 0 and 1,
/// above and below) meeting at 120° along the circle of radius `neck_radius`.
/// The annuli are truncated at catenary parameter `truncation_u`.
pub fn make_ycatenoid(neck_radius: f64, truncation_u: f64, res: Resolution) -> Result<YSurface> {
    if !(neck_radius > 0.0) {
        return Err(argument("Y-catenoid needs a positive neck radius"));
    }
    res.check()?;
    let YCatenoidParams { a, u0, .. } = ycatenoid_profile(neck_radius);
    if !(truncation_u > u0) {
        return Err(argument(format!("truncation_u = {truncation_u} must exceed u0 = {u0}")));
    }
    let angular = res.angular_count();
    let steps = ((truncation_u - u0) / res.h).ceil().max(2.0) as usize;

    let mut faces = Vec::with_capacity(3);
    for z_sign in [1.0, -1.0] {
        let (mut profile, a2) = catenary_profile(a, u0, truncation_u, steps, z_sign, u0)?;
        profile.samples[0].r = neck_radius;
        faces.push(revolve_profile(
            &profile,
            &a2,
            None,
            1.0,
            angular,
            Topology::ANNULUS,
            Some(LoopTag::Junction),
            Some(LoopTag::Truncation),
        )?);
    }

    // log-polar rings down to ρ = r0·e⁻³, then the apex
    let disk_steps = (3.0 / res.h).ceil() as usize;
    let dt = 3.0 / disk_steps as f64;
    let mut disk = Vec::with_capacity(disk_steps + 2);
    for k in 0..=disk_steps {
        let rho = neck_radius * (-(k as f64) * dt).exp();
        disk.push(ProfileSample { s: neck_radius - rho, r: rho, z: 0.0, dr_ds: -1.0, dz_ds: 0.0 });
    }
    disk.push(ProfileSample { s: neck_radius, r: 0.0, z: 0.0, dr_ds: -1.0, dz_ds: 0.0 });
    let disk_profile = ProfileCurve::new(disk)?;
    let zeros = vec![0.0; disk_profile.len()];
    faces.push(revolve_profile(
        &disk_profile,
        &zeros,
        None,
        1.0,
        angular,
        Topology::DISK,
        Some(LoopTag::Junction),
        None,
    )?);

    let mut samples = Vec::with_capacity(angular);
    let mut hvec = Vec::with_capacity(angular);
    let mut conormals = vec![Vec::with_capacity(angular); 3];
    for j in 0..angular {
        let phi = 2.0 * PI * j as f64 / angular as f64;
        let (s, c) = phi.sin_cos();
        let er = Vec3::new(c, s, 0.0);
        samples.push(neck_radius * er);
        hvec.push(-er / neck_radius);
        for (slot, face) in faces.iter().enumerate() {
            let p = face.revolution.as_ref().unwrap().profile.samples[0];
            // outward conormal: against the direction the profile leaves Γ
            conormals[slot].push(-(p.dr_ds * er + p.dz_ds * Vec3::z()));
        }
    }
    let junction = JunctionCurve::new(samples, hvec, vec![0, 1, 2], vec![0, 0, 0], conormals, true)?;
    YSurface::new("ycatenoid", faces, vec![junction])
}

/// Three flat half-strips meeting at 120° along a straight junction segment on
/// the z-axis. Each strip extends `extent` away from the junction; the faces
/// are declared compact (they are truncated half-planes).
pub fn make_flat_ycone(extent: f64, junction_length: f64, res: Resolution) -> Result<YSurface> {
    if !(extent > 0.0) || !(junction_length > 0.0) {
        return Err(argument("flat Y-cone needs positive extent and junction length"));
    }
    res.check()?;
    let ns = (extent / res.h).ceil().max(1.0) as usize;
    let nt = (junction_length / res.h).ceil().max(2.0) as usize;
    let idx = |a: usize, b: usize| a * (nt + 1) + b;
    let t_of = |b: usize| -0.5 * junction_length + junction_length * b as f64 / nt as f64;

    let mut faces = Vec::with_capacity(3);
    let mut conormals = Vec::with_capacity(3);
    for i in 0..3 {
        let ang = 2.0 * PI * i as f64 / 3.0;
        let dir = Vec3::new(ang.cos(), ang.sin(), 0.0);
        let tau = -dir;
        let nu = Vec3::z().cross(&tau);
        let mut nodes = Vec::with_capacity((ns + 1) * (nt + 1));
        for a in 0..=ns {
            for b in 0..=nt {
                nodes.push(dir * (extent * a as f64 / ns as f64) + Vec3::z() * t_of(b));
            }
        }
        let mut elements = Vec::with_capacity(2 * ns * nt);
        for a in 0..ns {
            for b in 0..nt {
                let (p, q, r, s) = (idx(a, b), idx(a + 1, b), idx(a, b + 1), idx(a + 1, b + 1));
                elements.push([p, q, s]);
                elements.push([p, s, r]);
            }
        }
        let junction_chain: Vec<usize> = (0..=nt).map(|b| idx(0, b)).collect();
        let mut rim: Vec<usize> = (0..=ns).map(|a| idx(a, nt)).collect();
        rim.extend((0..nt).rev().map(|b| idx(ns, b)));
        rim.extend((0..ns).rev().map(|a| idx(a, 0)));
        let n = nodes.len();
        let face = FacePatch::new(
            nodes,
            elements,
            vec![nu; n],
            vec![0.0; n],
            Topology::DISK,
            vec![
                BoundaryLoop::open(LoopTag::Junction, junction_chain),
                BoundaryLoop::open(LoopTag::Truncation, rim),
            ],
        )?
        .with_mean_curvature(vec![0.0; n])?;
        faces.push(face);
        conormals.push(vec![tau; nt + 1]);
    }
    let samples: Vec<Vec3> = (0..=nt).map(|b| Vec3::z() * t_of(b)).collect();
    let junction = JunctionCurve::new(
        samples,
        vec![Vec3::zeros(); nt + 1],
        vec![0, 1, 2],
        vec![0, 0, 0],
        conormals,
        false,
    )?;
    YSurface::new("flat_ycone", faces, vec![junction])
}

/// Square `[−extent, extent]²` in the plane `z = 0`.
pub fn make_plane(extent: f64, res: Resolution) -> Result<YSurface> {
    if !(extent > 0.0) {
        return Err(argument("plane needs a positive extent"));
    }
    res.check()?;
    let m = (2.0 * extent / res.h).ceil().max(2.0) as usize;
    let idx = |a: usize, b: usize| a * (m + 1) + b;
    let coord = |k: usize| -extent + 2.0 * extent * k as f64 / m as f64;
    let mut nodes = Vec::new();
    for a in 0..=m {
        for b in 0..=m {
            nodes.push(Vec3::new(coord(a), coord(b), 0.0));
        }
    }
    let mut elements = Vec::new();
    for a in 0..m {
        for b in 0..m {
            let (p, q, r, s) = (idx(a, b), idx(a + 1, b), idx(a, b + 1), idx(a + 1, b + 1));
            elements.push([p, q, s]);
            elements.push([p, s, r]);
        }
    }
    let mut rim: Vec<usize> = (0..=m).map(|a| idx(a, 0)).collect();
    rim.extend((1..=m).map(|b| idx(m, b)));
    rim.extend((0..m).rev().map(|a| idx(a, m)));
    rim.extend((1..m).rev().map(|b| idx(0, b)));
    let n = nodes.len();
    let face = FacePatch::new(
        nodes,
        elements,
        vec![Vec3::z(); n],
        vec![0.0; n],
        Topology::ANNULUS,
        vec![BoundaryLoop::closed(LoopTag::Truncation, rim)],
    )?
    .with_mean_curvature(vec![0.0; n])?;
    YSurface::new("plane", vec![face], vec![])
}

/// Zone of the sphere of radius `radius` between polar angles `polar_min` and
/// `polar_max`, with outward normal and analytic `|A|² = 2/ρ²`, `H = 2/ρ`.
/// Not minimal; used to exercise the minimality check.
pub fn make_sphere_zone(radius: f64, polar_min: f64, polar_max: f64, res: Resolution) -> Result<FacePatch> {
    if !(radius > 0.0) || !(0.0 < polar_min && polar_min < polar_max && polar_max < PI) {
        return Err(argument("sphere zone needs radius > 0 and 0 < polar_min < polar_max < π"));
    }
    res.check()?;
    let steps = ((polar_max - polar_min) / res.h).ceil().max(2.0) as usize;
    let samples = (0..=steps)
        .map(|k| {
            let t = polar_min + (polar_max - polar_min) * k as f64 / steps as f64;
            ProfileSample {
                s: radius * (t - polar_min),
                r: radius * t.sin(),
                z: radius * t.cos(),
                dr_ds: t.cos(),
                dz_ds: -t.sin(),
            }
        })
        .collect();
    let profile = ProfileCurve::new(samples)?;
    let a2 = vec![2.0 / (radius * radius); profile.len()];
    let hm = vec![2.0 / radius; profile.len()];
    revolve_profile(
        &profile,
        &a2,
        Some(&hm),
        1.0,
        res.angular_count(),
        Topology::DISK,
        Some(LoopTag::Truncation),
        Some(LoopTag::Truncation),
    )
}

/// Triangulates a parametrized patch on a rectangular `nu × nv` grid, taking
/// normals, `|A|²` and `H` from central-difference fundamental forms with the
/// grid spacing as step. The boundary is a single truncation loop.
pub fn face_from_immersion<F>(
    immersion: F,
    u_range: (f64, f64),
    v_range: (f64, f64),
    nu: usize,
    nv: usize,
    topology: Topology,
) -> Result<FacePatch>
where
    F: Fn(f64, f64) -> Vec3,
{
    if nu < 2 || nv < 2 {
        return Err(argument("immersion grid needs at least 2×2 intervals"));
    }
    let du = (u_range.1 - u_range.0) / nu as f64;
    let dv = (v_range.1 - v_range.0) / nv as f64;
    let idx = |a: usize, b: usize| a * (nv + 1) + b;
    let params: Vec<(f64, f64)> = (0..=nu)
        .flat_map(|a| (0..=nv).map(move |b| (u_range.0 + du * a as f64, v_range.0 + dv * b as f64)))
        .collect();
    let forms = fundamental_forms(&immersion, &params, du.abs().min(dv.abs()))?;
    let nodes: Vec<Vec3> = params.iter().map(|&(u, v)| immersion(u, v)).collect();
    let mut elements = Vec::new();
    for a in 0..nu {
        for b in 0..nv {
            let (p, q, r, s) = (idx(a, b), idx(a + 1, b), idx(a, b + 1), idx(a + 1, b + 1));
            elements.push([p, q, s]);
            elements.push([p, s, r]);
        }
    }
    let mut rim: Vec<usize> = (0..=nu).map(|a| idx(a, 0)).collect();
    rim.extend((1..=nv).map(|b| idx(nu, b)));
    rim.extend((0..nu).rev().map(|a| idx(a, nv)));
    rim.extend((1..nv).rev().map(|b| idx(0, b)));
    FacePatch::new(
        nodes,
        elements,
        forms.iter().map(|f| f.normal).collect(),
        forms.iter().map(|f| f.a_norm_sq).collect(),
        topology,
        vec![BoundaryLoop::closed(LoopTag::Truncation, rim)],
    )?
    .with_mean_curvature(forms.iter().map(|f| f.mean_curvature).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catenoid_neck_radius() {
        let s = make_catenoid(1.0, 1.0, Resolution::new(0.1)).unwrap();
        let prof = &s.faces[0].revolution.as_ref().unwrap().profile;
        let mid = prof.samples[prof.len() / 2];
        assert!(mid.z.abs() < 1e-14);
        assert!((mid.r - 1.0).abs() < 1e-14);
        // |A|² at the neck is 2/a²
        let ring = &s.faces[0].revolution.as_ref().unwrap().rings[prof.len() / 2];
        assert!((s.faces[0].a_norm_sq[ring[0]] - 2.0).abs() < 1e-14);
        assert_eq!(s.faces[0].topology, Topology::new(0, 2, 2));
    }

    #[test]
    fn catenoid_rejects_bad_input() {
        assert!(make_catenoid(0.0, 1.0, Resolution::new(0.1)).is_err());
        assert!(make_catenoid(1.0, -1.0, Resolution::new(0.1)).is_err());
        // 0.5/0.1 → 11 samples < 16
        assert!(make_catenoid(1.0, 0.5, Resolution::new(0.1)).is_err());
        assert!(make_catenoid(1.0, 3.0, Resolution::new(0.1).with_angular(12)).is_err());
    }

    #[test]
    fn ycatenoid_parameters() {
        let p = ycatenoid_profile(1.0);
        assert!((p.u0.sinh() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((p.a - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((p.u0.tanh() - 0.5).abs() < 1e-15);
        assert!((p.u0 - 0.549_306_144_334_054_8).abs() < 1e-12);
    }

    #[test]
    fn ycatenoid_structure() {
        let s = make_ycatenoid(1.0, 2.0, Resolution::new(0.1)).unwrap();
        assert_eq!(s.faces.len(), 3);
        assert_eq!(s.junctions.len(), 1);
        assert_eq!(s.faces[2].topology, Topology::DISK);
        assert_eq!(s.faces[0].topology, Topology::ANNULUS);
        assert!(s.faces[2].a_norm_sq.iter().all(|&v| v == 0.0));
        let j = &s.junctions[0];
        for k in 0..j.len() {
            assert!((j.curvature_vector[k].norm() - 1.0).abs() < 1e-14);
            assert!(j.curvature_vector[k].dot(&j.samples[k]) < 0.0);
        }
        assert!(make_ycatenoid(1.0, 0.5, Resolution::new(0.1)).is_err());
    }

    #[test]
    fn flat_ycone_is_flat() {
        let s = make_flat_ycone(1.0, 2.0, Resolution::new(0.25)).unwrap();
        assert_eq!(s.faces.len(), 3);
        for f in &s.faces {
            assert!(f.a_norm_sq.iter().all(|&v| v == 0.0));
        }
        let j = &s.junctions[0];
        assert!(!j.closed);
        for k in 0..j.len() {
            let sum: Vec3 = (0..3).map(|i| j.conormals[i][k]).sum();
            assert!(sum.norm() < 1e-15);
            assert_eq!(j.curvature_vector[k], Vec3::zeros());
        }
    }
}
