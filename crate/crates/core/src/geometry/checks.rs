//! Pointwise checks on generated or loaded surfaces: minimality, the 120°
//! junction configuration and the Gauss–Bonnet identity.

use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;

use super::{FacePatch, LoopTag, Vec3, YSurface};
use crate::error::{argument, structure, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurvatureSource {
    /// Mean curvature stored on the face (analytic or from fundamental forms).
    Stored,
    /// Cotangent-Laplacian estimate from node positions.
    Discrete,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimalityReport {
    pub max_abs_h: f64,
    pub offending_nodes: Vec<usize>,
    pub passed: bool,
    pub source: CurvatureSource,
}

/// Passes iff `max |H| ≤ tolerance` over interior nodes.
pub fn verify_minimality(face: &FacePatch, tolerance: f64) -> MinimalityReport {
    let boundary = face.boundary_mask();
    let (h, source) = match &face.mean_curvature {
        Some(h) => (h.clone(), CurvatureSource::Stored),
        None => (discrete_mean_curvature(face), CurvatureSource::Discrete),
    };
    let mut max_abs_h: f64 = 0.0;
    let mut offending_nodes = Vec::new();
    for (i, hv) in h.iter().enumerate() {
        if boundary[i] {
            continue;
        }
        max_abs_h = max_abs_h.max(hv.abs());
        if hv.abs() > tolerance {
            offending_nodes.push(i);
        }
    }
    MinimalityReport { max_abs_h, passed: offending_nodes.is_empty(), offending_nodes, source }
}

/// `|Δ x|` with the cotangent Laplacian and lumped areas.
fn discrete_mean_curvature(face: &FacePatch) -> Vec<f64> {
    let mut lap = vec![Vec3::zeros(); face.num_nodes()];
    for tri in &face.elements {
        for k in 0..3 {
            let (i, j, o) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
            let (a, b) = (face.nodes[i] - face.nodes[o], face.nodes[j] - face.nodes[o]);
            let cot = a.dot(&b) / a.cross(&b).norm();
            let d = face.nodes[j] - face.nodes[i];
            lap[i] += 0.5 * cot * d;
            lap[j] -= 0.5 * cot * d;
        }
    }
    lap.iter().zip(&face.area_weights).map(|(l, w)| l.norm() / w).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct YJunctionCheck {
    pub junction: usize,
    pub max_angle_deviation_deg: f64,
    /// `max |τ₁ + τ₂ + τ₃|`.
    pub max_conormal_sum: f64,
    pub max_unit_error: f64,
    /// `max |τ_i · T|`.
    pub max_tangent_dot: f64,
    /// `max |τ_i · ν_i|` against the face normal at the junction node.
    pub max_normal_dot: f64,
    /// `max |ν₁ + ν₂ + ν₃|`; zero for a compatible choice of normals.
    pub max_normal_sum: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct YConfigReport {
    pub junctions: Vec<YJunctionCheck>,
    pub passed: bool,
}

const CONORMAL_TOL: f64 = 1e-8;

/// Pairwise conormal angles against 120° (tolerance in degrees) and the
/// balance, unit-length and orthogonality conditions at every sample.
pub fn check_y_configuration(surface: &YSurface, angle_tol_deg: f64) -> Result<YConfigReport> {
    if surface.junctions.is_empty() {
        return Err(argument("surface has no junction to check"));
    }
    let mut junctions = Vec::with_capacity(surface.junctions.len());
    for (g, j) in surface.junctions.iter().enumerate() {
        if j.incident_faces.len() != 3 {
            return Err(structure(format!(
                "junction {g} has {} incident faces, a Y-junction needs 3",
                j.incident_faces.len()
            )));
        }
        let mut c = YJunctionCheck {
            junction: g,
            max_angle_deviation_deg: 0.0,
            max_conormal_sum: 0.0,
            max_unit_error: 0.0,
            max_tangent_dot: 0.0,
            max_normal_dot: 0.0,
            max_normal_sum: 0.0,
            passed: false,
        };
        for k in 0..j.len() {
            let tau = [j.conormals[0][k], j.conormals[1][k], j.conormals[2][k]];
            let mut nu_sum = Vec3::zeros();
            for slot in 0..3 {
                let face = &surface.faces[j.incident_faces[slot]];
                let node = face.boundary_loops[j.face_loops[slot]].node_ids[k];
                let nu = face.normal[node];
                nu_sum += nu;
                c.max_normal_dot = c.max_normal_dot.max(tau[slot].dot(&nu).abs());
                c.max_unit_error = c.max_unit_error.max((tau[slot].norm() - 1.0).abs());
                c.max_tangent_dot = c.max_tangent_dot.max(tau[slot].dot(&j.tangent[k]).abs());
                let other = tau[(slot + 1) % 3];
                let cos = (tau[slot].dot(&other) / (tau[slot].norm() * other.norm())).clamp(-1.0, 1.0);
                let dev = (cos.acos().to_degrees() - 120.0).abs();
                c.max_angle_deviation_deg = c.max_angle_deviation_deg.max(dev);
            }
            c.max_conormal_sum = c.max_conormal_sum.max((tau[0] + tau[1] + tau[2]).norm());
            c.max_normal_sum = c.max_normal_sum.max(nu_sum.norm());
        }
        c.passed = c.max_angle_deviation_deg <= angle_tol_deg
            && c.max_conormal_sum <= CONORMAL_TOL
            && c.max_unit_error <= CONORMAL_TOL
            && c.max_tangent_dot <= CONORMAL_TOL
            && c.max_normal_dot <= CONORMAL_TOL
            && c.max_normal_sum <= CONORMAL_TOL;
        junctions.push(c);
    }
    let passed = junctions.iter().all(|c| c.passed);
    Ok(YConfigReport { junctions, passed })
}

/// Geodesic curvature data of one junction loop of a face.
#[derive(Debug, Clone, PartialEq)]
pub struct JunctionLoopTerm {
    pub loop_index: usize,
    /// `k_i = −H_Γ · τ_i` per sample.
    pub geodesic_curvature: Vec<f64>,
    pub length_weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopTerm {
    pub loop_index: usize,
    pub tag: LoopTag,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussBonnetReport {
    pub int_k: f64,
    pub loop_terms: Vec<LoopTerm>,
    pub chi: i64,
    /// `|∫K + Σ ∮k_g − 2πχ|`.
    pub residual: f64,
    /// `residual / 2π`.
    pub relative_residual: f64,
}

/// Gauss–Bonnet bookkeeping on a compact triangulated face.
///
/// `∫K` uses the stored curvature data (`K = (H² − |A|²)/2`) with lumped
/// quadrature, junction loops use `k_i = −H_Γ·τ_i` with trapezoidal weights,
/// and truncation chains use the discrete turning `π − Σ(interior angles)`.
/// The Euler characteristic is `V − E + F` of the triangulation.
pub fn gauss_bonnet_report(face: &FacePatch, junctions: &[JunctionLoopTerm]) -> Result<GaussBonnetReport> {
    check_boundary_closed(face)?;

    let hm = face.mean_curvature.as_deref();
    let int_k: f64 = (0..face.num_nodes())
        .map(|v| {
            let h = hm.map(|h| h[v]).unwrap_or(0.0);
            0.5 * (h * h - face.a_norm_sq[v]) * face.area_weights[v]
        })
        .sum();

    let mut angle_sum = vec![0.0; face.num_nodes()];
    for tri in &face.elements {
        for k in 0..3 {
            let (o, a, b) = (tri[k], tri[(k + 1) % 3], tri[(k + 2) % 3]);
            let (ea, eb) = (face.nodes[a] - face.nodes[o], face.nodes[b] - face.nodes[o]);
            angle_sum[o] += ea.cross(&eb).norm().atan2(ea.dot(&eb));
        }
    }

    let mut on_truncation = HashSet::new();
    let mut loop_terms = Vec::new();
    for (li, l) in face.boundary_loops.iter().enumerate() {
        if l.tag != LoopTag::Truncation {
            continue;
        }
        let mut value = 0.0;
        for &v in &l.node_ids {
            if on_truncation.insert(v) {
                value += PI - angle_sum[v];
            }
        }
        loop_terms.push(LoopTerm { loop_index: li, tag: LoopTag::Truncation, value });
    }
    for (li, l) in face.boundary_loops.iter().enumerate() {
        if l.tag != LoopTag::Junction {
            continue;
        }
        let term = junctions
            .iter()
            .find(|t| t.loop_index == li)
            .ok_or_else(|| structure(format!("no junction data for junction loop {li}")))?;
        if term.geodesic_curvature.len() != l.node_ids.len() {
            return Err(structure(format!("junction data for loop {li} has the wrong length")));
        }
        let value = l
            .node_ids
            .iter()
            .enumerate()
            .filter(|(_, v)| !on_truncation.contains(v))
            .map(|(k, _)| term.geodesic_curvature[k] * term.length_weights[k])
            .sum();
        loop_terms.push(LoopTerm { loop_index: li, tag: LoopTag::Junction, value });
    }

    let chi = euler_characteristic(face);
    let total = int_k + loop_terms.iter().map(|t| t.value).sum::<f64>();
    let residual = (total - 2.0 * PI * chi as f64).abs();
    Ok(GaussBonnetReport { int_k, loop_terms, chi, residual, relative_residual: residual / (2.0 * PI) })
}

pub(crate) fn euler_characteristic(face: &FacePatch) -> i64 {
    let used: HashSet<usize> = face.elements.iter().flatten().copied().collect();
    used.len() as i64 - face.edge_set().len() as i64 + face.elements.len() as i64
}

/// The labeled chains must cover exactly the mesh boundary and join into
/// closed cycles.
fn check_boundary_closed(face: &FacePatch) -> Result<()> {
    let mut count: HashMap<(usize, usize), u32> = HashMap::new();
    for t in &face.elements {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *count.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let mesh_boundary: HashSet<(usize, usize)> =
        count.into_iter().filter(|&(_, c)| c == 1).map(|(e, _)| e).collect();
    let mut degree: HashMap<usize, u32> = HashMap::new();
    let mut covered = HashSet::new();
    for (li, l) in face.boundary_loops.iter().enumerate() {
        for (a, b) in l.edges() {
            let e = (a.min(b), a.max(b));
            if !mesh_boundary.contains(&e) {
                return Err(structure(format!("loop {li} edge {a}-{b} is not on the mesh boundary")));
            }
            covered.insert(e);
            *degree.entry(a).or_default() += 1;
            *degree.entry(b).or_default() += 1;
        }
    }
    if covered.len() != mesh_boundary.len() {
        return Err(structure("boundary loops do not cover the mesh boundary"));
    }
    if let Some((v, _)) = degree.iter().find(|(_, &d)| d != 2) {
        return Err(structure(format!("open boundary loop: chain ends at node {v}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_catenoid, make_flat_ycone, make_sphere_zone, make_ycatenoid, BoundaryLoop, Resolution};

    #[test]
    fn catenoid_is_minimal() {
        let s = make_catenoid(1.0, 2.0, Resolution::new(0.1)).unwrap();
        let r = verify_minimality(&s.faces[0], 1e-6);
        assert!(r.passed);
        assert_eq!(r.source, CurvatureSource::Stored);
    }

    #[test]
    fn sphere_zone_fails_minimality() {
        let f = make_sphere_zone(2.0, 0.5, 2.5, Resolution::new(0.1)).unwrap();
        let r = verify_minimality(&f, 1e-6);
        assert!(!r.passed);
        assert!((r.max_abs_h - 1.0).abs() < 1e-14);
    }

    #[test]
    fn discrete_estimate_on_sphere() {
        let mut f = make_sphere_zone(1.0, 1.0, 2.0, Resolution::new(0.02)).unwrap();
        f.mean_curvature = None;
        let r = verify_minimality(&f, 1e-6);
        assert_eq!(r.source, CurvatureSource::Discrete);
        assert!((r.max_abs_h - 2.0).abs() < 0.05, "{}", r.max_abs_h);
    }

    #[test]
    fn flat_faces_have_zero_h() {
        let s = make_flat_ycone(1.0, 2.0, Resolution::new(0.25)).unwrap();
        for f in &s.faces {
            assert_eq!(verify_minimality(f, 0.0).max_abs_h, 0.0);
        }
    }

    #[test]
    fn flat_ycone_configuration_is_exact() {
        let s = make_flat_ycone(1.0, 2.0, Resolution::new(0.25)).unwrap();
        let r = check_y_configuration(&s, 1e-9).unwrap();
        assert!(r.passed);
        assert!(r.junctions[0].max_angle_deviation_deg < 1e-9);
    }

    #[test]
    fn ycatenoid_configuration() {
        let s = make_ycatenoid(1.0, 2.0, Resolution::new(0.05)).unwrap();
        let r = check_y_configuration(&s, 0.1).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn surface_without_junction_is_rejected() {
        let s = make_catenoid(1.0, 2.0, Resolution::new(0.1)).unwrap();
        assert!(check_y_configuration(&s, 0.1).is_err());
    }

    #[test]
    fn unit_disk_gauss_bonnet() {
        let s = make_ycatenoid(1.0, 2.0, Resolution::new(0.02)).unwrap();
        let r = gauss_bonnet_report(&s.faces[2], &s.junction_terms(2)).unwrap();
        assert_eq!(r.chi, 1);
        assert_eq!(r.int_k, 0.0);
        assert!((r.loop_terms[0].value - 2.0 * PI).abs() < 1e-3);
        assert!(r.relative_residual < 1e-3);
    }

    #[test]
    fn dangling_chain_is_an_error() {
        let s = make_flat_ycone(1.0, 2.0, Resolution::new(0.5)).unwrap();
        let mut face = s.faces[0].clone();
        face.boundary_loops.truncate(1);
        assert!(gauss_bonnet_report(&face, &s.junction_terms(0)).is_err());
        face.boundary_loops = vec![BoundaryLoop::open(LoopTag::Truncation, vec![0, 1])];
        assert!(gauss_bonnet_report(&face, &[]).is_err());
    }
}
