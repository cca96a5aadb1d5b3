//! Discrete Y-surfaces: triangulated minimal faces glued along junction curves.
//!
//! A [`YSurface`] is a list of [`FacePatch`]es together with the
//! [`JunctionCurve`]s along which exactly three faces meet. Faces keep their own
//! copies of the junction nodes; the `k`-th node of a face's junction loop sits
//! on the `k`-th sample of the junction polyline.

mod checks;
mod density;
mod forms;
mod generators;

pub use checks::{
    check_y_configuration, gauss_bonnet_report, verify_minimality, CurvatureSource,
    GaussBonnetReport, JunctionLoopTerm, LoopTerm, MinimalityReport, YConfigReport,
    YJunctionCheck,
};
pub use density::{density_report, triangle_ball_area, DensityCenter, DensityReport};
pub use forms::{fundamental_forms, FormSample};
pub use generators::{
    catenary_profile, face_from_immersion, make_catenoid, make_flat_ycone, make_plane,
    make_sphere_zone, make_ycatenoid, revolve_profile, ycatenoid_profile, Resolution,
    YCatenoidParams,
};

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{structure, Result};

pub type Vec3 = Vector3<f64>;

/// Declared topology of a face: genus, number of ends and the sum of the end
/// multiplicities. Ends are asymptotic data, so they are never inferred from a
/// truncated mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Topology {
    pub genus: u32,
    pub num_ends: u32,
    pub end_multiplicity_sum: u32,
}

impl Topology {
    pub const DISK: Topology = Topology::new(0, 0, 0);
    pub const ANNULUS: Topology = Topology::new(0, 1, 1);

    pub const fn new(genus: u32, num_ends: u32, end_multiplicity_sum: u32) -> Self {
        Self { genus, num_ends, end_multiplicity_sum }
    }

    /// Euler characteristic of the face with its junction boundary: `1 − 2g − e`.
    pub fn euler_characteristic(&self) -> i64 {
        1 - 2 * self.genus as i64 - self.num_ends as i64
    }

    /// `2π(1 − 2g − e − d)`.
    pub fn alpha(&self) -> f64 {
        let k = 1 - 2 * self.genus as i64 - self.num_ends as i64 - self.end_multiplicity_sum as i64;
        2.0 * PI * k as f64
    }

    pub fn is_compact(&self) -> bool {
        self.num_ends == 0
    }
}

/// One sample of an arclength-parametrized profile curve in the `(r, z)`
/// half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub s: f64,
    pub r: f64,
    pub z: f64,
    pub dr_ds: f64,
    pub dz_ds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub samples: Vec<ProfileSample>,
    pub param_range: (f64, f64),
}

impl ProfileCurve {
    pub fn new(samples: Vec<ProfileSample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(structure("profile curve needs at least two samples"));
        }
        let param_range = (samples[0].s, samples[samples.len() - 1].s);
        let curve = Self { samples, param_range };
        curve.validate(1e-10)?;
        Ok(curve)
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let last = self.samples.len() - 1;
        for (k, p) in self.samples.iter().enumerate() {
            let speed = p.dr_ds.hypot(p.dz_ds);
            if (speed - 1.0).abs() > tol {
                return Err(structure(format!("profile sample {k} is not unit speed ({speed})")));
            }
            let interior = k != 0 && k != last;
            if p.r < 0.0 || (interior && p.r <= 0.0) {
                return Err(structure(format!("profile sample {k} has r = {} off the axis", p.r)));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Ring structure of a face obtained by revolving a profile about the z-axis.
/// `rings[k]` lists the nodes generated from profile sample `k`; a profile
/// endpoint on the axis produces a single apex node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Revolution {
    pub profile: ProfileCurve,
    pub angular: usize,
    pub rings: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopTag {
    Junction,
    Truncation,
}

/// A labeled boundary chain. Closed loops wrap from the last node back to the
/// first; open chains are used where a junction segment ends on a truncation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryLoop {
    pub tag: LoopTag,
    pub node_ids: Vec<usize>,
    #[serde(default = "default_closed")]
    pub closed: bool,
}

fn default_closed() -> bool {
    true
}

impl BoundaryLoop {
    pub fn closed(tag: LoopTag, node_ids: Vec<usize>) -> Self {
        Self { tag, node_ids, closed: true }
    }

    pub fn open(tag: LoopTag, node_ids: Vec<usize>) -> Self {
        Self { tag, node_ids, closed: false }
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.node_ids.len();
        let m = if self.closed { n } else { n.saturating_sub(1) };
        (0..m).map(move |k| (self.node_ids[k], self.node_ids[(k + 1) % n]))
    }
}

/// A triangulated face `Σ_i` with per-node curvature data and declared topology.
#[derive(Debug, Clone, PartialEq)]
pub struct FacePatch {
    pub nodes: Vec<Vec3>,
    pub elements: Vec<[usize; 3]>,
    pub normal: Vec<Vec3>,
    /// `|A|²` per node.
    pub a_norm_sq: Vec<f64>,
    /// Mean curvature (sum of principal curvatures) per node when known.
    pub mean_curvature: Option<Vec<f64>>,
    /// Lumped nodal areas: a third of the incident triangle areas.
    pub area_weights: Vec<f64>,
    pub topology: Topology,
    pub boundary_loops: Vec<BoundaryLoop>,
    pub revolution: Option<Revolution>,
}

impl FacePatch {
    pub fn new(
        nodes: Vec<Vec3>,
        elements: Vec<[usize; 3]>,
        normal: Vec<Vec3>,
        a_norm_sq: Vec<f64>,
        topology: Topology,
        boundary_loops: Vec<BoundaryLoop>,
    ) -> Result<Self> {
        let mut face = Self {
            area_weights: Vec::new(),
            nodes,
            elements,
            normal,
            a_norm_sq,
            mean_curvature: None,
            topology,
            boundary_loops,
            revolution: None,
        };
        face.validate_shape()?;
        face.area_weights = face.lumped_areas();
        face.validate()?;
        Ok(face)
    }

    pub fn with_mean_curvature(mut self, h: Vec<f64>) -> Result<Self> {
        if h.len() != self.nodes.len() {
            return Err(structure("mean curvature length does not match node count"));
        }
        self.mean_curvature = Some(h);
        Ok(self)
    }

    pub fn with_revolution(mut self, revolution: Revolution) -> Self {
        self.revolution = Some(revolution);
        self
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    fn validate_shape(&self) -> Result<()> {
        let n = self.nodes.len();
        if self.normal.len() != n {
            return Err(structure("normal count does not match node count"));
        }
        if self.a_norm_sq.len() != n {
            return Err(structure("missing |A|² data: length does not match node count"));
        }
        if let Some(e) = self.elements.iter().flatten().find(|&&i| i >= n) {
            return Err(structure(format!("element references node {e} out of range")));
        }
        for l in &self.boundary_loops {
            if let Some(i) = l.node_ids.iter().find(|&&i| i >= n) {
                return Err(structure(format!("boundary loop references node {i} out of range")));
            }
        }
        Ok(())
    }

    /// Structural invariants: unit normals, positive element areas, a connected
    /// element graph and simple boundary chains made of mesh edges.
    pub fn validate(&self) -> Result<()> {
        self.validate_shape()?;
        for (i, nu) in self.normal.iter().enumerate() {
            if (nu.norm() - 1.0).abs() > 1e-8 {
                return Err(structure(format!("normal at node {i} is not unit (|ν| = {})", nu.norm())));
            }
        }
        for (e, _) in self.elements.iter().enumerate() {
            if !(self.element_area(e) > 0.0) {
                return Err(structure(format!("element {e} has nonpositive area")));
            }
        }
        if !self.elements_connected() {
            return Err(structure("element graph is not connected"));
        }
        let edges = self.edge_set();
        for (k, l) in self.boundary_loops.iter().enumerate() {
            let mut seen = std::collections::HashSet::new();
            if l.node_ids.iter().any(|i| !seen.insert(*i)) {
                return Err(structure(format!("boundary loop {k} repeats a node")));
            }
            if l.closed && l.node_ids.len() < 3 {
                return Err(structure(format!("boundary loop {k} is too short to close")));
            }
            for (a, b) in l.edges() {
                if !edges.contains(&(a.min(b), a.max(b))) {
                    return Err(structure(format!("boundary loop {k} step {a}-{b} is not a mesh edge")));
                }
            }
        }
        Ok(())
    }

    pub fn element_area(&self, e: usize) -> f64 {
        let [a, b, c] = self.elements[e];
        0.5 * (self.nodes[b] - self.nodes[a]).cross(&(self.nodes[c] - self.nodes[a])).norm()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.elements.len()).map(|e| self.element_area(e)).sum()
    }

    fn lumped_areas(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.nodes.len()];
        for (e, tri) in self.elements.iter().enumerate() {
            let third = self.element_area(e) / 3.0;
            for &i in tri {
                w[i] += third;
            }
        }
        w
    }

    /// `Σ_v f(v) · area_v`.
    pub fn integrate_nodal(&self, values: &[f64]) -> f64 {
        values.iter().zip(&self.area_weights).map(|(f, w)| f * w).sum()
    }

    /// `∫|A|²` by lumped quadrature.
    pub fn total_curvature(&self) -> f64 {
        self.integrate_nodal(&self.a_norm_sq)
    }

    pub fn edge_set(&self) -> std::collections::HashSet<(usize, usize)> {
        let mut set = std::collections::HashSet::with_capacity(self.elements.len() * 2);
        for t in &self.elements {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                set.insert((a.min(b), a.max(b)));
            }
        }
        set
    }

    /// Nodes lying on `truncation` chains; they carry homogeneous Dirichlet data.
    pub fn truncation_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.nodes.len()];
        for l in self.boundary_loops.iter().filter(|l| l.tag == LoopTag::Truncation) {
            for &i in &l.node_ids {
                mask[i] = true;
            }
        }
        mask
    }

    pub fn boundary_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.nodes.len()];
        for &i in self.boundary_loops.iter().flat_map(|l| &l.node_ids) {
            mask[i] = true;
        }
        mask
    }

    fn elements_connected(&self) -> bool {
        if self.elements.is_empty() {
            return false;
        }
        let mut parent: Vec<usize> = (0..self.nodes.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for t in &self.elements {
            for k in 1..3 {
                let (a, b) = (find(&mut parent, t[0]), find(&mut parent, t[k]));
                parent[a] = b;
            }
        }
        let root = find(&mut parent, self.elements[0][0]);
        self.elements.iter().flatten().all(|&i| find(&mut parent, i) == root)
    }
}

/// The triple-junction curve `Γ` with its curvature vector and the outward
/// conormals of the three incident faces.
#[derive(Debug, Clone, PartialEq)]
pub struct JunctionCurve {
    pub samples: Vec<Vec3>,
    /// `H_Γ` per sample.
    pub curvature_vector: Vec<Vec3>,
    pub incident_faces: Vec<usize>,
    /// Index of the junction loop inside each incident face.
    pub face_loops: Vec<usize>,
    /// `conormals[slot][sample]`: unit conormal of face `incident_faces[slot]`,
    /// tangent to the face, orthogonal to `Γ`, pointing away from the face.
    pub conormals: Vec<Vec<Vec3>>,
    pub closed: bool,
    pub tangent: Vec<Vec3>,
    /// Trapezoidal arclength weight per sample.
    pub length_weights: Vec<f64>,
}

impl JunctionCurve {
    pub fn new(
        samples: Vec<Vec3>,
        curvature_vector: Vec<Vec3>,
        incident_faces: Vec<usize>,
        face_loops: Vec<usize>,
        conormals: Vec<Vec<Vec3>>,
        closed: bool,
    ) -> Result<Self> {
        let m = samples.len();
        if m < 2 || (closed && m < 3) {
            return Err(structure("junction polyline has too few samples"));
        }
        if curvature_vector.len() != m {
            return Err(structure("curvature vector count does not match samples"));
        }
        if incident_faces.len() != face_loops.len() || incident_faces.len() != conormals.len() {
            return Err(structure("junction incidence lists have mismatched lengths"));
        }
        if conormals.iter().any(|c| c.len() != m) {
            return Err(structure("conormal count does not match samples"));
        }
        let (tangent, length_weights) = polyline_frame(&samples, closed);
        Ok(Self {
            samples,
            curvature_vector,
            incident_faces,
            face_loops,
            conormals,
            closed,
            tangent,
            length_weights,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `k_i = −H_Γ · τ_i` at every sample for the face in `slot`.
    pub fn geodesic_curvature(&self, slot: usize) -> Vec<f64> {
        self.curvature_vector
            .iter()
            .zip(&self.conormals[slot])
            .map(|(h, t)| -h.dot(t))
            .collect()
    }

    pub fn length(&self) -> f64 {
        self.length_weights.iter().sum()
    }

    pub fn slot_of(&self, face: usize) -> Option<usize> {
        self.incident_faces.iter().position(|&f| f == face)
    }
}

fn polyline_frame(x: &[Vec3], closed: bool) -> (Vec<Vec3>, Vec<f64>) {
    let m = x.len();
    let seg: Vec<f64> = (0..m - 1).map(|k| (x[k + 1] - x[k]).norm()).collect();
    let wrap = (x[0] - x[m - 1]).norm();
    let mut tangent = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for k in 0..m {
        let (prev, next) = if closed {
            (x[(k + m - 1) % m], x[(k + 1) % m])
        } else {
            (x[k.saturating_sub(1)], x[(k + 1).min(m - 1)])
        };
        tangent.push((next - prev).normalize());
        let left = if k > 0 { seg[k - 1] } else if closed { wrap } else { 0.0 };
        let right = if k < m - 1 { seg[k] } else if closed { wrap } else { 0.0 };
        weights.push(0.5 * (left + right));
    }
    (tangent, weights)
}

/// Faces glued along junction curves.
#[derive(Debug, Clone, PartialEq)]
pub struct YSurface {
    pub label: String,
    pub faces: Vec<FacePatch>,
    pub junctions: Vec<JunctionCurve>,
}

impl YSurface {
    pub fn new(label: impl Into<String>, faces: Vec<FacePatch>, junctions: Vec<JunctionCurve>) -> Result<Self> {
        let s = Self { label: label.into(), faces, junctions };
        s.validate()?;
        Ok(s)
    }

    /// Checks every face and the junction incidence: three distinct faces per
    /// junction, junction-tagged loops with matching node positions (1e−10).
    pub fn validate(&self) -> Result<()> {
        if self.faces.is_empty() {
            return Err(structure("surface has no faces"));
        }
        for (i, f) in self.faces.iter().enumerate() {
            f.validate().map_err(|e| structure(format!("face {i}: {e}")))?;
        }
        for (g, j) in self.junctions.iter().enumerate() {
            if j.incident_faces.len() != 3 {
                return Err(structure(format!(
                    "junction {g} has {} incident faces, expected 3",
                    j.incident_faces.len()
                )));
            }
            let mut distinct = j.incident_faces.clone();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() != 3 {
                return Err(structure(format!("junction {g} repeats an incident face")));
            }
            for (slot, (&f, &l)) in j.incident_faces.iter().zip(&j.face_loops).enumerate() {
                let face = self
                    .faces
                    .get(f)
                    .ok_or_else(|| structure(format!("junction {g} references missing face {f}")))?;
                let lp = face
                    .boundary_loops
                    .get(l)
                    .ok_or_else(|| structure(format!("junction {g} references missing loop {l} of face {f}")))?;
                if lp.tag != LoopTag::Junction {
                    return Err(structure(format!("loop {l} of face {f} is not tagged junction")));
                }
                if lp.node_ids.len() != j.len() || lp.closed != j.closed {
                    return Err(structure(format!(
                        "unmatched junction nodes: loop {l} of face {f} does not follow junction {g}"
                    )));
                }
                for (k, &node) in lp.node_ids.iter().enumerate() {
                    let d = (face.nodes[node] - j.samples[k]).norm();
                    if d > 1e-10 {
                        return Err(structure(format!(
                            "unmatched junction nodes: face {f} node {node} is {d:e} from junction {g} sample {k} (slot {slot})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Offsets of each face in the stacked node numbering.
    pub fn node_offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.faces.len() + 1);
        let mut acc = 0;
        off.push(0);
        for f in &self.faces {
            acc += f.num_nodes();
            off.push(acc);
        }
        off
    }

    pub fn total_nodes(&self) -> usize {
        self.faces.iter().map(FacePatch::num_nodes).sum()
    }

    pub fn is_rotationally_symmetric(&self) -> bool {
        self.faces.iter().all(|f| f.revolution.is_some())
    }

    /// Junction loop terms for Gauss–Bonnet on `face`.
    pub fn junction_terms(&self, face: usize) -> Vec<JunctionLoopTerm> {
        let mut out = Vec::new();
        for j in &self.junctions {
            if let Some(slot) = j.slot_of(face) {
                out.push(JunctionLoopTerm {
                    loop_index: j.face_loops[slot],
                    geodesic_curvature: j.geodesic_curvature(slot),
                    length_weights: j.length_weights.clone(),
                });
            }
        }
        out
    }
}
