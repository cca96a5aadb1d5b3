//! The second variation of area as sparse symmetric matrices.
//!
//! For a stacked nodal field `f` (face 0 nodes, then face 1, ...) the index form
//! is `Q(f) = fᵀ(S − P − J)f` with
//!
//! * `S` the P1 stiffness matrix `Σ_j ∫|∇f_j|²`,
//! * `P` the lumped potential `Σ_j ∫|A_j|² f_j²`,
//! * `J` the lumped junction term `Σ_i ∫_Γ (H_Γ·τ_i) f_i²` with trapezoidal
//!   weights along the shared junction polyline,
//!
//! and `M` the lumped mass used for the generalized eigenproblem. Admissible
//! fields vanish on truncation loops and satisfy `f₁ + f₂ + f₃ = 0` at every
//! junction sample; [`Reducer`] parametrizes that subspace.

mod cutoff;

pub use cutoff::{
    build_log_cutoff, l2star_norm, l2star_norm_sq, l2star_weight, q_of_constants, smoothstep,
    smoothstep_derivative, ConstantsQ, CutoffProfile, SMOOTHSTEP_BOUND,
};

use crate::error::{structure, Error, Result};
use crate::geometry::YSurface;
use crate::sparse::{CsrMatrix, Triplets};

/// Assembled matrices over the full stacked node set.
#[derive(Debug, Clone)]
pub struct IndexFormMatrices {
    pub stiffness: CsrMatrix,
    pub potential: CsrMatrix,
    pub junction: CsrMatrix,
    pub mass: CsrMatrix,
    /// `offsets[i]` is the first stacked index of face `i`.
    pub offsets: Vec<usize>,
}

impl IndexFormMatrices {
    pub fn dim(&self) -> usize {
        self.stiffness.dim()
    }

    /// `S − P − J`.
    pub fn form(&self) -> CsrMatrix {
        CsrMatrix::linear_combination(&[(1.0, &self.stiffness), (-1.0, &self.potential), (-1.0, &self.junction)])
    }

    pub fn quadratic_value(&self, f: &[f64]) -> f64 {
        self.stiffness.quad_form(f) - self.potential.quad_form(f) - self.junction.quad_form(f)
    }
}

/// Assembles `S`, `P`, `J` and `M` for `surface`.
pub fn assemble_index_form(surface: &YSurface) -> Result<IndexFormMatrices> {
    surface.validate()?;
    let offsets = surface.node_offsets();
    let n = surface.total_nodes();
    let nnz: usize = surface.faces.iter().map(|f| 9 * f.elements.len()).sum();
    let mut s = Triplets::with_capacity(n, nnz);
    let mut p = Triplets::with_capacity(n, n);
    let mut m = Triplets::with_capacity(n, n);
    for (fi, face) in surface.faces.iter().enumerate() {
        let off = offsets[fi];
        for tri in &face.elements {
            let x = [face.nodes[tri[0]], face.nodes[tri[1]], face.nodes[tri[2]]];
            // edge opposite vertex i
            let e = [x[2] - x[1], x[0] - x[2], x[1] - x[0]];
            let area4 = 2.0 * e[2].cross(&(-e[1])).norm();
            for i in 0..3 {
                s.push(off + tri[i], off + tri[i], e[i].norm_squared() / area4);
                for j in i + 1..3 {
                    s.push_sym(off + tri[i], off + tri[j], e[i].dot(&e[j]) / area4);
                }
            }
        }
        for v in 0..face.num_nodes() {
            p.push(off + v, off + v, face.a_norm_sq[v] * face.area_weights[v]);
            m.push(off + v, off + v, face.area_weights[v]);
        }
    }
    let mut jt = Triplets::new(n);
    for junction in &surface.junctions {
        for slot in 0..3 {
            let fi = junction.incident_faces[slot];
            let lp = &surface.faces[fi].boundary_loops[junction.face_loops[slot]];
            for (k, &node) in lp.node_ids.iter().enumerate() {
                let h_tau = junction.curvature_vector[k].dot(&junction.conormals[slot][k]);
                jt.push(offsets[fi] + node, offsets[fi] + node, h_tau * junction.length_weights[k]);
            }
        }
    }
    Ok(IndexFormMatrices {
        stiffness: s.into_csr(),
        potential: p.into_csr(),
        junction: jt.into_csr(),
        mass: m.into_csr(),
        offsets,
    })
}

/// Linear parametrization `f = R g` of the admissible fields.
///
/// Truncation nodes are fixed to zero. At each junction sample the node of
/// the face in slot 2 is eliminated through `f₃ = −f₁ − f₂`; when any of the
/// three nodes at a sample lies on a truncation loop, all three are fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct Reducer {
    /// Per stacked node: `(reduced index, coefficient)` terms.
    map: Vec<Vec<(usize, f64)>>,
    /// Stacked node carrying each reduced degree of freedom.
    pub representative: Vec<usize>,
    /// Face owning each reduced degree of freedom.
    pub face_of: Vec<usize>,
    /// Whether each reduced degree of freedom sits on a junction.
    pub on_junction: Vec<bool>,
}

impl Reducer {
    pub fn new(surface: &YSurface) -> Self {
        let offsets = surface.node_offsets();
        let n = surface.total_nodes();
        let mut fixed = vec![false; n];
        for (fi, face) in surface.faces.iter().enumerate() {
            for (v, t) in face.truncation_mask().into_iter().enumerate() {
                fixed[offsets[fi] + v] = t;
            }
        }
        let mut triples = Vec::new();
        for junction in &surface.junctions {
            for k in 0..junction.len() {
                let g: Vec<usize> = (0..3)
                    .map(|slot| {
                        let fi = junction.incident_faces[slot];
                        offsets[fi] + surface.faces[fi].boundary_loops[junction.face_loops[slot]].node_ids[k]
                    })
                    .collect();
                triples.push([g[0], g[1], g[2]]);
            }
        }
        let mut junction_node = vec![false; n];
        let mut eliminated: Vec<Option<(usize, usize)>> = vec![None; n];
        for t in &triples {
            if t.iter().any(|&g| fixed[g]) {
                continue;
            }
            junction_node[t[0]] = true;
            junction_node[t[1]] = true;
            eliminated[t[2]] = Some((t[0], t[1]));
        }
        for t in &triples {
            if t.iter().any(|&g| fixed[g]) {
                for &g in t {
                    fixed[g] = true;
                    junction_node[g] = false;
                    eliminated[g] = None;
                }
            }
        }

        let mut face_of_node = vec![0; n];
        for fi in 0..surface.faces.len() {
            face_of_node[offsets[fi]..offsets[fi + 1]].fill(fi);
        }
        let mut reduced = vec![usize::MAX; n];
        let (mut representative, mut face_of, mut on_junction) = (Vec::new(), Vec::new(), Vec::new());
        for g in 0..n {
            if !fixed[g] && eliminated[g].is_none() {
                reduced[g] = representative.len();
                representative.push(g);
                face_of.push(face_of_node[g]);
                on_junction.push(junction_node[g]);
            }
        }
        let map = (0..n)
            .map(|g| match (fixed[g], eliminated[g]) {
                (true, _) => vec![],
                (false, Some((a, b))) => vec![(reduced[a], -1.0), (reduced[b], -1.0)],
                (false, None) => vec![(reduced[g], 1.0)],
            })
            .collect();
        Self { map, representative, face_of, on_junction }
    }

    pub fn full_dim(&self) -> usize {
        self.map.len()
    }

    pub fn reduced_dim(&self) -> usize {
        self.representative.len()
    }

    /// `R g`: the admissible stacked field for reduced coordinates `g`.
    pub fn expand(&self, g: &[f64]) -> Vec<f64> {
        assert_eq!(g.len(), self.reduced_dim());
        self.map.iter().map(|terms| terms.iter().map(|&(p, c)| c * g[p]).sum()).collect()
    }

    /// `Rᵀ y`.
    pub fn expand_transpose(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.full_dim());
        let mut out = vec![0.0; self.reduced_dim()];
        for (terms, v) in self.map.iter().zip(y) {
            for &(p, c) in terms {
                out[p] += c * v;
            }
        }
        out
    }

    /// Reduced coordinates of an admissible stacked field (its values at the
    /// representative nodes).
    pub fn restrict(&self, f: &[f64]) -> Vec<f64> {
        self.representative.iter().map(|&g| f[g]).collect()
    }

    /// `Rᵀ A R`, built from the upper triangle of `A` so that the result is
    /// exactly symmetric whenever `A` is.
    pub fn reduce(&self, a: &CsrMatrix) -> CsrMatrix {
        assert_eq!(a.dim(), self.full_dim());
        let mut t = Triplets::with_capacity(self.reduced_dim(), 2 * a.nnz());
        for (r, s, v) in a.triplets() {
            if s < r {
                continue;
            }
            for &(p, cp) in &self.map[r] {
                for &(q, cq) in &self.map[s] {
                    let w = cp * cq * v;
                    t.push(p, q, w);
                    if r != s {
                        t.push(q, p, w);
                    }
                }
            }
        }
        t.into_csr()
    }
}

/// Index form and mass restricted to admissible fields.
#[derive(Debug, Clone)]
pub struct ReducedForm {
    /// `Rᵀ(S − P − J)R`.
    pub form: CsrMatrix,
    /// `Rᵀ M R`; positive definite.
    pub mass: CsrMatrix,
    pub reducer: Reducer,
}

impl ReducedForm {
    pub fn dim(&self) -> usize {
        self.form.dim()
    }
}

pub fn apply_compatibility(matrices: &IndexFormMatrices, surface: &YSurface) -> Result<ReducedForm> {
    for (g, j) in surface.junctions.iter().enumerate() {
        if j.incident_faces.len() != 3 {
            return Err(structure(format!("junction {g} does not have three incident faces")));
        }
    }
    let reducer = Reducer::new(surface);
    if reducer.full_dim() != matrices.dim() {
        return Err(structure("matrices were assembled for a different surface"));
    }
    Ok(ReducedForm { form: reducer.reduce(&matrices.form()), mass: reducer.reduce(&matrices.mass), reducer })
}

/// Assemble and reduce in one step.
pub fn reduced_index_form(surface: &YSurface) -> Result<ReducedForm> {
    apply_compatibility(&assemble_index_form(surface)?, surface)
}

/// Per-face nodal values of a normal displacement `f_i ν_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalField {
    pub values: Vec<Vec<f64>>,
}

impl NormalField {
    pub fn zeros(surface: &YSurface) -> Self {
        Self { values: surface.faces.iter().map(|f| vec![0.0; f.num_nodes()]).collect() }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(surface: &YSurface, mut f: F) -> Self {
        Self {
            values: surface
                .faces
                .iter()
                .enumerate()
                .map(|(fi, face)| (0..face.num_nodes()).map(|v| f(fi, v)).collect())
                .collect(),
        }
    }

    pub fn from_stacked(surface: &YSurface, f: &[f64]) -> Result<Self> {
        if f.len() != surface.total_nodes() {
            return Err(structure("stacked field length does not match node count"));
        }
        let off = surface.node_offsets();
        Ok(Self { values: (0..surface.faces.len()).map(|i| f[off[i]..off[i + 1]].to_vec()).collect() })
    }

    pub fn stacked(&self) -> Vec<f64> {
        self.values.concat()
    }

    fn scale(&self) -> f64 {
        self.values.iter().flatten().fold(1.0, |m: f64, v| m.max(v.abs()))
    }

    /// `max |f₁ + f₂ + f₃|` over junction samples.
    pub fn compatibility_defect(&self, surface: &YSurface) -> f64 {
        let mut worst: f64 = 0.0;
        for j in &surface.junctions {
            for k in 0..j.len() {
                let sum: f64 = (0..3)
                    .map(|slot| {
                        let fi = j.incident_faces[slot];
                        self.values[fi][surface.faces[fi].boundary_loops[j.face_loops[slot]].node_ids[k]]
                    })
                    .sum();
                worst = worst.max(sum.abs());
            }
        }
        worst
    }

    /// `max |f|` over truncation nodes.
    pub fn dirichlet_defect(&self, surface: &YSurface) -> f64 {
        let mut worst: f64 = 0.0;
        for (face, vals) in surface.faces.iter().zip(&self.values) {
            for (t, v) in face.truncation_mask().into_iter().zip(vals) {
                if t {
                    worst = worst.max(v.abs());
                }
            }
        }
        worst
    }
}

const ADMISSIBLE_TOL: f64 = 1e-12;

/// `Q(f)` by direct elementwise quadrature: the gradient term from the P1
/// gradient on each triangle, the potential with a third of each triangle's
/// area at its vertices, and the junction term with trapezoidal weights.
pub fn evaluate_q(field: &NormalField, surface: &YSurface) -> Result<f64> {
    if field.values.len() != surface.faces.len()
        || field.values.iter().zip(&surface.faces).any(|(v, f)| v.len() != f.num_nodes())
    {
        return Err(Error::Inadmissible("field shape does not match the surface".into()));
    }
    let scale = field.scale();
    let defect = field.compatibility_defect(surface);
    if defect > ADMISSIBLE_TOL * scale {
        return Err(Error::Inadmissible(format!(
            "junction compatibility f₁ + f₂ + f₃ = 0 violated by {defect:e}"
        )));
    }
    let defect = field.dirichlet_defect(surface);
    if defect > ADMISSIBLE_TOL * scale {
        return Err(Error::Inadmissible(format!("nonzero value {defect:e} on a truncation loop")));
    }

    let mut q = 0.0;
    for (face, f) in surface.faces.iter().zip(&field.values) {
        for tri in &face.elements {
            let x = [face.nodes[tri[0]], face.nodes[tri[1]], face.nodes[tri[2]]];
            let (d1, d2) = (x[1] - x[0], x[2] - x[0]);
            let normal = d1.cross(&d2);
            let area = 0.5 * normal.norm();
            // ∇λ_i = (n × e_i) / (2A) with e_i the edge opposite vertex i
            let unit = normal / normal.norm();
            let grad = (0..3).fold(crate::geometry::Vec3::zeros(), |g, i| {
                let e = x[(i + 2) % 3] - x[(i + 1) % 3];
                g + f[tri[i]] * unit.cross(&e) / (2.0 * area)
            });
            q += area * grad.norm_squared();
            for &v in tri {
                q -= area / 3.0 * face.a_norm_sq[v] * f[v] * f[v];
            }
        }
    }
    for j in &surface.junctions {
        for slot in 0..3 {
            let fi = j.incident_faces[slot];
            let lp = &surface.faces[fi].boundary_loops[j.face_loops[slot]];
            for (k, &node) in lp.node_ids.iter().enumerate() {
                let fv = field.values[fi][node];
                q -= j.curvature_vector[k].dot(&j.conormals[slot][k]) * j.length_weights[k] * fv * fv;
            }
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_catenoid, make_flat_ycone, make_plane, make_ycatenoid, Resolution};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn assembled_matrices_are_symmetric() {
        let s = make_ycatenoid(1.0, 1.5, Resolution::new(0.1)).unwrap();
        let m = assemble_index_form(&s).unwrap();
        for a in [&m.stiffness, &m.potential, &m.junction, &m.mass, &m.form()] {
            assert!(a.is_symmetric());
        }
        let r = apply_compatibility(&m, &s).unwrap();
        assert!(r.form.is_symmetric() && r.mass.is_symmetric());
    }

    #[test]
    fn stiffness_kills_constants() {
        let s = make_catenoid(1.0, 1.5, Resolution::new(0.1)).unwrap();
        let m = assemble_index_form(&s).unwrap();
        let ones = vec![1.0; m.dim()];
        assert!(m.stiffness.mul_vec(&ones).iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn hat_function_on_plane() {
        let s = make_plane(1.0, Resolution::new(0.25)).unwrap();
        let m = assemble_index_form(&s).unwrap();
        // the centre node of the 9×9 grid
        let c = 4 * 9 + 4;
        let mut f = vec![0.0; m.dim()];
        f[c] = 1.0;
        let q = evaluate_q(&NormalField::from_stacked(&s, &f).unwrap(), &s).unwrap();
        assert!((q - m.stiffness.get(c, c)).abs() < 1e-14);
        // right-isosceles grid: the cotangent Laplacian diagonal is 4
        assert!((q - 4.0).abs() < 1e-12);
    }

    #[test]
    fn no_junction_means_dirichlet_only() {
        let s = make_catenoid(1.0, 1.5, Resolution::new(0.1)).unwrap();
        let r = Reducer::new(&s);
        let rim: usize = s.faces[0].truncation_mask().iter().filter(|&&t| t).count();
        assert_eq!(r.reduced_dim(), r.full_dim() - rim);
        assert!(r.on_junction.iter().all(|&j| !j));
    }

    #[test]
    fn reconstruction_satisfies_constraint() {
        let s = make_ycatenoid(1.0, 1.5, Resolution::new(0.1)).unwrap();
        let r = Reducer::new(&s);
        let mut g = vec![0.0; r.reduced_dim()];
        for (p, &fi) in r.face_of.iter().enumerate() {
            if r.on_junction[p] {
                g[p] = if fi == 0 { 0.7 } else { -1.9 };
            }
        }
        let f = NormalField::from_stacked(&s, &r.expand(&g)).unwrap();
        let j = &s.junctions[0];
        for k in 0..j.len() {
            let disk_node = s.faces[2].boundary_loops[0].node_ids[k];
            assert_eq!(f.values[2][disk_node], -0.7 + 1.9);
        }
        assert!(f.compatibility_defect(&s) < 1e-15);
    }

    #[test]
    fn reduced_value_equals_full_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for s in [
            make_ycatenoid(1.0, 1.5, Resolution::new(0.1)).unwrap(),
            make_flat_ycone(1.0, 1.0, Resolution::new(0.1)).unwrap(),
        ] {
            let m = assemble_index_form(&s).unwrap();
            let red = apply_compatibility(&m, &s).unwrap();
            for _ in 0..20 {
                let g: Vec<f64> = (0..red.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let f = red.reducer.expand(&g);
                let full = m.quadratic_value(&f);
                let reduced = red.form.quad_form(&g);
                assert!((full - reduced).abs() <= 1e-12 * full.abs().max(1.0));
                let quad = evaluate_q(&NormalField::from_stacked(&s, &f).unwrap(), &s).unwrap();
                assert!((quad - full).abs() <= 1e-10 * (1.0 + quad.abs()));
            }
        }
    }

    #[test]
    fn inadmissible_fields_are_rejected() {
        let s = make_ycatenoid(1.0, 1.5, Resolution::new(0.2)).unwrap();
        let ones = NormalField::from_fn(&s, |_, _| 1.0);
        let err = evaluate_q(&ones, &s).unwrap_err();
        assert!(err.to_string().contains("compatibility"));
        assert_eq!(evaluate_q(&NormalField::zeros(&s), &s).unwrap(), 0.0);
        let c = make_catenoid(1.0, 1.5, Resolution::new(0.1)).unwrap();
        let err = evaluate_q(&NormalField::from_fn(&c, |_, _| 1.0), &c).unwrap_err();
        assert!(err.to_string().contains("truncation"));
    }

    #[test]
    fn coo_export_of_assembled_mass() {
        let s = make_plane(1.0, Resolution::new(1.0)).unwrap();
        let m = assemble_index_form(&s).unwrap();
        let mut buf = Vec::new();
        m.mass.write_coo(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 9);
        assert!(text.starts_with("0 0 "));
    }
}
