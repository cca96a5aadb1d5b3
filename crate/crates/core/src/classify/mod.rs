//! Per-face invariants `α_i`, `β_i`, `θ_i`, the 2×2 form of the index form on
//! compatible constants, and the decision tree that narrows an index-one
//! Y-surface with three faces down to the Y-catenoid.
//!
//! With `α = 2π(1 − 2g − e − d)` and `β = −½∫|A|²`, a constant `c_i` on face
//! `i` (cut off far out) contributes `c_i² θ_i` to the index form, `θ = α + β`.
//! On `c₁ + c₂ + c₃ = 0` the form becomes the 2×2 matrix
//! `[[θ₁+θ₃, θ₃], [θ₃, θ₂+θ₃]]`, whose negative directions bound the index
//! from below.

mod tree;

pub use tree::{admissible_topologies, classify_theta, Conclusion, RuleStep, Verdict, BOUNDARY_TOL};

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{argument, structure, Result};
use crate::geometry::{FacePatch, Topology, YSurface};
use crate::quadform::q_of_constants;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FaceTheta {
    pub topology: Topology,
    pub euler_chi: i64,
    pub alpha: f64,
    /// `∫|A|²` over the meshed (truncated) face.
    pub total_curvature: f64,
    pub beta: f64,
    pub theta: f64,
    /// Estimated `∫|A|²` beyond the truncation (zero for compact faces).
    pub tail_estimate: f64,
    /// `α − ½(∫|A|² + tail)`.
    pub theta_extrapolated: f64,
}

/// `α`, `β`, `θ` of a face from its declared topology and lumped `|A|²`
/// quadrature.
///
/// For faces with ends the missing tail is estimated by Richardson
/// extrapolation between the full mesh and the part inside half the
/// truncation radius, assuming the `ρ⁻²` decay of `∫|A|²` outside radius `ρ`
/// on a finite-total-curvature end.
pub fn face_theta(face: &FacePatch) -> FaceTheta {
    let topology = face.topology;
    let alpha = topology.alpha();
    let total_curvature = face.total_curvature();
    let beta = -0.5 * total_curvature;
    let tail_estimate = if topology.is_compact() { 0.0 } else { tail_estimate(face, total_curvature) };
    FaceTheta {
        topology,
        euler_chi: topology.euler_characteristic(),
        alpha,
        total_curvature,
        beta,
        theta: alpha + beta,
        tail_estimate,
        theta_extrapolated: alpha - 0.5 * (total_curvature + tail_estimate),
    }
}

fn tail_estimate(face: &FacePatch, total: f64) -> f64 {
    let mask = face.truncation_mask();
    let radii: Vec<f64> = face.nodes.iter().zip(&mask).filter(|(_, &t)| t).map(|(x, _)| x.norm()).collect();
    if radii.is_empty() {
        return 0.0;
    }
    let rho_out = radii.iter().sum::<f64>() / radii.len() as f64;
    let cut = 0.5 * rho_out;
    let mut inner = 0.0;
    let mut rho_in: f64 = 0.0;
    for v in 0..face.num_nodes() {
        let r = face.nodes[v].norm();
        if r <= cut {
            inner += face.a_norm_sq[v] * face.area_weights[v];
            rho_in = rho_in.max(r);
        }
    }
    if rho_in <= 0.0 || rho_in >= rho_out {
        return 0.0;
    }
    let (a, b) = (rho_in * rho_in, rho_out * rho_out);
    ((total - inner) * a / (b - a)).max(0.0)
}

/// The 2×2 form on compatible constants, built from sorted `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantModeForm {
    /// Ascending `θ₁ ≤ θ₂ ≤ θ₃`.
    pub theta: [f64; 3],
    /// `theta[k]` is input entry `permutation[k]`.
    pub permutation: [usize; 3],
    pub matrix: [[f64; 2]; 2],
    pub trace: f64,
    pub determinant: f64,
    pub eigenvalues: [f64; 2],
    pub negative_count: usize,
}

pub fn reduced_constant_form(theta: [f64; 3]) -> ConstantModeForm {
    let mut permutation = [0, 1, 2];
    permutation.sort_by(|&a, &b| theta[a].total_cmp(&theta[b]));
    let t = permutation.map(|k| theta[k]);
    let matrix = [[t[0] + t[2], t[2]], [t[2], t[1] + t[2]]];
    let (a, b, d) = (matrix[0][0], matrix[0][1], matrix[1][1]);
    let mean = 0.5 * (a + d);
    let rad = (0.5 * (a - d)).hypot(b);
    let eigenvalues = [mean - rad, mean + rad];
    ConstantModeForm {
        theta: t,
        permutation,
        matrix,
        trace: a + d,
        determinant: a * d - b * b,
        eigenvalues,
        negative_count: eigenvalues.iter().filter(|&&l| l < 0.0).count(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaReport {
    /// In surface face order.
    pub faces: Vec<FaceTheta>,
    /// Face indices sorted by ascending extrapolated `θ`.
    pub order: Vec<usize>,
}

impl ThetaReport {
    pub fn new(surface: &YSurface) -> Self {
        let faces: Vec<FaceTheta> = surface.faces.iter().map(face_theta).collect();
        let mut order: Vec<usize> = (0..faces.len()).collect();
        order.sort_by(|&a, &b| faces[a].theta_extrapolated.total_cmp(&faces[b].theta_extrapolated));
        Self { faces, order }
    }

    pub fn theta(&self) -> Result<[f64; 3]> {
        self.three(|f| f.theta_extrapolated)
    }

    pub fn topology(&self) -> Result<[Topology; 3]> {
        self.three(|f| f.topology)
    }

    fn three<T: Copy>(&self, get: impl Fn(&FaceTheta) -> T) -> Result<[T; 3]> {
        if self.faces.len() != 3 {
            return Err(structure(format!("expected three faces, found {}", self.faces.len())));
        }
        Ok([get(&self.faces[0]), get(&self.faces[1]), get(&self.faces[2])])
    }

    pub fn constant_form(&self) -> Result<ConstantModeForm> {
        Ok(reduced_constant_form(self.theta()?))
    }
}

/// Runs the decision tree on the report's extrapolated `θ` and declared
/// topologies.
pub fn classify_report(report: &ThetaReport, index_hypothesis: u32) -> Result<Verdict> {
    classify_theta(report.theta()?, Some(report.topology()?), index_hypothesis)
}

/// One row of the constants table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantsRow {
    pub r: f64,
    pub c: [f64; 3],
    pub q_value: f64,
    pub theta_prediction: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsCheck {
    pub rows: Vec<ConstantsRow>,
    /// Negative directions of the `θ` form.
    pub predicted_negative_count: usize,
    /// Negative directions of the measured 2×2 matrix of `Q` on the cut-off
    /// basis, per radius. Each is a lower bound for the index of the mesh.
    pub measured_negative_count: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ConstantsOutcome {
    Computed(ConstantsCheck),
    NotApplicable { reason: String },
}

/// Basis of the compatible constants, in junction slot order.
pub const CONSTANT_BASIS: [[f64; 3]; 2] = [[1.0, -1.0, 0.0], [1.0, 1.0, -2.0]];

pub fn cross_check_constants(surface: &YSurface, report: &ThetaReport, r_list: &[f64]) -> Result<ConstantsOutcome> {
    if surface.junctions.is_empty() {
        return Ok(ConstantsOutcome::NotApplicable { reason: "not applicable — no junction constants".into() });
    }
    if r_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(argument("R list must be strictly increasing"));
    }
    let mut rows = Vec::new();
    let mut measured_negative_count = Vec::new();
    for &r in r_list {
        let q: Vec<_> = CONSTANT_BASIS.iter().map(|&c| q_of_constants(surface, c, r)).collect::<Result<_>>()?;
        let sum = [0, 1, 2].map(|k| CONSTANT_BASIS[0][k] + CONSTANT_BASIS[1][k]);
        let both = q_of_constants(surface, sum, r)?.q_value;
        let cross = 0.5 * (both - q[0].q_value - q[1].q_value);
        let (a, d) = (q[0].q_value, q[1].q_value);
        let rad = (0.5 * (a - d)).hypot(cross);
        let eig = [0.5 * (a + d) - rad, 0.5 * (a + d) + rad];
        measured_negative_count.push(eig.iter().filter(|&&l| l < 0.0).count());
        rows.extend(q.iter().map(|x| ConstantsRow {
            r: x.r,
            c: x.c,
            q_value: x.q_value,
            theta_prediction: x.theta_prediction,
            gap: x.gap(),
        }));
    }
    let predicted_negative_count = match report.constant_form() {
        Ok(f) => f.negative_count,
        Err(_) => 0,
    };
    Ok(ConstantsOutcome::Computed(ConstantsCheck { rows, predicted_negative_count, measured_negative_count }))
}

/// `2π`, handy for θ comparisons.
pub const TWO_PI: f64 = 2.0 * PI;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_catenoid, make_flat_ycone, make_ycatenoid, Resolution};
    use nalgebra::{Matrix2, SymmetricEigen};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flat_disk_theta() {
        let s = make_ycatenoid(1.0, 2.0, Resolution::new(0.1)).unwrap();
        let t = face_theta(&s.faces[2]);
        assert_eq!((t.alpha, t.beta, t.theta), (TWO_PI, 0.0, TWO_PI));
        assert_eq!(t.theta_extrapolated, TWO_PI);
    }

    #[test]
    fn catenary_face_theta_with_tail() {
        let s = make_ycatenoid(1.0, 4.0, Resolution::new(0.02)).unwrap();
        let t = face_theta(&s.faces[0]);
        assert_eq!(t.alpha, -TWO_PI);
        // exact ∫|A|² up to u = 4 is 4π(tanh 4 − ½)
        let exact = 4.0 * PI * (4f64.tanh() - 0.5);
        assert!((t.total_curvature - exact).abs() < 1e-3 * exact);
        // exact tail 4π(1 − tanh 4)
        let tail = 4.0 * PI * (1.0 - 4f64.tanh());
        assert!((t.tail_estimate - tail).abs() < 0.1 * tail);
        assert!(t.tail_estimate > 0.0);
        assert!((t.theta_extrapolated + 3.0 * PI).abs() < (t.theta + 3.0 * PI).abs());
    }

    #[test]
    fn catenoid_theta() {
        let s = make_catenoid(1.0, 6.0, Resolution::new(0.05)).unwrap();
        let t = face_theta(&s.faces[0]);
        assert_eq!(t.alpha, -6.0 * PI);
        assert!((t.theta_extrapolated + 10.0 * PI).abs() < 0.01 * PI, "{t:?}");
    }

    #[test]
    fn constant_form_examples() {
        let z = reduced_constant_form([0.0; 3]);
        assert_eq!(z.matrix, [[0.0; 2]; 2]);
        assert_eq!(z.negative_count, 0);

        let y = reduced_constant_form([2.0 * PI, -3.0 * PI, -3.0 * PI]);
        assert_eq!(y.permutation, [1, 2, 0]);
        assert_eq!(y.matrix, [[-PI, 2.0 * PI], [2.0 * PI, -PI]]);
        assert!((y.eigenvalues[0] + 3.0 * PI).abs() < 1e-12);
        assert!((y.eigenvalues[1] - PI).abs() < 1e-12);
        assert_eq!(y.negative_count, 1);

        let w = reduced_constant_form([-6.0 * PI, -4.0 * PI, 2.0 * PI]);
        assert!((w.trace + 6.0 * PI).abs() < 1e-12);
        assert!((w.determinant - 4.0 * PI * PI).abs() < 1e-11);
        assert_eq!(w.negative_count, 2);
    }

    #[test]
    fn constant_form_identities_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let t: [f64; 3] = [0; 3].map(|_| rng.gen_range(-12.0 * PI..2.0 * PI));
            let f = reduced_constant_form(t);
            let [a, b, c] = f.theta;
            let scale = 1.0 + a.abs().max(b.abs()).max(c.abs()).powi(2);
            assert!((f.trace - (a + b + 2.0 * c)).abs() <= 1e-12 * scale);
            assert!((f.determinant - (a * b + c * (a + b))).abs() <= 1e-12 * scale);
            let m = Matrix2::new(f.matrix[0][0], f.matrix[0][1], f.matrix[1][0], f.matrix[1][1]);
            let brute = SymmetricEigen::new(m).eigenvalues.iter().filter(|&&l| l < 0.0).count();
            assert_eq!(f.negative_count, brute);
        }
    }

    #[test]
    fn constants_not_applicable_without_junction() {
        let s = make_catenoid(1.0, 2.0, Resolution::new(0.1)).unwrap();
        let r = ThetaReport::new(&s);
        match cross_check_constants(&s, &r, &[10.0]).unwrap() {
            ConstantsOutcome::NotApplicable { reason } => assert!(reason.starts_with("not applicable")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn flat_ycone_constants_are_nonnegative() {
        let s = make_flat_ycone(4.0, 8.0, Resolution::new(0.2)).unwrap();
        let r = ThetaReport::new(&s);
        let ConstantsOutcome::Computed(c) = cross_check_constants(&s, &r, &[1.2, 1.5, 2.0]).unwrap() else {
            panic!()
        };
        assert!(c.rows.iter().all(|row| row.q_value >= 0.0));
        assert_eq!(c.predicted_negative_count, 0);
        assert!(c.measured_negative_count.iter().all(|&n| n == 0));
    }
}
