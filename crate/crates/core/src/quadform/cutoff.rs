//! Log-cutoff functions, the weighted `L²*` norm and the index form on
//! cut-off constants.

use crate::classify::face_theta;
use crate::error::{argument, Result};
use crate::geometry::{Vec3, YSurface};

use super::{evaluate_q, NormalField};

/// `sup |ξ′|` for [`smoothstep`].
pub const SMOOTHSTEP_BOUND: f64 = 1.5;

/// `ξ(s) = 3s² − 2s³` on `[0, 1]`, clamped to 0 below and 1 above.
pub fn smoothstep(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        s * s * (3.0 - 2.0 * s)
    }
}

pub fn smoothstep_derivative(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        6.0 * s * (1.0 - s)
    }
}

/// Nodal values of `ψ_R = 2 − log|x| / log R` and `φ_R = ξ(ψ_R)`, so that
/// `φ_R = 1` on `|x| ≤ R` and `φ_R = 0` on `|x| ≥ R²`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffProfile {
    pub r: f64,
    /// `C = sup |ξ′|`.
    pub c_bound: f64,
    /// Per face and node; `+∞` at a node sitting on the origin.
    pub psi: Vec<Vec<f64>>,
    pub phi: Vec<Vec<f64>>,
    /// Per face and element: `|x_c| |∇φ_R| log R` with `x_c` the centroid and
    /// `∇φ_R` the gradient of the P1 interpolant.
    pub scaled_gradient: Vec<Vec<f64>>,
    pub sup_scaled_gradient: f64,
    /// `sup_scaled_gradient ≤ 1.1 C`: the continuum bound `C` plus a margin
    /// for the interpolation error of the discrete gradient.
    pub within_bound: bool,
}

impl CutoffProfile {
    pub fn field(&self) -> NormalField {
        NormalField { values: self.phi.clone() }
    }
}

pub fn build_log_cutoff(surface: &YSurface, r: f64) -> Result<CutoffProfile> {
    if !(r > 1.0) || !r.is_finite() {
        return Err(argument(format!("cutoff scale R must exceed 1, got {r}")));
    }
    let log_r = r.ln();
    let psi_of = |x: &Vec3| {
        let n = x.norm();
        // the origin lies inside every ball B_R: φ = 1 there
        if n == 0.0 {
            f64::INFINITY
        } else {
            2.0 - n.ln() / log_r
        }
    };
    let psi: Vec<Vec<f64>> = surface.faces.iter().map(|f| f.nodes.iter().map(psi_of).collect()).collect();
    let phi: Vec<Vec<f64>> = psi.iter().map(|p| p.iter().map(|&s| smoothstep(s)).collect()).collect();
    let mut sup: f64 = 0.0;
    let scaled_gradient: Vec<Vec<f64>> = surface
        .faces
        .iter()
        .zip(&phi)
        .map(|(face, ph)| {
            face.elements
                .iter()
                .map(|tri| {
                    let x = [face.nodes[tri[0]], face.nodes[tri[1]], face.nodes[tri[2]]];
                    let normal = (x[1] - x[0]).cross(&(x[2] - x[0]));
                    let twice_area = normal.norm();
                    let unit = normal / twice_area;
                    let grad = (0..3).fold(Vec3::zeros(), |g, i| {
                        g + ph[tri[i]] * unit.cross(&(x[(i + 2) % 3] - x[(i + 1) % 3])) / twice_area
                    });
                    let centroid = (x[0] + x[1] + x[2]) / 3.0;
                    let v = centroid.norm() * grad.norm() * log_r;
                    sup = sup.max(v);
                    v
                })
                .collect()
        })
        .collect();
    Ok(CutoffProfile {
        r,
        c_bound: SMOOTHSTEP_BOUND,
        psi,
        phi,
        scaled_gradient,
        sup_scaled_gradient: sup,
        within_bound: sup <= 1.1 * SMOOTHSTEP_BOUND,
    })
}

/// `(1 + |x|²)⁻¹ (log(2 + |x|))⁻²`.
pub fn l2star_weight(x: &Vec3) -> f64 {
    let n = x.norm();
    let l = (2.0 + n).ln();
    1.0 / ((1.0 + n * n) * l * l)
}

/// `∫ f² (1 + |x|²)⁻¹ (log(2 + |x|))⁻² dA` with lumped nodal quadrature.
pub fn l2star_norm_sq(field: &NormalField, surface: &YSurface) -> f64 {
    surface
        .faces
        .iter()
        .zip(&field.values)
        .map(|(face, f)| {
            (0..face.num_nodes())
                .map(|v| f[v] * f[v] * l2star_weight(&face.nodes[v]) * face.area_weights[v])
                .sum::<f64>()
        })
        .sum()
}

pub fn l2star_norm(field: &NormalField, surface: &YSurface) -> f64 {
    l2star_norm_sq(field, surface).sqrt()
}

/// Index form on the cut-off constants `φ_R · c` next to the prediction
/// `Σ c_i² θ_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsQ {
    pub r: f64,
    pub c: [f64; 3],
    pub q_value: f64,
    pub theta_prediction: f64,
}

impl ConstantsQ {
    /// `Q(φ_R c) − Σ c_i² θ_i`.
    pub fn gap(&self) -> f64 {
        self.q_value - self.theta_prediction
    }
}

/// `c[i]` is the constant on the face in slot `i` of the (single) junction.
pub fn q_of_constants(surface: &YSurface, c: [f64; 3], r: f64) -> Result<ConstantsQ> {
    let scale = c.iter().fold(1.0, |m: f64, v| m.max(v.abs()));
    if (c[0] + c[1] + c[2]).abs() > 1e-12 * scale {
        return Err(argument(format!("constants {c:?} do not sum to zero")));
    }
    if surface.junctions.len() != 1 {
        return Err(argument(format!(
            "not applicable: constant test fields need exactly one junction, found {}",
            surface.junctions.len()
        )));
    }
    let cutoff = build_log_cutoff(surface, r)?;
    for (fi, face) in surface.faces.iter().enumerate() {
        for (v, t) in face.truncation_mask().into_iter().enumerate() {
            if t && cutoff.phi[fi][v] != 0.0 {
                return Err(argument(format!(
                    "surface is not truncated beyond R² = {}: face {fi} node {v} has |x| = {}",
                    r * r,
                    face.nodes[v].norm()
                )));
            }
        }
    }
    let junction = &surface.junctions[0];
    let mut field = cutoff.field();
    let mut theta_prediction = 0.0;
    for (fi, values) in field.values.iter_mut().enumerate() {
        let ci = junction.slot_of(fi).map(|s| c[s]).unwrap_or(0.0);
        values.iter_mut().for_each(|v| *v *= ci);
        if ci != 0.0 {
            theta_prediction += ci * ci * face_theta(&surface.faces[fi]).theta;
        }
    }
    Ok(ConstantsQ { r, c, q_value: evaluate_q(&field, surface)?, theta_prediction })
}
