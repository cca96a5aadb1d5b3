//! Fourier-mode reduction for surfaces of revolution.
//!
//! On a rotationally symmetric surface the index form splits over angular
//! modes `f = g(s) cos kφ`. Each mode gives a one-dimensional pencil in the
//! profile arclength `s` (per radian of angle):
//!
//! ```text
//! K_k(g) = ∫ (r g′² + k² g²/r − |A|² r g²) ds − Σ_i (H_Γ·τ_i) r₀ g_i(0)²,
//! M(g)   = ∫ r g² ds,
//! ```
//!
//! with the junction compatibility `Σ g_i(0) = 0`, Dirichlet conditions at
//! the truncation ends and, for `k ≥ 1`, at apices on the axis.
//! The total index is `n₋(0) + 2 Σ_{k≥1} n₋(k)`. Since `K_k − K_j` is positive
//! semidefinite for `k > j`, modes beyond a cap with no negative or zero
//! eigenvalue are certified stable.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{structure, Result};
use crate::geometry::{LoopTag, YSurface};
use crate::quadform::{NormalField, ReducedForm};

/// Reduced one-dimensional pencil of one angular mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierPencil {
    pub mode: usize,
    pub stiffness: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    /// `(face, profile sample)` of every reduced unknown.
    pub dofs: Vec<(usize, usize)>,
}

impl FourierPencil {
    pub fn dim(&self) -> usize {
        self.dofs.len()
    }

    /// All generalized eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        generalized_eigenvalues(&self.stiffness, &self.mass)
    }

    /// Default zero tolerance: `1e−8` times the largest diagonal entry of `K`.
    pub fn zero_tolerance(&self) -> f64 {
        super::ZERO_TOLERANCE_FACTOR * self.stiffness.diagonal().iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }
}

pub(crate) fn generalized_eigenvalues(k: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if k.nrows() == 0 {
        return Ok(vec![]);
    }
    let l = m.clone().cholesky().ok_or_else(|| structure("mode mass matrix is not positive definite"))?.l();
    let x = l.solve_lower_triangular(k).expect("triangular factor is invertible");
    let c = l.solve_lower_triangular(&x.transpose()).expect("triangular factor is invertible");
    let c = (&c + c.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

struct FaceProfile {
    /// `true` for samples pinned to zero in every mode.
    dirichlet: Vec<bool>,
    /// Sample on the axis, pinned for `k ≥ 1`.
    apex: Option<usize>,
}

fn face_profiles(surface: &YSurface) -> Result<Vec<FaceProfile>> {
    if !surface.is_rotationally_symmetric() {
        return Err(structure("Fourier reduction needs every face to carry revolution data"));
    }
    surface
        .faces
        .iter()
        .enumerate()
        .map(|(fi, face)| {
            let rev = face.revolution.as_ref().expect("checked above");
            let ring_count = rev.rings.len();
            let ring_of_loop = |ids: &[usize]| -> Result<usize> {
                let mut sorted = ids.to_vec();
                sorted.sort_unstable();
                for k in [0, ring_count - 1] {
                    let mut ring = rev.rings[k].clone();
                    ring.sort_unstable();
                    if ring == sorted {
                        return Ok(k);
                    }
                }
                Err(structure(format!("face {fi}: boundary loop is not an end ring of the revolution")))
            };
            let mut dirichlet = vec![false; ring_count];
            for lp in &face.boundary_loops {
                let k = ring_of_loop(&lp.node_ids)?;
                if lp.tag == LoopTag::Truncation {
                    dirichlet[k] = true;
                }
            }
            let apex = (rev.rings[ring_count - 1].len() == 1).then_some(ring_count - 1);
            Ok(FaceProfile { dirichlet, apex })
        })
        .collect()
}

/// One-dimensional pencil for angular mode `k`.
pub fn fourier_reduce(surface: &YSurface, k: usize) -> Result<FourierPencil> {
    surface.validate()?;
    let profiles = face_profiles(surface)?;
    let mut offsets = vec![0];
    for face in &surface.faces {
        let n = face.revolution.as_ref().expect("checked").rings.len();
        offsets.push(offsets.last().unwrap() + n);
    }
    let n = *offsets.last().unwrap();
    let kk = (k * k) as f64;
    let mut stiff = DMatrix::zeros(n, n);
    let mut mass = DMatrix::zeros(n, n);
    for (fi, face) in surface.faces.iter().enumerate() {
        let rev = face.revolution.as_ref().expect("checked");
        let samples = &rev.profile.samples;
        let o = offsets[fi];
        let a2: Vec<f64> = rev.rings.iter().map(|ring| face.a_norm_sq[ring[0]]).collect();
        for e in 0..samples.len() - 1 {
            let (p, q) = (&samples[e], &samples[e + 1]);
            let len = (q.s - p.s).abs();
            let r_mid = 0.5 * (p.r + q.r);
            let w = r_mid / len;
            stiff[(o + e, o + e)] += w;
            stiff[(o + e + 1, o + e + 1)] += w;
            stiff[(o + e, o + e + 1)] -= w;
            stiff[(o + e + 1, o + e)] -= w;
            // dual-cell halves of ∫ r ds and ∫ ds / r
            for (node, r_here, r_other) in [(e, p.r, q.r), (e + 1, q.r, p.r)] {
                let m = 0.5 * len * (3.0 * r_here + r_other) / 4.0;
                mass[(o + node, o + node)] += m;
                stiff[(o + node, o + node)] -= a2[node] * m;
                if kk > 0.0 && r_here > 0.0 {
                    stiff[(o + node, o + node)] += kk * 0.5 * len / r_here;
                }
            }
        }
    }

    // junction terms and compatibility
    let mut fixed = vec![false; n];
    for (fi, prof) in profiles.iter().enumerate() {
        for (s, &d) in prof.dirichlet.iter().enumerate() {
            fixed[offsets[fi] + s] = d;
        }
        if k >= 1 {
            if let Some(a) = prof.apex {
                fixed[offsets[fi] + a] = true;
            }
        }
    }
    let mut eliminated: Vec<Option<(usize, usize)>> = vec![None; n];
    for junction in &surface.junctions {
        let mut idx = [0usize; 3];
        for slot in 0..3 {
            let fi = junction.incident_faces[slot];
            let face = &surface.faces[fi];
            let rev = face.revolution.as_ref().expect("checked");
            let lp = &face.boundary_loops[junction.face_loops[slot]];
            let ring = if rev.rings[0].contains(&lp.node_ids[0]) { 0 } else { rev.rings.len() - 1 };
            idx[slot] = offsets[fi] + ring;
            let h_tau = junction
                .curvature_vector
                .iter()
                .zip(&junction.conormals[slot])
                .map(|(h, t)| h.dot(t))
                .sum::<f64>()
                / junction.len() as f64;
            let r0 = rev.profile.samples[ring].r;
            stiff[(idx[slot], idx[slot])] -= h_tau * r0;
        }
        if idx.iter().any(|&g| fixed[g]) {
            idx.iter().for_each(|&g| fixed[g] = true);
        } else {
            eliminated[idx[2]] = Some((idx[0], idx[1]));
        }
    }

    let mut column = vec![usize::MAX; n];
    let mut dofs = Vec::new();
    for (fi, w) in offsets.windows(2).enumerate() {
        for g in w[0]..w[1] {
            if !fixed[g] && eliminated[g].is_none() {
                column[g] = dofs.len();
                dofs.push((fi, g - w[0]));
            }
        }
    }
    let mut r = DMatrix::zeros(n, dofs.len());
    for g in 0..n {
        if fixed[g] {
            continue;
        }
        match eliminated[g] {
            Some((a, b)) => {
                r[(g, column[a])] = -1.0;
                r[(g, column[b])] = -1.0;
            }
            None => r[(g, column[g])] = 1.0,
        }
    }
    let rt = r.transpose();
    let stiffness = &rt * &stiff * &r;
    let mass = &rt * &mass * &r;
    Ok(FourierPencil {
        mode: k,
        stiffness: (&stiffness + stiffness.transpose()) * 0.5,
        mass: (&mass + mass.transpose()) * 0.5,
        dofs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCount {
    pub mode: usize,
    pub negative: usize,
    pub nullity: usize,
    pub lowest: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierIndex {
    pub modes: Vec<ModeCount>,
    pub cap: usize,
    /// The mode at the cap has no eigenvalue `≤ tol`, hence neither do the
    /// modes beyond it.
    pub certified_above_cap: bool,
    pub total_index: usize,
    pub total_nullity: usize,
}

/// Mode-by-mode counts for `k = 0..=cap`, with eigenvalues in `[−tol, tol]`
/// treated as zero (`tol` defaults per mode to [`FourierPencil::zero_tolerance`]).
pub fn fourier_index(surface: &YSurface, cap: usize, tol: Option<f64>) -> Result<FourierIndex> {
    let mut modes = Vec::with_capacity(cap + 1);
    for k in 0..=cap {
        let pencil = fourier_reduce(surface, k)?;
        let t = tol.unwrap_or_else(|| pencil.zero_tolerance());
        let ev = pencil.eigenvalues()?;
        modes.push(ModeCount {
            mode: k,
            negative: ev.iter().filter(|&&l| l < -t).count(),
            nullity: ev.iter().filter(|&&l| l.abs() <= t).count(),
            lowest: ev.iter().take(5).copied().collect(),
        });
    }
    let last = modes.last().expect("cap + 1 ≥ 1 modes");
    let t_last = tol.unwrap_or_else(|| fourier_reduce(surface, cap).map(|p| p.zero_tolerance()).unwrap_or(0.0));
    let certified_above_cap = last.lowest.first().map_or(true, |&l| l > t_last);
    let weight = |m: &ModeCount| if m.mode == 0 { 1 } else { 2 };
    Ok(FourierIndex {
        total_index: modes.iter().map(|m| weight(m) * m.negative).sum(),
        total_nullity: modes.iter().map(|m| weight(m) * m.nullity).sum(),
        modes,
        cap,
        certified_above_cap,
    })
}

/// The reduced two-dimensional pencil restricted to fields that are constant
/// on every ring; its eigenvalues are exactly the rotation-invariant part of
/// the two-dimensional spectrum. Returns `(K, M, (face, ring) per column)`.
pub fn ring_pencil(surface: &YSurface, reduced: &ReducedForm) -> Result<(DMatrix<f64>, DMatrix<f64>, Vec<(usize, usize)>)> {
    if !surface.is_rotationally_symmetric() {
        return Err(structure("ring restriction needs every face to carry revolution data"));
    }
    let offsets = surface.node_offsets();
    let mut ring_of = vec![(0, 0); surface.total_nodes()];
    for (fi, face) in surface.faces.iter().enumerate() {
        for (k, ring) in face.revolution.as_ref().expect("checked").rings.iter().enumerate() {
            for &v in ring {
                ring_of[offsets[fi] + v] = (fi, k);
            }
        }
    }
    let mut keys: Vec<(usize, usize)> = reduced.reducer.representative.iter().map(|&g| ring_of[g]).collect();
    keys.sort_unstable();
    keys.dedup();
    let col = |p: usize| keys.binary_search(&ring_of[reduced.reducer.representative[p]]).expect("key present");
    let cols: Vec<usize> = (0..reduced.dim()).map(col).collect();
    let m = keys.len();
    let mut k = DMatrix::zeros(m, m);
    let mut mm = DMatrix::zeros(m, m);
    for (i, j, v) in reduced.form.triplets() {
        k[(cols[i], cols[j])] += v;
    }
    for (i, j, v) in reduced.mass.triplets() {
        mm[(cols[i], cols[j])] += v;
    }
    Ok(((&k + k.transpose()) * 0.5, (&mm + mm.transpose()) * 0.5, keys))
}

/// Area-weighted fraction of `∫ f²` carried by each angular mode
/// `0..=max_mode` (a discrete Fourier transform on every ring).
pub fn angular_power(surface: &YSurface, field: &NormalField, max_mode: usize) -> Result<Vec<f64>> {
    if !surface.is_rotationally_symmetric() {
        return Err(structure("angular power needs every face to carry revolution data"));
    }
    let mut power = vec![0.0; max_mode + 1];
    let mut total = 0.0;
    for (face, f) in surface.faces.iter().zip(&field.values) {
        for ring in &face.revolution.as_ref().expect("checked").rings {
            let n = ring.len();
            let w = face.area_weights[ring[0]];
            let energy: f64 = ring.iter().map(|&v| f[v] * f[v]).sum();
            total += w * energy;
            for (j, p) in power.iter_mut().enumerate() {
                if j > n / 2 || (n == 1 && j > 0) {
                    break;
                }
                let (mut re, mut im) = (0.0, 0.0);
                for (m, &v) in ring.iter().enumerate() {
                    let a = 2.0 * std::f64::consts::PI * (j * m) as f64 / n as f64;
                    re += f[v] * a.cos();
                    im -= f[v] * a.sin();
                }
                let both_signs = j > 0 && 2 * j != n;
                let factor = if both_signs { 2.0 } else { 1.0 };
                *p += w * factor * (re * re + im * im) / n as f64;
            }
        }
    }
    if total > 0.0 {
        power.iter_mut().for_each(|p| *p /= total);
    }
    Ok(power)
}
