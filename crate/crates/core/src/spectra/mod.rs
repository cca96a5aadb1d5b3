//! Morse index, nullity and low spectrum of the reduced index form.
//!
//! Index and nullity come from inertia counts of shifted factorizations,
//! `n₋ = ν(K + εM)` and `n₀ = ν(K − εM) − n₋`, where `ν` counts negative
//! pivots; the eigenvalues themselves come from [`lowest_modes`].

mod dense;
mod eigen;
mod fourier;
mod ldl;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::geometry::YSurface;
use crate::quadform::{reduced_index_form, ReducedForm};
use crate::sparse::CsrMatrix;

pub use dense::{dense_inertia, BunchKaufman};
pub use eigen::{lowest_modes, lowest_modes_with, EigenMethod, EigenOptions, Eigenpair};
pub use fourier::{angular_power, fourier_index, fourier_reduce, ring_pencil, FourierIndex, FourierPencil, ModeCount};
pub use ldl::{BlockLdl, Factorization, LinearPlan, DENSE_LIMIT};

/// Relative zero tolerance: eigenvalues within this multiple of the largest
/// diagonal entry of the reduced form count as zero.
pub const ZERO_TOLERANCE_FACTOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inertia {
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
}

/// Inertia of `K` with eigenvalues in `[−tol, tol]` counted as zero.
pub fn inertia(k: &CsrMatrix, tol: f64) -> Result<Inertia> {
    pencil_inertia(k, &CsrMatrix::identity(k.dim()), tol, None)
}

/// Inertia of the pencil `(K, M)`: counts of generalized eigenvalues below
/// `−tol`, in `[−tol, tol]` and above `tol`.
pub fn pencil_inertia(k: &CsrMatrix, m: &CsrMatrix, tol: f64, plan: Option<&LinearPlan>) -> Result<Inertia> {
    if !(tol >= 0.0) {
        return Err(argument(format!("zero tolerance must be non-negative, got {tol}")));
    }
    let n = k.dim();
    let plus = Factorization::new(&CsrMatrix::linear_combination(&[(1.0, k), (tol, m)]), plan)?.inertia();
    let minus = Factorization::new(&CsrMatrix::linear_combination(&[(1.0, k), (-tol, m)]), plan)?.inertia();
    let negative = plus.0;
    let at_most = (minus.0 + minus.1).max(negative);
    Ok(Inertia { negative, zero: at_most - negative, positive: n - at_most })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumOptions {
    /// Eigenvalues to report (more are computed if the index or nullity
    /// needs them).
    pub num_eigenvalues: usize,
    /// Absolute zero tolerance; by default [`ZERO_TOLERANCE_FACTOR`] times
    /// the largest diagonal entry of the reduced form.
    pub zero_tolerance: Option<f64>,
    /// Recorded in the result; the surface is already truncated.
    pub truncation: Option<f64>,
    pub mesh_size: Option<f64>,
    pub method: EigenMethod,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { num_eigenvalues: 5, zero_tolerance: None, truncation: None, mesh_size: None, method: EigenMethod::Auto }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub label: String,
    pub dimension: usize,
    /// Lowest eigenvalues of the pencil, ascending.
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub morse_index: usize,
    pub nullity: usize,
    pub zero_tolerance: f64,
    pub truncation: Option<f64>,
    pub mesh_size: Option<f64>,
}

pub fn compute_spectrum(surface: &YSurface, opts: &SpectrumOptions) -> Result<SpectrumResult> {
    spectrum_with_modes(surface, opts).map(|(s, _, _)| s)
}

/// Like [`compute_spectrum`], also returning the eigenvectors (in reduced
/// coordinates) and the reduced form they belong to.
pub fn spectrum_with_modes(
    surface: &YSurface,
    opts: &SpectrumOptions,
) -> Result<(SpectrumResult, Vec<Eigenpair>, ReducedForm)> {
    let red = reduced_index_form(surface)?;
    let n = red.dim();
    let tol = opts.zero_tolerance.unwrap_or(ZERO_TOLERANCE_FACTOR * red.form.max_abs_diagonal());
    let plan = LinearPlan::for_surface(surface, &red.reducer, &red.form);
    let inertia = pencil_inertia(&red.form, &red.mass, tol, Some(&plan))?;
    let count = opts.num_eigenvalues.max(inertia.negative + inertia.zero + 1).min(n);
    let eopts = EigenOptions { method: opts.method, plan: Some(&plan), ..Default::default() };
    let modes = lowest_modes_with(&red.form, &red.mass, count, &eopts)?;
    let result = SpectrumResult {
        label: surface.label.clone(),
        dimension: n,
        eigenvalues: modes.iter().map(|e| e.value).collect(),
        residuals: modes.iter().map(|e| e.residual).collect(),
        morse_index: inertia.negative,
        nullity: inertia.zero,
        zero_tolerance: tol,
        truncation: opts.truncation,
        mesh_size: opts.mesh_size,
    };
    Ok((result, modes, red))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub truncation: f64,
    pub spectrum: Option<SpectrumResult>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// Index shared by the last three truncations, when they agree.
    pub stabilized_index: Option<usize>,
    /// The index never decreases as the truncation grows.
    pub index_monotone: bool,
    /// The lowest eigenvalues never increase (beyond a relative `1e−3`) as the
    /// truncation grows.
    pub eigenvalues_monotone: bool,
}

/// Index and spectrum for each truncation parameter (increasing), with the
/// surfaces produced by `generate`. Cases run on `threads` workers.
pub fn morse_index_sweep<F>(generate: F, truncations: &[f64], opts: &SpectrumOptions, threads: usize) -> Result<SweepReport>
where
    F: Fn(f64) -> Result<YSurface> + Sync,
{
    if truncations.is_empty() {
        return Err(argument("sweep needs at least one truncation parameter"));
    }
    if truncations.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(argument("sweep truncation parameters must be strictly increasing"));
    }
    let rows = parallel_map(truncations, threads, |&r| {
        let run = generate(r).and_then(|s| {
            compute_spectrum(&s, &SpectrumOptions { truncation: Some(r), ..opts.clone() })
        });
        match run {
            Ok(s) => SweepRow { truncation: r, spectrum: Some(s), error: None },
            Err(e) => SweepRow { truncation: r, spectrum: None, error: Some(e.to_string()) },
        }
    });
    let ok: Vec<&SpectrumResult> = rows.iter().filter_map(|r| r.spectrum.as_ref()).collect();
    let index_monotone = ok.windows(2).all(|w| w[0].morse_index <= w[1].morse_index);
    let eigenvalues_monotone = ok.windows(2).all(|w| {
        w[0].eigenvalues
            .iter()
            .zip(&w[1].eigenvalues)
            .all(|(a, b)| *b <= *a + 1e-3 * a.abs().max(1e-12))
    });
    let stabilized_index = if rows.len() >= 3 && rows[rows.len() - 3..].iter().all(|r| r.spectrum.is_some()) {
        let last: Vec<usize> = ok[ok.len() - 3..].iter().map(|s| s.morse_index).collect();
        (last[0] == last[1] && last[1] == last[2]).then_some(last[0])
    } else {
        None
    };
    Ok(SweepReport { rows, stabilized_index, index_monotone, eigenvalues_monotone })
}

/// Header of the sweep CSV written by [`write_sweep_csv`].
pub const SWEEP_CSV_HEADER: &str = "R,h,mode,eigenvalue_rank,eigenvalue,index,nullity,status";

/// One line per reported eigenvalue (`mode` is `2d` for the full problem);
/// failed cases get a single line with an empty eigenvalue.
pub fn write_sweep_csv<W: Write>(report: &SweepReport, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{SWEEP_CSV_HEADER}")?;
    for row in &report.rows {
        match &row.spectrum {
            Some(s) => {
                let h = s.mesh_size.map(|h| h.to_string()).unwrap_or_default();
                for (rank, ev) in s.eigenvalues.iter().enumerate() {
                    writeln!(w, "{},{},2d,{},{:e},{},{},ok", row.truncation, h, rank, ev, s.morse_index, s.nullity)?;
                }
            }
            None => {
                let msg = row.error.as_deref().unwrap_or("failed").replace([',', '\n'], ";");
                writeln!(w, "{},,2d,,,,,error: {msg}", row.truncation)?;
            }
        }
    }
    Ok(())
}

/// Worker count from `YSURFACE_THREADS`, defaulting to 1.
pub fn threads_from_env() -> usize {
    std::env::var("YSURFACE_THREADS").ok().and_then(|v| v.parse().ok()).filter(|&t| t > 0).unwrap_or(1)
}

/// Order-preserving map over `items` on up to `threads` scoped workers.
pub(crate) fn parallel_map<T: Sync, R: Send, F: Fn(&T) -> R + Sync>(items: &[T], threads: usize, f: F) -> Vec<R> {
    let threads = threads.clamp(1, items.len().max(1));
    if threads == 1 {
        return items.iter().map(&f).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut out: Vec<Option<R>> = (0..items.len()).map(|_| None).collect();
    let results = std::sync::Mutex::new(&mut out);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                results.lock().expect("worker panicked")[i] = Some(r);
            });
        }
    });
    out.into_iter().map(|r| r.expect("every item is processed")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_catenoid, make_flat_ycone, make_ycatenoid, Resolution};

    #[test]
    fn identity_shift_inertia() {
        let k = CsrMatrix::from_diagonal(&[-2.0, 0.0, 1e-12, 3.0]);
        assert_eq!(inertia(&k, 1e-9).unwrap(), Inertia { negative: 1, zero: 2, positive: 1 });
        assert!(inertia(&k, -1.0).is_err());
    }

    #[test]
    fn coarse_catenoid_has_index_one() {
        let s = make_catenoid(1.0, 3.0, Resolution::new(0.2)).unwrap();
        let r = compute_spectrum(&s, &SpectrumOptions::default()).unwrap();
        assert_eq!((r.morse_index, r.nullity), (1, 0));
        let neg = r.eigenvalues.iter().filter(|&&l| l < -r.zero_tolerance).count();
        assert_eq!(neg, r.morse_index);
    }

    #[test]
    fn coarse_ycatenoid_has_index_one() {
        let s = make_ycatenoid(1.0, 2.5, Resolution::new(0.2)).unwrap();
        let r = compute_spectrum(&s, &SpectrumOptions::default()).unwrap();
        assert_eq!(r.morse_index, 1, "{:?}", r.eigenvalues);
    }

    #[test]
    fn flat_ycone_is_stable() {
        let s = make_flat_ycone(1.0, 2.0, Resolution::new(0.2)).unwrap();
        let r = compute_spectrum(&s, &SpectrumOptions::default()).unwrap();
        assert_eq!((r.morse_index, r.nullity), (0, 0));
        assert!(r.eigenvalues[0] > 0.0);
    }

    #[test]
    fn sweep_rejects_unsorted_and_reports_failures() {
        let gen = |r: f64| make_catenoid(1.0, r, Resolution::new(0.25));
        let opts = SpectrumOptions::default();
        assert!(morse_index_sweep(gen, &[2.0, 1.0], &opts, 1).is_err());
        let rep = morse_index_sweep(gen, &[-1.0, 2.0, 2.5, 3.0], &opts, 2).unwrap();
        assert!(rep.rows[0].error.is_some());
        assert_eq!(rep.stabilized_index, Some(1));
        assert!(rep.index_monotone && rep.eigenvalues_monotone);
        let mut buf = Vec::new();
        write_sweep_csv(&rep, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(SWEEP_CSV_HEADER));
        assert!(text.lines().nth(1).unwrap().contains("error"));
    }

    #[test]
    fn parallel_map_keeps_order() {
        let xs: Vec<usize> = (0..17).collect();
        assert_eq!(parallel_map(&xs, 4, |x| x * 2), xs.iter().map(|x| x * 2).collect::<Vec<_>>());
    }
}
