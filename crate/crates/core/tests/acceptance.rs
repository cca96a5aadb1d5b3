//! Release acceptance: one PASS/FAIL line per criterion, with the measured
//! values and wall-clock time. Runs without the libtest harness so the lines
//! are always printed; exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::{Matrix2, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ysurface::classify::{
    cross_check_constants, face_theta, reduced_constant_form, classify_theta, Conclusion, ConstantsOutcome,
    ThetaReport,
};
use ysurface::cli::{cutoff_half_height, ycatenoid_truncation_for_radius};
use ysurface::geometry::{
    density_report, gauss_bonnet_report, make_catenoid, make_flat_ycone, make_plane, make_ycatenoid, ycatenoid_profile,
    DensityCenter, Resolution, YSurface,
};
use ysurface::quadform::{build_log_cutoff, NormalField};
use ysurface::spectra::{
    angular_power, compute_spectrum, fourier_index, morse_index_sweep, spectrum_with_modes, SpectrumOptions,
    SweepReport,
};

type Outcome = Result<(bool, String), String>;

struct Board {
    /// Criterion ids given on the command line; empty runs everything.
    only: Vec<String>,
    failed: Vec<&'static str>,
}

impl Board {
    fn run(&mut self, id: &'static str, title: &str, f: impl FnOnce() -> Outcome) {
        if !self.only.is_empty() && !self.only.iter().any(|o| o == id) {
            return;
        }
        let start = Instant::now();
        let (passed, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let secs = start.elapsed().as_secs_f64();
        println!("{} {id} {title}: {detail} [{secs:.1} s]", if passed { "PASS" } else { "FAIL" });
        if !passed {
            self.failed.push(id);
        }
    }
}

fn e2s<T>(r: ysurface::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn opts(h: f64) -> SpectrumOptions {
    SpectrumOptions { mesh_size: Some(h), ..Default::default() }
}

fn sweep_indices(report: &SweepReport) -> Vec<Option<usize>> {
    report.rows.iter().map(|r| r.spectrum.as_ref().map(|s| s.morse_index)).collect()
}

fn flat_ycone_stability() -> Outcome {
    let start = Instant::now();
    let s = e2s(make_flat_ycone(1.0, 2.0, Resolution::new(0.05)))?;
    let spec = e2s(compute_spectrum(&s, &opts(0.05)))?;
    let secs = start.elapsed().as_secs_f64();
    let lmin = spec.eigenvalues[0];
    Ok((
        spec.morse_index == 0 && lmin >= -1e-10 && secs < 30.0,
        format!("index {}, λmin {lmin:.6e} (≥ −1e−10), {secs:.1} s (< 30 s)", spec.morse_index),
    ))
}

fn catenoid_index_one() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = vec![];
    for h in [0.06, 0.03] {
        let sweep = e2s(morse_index_sweep(|z| make_catenoid(1.0, z, Resolution::new(h)), &[1.5, 2.0, 3.0], &opts(h), 1))?;
        let idx = sweep_indices(&sweep);
        ok &= idx.iter().all(|&i| i == Some(1));
        let l1 = sweep.rows[2].spectrum.as_ref().map_or(f64::NAN, |s| s.eigenvalues[0]);
        parts.push(format!("h = {h}: index over |z| ≤ 1.5, 2, 3 = {idx:?}, λ₁(3) = {l1:.6}"));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 120.0;
    Ok((ok, format!("{}; {secs:.1} s (< 120 s)", parts.join("; "))))
}

fn ycatenoid_index_one() -> Result<(Outcome, Option<usize>), String> {
    let start = Instant::now();
    let h = 0.03;
    let sweep = e2s(morse_index_sweep(|u| make_ycatenoid(1.0, u, Resolution::new(h)), &[2.0, 3.0, 4.0], &opts(h), 1))?;
    let secs = start.elapsed().as_secs_f64();
    let idx = sweep_indices(&sweep);
    let ok = idx.iter().all(|&i| i == Some(1)) && sweep.stabilized_index == Some(1) && secs < 180.0;
    let verdict = match sweep.stabilized_index {
        Some(i) => format!("index {i}"),
        None => "not stabilized".into(),
    };
    Ok((
        Ok((ok, format!("index over u = 2, 3, 4: {idx:?}, stabilized \"{verdict}\", {secs:.1} s (< 180 s)"))),
        sweep.stabilized_index,
    ))
}

fn theta_invariants() -> Outcome {
    let s = e2s(make_ycatenoid(1.0, 6.0, Resolution::new(0.02)))?;
    let t: Vec<_> = s.faces.iter().map(face_theta).collect();
    // oracle: the Gauss map of a catenary end from u₀ to ∞ covers the zone of
    // S² between heights tanh u₀ and 1, of area 2π(1 − tanh u₀); |A|² = −2K
    let p = ycatenoid_profile(1.0);
    let zone = 2.0 * PI * (1.0 - p.u0.tanh());
    let expected = -2.0 * PI - 0.5 * (2.0 * zone);
    let disk_ok = t[2].theta == 2.0 * PI && t[2].beta.abs() <= 1e-9;
    let lobes_ok = t[..2].iter().all(|f| (f.theta_extrapolated - expected).abs() <= 0.01 * PI);
    let oracle_ok = (expected + 3.0 * PI).abs() < 1e-12;
    Ok((
        disk_ok && lobes_ok && oracle_ok,
        format!(
            "θ₃ − 2π = {:e}, β₃ = {:e}; θ₁/π = {:.5}, θ₂/π = {:.5} (zone oracle {:.5}, tol 0.01)",
            t[2].theta - 2.0 * PI,
            t[2].beta,
            t[0].theta_extrapolated / PI,
            t[1].theta_extrapolated / PI,
            expected / PI
        ),
    ))
}

/// Negative eigenvalues of `[[θ₁+θ₃, θ₃], [θ₃, θ₂+θ₃]]`, the form
/// `θ₁c₁² + θ₂c₂² + θ₃(c₁+c₂)²` after eliminating `c₃ = −c₁ − c₂`.
fn brute_negative_count(t: [f64; 3]) -> usize {
    let m = Matrix2::new(t[0] + t[2], t[2], t[2], t[1] + t[2]);
    m.symmetric_eigenvalues().iter().filter(|&&l| l < 0.0).count()
}

fn form_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut mismatches = 0;
    for _ in 0..1000 {
        let t: [f64; 3] = [0, 1, 2].map(|_| rng.gen_range(-8.0 * PI..2.0 * PI));
        let f = reduced_constant_form(t);
        let mut s = t;
        s.sort_by(f64::total_cmp);
        let trace = s[0] + s[1] + 2.0 * s[2];
        let det = s[0] * s[1] + s[2] * (s[0] + s[1]);
        worst = worst.max((f.trace - trace).abs()).max((f.determinant - det).abs() / det.abs().max(1.0));
        if f.negative_count != brute_negative_count(s) {
            mismatches += 1;
        }
    }
    Ok((
        worst <= 1e-12 && mismatches == 0,
        format!("max identity error {worst:.2e} (≤ 1e−12), negative_count mismatches {mismatches}/1000"),
    ))
}

fn lower_bound(ycat_sweep_index: Option<usize>) -> Outcome {
    let yc = e2s(make_ycatenoid(1.0, 3.0, Resolution::new(0.05)))?;
    // when run on its own, index the coarser mesh instead of the sweep
    let ycat_sweep_index = match ycat_sweep_index {
        Some(i) => Some(i),
        None => Some(e2s(compute_spectrum(&yc, &opts(0.05)))?.morse_index),
    };
    let yc_count = e2s(ThetaReport::new(&yc).constant_form())?.negative_count;
    let cone = e2s(make_flat_ycone(1.0, 2.0, Resolution::new(0.1)))?;
    let cone_count = e2s(ThetaReport::new(&cone).constant_form())?.negative_count;
    let cone_index = e2s(compute_spectrum(&cone, &opts(0.1)))?.morse_index;
    Ok((
        yc_count == 1 && ycat_sweep_index == Some(1) && cone_count == 0 && cone_index == 0,
        format!(
            "Y-catenoid constants {yc_count} vs sweep index {ycat_sweep_index:?}; flat Y-cone constants {cone_count} vs index {cone_index}"
        ),
    ))
}

/// The three contradictions, tested directly on sorted `θ`.
fn brute_contradiction(t: [f64; 3]) -> Option<&'static str> {
    let [t1, t2, t3] = t;
    debug_assert!(t1 <= t2 && t2 <= t3);
    if t3 < 0.0 {
        return Some("a");
    }
    if t2 > -2.0 * PI {
        return None;
    }
    if t2 <= -4.0 * PI {
        return Some("c");
    }
    if t2 < -2.0 * PI && t3 < PI {
        return Some("e");
    }
    None
}

fn decision_tree() -> Outcome {
    let anchors = [
        ("a", "the index is at least two"),
        ("c", "we may require −4π ≤ θ₂"),
        ("e", "we must have π ≤ θ₃ < 2π"),
    ];
    let mut points = 0;
    let mut disagreements = vec![];
    let mut seen = [0usize; 3];
    for t3 in [-0.5, 0.3, 0.9, 1.5, 2.0] {
        for t2 in [-5.0, -4.2, -3.5, -3.0, -2.5] {
            for gap in [0.0, 1.5] {
                let theta = [(t2 - gap) * PI, t2 * PI, t3 * PI];
                points += 1;
                let expected = brute_contradiction(theta);
                let v = classify_theta([theta[2], theta[0], theta[1]], None, 1).map_err(|e| e.to_string())?;
                let last = v.rules.iter().rev().find(|r| r.fired).expect("some rule fires");
                let got = (v.conclusion == Conclusion::IndexAtLeastTwo && ["a", "c", "e"].contains(&last.rule))
                    .then_some(last.rule);
                let anchor_ok = match got {
                    Some(rule) => anchors.iter().any(|&(r, a)| r == rule && last.anchor == a),
                    None => true,
                };
                if let Some(k) = got.and_then(|g| anchors.iter().position(|&(r, _)| r == g)) {
                    seen[k] += 1;
                    if v.conclusion_text != "contradiction: index ≥ 2" {
                        disagreements.push(format!("{theta:?}: text {}", v.conclusion_text));
                    }
                    // each contradiction rests on two negative directions
                    if brute_negative_count(theta) != 2 {
                        disagreements.push(format!("{theta:?}: constants do not give two negatives"));
                    }
                }
                if got != expected || !anchor_ok {
                    disagreements.push(format!("{theta:?}: classifier {got:?}, brute force {expected:?}"));
                }
            }
        }
    }
    Ok((
        points == 50 && disagreements.is_empty() && seen.iter().all(|&n| n > 0),
        format!(
            "{points} grid points, contradictions a/c/e hit {seen:?} times, {} disagreements{}",
            disagreements.len(),
            disagreements.first().map(|d| format!(" (first: {d})")).unwrap_or_default()
        ),
    ))
}

fn cutoff_estimate() -> Outcome {
    let cat = e2s(make_catenoid(1.0, cutoff_half_height(1.0, 1e8), Resolution::new(0.05)))?;
    let mut ok = true;
    let mut parts = vec![];
    for r in [10.0, 100.0, 1e4] {
        let c = e2s(build_log_cutoff(&cat, r))?;
        ok &= c.sup_scaled_gradient <= 1.1 * c.c_bound && c.sup_scaled_gradient > 0.5 * c.c_bound;
        parts.push(format!("R = {r}: sup {:.4} (≤ {:.3})", c.sup_scaled_gradient, 1.1 * c.c_bound));
    }
    let radii = [10.0, 100.0, 1e4];
    let u = ycatenoid_truncation_for_radius(1.0, 1e8);
    let yc = e2s(make_ycatenoid(1.0, u, Resolution::new(0.05)))?;
    let check = match e2s(cross_check_constants(&yc, &ThetaReport::new(&yc), &radii))? {
        ConstantsOutcome::Computed(c) => c,
        ConstantsOutcome::NotApplicable { reason } => return Err(reason),
    };
    let gap = |r: f64| check.rows.iter().filter(|row| row.r == r).map(|row| row.gap.abs()).fold(0.0, f64::max);
    for w in radii.windows(2) {
        let ratio = gap(w[0]) / gap(w[1]);
        ok &= (1.6..=2.4).contains(&ratio);
        parts.push(format!("gap ratio R {} → {}: {ratio:.4} (in [1.6, 2.4])", w[0], w[1]));
    }
    Ok((ok, parts.join("; ")))
}

fn gauss_bonnet() -> Outcome {
    let build = |h: f64| -> ysurface::Result<Vec<YSurface>> {
        let res = Resolution::new(h);
        Ok(vec![
            make_plane(1.0, res)?,
            make_catenoid(1.0, 3.0, res)?,
            make_ycatenoid(1.0, 2.0, res)?,
            make_ycatenoid(1.0, 4.0, res)?,
            make_flat_ycone(1.0, 2.0, res)?,
        ])
    };
    let residuals = |surfaces: &[YSurface]| -> ysurface::Result<Vec<(String, f64)>> {
        let mut out = vec![];
        for s in surfaces {
            for (fi, f) in s.faces.iter().enumerate() {
                out.push((format!("{} face {fi}", s.label), gauss_bonnet_report(f, &s.junction_terms(fi))?.relative_residual));
            }
        }
        Ok(out)
    };
    let fine = e2s(residuals(&e2s(build(0.02))?))?;
    let coarse = e2s(residuals(&e2s(build(0.04))?))?;
    let worst = fine.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    let mut min_order = f64::INFINITY;
    for ((_, rf), (_, rc)) in fine.iter().zip(&coarse) {
        if *rc > 1e-12 {
            min_order = min_order.min((rc / rf).log2());
        }
    }
    Ok((
        worst <= 1e-3 && min_order >= 1.0,
        format!("{} faces, max relative residual at h = 0.02: {worst:.3e} (≤ 1e−3), min observed order {min_order:.2} (≥ 1)", fine.len()),
    ))
}

fn fourier_vs_2d() -> Outcome {
    let h = 0.02;
    let mut ok = true;
    let mut parts = vec![];
    for s in [e2s(make_catenoid(1.0, 3.0, Resolution::new(h)))?, e2s(make_ycatenoid(1.0, 3.0, Resolution::new(h)))?] {
        let fi = e2s(fourier_index(&s, 10, None))?;
        let mut merged: Vec<f64> = vec![];
        for m in &fi.modes {
            for &l in &m.lowest {
                merged.push(l);
                if m.mode > 0 {
                    merged.push(l);
                }
            }
        }
        merged.sort_by(f64::total_cmp);
        let (spec, modes, form) = e2s(spectrum_with_modes(&s, &opts(h)))?;
        let worst = spec.eigenvalues[..5]
            .iter()
            .zip(&merged)
            .map(|(a, b)| (a - b).abs() / b.abs())
            .fold(0.0, f64::max);
        let field = e2s(NormalField::from_stacked(&s, &form.reducer.expand(&modes[0].vector)))?;
        let power = e2s(angular_power(&s, &field, 4))?;
        ok &= worst <= 0.02 && power[0] >= 0.99 && fi.total_index == spec.morse_index;
        parts.push(format!(
            "{}: max relative deviation {:.3}% (≤ 2%), mode-0 share of the negative mode {:.4}",
            s.label,
            100.0 * worst,
            power[0]
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn density() -> Outcome {
    let cone = e2s(make_flat_ycone(1.0, 2.0, Resolution::new(0.05)))?;
    let j = e2s(density_report(&cone, DensityCenter::Point(Vector3::zeros()), &[0.25, 0.5, 0.9]))?;
    let cat = e2s(make_catenoid(1.0, 7.0, Resolution::new(0.1)))?;
    let inf = e2s(density_report(&cat, DensityCenter::Infinity, &[10.0, 50.0, 200.0, 500.0]))?;
    let dj = j.limit_estimate();
    let di = inf.limit_estimate();
    Ok((
        (dj - 1.5).abs() <= 0.05 && (di - 2.0).abs() <= 0.05,
        format!("flat Y-cone junction {dj:.6} (3/2 ± 0.05), catenoid at infinity {di:.6} (2 ± 0.05)"),
    ))
}

fn main() {
    let only = std::env::args().skip(1).filter(|a| a.starts_with('C')).collect();
    let mut board = Board { only, failed: vec![] };
    board.run("C1", "flat Y-cone stability", flat_ycone_stability);
    board.run("C2", "catenoid index one", catenoid_index_one);
    let mut ycat_index = None;
    board.run("C3", "Y-catenoid index one", || {
        let (outcome, idx) = ycatenoid_index_one()?;
        ycat_index = idx;
        outcome
    });
    board.run("C4", "θ invariants of the Y-catenoid", theta_invariants);
    board.run("C5", "constant-mode form identities", form_identities);
    board.run("C6", "lower-bound consistency", || lower_bound(ycat_index));
    board.run("C7", "case-analysis contradictions", decision_tree);
    board.run("C8", "log-cutoff estimate", cutoff_estimate);
    board.run("C9", "Gauss–Bonnet residuals", gauss_bonnet);
    board.run("C10", "Fourier vs 2-D spectrum", fourier_vs_2d);
    board.run("C11", "density ratios", density);
    if board.failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed {:?}", board.failed);
        std::process::exit(1);
    }
}
