//! Command-line front end: configuration, the `generate`, `index`,
//! `classify`, `sweep` and `verify` commands, and their JSON/CSV outputs.
//!
//! Every command is a plain function from a [`RunConfig`] to an output value,
//! so the binary only parses arguments and writes files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::classify::{
    classify_report, cross_check_constants, reduced_constant_form, classify_theta, ConstantsOutcome, FaceTheta,
    ThetaReport, Verdict, TWO_PI,
};
use crate::error::{argument, structure, Error, Result};
use crate::geometry::{
    check_y_configuration, gauss_bonnet_report, make_catenoid, make_flat_ycone, make_plane, make_ycatenoid,
    verify_minimality, ycatenoid_profile, Resolution, Topology, YSurface,
};
use crate::mesh_io;
use crate::quadform::{assemble_index_form, build_log_cutoff};
use crate::spectra::{
    compute_spectrum, fourier_index, morse_index_sweep, threads_from_env, write_sweep_csv, SpectrumOptions,
    SpectrumResult, SweepReport,
};

#[derive(Debug, Clone, PartialEq)]
pub enum SurfaceKind {
    Plane,
    Catenoid,
    FlatYCone,
    YCatenoid,
    File(PathBuf),
}

impl std::str::FromStr for SurfaceKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "plane" => Ok(Self::Plane),
            "catenoid" => Ok(Self::Catenoid),
            "flat_ycone" | "flat-ycone" => Ok(Self::FlatYCone),
            "ycatenoid" | "y-catenoid" => Ok(Self::YCatenoid),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(Self::File(PathBuf::from(p))),
                _ => Err(format!("unknown surface `{s}` (plane, catenoid, flat_ycone, ycatenoid, file:<path>)")),
            },
        }
    }
}

pub const DEFAULT_H: f64 = 0.05;
/// Mesh size of the `verify` release gate, where the Gauss–Bonnet bound applies.
pub const VERIFY_H: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub surface: SurfaceKind,
    /// Neck radius: `a` for the catenoid, `r0` for the Y-catenoid.
    pub neck_radius: f64,
    pub half_height: f64,
    pub truncation_u: f64,
    /// Half-width of the plane and strip width of the flat Y-cone.
    pub extent: f64,
    /// Junction length of the flat Y-cone (default `2 · extent`).
    pub junction_length: Option<f64>,
    pub h: f64,
    pub angular: Option<usize>,
    /// Truncation parameters for sweeps (default per surface).
    pub r_list: Vec<f64>,
    /// Cutoff radii for the constants table.
    pub cutoff_r: Vec<f64>,
    pub fourier_cap: usize,
    pub num_eigenvalues: usize,
    pub zero_tolerance: Option<f64>,
    pub angle_tol_deg: f64,
    pub index_hypothesis: u32,
    pub threads: usize,
    pub theta_file: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            surface: SurfaceKind::YCatenoid,
            neck_radius: 1.0,
            half_height: 3.0,
            truncation_u: 3.0,
            extent: 1.0,
            junction_length: None,
            h: DEFAULT_H,
            angular: None,
            r_list: vec![],
            cutoff_r: vec![10.0, 100.0],
            fourier_cap: 10,
            num_eigenvalues: 5,
            zero_tolerance: None,
            angle_tol_deg: 0.1,
            index_hypothesis: 1,
            threads: 1,
            theta_file: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("neck radius", self.neck_radius),
            ("half height", self.half_height),
            ("truncation_u", self.truncation_u),
            ("extent", self.extent),
            ("h", self.h),
            ("angle tolerance", self.angle_tol_deg),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(argument(format!("{name} must be positive, got {v}")));
            }
        }
        if let Some(t) = self.zero_tolerance {
            if !(t > 0.0) {
                return Err(argument(format!("zero tolerance must be positive, got {t}")));
            }
        }
        for (name, list) in [("R list", &self.r_list), ("cutoff radii", &self.cutoff_r)] {
            if list.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(argument(format!("{name} must be strictly increasing")));
            }
        }
        if self.threads == 0 {
            return Err(argument("thread count must be at least 1"));
        }
        Ok(())
    }

    fn resolution(&self) -> Resolution {
        let r = Resolution::new(self.h);
        match self.angular {
            Some(n) => r.with_angular(n),
            None => r,
        }
    }

    /// Surface with the configured truncation.
    pub fn build_surface(&self) -> Result<YSurface> {
        let t = match self.surface {
            SurfaceKind::Catenoid => self.half_height,
            SurfaceKind::YCatenoid => self.truncation_u,
            _ => self.extent,
        };
        self.build_truncated(t)
    }

    /// Surface with truncation parameter `t` (half height, catenary
    /// parameter or extent, depending on the surface).
    pub fn build_truncated(&self, t: f64) -> Result<YSurface> {
        let res = self.resolution();
        match &self.surface {
            SurfaceKind::Plane => make_plane(t, res),
            SurfaceKind::Catenoid => make_catenoid(self.neck_radius, t, res),
            SurfaceKind::FlatYCone => make_flat_ycone(t, self.junction_length.unwrap_or(2.0 * t), res),
            SurfaceKind::YCatenoid => make_ycatenoid(self.neck_radius, t, res),
            SurfaceKind::File(p) => mesh_io::read_mesh(p),
        }
    }

    /// Truncation parameters of the sweep.
    pub fn sweep_list(&self) -> Vec<f64> {
        if !self.r_list.is_empty() {
            return self.r_list.clone();
        }
        match self.surface {
            SurfaceKind::Catenoid => vec![1.5, 2.0, 3.0],
            SurfaceKind::YCatenoid => vec![2.0, 3.0, 4.0],
            _ => vec![0.5, 1.0, 2.0],
        }
    }

    fn spectrum_options(&self, truncation: Option<f64>) -> SpectrumOptions {
        SpectrumOptions {
            num_eigenvalues: self.num_eigenvalues,
            zero_tolerance: self.zero_tolerance,
            truncation,
            mesh_size: Some(self.h),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceSummary {
    pub label: String,
    pub faces: usize,
    pub junctions: usize,
    pub nodes: usize,
    pub elements: usize,
    pub topologies: Vec<Topology>,
}

impl SurfaceSummary {
    pub fn of(surface: &YSurface) -> Self {
        Self {
            label: surface.label.clone(),
            faces: surface.faces.len(),
            junctions: surface.junctions.len(),
            nodes: surface.total_nodes(),
            elements: surface.faces.iter().map(|f| f.elements.len()).sum(),
            topologies: surface.faces.iter().map(|f| f.topology).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSection {
    pub eigenvalues: Vec<f64>,
    pub index: usize,
    /// Nullity of the truncated problem; Dirichlet conditions remove the
    /// kernel elements of the untruncated surface.
    pub nullity_truncated: usize,
    pub zero_tolerance: f64,
    pub dimension: usize,
    pub residuals: Vec<f64>,
}

impl From<&SpectrumResult> for SpectrumSection {
    fn from(s: &SpectrumResult) -> Self {
        Self {
            eigenvalues: s.eigenvalues.clone(),
            index: s.morse_index,
            nullity_truncated: s.nullity,
            zero_tolerance: s.zero_tolerance,
            dimension: s.dimension,
            residuals: s.residuals.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaSection {
    /// Empty when `θ` came from a file.
    pub per_face: Vec<FaceTheta>,
    pub theta: [f64; 3],
    pub matrix2x2: [[f64; 2]; 2],
    pub trace: f64,
    pub det: f64,
    pub negative_count: usize,
}

impl ThetaSection {
    fn new(per_face: Vec<FaceTheta>, theta: [f64; 3]) -> Self {
        let form = reduced_constant_form(theta);
        let m = form.matrix;
        Self {
            per_face,
            theta,
            matrix2x2: m,
            trace: form.trace,
            det: form.determinant,
            negative_count: form.negative_count,
        }
    }
}

/// The report document shared by `index` and `classify`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub surface: YSurface,
    pub document: String,
    pub summary: String,
}

pub fn cmd_generate(cfg: &RunConfig) -> Result<Generated> {
    cfg.validate()?;
    let surface = cfg.build_surface()?;
    let document = mesh_io::to_json(&surface)?;
    let s = SurfaceSummary::of(&surface);
    let mut summary = format!("{}: {} faces, {} junctions, {} nodes", s.label, s.faces, s.junctions, s.nodes);
    if !surface.junctions.is_empty() {
        let y = check_y_configuration(&surface, cfg.angle_tol_deg)?;
        for j in &y.junctions {
            let _ = write!(
                summary,
                "\njunction {}: max angle deviation {:.3e}°, max |Στ| {:.3e} — {}",
                j.junction,
                j.max_angle_deviation_deg,
                j.max_conormal_sum,
                if j.passed { "ok" } else { "FAILED" }
            );
        }
    }
    Ok(Generated { surface, document, summary })
}

pub fn cmd_index(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let surface = cfg.build_surface()?;
    let spectrum = compute_spectrum(&surface, &cfg.spectrum_options(None))?;
    let sweep = if cfg.r_list.is_empty() {
        None
    } else {
        Some(morse_index_sweep(|t| cfg.build_truncated(t), &cfg.r_list, &cfg.spectrum_options(None), cfg.threads)?)
    };
    Ok(Report {
        surface: Some(SurfaceSummary::of(&surface)),
        spectrum: Some((&spectrum).into()),
        sweep,
        theta: None,
        verdict: None,
    })
}

/// `θ` input for the classifier, bypassing the mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaFile {
    pub theta: [f64; 3],
    #[serde(default)]
    pub topology: Option<[Topology; 3]>,
}

pub fn cmd_classify(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    if let Some(path) = &cfg.theta_file {
        let tf: ThetaFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let verdict = classify_theta(tf.theta, tf.topology, cfg.index_hypothesis)?;
        return Ok(Report {
            surface: None,
            spectrum: None,
            sweep: None,
            theta: Some(ThetaSection::new(vec![], tf.theta)),
            verdict: Some(verdict),
        });
    }
    let surface = cfg.build_surface()?;
    if surface.faces.len() != 3 || surface.junctions.len() != 1 {
        return Err(structure(format!(
            "classification needs three faces and one junction, found {} and {}",
            surface.faces.len(),
            surface.junctions.len()
        )));
    }
    if !surface.junctions[0].closed {
        return Err(structure("junction not compact: the junction curve is an open chain"));
    }
    let report = ThetaReport::new(&surface);
    let theta = report.theta()?;
    let verdict = classify_report(&report, cfg.index_hypothesis)?;
    Ok(Report {
        surface: Some(SurfaceSummary::of(&surface)),
        spectrum: None,
        sweep: None,
        theta: Some(ThetaSection::new(report.faces.clone(), theta)),
        verdict: Some(verdict),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub report: SweepReport,
    /// `R,h,mode,eigenvalue_rank,eigenvalue,index,nullity,status`
    pub spectra_csv: String,
    /// `R,Q_value,theta_prediction,gap,c1,c2,c3`
    pub convergence_csv: String,
    pub constants: ConstantsOutcome,
}

pub const CONVERGENCE_CSV_HEADER: &str = "R,Q_value,theta_prediction,gap,c1,c2,c3";

/// Truncation of the Y-catenoid whose outer rings lie beyond radius `rho`.
pub fn ycatenoid_truncation_for_radius(neck_radius: f64, rho: f64) -> f64 {
    let p = ycatenoid_profile(neck_radius);
    (1.001 * rho / p.a).max(1.0).acosh().max(p.u0 + 1.0)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let list = cfg.sweep_list();
    let report = morse_index_sweep(|t| cfg.build_truncated(t), &list, &cfg.spectrum_options(None), cfg.threads)?;
    let mut buf = Vec::new();
    write_sweep_csv(&report, &mut buf)?;
    let mut spectra_csv = String::from_utf8(buf).expect("CSV is UTF-8");

    // per-mode rows for rotationally symmetric surfaces
    for &t in &list {
        let Ok(surface) = cfg.build_truncated(t) else { continue };
        if !surface.is_rotationally_symmetric() {
            continue;
        }
        match fourier_index(&surface, cfg.fourier_cap, cfg.zero_tolerance) {
            Ok(fi) => {
                for m in &fi.modes {
                    for (rank, ev) in m.lowest.iter().enumerate() {
                        let _ = writeln!(
                            spectra_csv,
                            "{t},{},{},{rank},{ev:e},{},{},ok",
                            cfg.h, m.mode, m.negative, m.nullity
                        );
                    }
                }
            }
            Err(e) => {
                let _ = writeln!(spectra_csv, "{t},{},fourier,,,,,error: {}", cfg.h, e.to_string().replace(',', ";"));
            }
        }
    }

    let mut convergence_csv = format!("{CONVERGENCE_CSV_HEADER}\n");
    let constants = match constants_surface(cfg) {
        Ok(surface) => {
            let theta = ThetaReport::new(&surface);
            cross_check_constants(&surface, &theta, &cfg.cutoff_r)
                .unwrap_or_else(|e| ConstantsOutcome::NotApplicable { reason: e.to_string() })
        }
        Err(e) => ConstantsOutcome::NotApplicable { reason: e.to_string() },
    };
    if let ConstantsOutcome::Computed(check) = &constants {
        for r in &check.rows {
            let _ = writeln!(
                convergence_csv,
                "{},{:e},{:e},{:e},{},{},{}",
                r.r, r.q_value, r.theta_prediction, r.gap, r.c[0], r.c[1], r.c[2]
            );
        }
    }
    Ok(SweepOutput { report, spectra_csv, convergence_csv, constants })
}

/// Half height of a catenoid with neck `a` whose rims lie beyond radius `rho`.
pub fn cutoff_half_height(a: f64, rho: f64) -> f64 {
    (1.001 * rho / a).max(1.0).acosh()
}

/// Surface for the constants table: the Y-catenoid is regenerated with its
/// rings beyond the largest `R²`; other surfaces are used as configured.
fn constants_surface(cfg: &RunConfig) -> Result<YSurface> {
    let r_max = cfg.cutoff_r.iter().copied().fold(0.0, f64::max);
    match cfg.surface {
        SurfaceKind::YCatenoid if r_max > 0.0 => {
            let u = ycatenoid_truncation_for_radius(cfg.neck_radius, r_max * r_max).max(cfg.truncation_u);
            cfg.build_truncated(u)
        }
        _ => cfg.build_surface(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckItem {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub items: Vec<CheckItem>,
    pub passed: bool,
}

impl VerifySummary {
    pub fn failures(&self) -> Vec<&CheckItem> {
        self.items.iter().filter(|i| !i.passed).collect()
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        for i in &self.items {
            let _ = writeln!(
                out,
                "{} {:<48} measured {:>12.4e}  bound {:>10.3e}{}",
                if i.passed { "PASS" } else { "FAIL" },
                i.name,
                i.measured,
                i.bound,
                if i.detail.is_empty() { String::new() } else { format!("  ({})", i.detail) }
            );
        }
        out
    }
}

struct Suite {
    items: Vec<CheckItem>,
}

impl Suite {
    fn check(&mut self, name: impl Into<String>, measured: f64, bound: f64, passed: bool) {
        self.items.push(CheckItem { name: name.into(), measured, bound, passed, detail: String::new() });
    }

    fn le(&mut self, name: impl Into<String>, measured: f64, bound: f64) {
        self.check(name, measured, bound, measured <= bound);
    }

    fn fail(&mut self, name: impl Into<String>, err: &Error) {
        self.items.push(CheckItem {
            name: name.into(),
            measured: f64::NAN,
            bound: f64::NAN,
            passed: false,
            detail: err.to_string(),
        });
    }

    /// Structural suite of one surface: face invariants, minimality,
    /// Gauss–Bonnet per face, junction configuration, JSON round-trip and
    /// index-form symmetry.
    fn surface(&mut self, surface: &YSurface, cfg: &RunConfig) {
        let tag = &surface.label;
        if let Err(e) = surface.validate() {
            self.fail(format!("{tag}: structure"), &e);
            return;
        }
        for (fi, face) in surface.faces.iter().enumerate() {
            let m = verify_minimality(face, 1e-8);
            self.le(format!("{tag} face {fi}: max |H|"), m.max_abs_h, 1e-8);
            match gauss_bonnet_report(face, &surface.junction_terms(fi)) {
                Ok(gb) => self.le(format!("{tag} face {fi}: Gauss–Bonnet relative residual"), gb.relative_residual, 1e-3),
                Err(e) => self.fail(format!("{tag} face {fi}: Gauss–Bonnet"), &e),
            }
        }
        if !surface.junctions.is_empty() {
            match check_y_configuration(surface, cfg.angle_tol_deg) {
                Ok(y) => {
                    for j in &y.junctions {
                        self.le(format!("{tag} junction {}: angle deviation (deg)", j.junction), j.max_angle_deviation_deg, cfg.angle_tol_deg);
                        self.le(format!("{tag} junction {}: |Στ|", j.junction), j.max_conormal_sum, 1e-8);
                    }
                }
                Err(e) => self.fail(format!("{tag}: Y-configuration"), &e),
            }
        }
        match mesh_io::to_json(surface).and_then(|a| mesh_io::from_json(&a).and_then(|s| mesh_io::to_json(&s)).map(|b| a == b)) {
            Ok(same) => self.check(format!("{tag}: JSON round-trip byte-identical"), same as u8 as f64, 1.0, same),
            Err(e) => self.fail(format!("{tag}: JSON round-trip"), &e),
        }
        match assemble_index_form(surface) {
            Ok(m) => {
                let sym = m.form().is_symmetric();
                self.check(format!("{tag}: index form symmetric"), sym as u8 as f64, 1.0, sym);
                let ones = vec![1.0; m.dim()];
                let defect = m.stiffness.mul_vec(&ones).iter().fold(0.0, |a: f64, v| a.max(v.abs()));
                self.le(format!("{tag}: stiffness annihilates constants"), defect, 1e-10 * m.stiffness.norm_inf().max(1.0));
            }
            Err(e) => self.fail(format!("{tag}: assembly"), &e),
        }
    }
}

/// Runs the invariant suites. With a `file:` surface only the structural
/// suite of that surface runs; otherwise the generated examples are checked
/// at the configured `h`, and spectral/classification facts on coarse meshes.
pub fn cmd_verify(cfg: &RunConfig) -> Result<VerifySummary> {
    cfg.validate()?;
    let mut suite = Suite { items: vec![] };
    if let SurfaceKind::File(_) = cfg.surface {
        match cfg.build_surface() {
            Ok(s) => suite.surface(&s, cfg),
            Err(e) => suite.fail("mesh file", &e),
        }
        let passed = suite.items.iter().all(|i| i.passed);
        return Ok(VerifySummary { items: suite.items, passed });
    }

    let res = Resolution::new(cfg.h);
    let generated: [(&str, Result<YSurface>); 3] = [
        ("catenoid", make_catenoid(1.0, 3.0, res)),
        ("ycatenoid", make_ycatenoid(1.0, 3.0, res)),
        ("flat_ycone", make_flat_ycone(1.0, 2.0, res)),
    ];
    for (name, s) in &generated {
        match s {
            Ok(s) => suite.surface(s, cfg),
            Err(e) => suite.fail(format!("{name}: generation"), e),
        }
    }

    // spectral facts on coarse meshes
    let coarse = Resolution::new(cfg.h.max(0.1));
    let index_of = |s: Result<YSurface>| s.and_then(|s| compute_spectrum(&s, &SpectrumOptions::default()));
    for (name, s, expected) in [
        ("flat Y-cone index", make_flat_ycone(1.0, 2.0, coarse), 0),
        ("catenoid |z| ≤ 3 index", make_catenoid(1.0, 3.0, coarse), 1),
        ("Y-catenoid u = 3 index", make_ycatenoid(1.0, 3.0, coarse), 1),
    ] {
        match index_of(s) {
            Ok(r) => suite.check(name, r.morse_index as f64, expected as f64, r.morse_index == expected),
            Err(e) => suite.fail(name, &e),
        }
    }

    // θ and the decision tree on the Y-catenoid
    match make_ycatenoid(1.0, 3.0, coarse) {
        Ok(s) => {
            let report = ThetaReport::new(&s);
            let disk = report.faces[2];
            suite.le("Y-catenoid disk |θ − 2π|", (disk.theta - TWO_PI).abs(), 1e-9);
            match (classify_report(&report, 1), classify_report(&report, 1)) {
                (Ok(a), Ok(b)) => {
                    let same = a == b;
                    suite.check("verdict determinism", same as u8 as f64, 1.0, same);
                    let yc = a.conclusion == crate::classify::Conclusion::YCatenoid;
                    suite.check(format!("Y-catenoid verdict ({})", a.conclusion_text), yc as u8 as f64, 1.0, yc);
                }
                (Err(e), _) | (_, Err(e)) => suite.fail("classification", &e),
            }
            if let (Ok(form), Ok(spec)) = (report.constant_form(), compute_spectrum(&s, &SpectrumOptions::default())) {
                suite.le("constant-mode negatives ≤ index", form.negative_count as f64, spec.morse_index as f64);
            }
        }
        Err(e) => suite.fail("Y-catenoid θ", &e),
    }

    // algebraic identities of the constant-mode form
    {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let t = [0, 1, 2].map(|_| rng.gen_range(-8.0..2.0) * std::f64::consts::PI);
            let f = reduced_constant_form(t);
            let mut s = t;
            s.sort_by(f64::total_cmp);
            let trace = s[0] + s[1] + 2.0 * s[2];
            let det = s[0] * s[1] + s[2] * (s[0] + s[1]);
            worst = worst.max((f.trace - trace).abs() / trace.abs().max(1.0));
            worst = worst.max((f.determinant - det).abs() / det.abs().max(1.0));
        }
        suite.le("constant-mode trace/det identities", worst, 1e-12);
    }

    // log-cutoff gradient bound, on a catenoid reaching past the largest R²
    let radii = [10.0, 100.0, 1e4];
    match make_catenoid(1.0, cutoff_half_height(1.0, 1e8), Resolution::new(cfg.h.max(0.05))) {
        Ok(s) => {
            for r in radii {
                match build_log_cutoff(&s, r) {
                    Ok(c) => suite.le(format!("cutoff sup |x||∇φ| log R, R = {r}"), c.sup_scaled_gradient, 1.1 * c.c_bound),
                    Err(e) => suite.fail("cutoff", &e),
                }
            }
        }
        Err(e) => suite.fail("cutoff catenoid", &e),
    }

    // constants gap on the Y-catenoid: O(1/log R), so squaring R halves it
    let u = ycatenoid_truncation_for_radius(1.0, 1e4);
    let outcome = make_ycatenoid(1.0, u, coarse)
        .and_then(|s| cross_check_constants(&s, &ThetaReport::new(&s), &[10.0, 100.0]));
    match outcome {
        Ok(ConstantsOutcome::Computed(check)) => {
            let gap = |r: f64| check.rows.iter().filter(|row| row.r == r).map(|row| row.gap.abs()).fold(0.0, f64::max);
            let ratio = gap(10.0) / gap(100.0);
            suite.check("constants gap ratio R = 10 → 100", ratio, 2.0, (1.6..=2.4).contains(&ratio));
        }
        Ok(ConstantsOutcome::NotApplicable { reason }) => suite.items.push(CheckItem {
            name: "constants gap".into(),
            measured: f64::NAN,
            bound: 2.0,
            passed: false,
            detail: reason,
        }),
        Err(e) => suite.fail("constants gap", &e),
    }
    let passed = suite.items.iter().all(|i| i.passed);
    Ok(VerifySummary { items: suite.items, passed })
}

// ---------------------------------------------------------------------------
// argument parsing

#[derive(Debug, Parser)]
#[command(name = "ysurface", version, about = "Morse index and classification of minimal Y-surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the mesh exchange document of a generated surface.
    Generate(CommonArgs),
    /// Morse index, nullity and lowest eigenvalues.
    Index(CommonArgs),
    /// θ invariants and the index-one decision tree.
    Classify(CommonArgs),
    /// Truncation sweep CSV plus the constants convergence CSV.
    Sweep(CommonArgs),
    /// Invariant suite; exits nonzero on any failure.
    Verify(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// plane, catenoid, flat_ycone, ycatenoid or file:<path>
    #[arg(long, default_value = "ycatenoid")]
    pub surface: SurfaceKind,
    /// Neck radius of the Y-catenoid.
    #[arg(long)]
    pub r0: Option<f64>,
    /// Neck radius of the catenoid.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long = "trunc-u", default_value_t = 3.0)]
    pub trunc_u: f64,
    #[arg(long = "half-height", default_value_t = 3.0)]
    pub half_height: f64,
    #[arg(long, default_value_t = 1.0)]
    pub extent: f64,
    #[arg(long = "junction-length")]
    pub junction_length: Option<f64>,
    /// Mesh size (conformal step); 0.05, or 0.02 for `verify`.
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<f64>,
    #[arg(long)]
    pub angular: Option<usize>,
    /// Sweep truncation parameters, comma separated.
    #[arg(long = "r-list", value_delimiter = ',')]
    pub r_list: Vec<f64>,
    /// Cutoff radii for the constants table, comma separated.
    #[arg(long = "cutoff-r", value_delimiter = ',', default_values_t = [10.0, 100.0])]
    pub cutoff_r: Vec<f64>,
    #[arg(long, default_value_t = 10)]
    pub modes: usize,
    #[arg(long = "num-eigs", default_value_t = 5)]
    pub num_eigs: usize,
    #[arg(long = "tol-zero")]
    pub tol_zero: Option<f64>,
    #[arg(long = "angle-tol", default_value_t = 0.1)]
    pub angle_tol: f64,
    #[arg(long = "index-hypothesis", default_value_t = 1)]
    pub index_hypothesis: u32,
    /// Worker count (overrides YSURFACE_THREADS).
    #[arg(long)]
    pub threads: Option<usize>,
    /// JSON `{theta: [..3], topology?: [..3]}` for `classify`.
    #[arg(long = "theta-file")]
    pub theta_file: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    pub fn config(&self) -> RunConfig {
        let neck = match self.surface {
            SurfaceKind::Catenoid => self.a.or(self.r0),
            _ => self.r0.or(self.a),
        };
        RunConfig {
            surface: self.surface.clone(),
            neck_radius: neck.unwrap_or(1.0),
            half_height: self.half_height,
            truncation_u: self.trunc_u,
            extent: self.extent,
            junction_length: self.junction_length,
            h: self.h.unwrap_or(DEFAULT_H),
            angular: self.angular,
            r_list: self.r_list.clone(),
            cutoff_r: self.cutoff_r.clone(),
            fourier_cap: self.modes,
            num_eigenvalues: self.num_eigs,
            zero_tolerance: self.tol_zero,
            angle_tol_deg: self.angle_tol,
            index_hypothesis: self.index_hypothesis,
            threads: self.threads.unwrap_or_else(threads_from_env),
            theta_file: self.theta_file.clone(),
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Path of the convergence CSV next to the spectra CSV `p`.
pub fn convergence_path(p: &Path) -> PathBuf {
    let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    p.with_file_name(format!("{stem}_convergence.csv"))
}

/// Runs one parsed command; returns the process exit status.
pub fn execute(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(&a.config()).and_then(|g| {
            eprintln!("{}", g.summary);
            match &a.out {
                Some(p) => std::fs::write(p, &g.document).map_err(Error::from),
                None => Ok(()),
            }
            .map(|_| 0)
        }),
        Command::Index(a) => cmd_index(&a.config()).and_then(|r| emit(a.out.as_deref(), &r.to_json()?)).map(|_| 0),
        Command::Classify(a) => {
            cmd_classify(&a.config()).and_then(|r| emit(a.out.as_deref(), &r.to_json()?)).map(|_| 0)
        }
        Command::Sweep(a) => cmd_sweep(&a.config()).and_then(|s| {
            match &a.out {
                Some(p) => {
                    std::fs::write(p, &s.spectra_csv)?;
                    std::fs::write(convergence_path(p), &s.convergence_csv)?;
                }
                None => print!("{}\n{}", s.spectra_csv, s.convergence_csv),
            }
            if let Some(i) = s.report.stabilized_index {
                eprintln!("stabilized index {i}");
            }
            Ok(0)
        }),
        Command::Verify(a) => cmd_verify(&RunConfig { h: a.h.unwrap_or(VERIFY_H), ..a.config() }).and_then(|v| {
            print!("{}", v.table());
            if let Some(p) = &a.out {
                std::fs::write(p, serde_json::to_string_pretty(&v)? + "\n")?;
            }
            if !v.passed {
                eprintln!("{} invariant(s) failed", v.failures().len());
            }
            Ok(if v.passed { 0 } else { 1 })
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                2
            } else {
                0
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(surface: SurfaceKind) -> RunConfig {
        RunConfig { surface, ..Default::default() }
    }

    #[test]
    fn surface_kind_parsing() {
        assert_eq!("flat_ycone".parse::<SurfaceKind>().unwrap(), SurfaceKind::FlatYCone);
        assert_eq!("file:x.json".parse::<SurfaceKind>().unwrap(), SurfaceKind::File("x.json".into()));
        assert!("torus".parse::<SurfaceKind>().is_err());
        assert!("file:".parse::<SurfaceKind>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig { h: -1.0, ..Default::default() }.validate().is_err());
        assert!(RunConfig { r_list: vec![2.0, 1.0], ..Default::default() }.validate().is_err());
        assert!(RunConfig { zero_tolerance: Some(0.0), ..Default::default() }.validate().is_err());
        assert!(RunConfig::default().validate().is_ok());
    }

    #[test]
    fn generate_counts() {
        let g = cmd_generate(&RunConfig { h: 0.1, ..cfg(SurfaceKind::YCatenoid) }).unwrap();
        assert_eq!((g.surface.faces.len(), g.surface.junctions.len()), (3, 1));
        assert!(g.summary.contains("ok"));
        let g = cmd_generate(&cfg(SurfaceKind::FlatYCone)).unwrap();
        assert_eq!(g.surface.faces.len(), 3);
        assert!(g.surface.faces.iter().all(|f| f.a_norm_sq.iter().all(|&a| a == 0.0)));
        let g = cmd_generate(&RunConfig { h: 0.1, ..cfg(SurfaceKind::Catenoid) }).unwrap();
        assert_eq!((g.surface.faces.len(), g.surface.junctions.len()), (1, 0));
    }

    #[test]
    fn classify_open_junction_is_structural() {
        let err = cmd_classify(&RunConfig { h: 0.25, ..cfg(SurfaceKind::FlatYCone) }).unwrap_err();
        assert!(matches!(err, Error::Structure(ref m) if m.contains("not compact")), "{err}");
    }

    #[test]
    fn classify_theta_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.json");
        let pi = std::f64::consts::PI;
        std::fs::write(&p, format!("{{\"theta\": [{}, {}, {}]}}", -3.0 * pi, -3.0 * pi, -pi)).unwrap();
        let r = cmd_classify(&RunConfig { theta_file: Some(p), ..Default::default() }).unwrap();
        let v = r.verdict.clone().unwrap();
        assert_eq!(v.conclusion_text, "contradiction: index ≥ 2");
        assert!(r.to_json().unwrap().contains("\"rules\""));
    }

    #[test]
    fn report_is_deterministic() {
        let c = RunConfig { h: 0.2, ..cfg(SurfaceKind::FlatYCone) };
        let a = cmd_index(&c).unwrap().to_json().unwrap();
        let b = cmd_index(&RunConfig { threads: 2, ..c }).unwrap().to_json().unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"nullity_truncated\""));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["ysurface", "generate", "--surface", "catenoid", "--h", "-1"]), 2);
        assert_eq!(run(["ysurface", "bogus"]), 2);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.json");
        std::fs::write(&p, "{\"theta\": [-10.0, -10.0, -3.0]}").unwrap();
        let out = dir.path().join("v.json");
        let args = ["ysurface", "classify", "--theta-file", p.to_str().unwrap(), "--out", out.to_str().unwrap()];
        assert_eq!(run(args), 0);
    }

    #[test]
    fn truncation_for_radius() {
        let u = ycatenoid_truncation_for_radius(1.0, 100.0);
        let p = ycatenoid_profile(1.0);
        assert!(p.a * u.cosh() >= 100.0);
    }
}
