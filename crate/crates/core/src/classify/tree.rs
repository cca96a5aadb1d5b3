//! The case analysis for index-one Y-surfaces with three faces, replayed as a
//! sequence of rules on sorted `θ` and (optionally) declared topology.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use super::reduced_constant_form;
use crate::error::{argument, Result};
use crate::geometry::Topology;

/// Inequalities within `BOUNDARY_TOL` of a case boundary are flagged.
pub const BOUNDARY_TOL: f64 = 1e-9 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    IndexAtLeastTwo,
    TwoCompactFaces,
    FlatAnnulus,
    YCatenoid,
    DiskAnnulusStableFace,
    /// A strict inequality the argument relies on degenerates to equality.
    BoundaryCase,
    /// The declared data leave the last step open (ambiguous topology).
    Undetermined,
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conclusion::IndexAtLeastTwo => "contradiction: index ≥ 2",
            Conclusion::TwoCompactFaces => "contradiction: two compact faces",
            Conclusion::FlatAnnulus => "contradiction: flat annulus impossible",
            Conclusion::YCatenoid => "Y-catenoid",
            Conclusion::DiskAnnulusStableFace => "disk + annulus + stable unbounded face",
            Conclusion::BoundaryCase => "boundary case",
            Conclusion::Undetermined => "undetermined: topology of the lowest face is ambiguous",
        })
    }
}

impl Conclusion {
    pub fn is_contradiction(&self) -> bool {
        matches!(self, Conclusion::IndexAtLeastTwo | Conclusion::TwoCompactFaces | Conclusion::FlatAnnulus)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleStep {
    pub rule: &'static str,
    /// Short phrase of the argument the rule encodes.
    pub anchor: &'static str,
    pub inputs: BTreeMap<&'static str, f64>,
    /// Whether the rule's condition held.
    pub fired: bool,
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    /// Sorted `θ₁ ≤ θ₂ ≤ θ₃`.
    pub theta: [f64; 3],
    /// `theta[k]` is input face `order[k]`.
    pub order: [usize; 3],
    pub index_hypothesis: u32,
    pub rules: Vec<RuleStep>,
    pub conclusion: Conclusion,
    pub conclusion_text: String,
    /// Case boundaries hit within [`BOUNDARY_TOL`].
    pub boundary_flags: Vec<String>,
    /// Admissible `(g, e, d)` per sorted face when topology was not declared.
    pub admissible_topologies: Option<[Vec<Topology>; 3]>,
}

impl Verdict {
    /// Ids of the rules whose condition held, in order.
    pub fn path(&self) -> Vec<&'static str> {
        self.rules.iter().filter(|r| r.fired).map(|r| r.rule).collect()
    }
}

/// Unbounded `(g, e, d)` with `α(g, e, d) ≥ θ` (as `β ≤ 0`), strictly above
/// `θ` unless the face can be flat. Unbounded faces are the only candidates
/// for the two lower faces.
pub fn admissible_topologies(theta: f64) -> Vec<Topology> {
    let mut out = Vec::new();
    // α = 2π(1 − 2g − e − d) ≥ θ bounds 2g + e + d
    let budget = (1.0 - theta / (2.0 * PI) + 1e-9).floor().max(0.0) as u32;
    for g in 0..=budget / 2 {
        for e in 1..=budget {
            for d in e..=budget {
                let t = Topology::new(g, e, d);
                if 2 * g + e + d <= budget && t.alpha() >= theta - BOUNDARY_TOL {
                    out.push(t);
                }
            }
        }
    }
    out
}

struct Trace {
    rules: Vec<RuleStep>,
    flags: Vec<String>,
}

impl Trace {
    fn step(&mut self, rule: &'static str, anchor: &'static str, inputs: &[(&'static str, f64)], fired: bool, outcome: impl Into<String>) {
        self.rules.push(RuleStep {
            rule,
            anchor,
            inputs: inputs.iter().copied().collect(),
            fired,
            outcome: outcome.into(),
        });
    }

    fn near(&mut self, what: &str, value: f64, boundary: f64) {
        if (value - boundary).abs() <= BOUNDARY_TOL {
            self.flags.push(format!("{what} = {value} lies on the boundary {boundary}"));
        }
    }
}

/// Replays the case analysis on `θ` (any order) with optional declared
/// topologies in the same order.
///
/// Errors when some `θ_i > 2π` (impossible, as `θ ≤ α ≤ 2π`), when a declared
/// topology has `θ_i > α_i`, or when the index hypothesis exceeds one.
pub fn classify_theta(theta: [f64; 3], topology: Option<[Topology; 3]>, index_hypothesis: u32) -> Result<Verdict> {
    if index_hypothesis > 1 {
        return Err(argument("the case analysis assumes index at most one"));
    }
    if let Some(&bad) = theta.iter().find(|t| !t.is_finite() || **t > 2.0 * PI + BOUNDARY_TOL) {
        return Err(argument(format!("θ = {bad} is impossible: θ ≤ α ≤ 2π")));
    }
    if let Some(top) = topology {
        for (t, tp) in theta.iter().zip(&top) {
            if *t > tp.alpha() + BOUNDARY_TOL {
                return Err(argument(format!("θ = {t} exceeds α = {} of topology {tp:?}", tp.alpha())));
            }
        }
    }
    let form = reduced_constant_form(theta);
    let order = form.permutation;
    let [t1, t2, t3] = form.theta;
    let sorted_top = topology.map(|tp| order.map(|k| tp[k]));
    let mut tr = Trace { rules: Vec::new(), flags: Vec::new() };
    let finish = |tr: Trace, conclusion: Conclusion| Verdict {
        theta: [t1, t2, t3],
        order,
        index_hypothesis,
        rules: tr.rules,
        conclusion,
        conclusion_text: conclusion.to_string(),
        boundary_flags: tr.flags,
        admissible_topologies: if topology.is_none() {
            Some([t1, t2, t3].map(admissible_topologies))
        } else {
            None
        },
    };

    // (a)
    tr.near("θ₃", t3, 0.0);
    let fired = t3 < 0.0;
    tr.step("a", "the index is at least two", &[("theta3", t3)], fired, if fired {
        "all θ negative: constants give two negative directions"
    } else {
        "θ₃ ≥ 0"
    });
    if fired {
        return Ok(finish(tr, Conclusion::IndexAtLeastTwo));
    }

    // (b)
    tr.step("b", "then Σ₃ is a bounded disk", &[("theta3", t3)], true, "θ₃ ≥ 0 forces α₃ = 2π: Σ₃ is a compact disk");
    if let Some(tp) = sorted_top {
        if tp[2] != Topology::DISK {
            tr.flags.push(format!("declared topology {:?} of the top face is not a disk", tp[2]));
        }
    }

    // (b2) α ∈ {2π} ∪ (−∞, −2π], so θ₂ > −2π makes Σ₂ a second compact disk
    tr.near("θ₂", t2, -2.0 * PI);
    let fired = t2 > -2.0 * PI + BOUNDARY_TOL;
    tr.step("b2", "not possible for all three faces to be compact", &[("theta2", t2)], fired, if fired {
        "θ₂ > −2π: a second compact face, excluded by the convex hull and half-space properties"
    } else {
        "θ₁, θ₂ ≤ −2π: two unbounded faces"
    });
    if fired {
        return Ok(finish(tr, Conclusion::TwoCompactFaces));
    }

    // (c)
    tr.near("θ₂", t2, -4.0 * PI);
    let fired = t2 <= -4.0 * PI;
    let inputs = [("theta1", t1), ("theta2", t2), ("theta3", t3), ("trace", form.trace), ("det", form.determinant)];
    if fired {
        let scale = 1.0 + t1.abs().max(t2.abs()).max(t3.abs()).powi(2);
        if form.determinant.abs() <= 1e-9 * scale {
            tr.flags.push("determinant vanishes at θ₁ = θ₂ = −4π, θ₃ = 2π".into());
            tr.step("c", "we may require −4π ≤ θ₂", &inputs, true, "θ₂ ≤ −4π but the determinant vanishes: strict inequality lost");
            return Ok(finish(tr, Conclusion::BoundaryCase));
        }
        tr.step("c", "we may require −4π ≤ θ₂", &inputs, true, "θ₂ ≤ −4π: trace < 0 < determinant");
        return Ok(finish(tr, Conclusion::IndexAtLeastTwo));
    }
    tr.step("c", "we may require −4π ≤ θ₂", &inputs, false, "−4π < θ₂ ≤ −2π: Σ₂ is an annulus");

    // (d)
    let fired = (t2 + 2.0 * PI).abs() <= BOUNDARY_TOL;
    tr.step("d", "θ₂ = −2π implies that Σ₂ is flat", &[("theta2", t2)], fired, if fired {
        "θ₂ = −2π: Σ₂ would be a flat annulus"
    } else {
        "θ₂ < −2π"
    });
    if fired {
        return Ok(finish(tr, Conclusion::FlatAnnulus));
    }

    // (e)
    tr.near("θ₃", t3, PI);
    let fired = t3 < PI;
    tr.step("e", "we must have π ≤ θ₃ < 2π", &inputs, fired, if fired {
        "θ₃ < π: trace < 0 < determinant"
    } else {
        "θ₃ ≥ π"
    });
    if fired {
        return Ok(finish(tr, Conclusion::IndexAtLeastTwo));
    }

    // (f)
    tr.near("θ₃", t3, 2.0 * PI);
    let fired = (t3 - 2.0 * PI).abs() <= BOUNDARY_TOL;
    tr.step("f", "by the Hopf lemma they are symmetric", &[("theta3", t3)], fired, if fired {
        "flat disk; faces symmetric; Y-catenoid"
    } else {
        "π ≤ θ₃ < 2π: Σ₃ is a non-flat disk"
    });
    if fired {
        return Ok(finish(tr, Conclusion::YCatenoid));
    }

    // (g): is Σ₁ an annulus (one end, no genus)?
    let lowest_one_end: Option<bool> = match sorted_top {
        Some(tp) => Some(tp[0].genus == 0 && tp[0].num_ends == 1),
        None => {
            let cands = admissible_topologies(t1);
            if cands.iter().all(|t| t.genus == 0 && t.num_ends == 1) {
                Some(true)
            } else if cands.iter().all(|t| !(t.genus == 0 && t.num_ends == 1)) {
                Some(false)
            } else {
                None
            }
        }
    };
    // the constant-mode determinant test applies on every branch; when Σ₁ is
    // not an annulus the argument also needs −3π ≤ θ₂
    let not_annulus = lowest_one_end == Some(false);
    if not_annulus {
        tr.near("θ₂", t2, -3.0 * PI);
    }
    let fired = form.negative_count >= 2 || (not_annulus && t2 < -3.0 * PI);
    let outcome = match (fired, not_annulus) {
        (true, _) => "determinant test: two negative directions among constants",
        (false, true) => "Σ₁ not an annulus: −3π ≤ θ₂ < −2π, Σ₂ an annulus with ∫|A₂|² ≤ 2π",
        (false, false) => "at most one negative direction among constants",
    };
    tr.step("g", "results in θ₁ ≤ −6π", &inputs, fired, outcome);
    if fired {
        return Ok(finish(tr, Conclusion::IndexAtLeastTwo));
    }

    // (h)
    let outcome = match lowest_one_end {
        Some(true) => Conclusion::YCatenoid,
        Some(false) => Conclusion::DiskAnnulusStableFace,
        None => Conclusion::Undetermined,
    };
    tr.step("h", "then Σ is a Y-catenoid", &[("theta1", t1)], outcome == Conclusion::YCatenoid, outcome.to_string());
    Ok(finish(tr, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;

    const YC: [f64; 3] = [-3.0 * PI, -3.0 * PI, 2.0 * PI];

    #[test]
    fn ycatenoid_verdict() {
        let top = [Topology::ANNULUS, Topology::ANNULUS, Topology::DISK];
        let v = classify_theta(YC, Some(top), 1).unwrap();
        assert_eq!(v.conclusion, Conclusion::YCatenoid);
        assert_eq!(v.path(), vec!["b", "f"]);
        assert_eq!(v.conclusion_text, "Y-catenoid");
        // determinism
        assert_eq!(v, classify_theta(YC, Some(top), 1).unwrap());
    }

    #[test]
    fn all_negative_theta() {
        let v = classify_theta([-3.0 * PI, -3.0 * PI, -PI], None, 1).unwrap();
        assert_eq!(v.conclusion, Conclusion::IndexAtLeastTwo);
        assert_eq!(v.path(), vec!["a"]);
        assert_eq!(v.rules[0].anchor, "the index is at least two");
    }

    #[test]
    fn small_theta3() {
        let v = classify_theta([-5.0 * PI, -3.0 * PI, PI / 2.0], None, 1).unwrap();
        assert_eq!(v.conclusion, Conclusion::IndexAtLeastTwo);
        assert_eq!(*v.path().last().unwrap(), "e");
    }

    #[test]
    fn low_theta2() {
        let v = classify_theta([-6.0 * PI, -4.5 * PI, 1.5 * PI], None, 1).unwrap();
        assert_eq!(v.conclusion, Conclusion::IndexAtLeastTwo);
        assert_eq!(*v.path().last().unwrap(), "c");
    }

    #[test]
    fn corner_is_a_boundary_case() {
        let v = classify_theta([-4.0 * PI, -4.0 * PI, 2.0 * PI], None, 1).unwrap();
        assert_eq!(v.conclusion, Conclusion::BoundaryCase);
        assert!(!v.boundary_flags.is_empty());
    }

    #[test]
    fn flat_annulus_and_two_disks() {
        let v = classify_theta([-3.0 * PI, -2.0 * PI, 1.5 * PI], None, 1).unwrap();
        assert_eq!(v.conclusion, Conclusion::FlatAnnulus);
        let v = classify_theta([-3.0 * PI, 0.5 * PI, 1.5 * PI], None, 1).unwrap();
        assert_eq!(v.conclusion, Conclusion::TwoCompactFaces);
    }

    #[test]
    fn lowest_face_with_two_ends() {
        let top = [Topology::new(0, 2, 2), Topology::ANNULUS, Topology::DISK];
        let v = classify_theta([-6.2 * PI, -2.5 * PI, 1.9 * PI], Some(top), 1).unwrap();
        assert_eq!(v.conclusion, Conclusion::DiskAnnulusStableFace);
        let v = classify_theta([-7.0 * PI, -3.5 * PI, 1.5 * PI], Some(top), 1).unwrap();
        assert_eq!(v.conclusion, Conclusion::IndexAtLeastTwo);
        assert_eq!(*v.path().last().unwrap(), "g");
    }

    #[test]
    fn undeclared_topology_reports_candidates() {
        let v = classify_theta([-2.5 * PI, -2.5 * PI, 1.5 * PI], None, 1).unwrap();
        assert_eq!(v.conclusion, Conclusion::YCatenoid);
        let cands = v.admissible_topologies.unwrap();
        assert_eq!(cands[0], vec![Topology::ANNULUS]);
        let v = classify_theta([-6.5 * PI, -2.2 * PI, 1.9 * PI], None, 1).unwrap();
        assert_eq!(v.conclusion, Conclusion::Undetermined);
    }

    #[test]
    fn rejects_impossible_theta() {
        assert!(classify_theta([-PI, -PI, 3.0 * PI], None, 1).is_err());
        let top = [Topology::ANNULUS; 3];
        assert!(classify_theta([-3.0 * PI, -3.0 * PI, PI], Some(top), 1).is_err());
        assert!(classify_theta(YC, None, 2).is_err());
    }
}
