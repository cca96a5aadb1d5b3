//! JSON mesh exchange documents.
//!
//! Floats are written in the shortest decimal form that parses back to the
//! same `f64`, so `write → read → write` reproduces the document byte for
//! byte. Lumped area weights are derived data and are recomputed on read.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{structure, Result};
use crate::geometry::{BoundaryLoop, FacePatch, JunctionCurve, LoopTag, Revolution, Topology, Vec3, YSurface};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshDocument {
    #[serde(default)]
    pub label: String,
    pub faces: Vec<FaceRecord>,
    #[serde(default)]
    pub junctions: Vec<JunctionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceRecord {
    pub nodes: Vec<[f64; 3]>,
    pub elements: Vec<[usize; 3]>,
    pub a_norm_sq: Vec<f64>,
    pub normal: Vec<[f64; 3]>,
    pub genus: u32,
    pub num_ends: u32,
    pub end_multiplicity_sum: u32,
    pub boundary_loops: Vec<BoundaryLoop>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_curvature: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub revolution: Option<Revolution>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JunctionRecord {
    pub samples: Vec<[f64; 3]>,
    pub curvature_vector: Vec<[f64; 3]>,
    /// `conormals[slot][sample]`.
    pub conormals: Vec<Vec<[f64; 3]>>,
    pub incident_faces: Vec<usize>,
    /// Junction loop of each incident face; inferred when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub face_loops: Option<Vec<usize>>,
    #[serde(default = "yes")]
    pub closed: bool,
}

fn yes() -> bool {
    true
}

fn arr(v: &Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

fn vec3(a: &[f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

impl MeshDocument {
    pub fn from_surface(surface: &YSurface) -> Self {
        Self {
            label: surface.label.clone(),
            faces: surface
                .faces
                .iter()
                .map(|f| FaceRecord {
                    nodes: f.nodes.iter().map(arr).collect(),
                    elements: f.elements.clone(),
                    a_norm_sq: f.a_norm_sq.clone(),
                    normal: f.normal.iter().map(arr).collect(),
                    genus: f.topology.genus,
                    num_ends: f.topology.num_ends,
                    end_multiplicity_sum: f.topology.end_multiplicity_sum,
                    boundary_loops: f.boundary_loops.clone(),
                    mean_curvature: f.mean_curvature.clone(),
                    revolution: f.revolution.clone(),
                })
                .collect(),
            junctions: surface
                .junctions
                .iter()
                .map(|j| JunctionRecord {
                    samples: j.samples.iter().map(arr).collect(),
                    curvature_vector: j.curvature_vector.iter().map(arr).collect(),
                    conormals: j.conormals.iter().map(|c| c.iter().map(arr).collect()).collect(),
                    incident_faces: j.incident_faces.clone(),
                    face_loops: Some(j.face_loops.clone()),
                    closed: j.closed,
                })
                .collect(),
        }
    }

    /// Rebuilds and validates the surface.
    pub fn into_surface(self) -> Result<YSurface> {
        let mut faces = Vec::with_capacity(self.faces.len());
        for (fi, r) in self.faces.into_iter().enumerate() {
            let topology = Topology { genus: r.genus, num_ends: r.num_ends, end_multiplicity_sum: r.end_multiplicity_sum };
            let mut face = FacePatch::new(
                r.nodes.iter().map(vec3).collect(),
                r.elements,
                r.normal.iter().map(vec3).collect(),
                r.a_norm_sq,
                topology,
                r.boundary_loops,
            )
            .map_err(|e| structure(format!("face {fi}: {e}")))?;
            if let Some(h) = r.mean_curvature {
                face = face.with_mean_curvature(h)?;
            }
            if let Some(rev) = r.revolution {
                face = face.with_revolution(rev);
            }
            faces.push(face);
        }
        let mut junctions = Vec::with_capacity(self.junctions.len());
        for (g, r) in self.junctions.into_iter().enumerate() {
            let face_loops = match r.face_loops {
                Some(l) => l,
                None => r
                    .incident_faces
                    .iter()
                    .map(|&f| {
                        let face = faces.get(f).ok_or_else(|| structure(format!("junction {g} references missing face {f}")))?;
                        let tagged: Vec<usize> = (0..face.boundary_loops.len())
                            .filter(|&l| face.boundary_loops[l].tag == LoopTag::Junction)
                            .collect();
                        match tagged.as_slice() {
                            [l] => Ok(*l),
                            _ => Err(structure(format!(
                                "junction {g}: face {f} has {} junction loops; give face_loops explicitly",
                                tagged.len()
                            ))),
                        }
                    })
                    .collect::<Result<Vec<_>>>()?,
            };
            junctions.push(JunctionCurve::new(
                r.samples.iter().map(vec3).collect(),
                r.curvature_vector.iter().map(vec3).collect(),
                r.incident_faces,
                face_loops,
                r.conormals.iter().map(|c| c.iter().map(vec3).collect()).collect(),
                r.closed,
            )?);
        }
        YSurface::new(self.label, faces, junctions)
    }
}

pub fn to_json(surface: &YSurface) -> Result<String> {
    let mut s = serde_json::to_string(&MeshDocument::from_surface(surface))?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<YSurface> {
    serde_json::from_str::<MeshDocument>(text)?.into_surface()
}

pub fn write_mesh(surface: &YSurface, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, to_json(surface)?)?;
    Ok(())
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<YSurface> {
    from_json(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_catenoid, make_flat_ycone, make_ycatenoid, Resolution};
    use crate::Error;

    #[test]
    fn round_trip_is_byte_identical() {
        for s in [
            make_ycatenoid(1.0, 2.0, Resolution::new(0.2)).unwrap(),
            make_flat_ycone(1.0, 2.0, Resolution::new(0.25)).unwrap(),
            make_catenoid(1.0, 1.0, Resolution::new(0.1)).unwrap(),
        ] {
            let a = to_json(&s).unwrap();
            let back = from_json(&a).unwrap();
            assert_eq!(back, s);
            assert_eq!(to_json(&back).unwrap(), a);
        }
    }

    #[test]
    fn face_loops_are_inferred() {
        let s = make_ycatenoid(1.0, 2.0, Resolution::new(0.2)).unwrap();
        let mut doc = MeshDocument::from_surface(&s);
        doc.junctions[0].face_loops = None;
        let text = serde_json::to_string(&doc).unwrap();
        assert!(!text.contains("face_loops"));
        assert_eq!(from_json(&text).unwrap(), s);
    }

    #[test]
    fn corrupted_normal_names_the_node() {
        let s = make_catenoid(1.0, 1.0, Resolution::new(0.1)).unwrap();
        let mut doc = MeshDocument::from_surface(&s);
        doc.faces[0].normal[17] = [2.0, 0.0, 0.0];
        match doc.into_surface() {
            Err(Error::Structure(msg)) => assert!(msg.contains("node 17"), "{msg}"),
            other => panic!("expected structural error, got {other:?}"),
        }
    }

    #[test]
    fn file_round_trip() {
        let s = make_flat_ycone(1.0, 1.0, Resolution::new(0.25)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        write_mesh(&s, &p).unwrap();
        assert_eq!(read_mesh(&p).unwrap(), s);
        assert!(matches!(from_json("{\"faces\": 3}"), Err(Error::Json(_))));
    }
}
