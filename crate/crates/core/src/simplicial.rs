//! Abstract simplicial complexes over labelled vertices: faces and their
//! downward closure, covers of a sample space and their nerves, simplicial
//! maps, cover refinements, and face graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// Identifier for a single sample of the covered space.
pub type SampleId = String;

/// Characters that would break the canonical `{a,b}` face syntax.
const RESERVED_LABEL_CHARS: &[char] = &['{', '}', ','];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplicialError {
    #[error("vertex label is empty")]
    EmptyLabel,
    #[error("vertex label {0:?} contains whitespace or one of '{{' '}}' ','")]
    MalformedLabel(String),
    #[error("face has no vertices")]
    EmptyFace,
    #[error("face entry {index}: {source}")]
    BadFaceEntry {
        index: usize,
        source: Box<SimplicialError>,
    },
    #[error("cover set {label} references sample {sample:?} outside the sample universe")]
    UnknownSample { label: VertexId, sample: SampleId },
    #[error("sample {sample:?} is not covered by any set")]
    UncoveredSample { sample: SampleId },
    #[error("covers range over different sample universes")]
    UniverseMismatch,
    #[error("vertex map does not assign {vertex}")]
    UnmappedVertex { vertex: VertexId },
    #[error("vertex map sends {vertex} to {target}, which labels no cover set")]
    UnknownMapTarget { vertex: VertexId, target: VertexId },
}

/// Symbolic vertex label. Labels are non-empty and contain no whitespace,
/// braces, or commas, so every face has an unambiguous `{a,b}` rendering.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(String);

impl VertexId {
    pub fn new(label: impl Into<String>) -> Result<Self, SimplicialError> {
        let label = label.into();
        if label.is_empty() {
            return Err(SimplicialError::EmptyLabel);
        }
        if label
            .chars()
            .any(|c| c.is_whitespace() || c.is_control() || RESERVED_LABEL_CHARS.contains(&c))
        {
            return Err(SimplicialError::MalformedLabel(label));
        }
        Ok(VertexId(label))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Non-empty set of vertices, kept sorted by label. Two faces with the same
/// vertices compare equal regardless of construction order, and `Ord` gives
/// the canonical lexicographic ordering used everywhere faces are listed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Face(BTreeSet<VertexId>);

impl Face {
    pub fn new(vertices: impl IntoIterator<Item = VertexId>) -> Result<Self, SimplicialError> {
        let set: BTreeSet<VertexId> = vertices.into_iter().collect();
        if set.is_empty() {
            return Err(SimplicialError::EmptyFace);
        }
        Ok(Face(set))
    }

    pub fn from_labels<'a>(
        labels: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self, SimplicialError> {
        let vertices = labels
            .into_iter()
            .map(VertexId::new)
            .collect::<Result<Vec<_>, _>>()?;
        Face::new(vertices)
    }

    pub fn vertex(v: VertexId) -> Self {
        Face(BTreeSet::from([v]))
    }

    /// Number of vertices minus one.
    pub fn dimension(&self) -> usize {
        self.0.len() - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.0.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.0.iter()
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.0.contains(v)
    }

    pub fn is_subset_of(&self, other: &Face) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Set intersection; `None` when the faces share no vertex.
    pub fn intersection(&self, other: &Face) -> Option<Face> {
        let common: BTreeSet<VertexId> = self.0.intersection(&other.0).cloned().collect();
        if common.is_empty() {
            None
        } else {
            Some(Face(common))
        }
    }

    pub fn union(&self, other: &Face) -> Face {
        Face(self.0.union(&other.0).cloned().collect())
    }

    /// The face with `v` removed; `None` when that would leave it empty.
    pub fn without(&self, v: &VertexId) -> Option<Face> {
        if !self.0.contains(v) {
            return Some(self.clone());
        }
        let mut set = self.0.clone();
        set.remove(v);
        if set.is_empty() {
            None
        } else {
            Some(Face(set))
        }
    }

    pub fn with(&self, v: VertexId) -> Face {
        let mut set = self.0.clone();
        set.insert(v);
        Face(set)
    }

    /// Every non-empty subset of the vertices, the face itself included.
    /// An n-face yields 2^(n+1) - 1 subfaces.
    pub fn subfaces(&self) -> Vec<Face> {
        let verts: Vec<&VertexId> = self.0.iter().collect();
        assert!(verts.len() < 64, "face too large to enumerate subfaces");
        let full = 1u64 << verts.len();
        let mut out = Vec::with_capacity(full as usize - 1);
        for mask in 1..full {
            let set: BTreeSet<VertexId> = verts
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, v)| (*v).clone())
                .collect();
            out.push(Face(set));
        }
        out
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// Finite abstract simplicial complex with every face stored explicitly.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Complex {
    faces: BTreeSet<Face>,
}

impl Complex {
    pub fn empty() -> Self {
        Complex::default()
    }

    /// Downward closure of the given faces: every non-empty subset of every
    /// input face becomes a face of the complex.
    pub fn from_maximal_faces(faces: impl IntoIterator<Item = Face>) -> Self {
        let mut all = BTreeSet::new();
        for face in faces {
            for sub in face.subfaces() {
                all.insert(sub);
            }
        }
        Complex { faces: all }
    }

    /// Takes the face list verbatim, with no closure applied. Pair with
    /// [`Complex::is_valid`] when the list comes from outside.
    pub fn from_explicit_faces(faces: impl IntoIterator<Item = Face>) -> Self {
        Complex {
            faces: faces.into_iter().collect(),
        }
    }

    /// Builds the closure of label-set entries, reporting the offending entry
    /// index on malformed input.
    pub fn from_label_sets<S: AsRef<str>>(sets: &[Vec<S>]) -> Result<Self, SimplicialError> {
        let mut faces = Vec::with_capacity(sets.len());
        for (index, entry) in sets.iter().enumerate() {
            let face = Face::from_labels(entry.iter().map(|s| s.as_ref())).map_err(|source| {
                SimplicialError::BadFaceEntry {
                    index,
                    source: Box::new(source),
                }
            })?;
            faces.push(face);
        }
        Ok(Complex::from_maximal_faces(faces))
    }

    pub fn faces(&self) -> impl Iterator<Item = &Face> {
        self.faces.iter()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn contains(&self, face: &Face) -> bool {
        self.faces.contains(face)
    }

    pub fn vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.faces
            .iter()
            .filter(|f| f.vertex_count() == 1)
            .flat_map(|f| f.vertices())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices().count()
    }

    /// Checks downward closure. Verifying one dimension down suffices: if
    /// every facet of every face is present, induction closes the rest.
    pub fn is_valid(&self) -> bool {
        self.faces.iter().all(|face| {
            face.vertex_count() == 1
                || face.vertices().all(|v| match face.without(v) {
                    Some(facet) => self.faces.contains(&facet),
                    None => true,
                })
        })
    }

    /// Face counts by dimension; entry d counts the d-faces. Empty complex
    /// yields an empty census.
    pub fn census(&self) -> Vec<usize> {
        let mut counts = Vec::new();
        for face in &self.faces {
            let d = face.dimension();
            if counts.len() <= d {
                counts.resize(d + 1, 0);
            }
            counts[d] += 1;
        }
        counts
    }

    pub fn dimension(&self) -> Option<usize> {
        self.faces.iter().map(Face::dimension).max()
    }

    /// Faces not properly contained in any other face, in canonical order.
    pub fn maximal_faces(&self) -> Vec<Face> {
        self.faces
            .iter()
            .filter(|f| !self.faces.iter().any(|g| g != *f && f.is_subset_of(g)))
            .cloned()
            .collect()
    }
}

/// Cover of a finite sample universe by labelled sets. Invariant: every set
/// draws from the universe and the union of all sets equals it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    universe: BTreeSet<SampleId>,
    sets: BTreeMap<VertexId, BTreeSet<SampleId>>,
}

impl Cover {
    pub fn new(
        sets: BTreeMap<VertexId, BTreeSet<SampleId>>,
        universe: BTreeSet<SampleId>,
    ) -> Result<Self, SimplicialError> {
        for (label, set) in &sets {
            if let Some(sample) = set.iter().find(|s| !universe.contains(*s)) {
                return Err(SimplicialError::UnknownSample {
                    label: label.clone(),
                    sample: sample.clone(),
                });
            }
        }
        let covered: BTreeSet<&SampleId> = sets.values().flatten().collect();
        if let Some(sample) = universe.iter().find(|s| !covered.contains(s)) {
            return Err(SimplicialError::UncoveredSample {
                sample: sample.clone(),
            });
        }
        Ok(Cover { universe, sets })
    }

    /// Cover whose universe is exactly the union of the given sets.
    pub fn spanning(sets: BTreeMap<VertexId, BTreeSet<SampleId>>) -> Self {
        let universe = sets.values().flatten().cloned().collect();
        Cover { universe, sets }
    }

    pub fn labels(&self) -> impl Iterator<Item = &VertexId> {
        self.sets.keys()
    }

    pub fn set(&self, label: &VertexId) -> Option<&BTreeSet<SampleId>> {
        self.sets.get(label)
    }

    pub fn universe(&self) -> &BTreeSet<SampleId> {
        &self.universe
    }

    pub fn contains(&self, label: &VertexId, sample: &SampleId) -> bool {
        self.sets.get(label).is_some_and(|set| set.contains(sample))
    }
}

/// Nerve of a cover: the labels of any family of sets with a common sample
/// form a face. Implemented by closing over each sample's label set, which
/// is exactly the maximal face that sample witnesses.
pub fn nerve(cover: &Cover) -> Complex {
    let mut witnessed: BTreeSet<Face> = BTreeSet::new();
    for sample in cover.universe() {
        let labels: BTreeSet<VertexId> = cover
            .labels()
            .filter(|l| cover.contains(l, sample))
            .cloned()
            .collect();
        if !labels.is_empty() {
            witnessed.insert(Face(labels));
        }
    }
    Complex::from_maximal_faces(witnessed)
}

/// Vertex map between two complexes. Validation asks whether every source
/// face lands on a target face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialMap {
    source: Complex,
    target: Complex,
    vertex_map: BTreeMap<VertexId, VertexId>,
}

impl SimplicialMap {
    pub fn new(source: Complex, target: Complex, vertex_map: BTreeMap<VertexId, VertexId>) -> Self {
        SimplicialMap {
            source,
            target,
            vertex_map,
        }
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    pub fn image_of(&self, face: &Face) -> Result<Face, SimplicialError> {
        let mut image = BTreeSet::new();
        for v in face.vertices() {
            let w = self
                .vertex_map
                .get(v)
                .ok_or_else(|| SimplicialError::UnmappedVertex { vertex: v.clone() })?;
            image.insert(w.clone());
        }
        Ok(Face(image))
    }

    /// `Ok(true)` iff the image of every source face is a target face.
    /// A map that leaves some source vertex unassigned is rejected outright.
    pub fn validate(&self) -> Result<bool, SimplicialError> {
        for v in self.source.vertices() {
            if !self.vertex_map.contains_key(v) {
                return Err(SimplicialError::UnmappedVertex { vertex: v.clone() });
            }
        }
        for face in self.source.faces() {
            if !self.target.contains(&self.image_of(face)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `Ok(true)` iff every fine set sits inside the coarse set its label maps
/// to. Both covers must range over the same universe, and the map must
/// assign every fine label to a coarse one.
pub fn check_refinement(
    fine: &Cover,
    coarse: &Cover,
    map: &BTreeMap<VertexId, VertexId>,
) -> Result<bool, SimplicialError> {
    if fine.universe() != coarse.universe() {
        return Err(SimplicialError::UniverseMismatch);
    }
    for (label, set) in fine.labels().map(|l| (l, fine.set(l).unwrap())) {
        let target = map
            .get(label)
            .ok_or_else(|| SimplicialError::UnmappedVertex {
                vertex: label.clone(),
            })?;
        let coarse_set = coarse
            .set(target)
            .ok_or_else(|| SimplicialError::UnknownMapTarget {
                vertex: label.clone(),
                target: target.clone(),
            })?;
        if !set.is_subset(coarse_set) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The simplicial map the label map induces between the two nerves.
pub fn nerve_map(
    fine: &Cover,
    coarse: &Cover,
    map: &BTreeMap<VertexId, VertexId>,
) -> Result<SimplicialMap, SimplicialError> {
    for label in fine.labels() {
        if !map.contains_key(label) {
            return Err(SimplicialError::UnmappedVertex {
                vertex: label.clone(),
            });
        }
    }
    Ok(SimplicialMap::new(nerve(fine), nerve(coarse), map.clone()))
}

/// Which containments become edges of a face graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphRelation {
    /// Covering pairs only: faces one dimension apart.
    Hasse,
    /// Every proper containment.
    All,
}

/// Containment graph over the faces of a complex. Nodes are ordered by
/// dimension, then lexicographically; edges point from the smaller face to
/// the larger and are listed in node order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceGraph {
    nodes: Vec<Face>,
    edges: Vec<(usize, usize)>,
}

impl FaceGraph {
    pub fn nodes(&self) -> &[Face] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }
}

pub fn to_graph(complex: &Complex, relation: GraphRelation) -> FaceGraph {
    let mut nodes: Vec<Face> = complex.faces().cloned().collect();
    nodes.sort_by_key(|f| (f.dimension(), f.clone()));
    let mut edges = Vec::new();
    for (i, small) in nodes.iter().enumerate() {
        for (j, large) in nodes.iter().enumerate().skip(i + 1) {
            if !small.is_subset_of(large) || small == large {
                continue;
            }
            let adjacent = large.vertex_count() == small.vertex_count() + 1;
            if matches!(relation, GraphRelation::All) || adjacent {
                edges.push((i, j));
            }
        }
    }
    FaceGraph { nodes, edges }
}
