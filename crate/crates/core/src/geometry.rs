//! Barycentric coordinates on the realisation of a complex: evidence points
//! with weights over a carrier face, thresholded active sets, planar
//! embedding, and timestamped trajectories.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::simplicial::{Complex, Face, VertexId};

/// Absolute slack allowed when weights are required to sum to one.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("weight {weight} for {vertex} is negative")]
    NegativeWeight { vertex: VertexId, weight: f64 },
    #[error("weight {weight} for {vertex} exceeds one")]
    WeightAboveOne { vertex: VertexId, weight: f64 },
    #[error("no vertex carries positive weight")]
    EmptySupport,
    #[error("weights sum to {sum}, not one")]
    UnnormalisedWeights { sum: f64 },
    #[error("support {support} is not a face of the complex")]
    SupportNotFace { support: Face },
    #[error("rational weights sum to {numerator_sum}/{denominator}")]
    UnnormalisedRationals {
        numerator_sum: u64,
        denominator: u64,
    },
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("threshold {tau} is outside [0, 1)")]
    InvalidThreshold { tau: f64 },
    #[error("layout has no position for {vertex}")]
    MissingPosition { vertex: VertexId },
    #[error("tick {tick} does not increase over previous tick {previous}")]
    NonIncreasingTick { tick: u64, previous: u64 },
}

/// Convex combination of the vertices of one face. Only strictly positive
/// weights are stored; the carrier is their support, which construction
/// guarantees to be a face of the reference complex.
#[derive(Debug, Clone, PartialEq)]
pub struct BarycentricPoint {
    weights: BTreeMap<VertexId, f64>,
    carrier: Face,
}

impl BarycentricPoint {
    /// Validates range, normalisation (within [`WEIGHT_SUM_TOLERANCE`]), and
    /// that the support is a face of `complex`. Zero weights are dropped.
    pub fn new(weights: BTreeMap<VertexId, f64>, complex: &Complex) -> Result<Self, GeometryError> {
        let mut sum = 0.0;
        let mut support = BTreeMap::new();
        for (vertex, weight) in weights {
            if weight < 0.0 {
                return Err(GeometryError::NegativeWeight { vertex, weight });
            }
            if weight > 1.0 + WEIGHT_SUM_TOLERANCE {
                return Err(GeometryError::WeightAboveOne { vertex, weight });
            }
            sum += weight;
            if weight > 0.0 {
                support.insert(vertex, weight);
            }
        }
        if support.is_empty() {
            return Err(GeometryError::EmptySupport);
        }
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(GeometryError::UnnormalisedWeights { sum });
        }
        let carrier = Face::new(support.keys().cloned()).expect("support checked non-empty");
        if !complex.contains(&carrier) {
            return Err(GeometryError::SupportNotFace { support: carrier });
        }
        Ok(BarycentricPoint {
            weights: support,
            carrier,
        })
    }

    /// Exact construction from numerators over a common denominator; the
    /// numerators must sum to exactly the denominator.
    pub fn from_rationals(
        numerators: &[(VertexId, u64)],
        denominator: u64,
        complex: &Complex,
    ) -> Result<Self, GeometryError> {
        if denominator == 0 {
            return Err(GeometryError::ZeroDenominator);
        }
        let total: u64 = numerators.iter().map(|(_, n)| n).sum();
        if total != denominator {
            return Err(GeometryError::UnnormalisedRationals {
                numerator_sum: total,
                denominator,
            });
        }
        let weights = numerators
            .iter()
            .map(|(v, n)| (v.clone(), *n as f64 / denominator as f64))
            .collect();
        BarycentricPoint::new(weights, complex)
    }

    /// The point sitting exactly on one vertex.
    pub fn vertex(v: VertexId, complex: &Complex) -> Result<Self, GeometryError> {
        BarycentricPoint::new(BTreeMap::from([(v, 1.0)]), complex)
    }

    pub fn weight(&self, v: &VertexId) -> f64 {
        self.weights.get(v).copied().unwrap_or(0.0)
    }

    /// Positive weights only, keyed by vertex.
    pub fn weights(&self) -> &BTreeMap<VertexId, f64> {
        &self.weights
    }

    pub fn carrier(&self) -> &Face {
        &self.carrier
    }

    /// Vertices whose weight strictly exceeds `tau`; `None` when no weight
    /// clears the threshold. At `tau = 0` this is exactly the carrier.
    pub fn active_set(&self, tau: f64) -> Result<Option<Face>, GeometryError> {
        if !(0.0..1.0).contains(&tau) {
            return Err(GeometryError::InvalidThreshold { tau });
        }
        let active: Vec<VertexId> = self
            .weights
            .iter()
            .filter(|(_, w)| **w > tau)
            .map(|(v, _)| v.clone())
            .collect();
        if active.is_empty() {
            Ok(None)
        } else {
            Ok(Some(Face::new(active).expect("non-empty by construction")))
        }
    }

    /// Total weight on carrier vertices outside the retained set: zero
    /// exactly when the carrier is retained entirely, one when nothing is.
    pub fn mass_outside<'a>(&self, retained: impl IntoIterator<Item = &'a VertexId>) -> f64 {
        let kept: std::collections::BTreeSet<&VertexId> = retained.into_iter().collect();
        self.weights
            .iter()
            .filter(|(v, _)| !kept.contains(v))
            .map(|(_, w)| *w)
            .sum()
    }

    /// Weighted average of the carrier's layout positions.
    pub fn embed(&self, layout: &Layout) -> Result<(f64, f64), GeometryError> {
        let mut x = 0.0;
        let mut y = 0.0;
        for (vertex, weight) in &self.weights {
            let (px, py) =
                layout
                    .position(vertex)
                    .ok_or_else(|| GeometryError::MissingPosition {
                        vertex: vertex.clone(),
                    })?;
            x += weight * px;
            y += weight * py;
        }
        Ok((x, y))
    }
}

/// Set intersection of two faces; `None` when they are disjoint. On
/// realisations this matches the geometry: the realised intersection of two
/// faces is the realisation of their common face.
pub fn face_intersection(x: &Face, z: &Face) -> Option<Face> {
    x.intersection(z)
}

/// Planar positions for vertices, used for rendering trajectories.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Layout {
    positions: BTreeMap<VertexId, (f64, f64)>,
}

impl Layout {
    pub fn new(positions: BTreeMap<VertexId, (f64, f64)>) -> Self {
        Layout { positions }
    }

    pub fn insert(&mut self, vertex: VertexId, position: (f64, f64)) {
        self.positions.insert(vertex, position);
    }

    pub fn position(&self, vertex: &VertexId) -> Option<(f64, f64)> {
        self.positions.get(vertex).copied()
    }

    pub fn positions(&self) -> impl Iterator<Item = (&VertexId, (f64, f64))> {
        self.positions.iter().map(|(v, p)| (v, *p))
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Vertices of the complex that have no position yet.
    pub fn missing_for(&self, complex: &Complex) -> Vec<VertexId> {
        complex
            .vertices()
            .filter(|v| !self.positions.contains_key(*v))
            .cloned()
            .collect()
    }
}

/// Sequence of evidence points indexed by strictly increasing ticks.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    samples: Vec<(u64, BarycentricPoint)>,
}

impl Trajectory {
    pub fn new() -> Self {
        Trajectory::default()
    }

    pub fn push(&mut self, tick: u64, point: BarycentricPoint) -> Result<(), GeometryError> {
        if let Some((previous, _)) = self.samples.last() {
            if tick <= *previous {
                return Err(GeometryError::NonIncreasingTick {
                    tick,
                    previous: *previous,
                });
            }
        }
        self.samples.push((tick, point));
        Ok(())
    }

    pub fn samples(&self) -> &[(u64, BarycentricPoint)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(label: &str) -> VertexId {
        VertexId::new(label).unwrap()
    }

    fn face(labels: &[&str]) -> Face {
        Face::from_labels(labels.iter().copied()).unwrap()
    }

    fn triangle() -> Complex {
        Complex::from_maximal_faces([face(&["alpha", "beta", "gamma"])])
    }

    fn point(complex: &Complex, weights: &[(&str, f64)]) -> BarycentricPoint {
        BarycentricPoint::new(weights.iter().map(|(l, w)| (v(l), *w)).collect(), complex).unwrap()
    }

    #[test]
    fn construction_validates_weights() {
        let c = triangle();
        let p = point(&c, &[("alpha", 0.5), ("beta", 0.5), ("gamma", 0.0)]);
        assert_eq!(p.carrier(), &face(&["alpha", "beta"]));
        assert_eq!(p.weight(&v("gamma")), 0.0);
        assert_eq!(p.weight(&v("alpha")), 0.5);

        let bad_sum = BarycentricPoint::new([(v("alpha"), 0.5), (v("beta"), 0.4)].into(), &c);
        assert!(matches!(
            bad_sum,
            Err(GeometryError::UnnormalisedWeights { .. })
        ));

        let negative = BarycentricPoint::new([(v("alpha"), -0.1), (v("beta"), 1.1)].into(), &c);
        assert!(matches!(
            negative,
            Err(GeometryError::NegativeWeight { .. })
        ));

        let empty = BarycentricPoint::new(BTreeMap::new(), &c);
        assert!(matches!(empty, Err(GeometryError::EmptySupport)));

        let off_complex = BarycentricPoint::new([(v("alpha"), 0.5), (v("delta"), 0.5)].into(), &c);
        match off_complex {
            Err(GeometryError::SupportNotFace { support }) => {
                assert_eq!(support, face(&["alpha", "delta"]));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn support_must_be_a_face_even_when_vertices_exist() {
        // two disjoint edges: both endpoints exist but the diagonal is no face
        let c = Complex::from_maximal_faces([face(&["a", "b"]), face(&["c", "d"])]);
        let diagonal = BarycentricPoint::new([(v("a"), 0.5), (v("c"), 0.5)].into(), &c);
        assert!(matches!(
            diagonal,
            Err(GeometryError::SupportNotFace { .. })
        ));
    }

    #[test]
    fn rational_construction_is_exact() {
        let c = triangle();
        let p =
            BarycentricPoint::from_rationals(&[(v("alpha"), 1), (v("beta"), 3)], 4, &c).unwrap();
        assert_eq!(p.weight(&v("alpha")), 0.25);
        assert_eq!(p.weight(&v("beta")), 0.75);

        assert!(matches!(
            BarycentricPoint::from_rationals(&[(v("alpha"), 1)], 0, &c),
            Err(GeometryError::ZeroDenominator)
        ));
        assert!(matches!(
            BarycentricPoint::from_rationals(&[(v("alpha"), 3)], 4, &c),
            Err(GeometryError::UnnormalisedRationals { .. })
        ));
    }

    #[test]
    fn active_set_thresholds_weights() {
        let c = triangle();
        let even = point(&c, &[("alpha", 0.5), ("beta", 0.5)]);
        assert_eq!(
            even.active_set(0.3).unwrap(),
            Some(face(&["alpha", "beta"]))
        );

        let skewed = point(&c, &[("alpha", 0.9), ("beta", 0.1)]);
        assert_eq!(skewed.active_set(0.3).unwrap(), Some(face(&["alpha"])));

        // at zero the active set is the whole carrier
        assert_eq!(
            skewed.active_set(0.0).unwrap(),
            Some(face(&["alpha", "beta"]))
        );

        // a flat point can clear no threshold at all
        let flat = point(&c, &[("alpha", 0.34), ("beta", 0.33), ("gamma", 0.33)]);
        assert_eq!(flat.active_set(0.5).unwrap(), None);

        assert!(matches!(
            even.active_set(1.0),
            Err(GeometryError::InvalidThreshold { .. })
        ));
        assert!(matches!(
            even.active_set(-0.1),
            Err(GeometryError::InvalidThreshold { .. })
        ));
    }

    #[test]
    fn active_set_shrinks_as_tau_grows() {
        let c = triangle();
        let p = point(&c, &[("alpha", 0.6), ("beta", 0.3), ("gamma", 0.1)]);
        let taus = [0.0, 0.05, 0.15, 0.25, 0.5, 0.9];
        for pair in taus.windows(2) {
            let lo = p.active_set(pair[0]).unwrap();
            let hi = p.active_set(pair[1]).unwrap();
            match (lo, hi) {
                (_, None) => {}
                (Some(lo), Some(hi)) => assert!(hi.is_subset_of(&lo)),
                (None, Some(_)) => panic!("active set grew with tau"),
            }
        }
    }

    #[test]
    fn mass_outside_counts_unretained_weight() {
        let c = triangle();
        let on_alpha = point(&c, &[("alpha", 1.0)]);
        let beta = face(&["beta"]);
        assert_eq!(on_alpha.mass_outside(beta.vertices()), 1.0);
        assert_eq!(on_alpha.mass_outside(face(&["alpha"]).vertices()), 0.0);

        let split = point(&c, &[("alpha", 0.5), ("beta", 0.5)]);
        assert_eq!(split.mass_outside(face(&["alpha"]).vertices()), 0.5);
        // zero exactly when the carrier is retained, however the sum rounds
        assert_eq!(split.mass_outside(face(&["alpha", "beta"]).vertices()), 0.0);
        assert_eq!(split.mass_outside([]), 1.0);
    }

    #[test]
    fn embedding_averages_positions() {
        let c = triangle();
        let layout = Layout::new(
            [
                (v("alpha"), (0.0, 0.0)),
                (v("beta"), (4.0, 0.0)),
                (v("gamma"), (0.0, 4.0)),
            ]
            .into(),
        );
        let p = point(&c, &[("alpha", 0.25), ("beta", 0.25), ("gamma", 0.5)]);
        assert_eq!(p.embed(&layout).unwrap(), (1.0, 2.0));

        let corner = point(&c, &[("beta", 1.0)]);
        assert_eq!(corner.embed(&layout).unwrap(), (4.0, 0.0));

        let sparse = Layout::new([(v("alpha"), (0.0, 0.0))].into());
        assert!(matches!(
            p.embed(&sparse),
            Err(GeometryError::MissingPosition { .. })
        ));
        assert_eq!(sparse.missing_for(&c), vec![v("beta"), v("gamma")]);
    }

    #[test]
    fn face_intersection_is_set_intersection() {
        let abc = face(&["alpha", "beta", "gamma"]);
        let cd = face(&["gamma", "delta"]);
        assert_eq!(face_intersection(&abc, &cd), Some(face(&["gamma"])));
        assert_eq!(face_intersection(&abc, &abc), Some(abc.clone()));
        assert_eq!(
            face_intersection(&face(&["alpha"]), &face(&["delta"])),
            None
        );
    }

    #[test]
    fn trajectory_ticks_must_increase() {
        let c = triangle();
        let p = point(&c, &[("alpha", 1.0)]);
        let mut t = Trajectory::new();
        t.push(0, p.clone()).unwrap();
        t.push(2, p.clone()).unwrap();
        assert_eq!(t.len(), 2);
        assert!(matches!(
            t.push(2, p.clone()),
            Err(GeometryError::NonIncreasingTick { .. })
        ));
        assert!(matches!(
            t.push(1, p),
            Err(GeometryError::NonIncreasingTick { .. })
        ));
    }
}
