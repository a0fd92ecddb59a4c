//! Generalised belief functions over a finite frame, mass assignments, and
//! partitions of unity that turn pointwise evidence into barycentric
//! coordinates on a nerve.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::geometry::{BarycentricPoint, GeometryError};
use crate::simplicial::{Complex, Cover, SampleId, VertexId};

/// Exhaustive validation visits all subset pairs, so frames are capped.
pub const FRAME_LIMIT: usize = 12;

/// Slack for the superadditivity and normalisation comparisons; belief
/// values assembled from sums of doubles may miss exactness by rounding.
pub const BELIEF_TOLERANCE: f64 = 1e-9;

/// Slack for a partition's pointwise sum-to-one requirement.
pub const PARTITION_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeliefError {
    #[error("frame has no outcomes")]
    EmptyFrame,
    #[error("frame has {size} outcomes, above the supported {FRAME_LIMIT}")]
    FrameTooLarge { size: usize },
    #[error("label {label:?} is not in the frame")]
    UnknownLabel { label: String },
    #[error("no value given for subset {{{subset}}}")]
    MissingSubset { subset: String },
    #[error("value {value} for subset {{{subset}}} is outside [0, 1]")]
    ValueOutOfRange { subset: String, value: f64 },
    #[error("mass {mass} for focal set {{{subset}}} is negative")]
    NegativeMass { subset: String, mass: f64 },
    #[error("the empty set cannot be a focal set")]
    EmptyFocalSet,
    #[error("masses total {total}, above one")]
    TotalMassAboveOne { total: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PartitionEvalError {
    #[error("component for {label} returned {value}, outside [0, 1]")]
    ComponentOutOfRange { label: VertexId, value: f64 },
    #[error("component for {label} is {value} at a state outside its set")]
    SupportCondition { label: VertexId, value: f64 },
    #[error("components sum to {sum}, not one")]
    SumOutOfTolerance { sum: f64 },
    #[error(transparent)]
    Point(#[from] GeometryError),
}

fn subset_to_string(labels: &[String], mask: u32) -> String {
    let mut parts = Vec::new();
    for (i, label) in labels.iter().enumerate() {
        if mask & (1 << i) != 0 {
            parts.push(label.as_str());
        }
    }
    parts.join(",")
}

/// Shared frame handling: sorted labels plus subset-to-bitmask conversion.
fn frame_vec(frame: impl IntoIterator<Item = String>) -> Result<Vec<String>, BeliefError> {
    let set: BTreeSet<String> = frame.into_iter().collect();
    if set.is_empty() {
        return Err(BeliefError::EmptyFrame);
    }
    if set.len() > FRAME_LIMIT {
        return Err(BeliefError::FrameTooLarge { size: set.len() });
    }
    Ok(set.into_iter().collect())
}

fn mask_of(labels: &[String], subset: &BTreeSet<String>) -> Result<u32, BeliefError> {
    let mut mask = 0u32;
    for label in subset {
        let index = labels
            .binary_search(label)
            .map_err(|_| BeliefError::UnknownLabel {
                label: label.clone(),
            })?;
        mask |= 1 << index;
    }
    Ok(mask)
}

/// One violated superadditivity instance: the union/intersection total for
/// this pair falls short of the pair's own total by `deficit`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperadditivityViolation {
    pub left: BTreeSet<String>,
    pub right: BTreeSet<String>,
    pub deficit: f64,
}

/// Outcome of validating a belief function. Reported violations are capped;
/// `violation_count` always carries the full number.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefValidation {
    pub empty_set_value: f64,
    pub violations: Vec<SuperadditivityViolation>,
    pub violation_count: usize,
}

impl BeliefValidation {
    const MAX_REPORTED: usize = 64;

    pub fn is_valid(&self) -> bool {
        self.empty_set_value == 0.0 && self.violation_count == 0
    }
}

/// Set function on all subsets of a finite frame, a candidate belief
/// function. Values are stored densely, indexed by subset bitmask over the
/// sorted frame.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefFunction {
    labels: Vec<String>,
    values: Vec<f64>,
}

impl BeliefFunction {
    /// Requires a value in [0, 1] for every subset of the frame, the empty
    /// set included.
    pub fn new(
        frame: impl IntoIterator<Item = String>,
        values: &BTreeMap<BTreeSet<String>, f64>,
    ) -> Result<Self, BeliefError> {
        let labels = frame_vec(frame)?;
        let size = 1usize << labels.len();
        let mut dense = vec![f64::NAN; size];
        for (subset, value) in values {
            let mask = mask_of(&labels, subset)?;
            if !(0.0..=1.0).contains(value) {
                return Err(BeliefError::ValueOutOfRange {
                    subset: subset_to_string(&labels, mask),
                    value: *value,
                });
            }
            dense[mask as usize] = *value;
        }
        if let Some(mask) = dense.iter().position(|v| v.is_nan()) {
            return Err(BeliefError::MissingSubset {
                subset: subset_to_string(&labels, mask as u32),
            });
        }
        Ok(BeliefFunction {
            labels,
            values: dense,
        })
    }

    pub fn frame(&self) -> &[String] {
        &self.labels
    }

    pub fn value(&self, subset: &BTreeSet<String>) -> Result<f64, BeliefError> {
        let mask = mask_of(&self.labels, subset)?;
        Ok(self.values[mask as usize])
    }

    fn subset_of_mask(&self, mask: u32) -> BTreeSet<String> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, l)| l.clone())
            .collect()
    }

    /// Checks the two axioms: nothing assigned to the empty set, and for
    /// every pair of subsets the union/intersection total dominates the
    /// pairwise total (within [`BELIEF_TOLERANCE`]).
    pub fn validate(&self) -> BeliefValidation {
        let size = self.values.len() as u32;
        let mut violations = Vec::new();
        let mut violation_count = 0;
        for y in 0..size {
            for z in y..size {
                let lhs = self.values[(y | z) as usize] + self.values[(y & z) as usize];
                let rhs = self.values[y as usize] + self.values[z as usize];
                if lhs + BELIEF_TOLERANCE < rhs {
                    violation_count += 1;
                    if violations.len() < BeliefValidation::MAX_REPORTED {
                        violations.push(SuperadditivityViolation {
                            left: self.subset_of_mask(y),
                            right: self.subset_of_mask(z),
                            deficit: rhs - lhs,
                        });
                    }
                }
            }
        }
        BeliefValidation {
            empty_set_value: self.values[0],
            violations,
            violation_count,
        }
    }

    /// Whether the whole frame carries belief one. Belief functions here
    /// are not required to be normalised; this only reports it.
    pub fn is_normalised(&self) -> bool {
        (self.values[self.values.len() - 1] - 1.0).abs() <= BELIEF_TOLERANCE
    }
}

/// Non-negative mass on non-empty focal sets, totalling at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction {
    labels: Vec<String>,
    masses: Vec<f64>,
}

impl MassFunction {
    pub fn new(
        frame: impl IntoIterator<Item = String>,
        masses: &BTreeMap<BTreeSet<String>, f64>,
    ) -> Result<Self, BeliefError> {
        let labels = frame_vec(frame)?;
        let mut dense = vec![0.0; 1usize << labels.len()];
        let mut total = 0.0;
        for (subset, mass) in masses {
            let mask = mask_of(&labels, subset)?;
            if mask == 0 {
                return Err(BeliefError::EmptyFocalSet);
            }
            if *mass < 0.0 {
                return Err(BeliefError::NegativeMass {
                    subset: subset_to_string(&labels, mask),
                    mass: *mass,
                });
            }
            dense[mask as usize] += mass;
            total += mass;
        }
        if total > 1.0 + BELIEF_TOLERANCE {
            return Err(BeliefError::TotalMassAboveOne { total });
        }
        Ok(MassFunction {
            labels,
            masses: dense,
        })
    }

    pub fn frame(&self) -> &[String] {
        &self.labels
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// The induced belief function: each subset accumulates the mass of all
    /// its non-empty subsets (a zeta transform over the subset lattice).
    pub fn to_belief(&self) -> BeliefFunction {
        let n = self.labels.len();
        let mut values = self.masses.clone();
        for bit in 0..n {
            for mask in 0..values.len() {
                if mask & (1 << bit) != 0 {
                    values[mask] += values[mask ^ (1 << bit)];
                }
            }
        }
        values[0] = 0.0;
        BeliefFunction {
            labels: self.labels.clone(),
            values,
        }
    }
}

/// Pointwise report from validating a partition of unity over a sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionReport {
    pub checked: usize,
    pub violations: Vec<(usize, PartitionEvalError)>,
}

impl PartitionReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub type Component<S> = Box<dyn Fn(&S) -> f64 + Send + Sync>;
pub type Membership<S> = Box<dyn Fn(&VertexId, &S) -> bool + Send + Sync>;

/// Family of component functions, one per cover label, that must vanish
/// outside their set and sum to one everywhere. Evaluating at a state gives
/// barycentric coordinates whose carrier is a face of the cover's nerve.
pub struct PartitionOfUnity<S> {
    labels: Vec<VertexId>,
    membership: Membership<S>,
    components: BTreeMap<VertexId, Component<S>>,
}

impl<S> PartitionOfUnity<S> {
    pub fn new(components: BTreeMap<VertexId, Component<S>>, membership: Membership<S>) -> Self {
        let labels = components.keys().cloned().collect();
        PartitionOfUnity {
            labels,
            membership,
            components,
        }
    }

    pub fn labels(&self) -> &[VertexId] {
        &self.labels
    }

    /// Raw component values at `s` with the partition conditions enforced:
    /// range, support, and sum.
    fn evaluate_raw(&self, state: &S) -> Result<Vec<(VertexId, f64)>, PartitionEvalError> {
        let mut values = Vec::with_capacity(self.labels.len());
        let mut sum = 0.0;
        for (label, component) in &self.components {
            let value = component(state);
            if !(0.0..=1.0).contains(&value) {
                return Err(PartitionEvalError::ComponentOutOfRange {
                    label: label.clone(),
                    value,
                });
            }
            if value != 0.0 && !(self.membership)(label, state) {
                return Err(PartitionEvalError::SupportCondition {
                    label: label.clone(),
                    value,
                });
            }
            sum += value;
            values.push((label.clone(), value));
        }
        if (sum - 1.0).abs() > PARTITION_SUM_TOLERANCE {
            return Err(PartitionEvalError::SumOutOfTolerance { sum });
        }
        Ok(values)
    }

    /// Checks the partition conditions at every sample; violations are
    /// reported per sample index.
    pub fn validate(&self, samples: &[S]) -> PartitionReport {
        let mut violations = Vec::new();
        for (index, state) in samples.iter().enumerate() {
            if let Err(err) = self.evaluate_raw(state) {
                violations.push((index, err));
            }
        }
        PartitionReport {
            checked: samples.len(),
            violations,
        }
    }

    /// The barycentric point the partition assigns to `state`. All labels
    /// with positive value share the state, so the carrier is a face of the
    /// cover's nerve; `complex` says which complex the point should live in.
    pub fn evaluate(
        &self,
        state: &S,
        complex: &Complex,
    ) -> Result<BarycentricPoint, PartitionEvalError> {
        let values = self.evaluate_raw(state)?;
        let weights: BTreeMap<VertexId, f64> = values.into_iter().collect();
        Ok(BarycentricPoint::new(weights, complex)?)
    }
}

impl PartitionOfUnity<SampleId> {
    /// Partition over an extensional cover: membership is set membership.
    pub fn from_cover(cover: &Cover, components: BTreeMap<VertexId, Component<SampleId>>) -> Self {
        let cover = cover.clone();
        PartitionOfUnity::new(
            components,
            Box::new(move |label, sample| cover.contains(label, sample)),
        )
    }
}

impl<S> std::fmt::Debug for PartitionOfUnity<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PartitionOfUnity")
            .field("labels", &self.labels)
            .finish_non_exhaustive()
    }
}
