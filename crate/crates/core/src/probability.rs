//! Finite classical probability spaces and local response functions.
//!
//! The sigma-algebra is always the power set of the atoms, so an [`Event`] is
//! just a subset of atom indices.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::operator::{is_null, spectrum_bounds, HermitianOperator, SpectrumBounds};
use crate::{Error, Result, Tolerances};

/// Nonempty ordered list of uniquely labelled atoms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct FiniteSampleSpace {
    atoms: Vec<String>,
}

impl FiniteSampleSpace {
    pub fn new<S: Into<String>>(atoms: impl IntoIterator<Item = S>) -> Result<Self> {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        if atoms.is_empty() {
            return Err(Error::InvalidSpace(
                "sample space must contain at least one atom".into(),
            ));
        }
        let mut seen = HashSet::with_capacity(atoms.len());
        for a in &atoms {
            if !seen.insert(a.as_str()) {
                return Err(Error::InvalidSpace(format!("duplicate atom '{a}'")));
            }
        }
        Ok(Self { atoms })
    }

    /// Atoms labelled `"0"`, `"1"`, ...
    pub fn indexed(len: usize) -> Result<Self> {
        Self::new((0..len).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == label)
    }
}

impl TryFrom<Vec<String>> for FiniteSampleSpace {
    type Error = Error;
    fn try_from(atoms: Vec<String>) -> Result<Self> {
        Self::new(atoms)
    }
}

impl From<FiniteSampleSpace> for Vec<String> {
    fn from(s: FiniteSampleSpace) -> Self {
        s.atoms
    }
}

/// Weights over the atoms of a [`FiniteSampleSpace`].
///
/// [`ProbabilityMeasure::new`] enforces non-negativity and normalization.
/// [`ProbabilityMeasure::unchecked`] only enforces that there is one weight
/// per atom, so that defective inputs can be reported by
/// [`validate_model_measure`] instead of rejected at parse time.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMeasure {
    space: FiniteSampleSpace,
    weights: Vec<f64>,
}

impl ProbabilityMeasure {
    pub fn new(space: FiniteSampleSpace, weights: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(space, weights, Tolerances::DEFAULT.measure)
    }

    pub fn with_tolerance(space: FiniteSampleSpace, weights: Vec<f64>, tol_measure: f64) -> Result<Self> {
        let m = Self::unchecked(space, weights)?;
        let violations = validate_model_measure_with(&m, tol_measure);
        if let Some(v) = violations.first() {
            return Err(Error::InvalidMeasure(v.to_string()));
        }
        Ok(m)
    }

    pub fn unchecked(space: FiniteSampleSpace, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != space.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} weights for {} atoms",
                weights.len(),
                space.len()
            )));
        }
        Ok(Self { space, weights })
    }

    pub fn space(&self) -> &FiniteSampleSpace {
        &self.space
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, atom: usize) -> f64 {
        self.weights[atom]
    }

    /// `lambda * self + (1 - lambda) * other` over the same space.
    pub fn mix(&self, other: &ProbabilityMeasure, lambda: f64) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch("cannot mix measures on different spaces".into()));
        }
        let weights = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
            .collect();
        Ok(Self {
            space: self.space.clone(),
            weights,
        })
    }
}

/// Subset of the atoms of a sample space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    space: FiniteSampleSpace,
    members: BTreeSet<usize>,
}

impl Event {
    pub fn from_labels<S: AsRef<str>>(space: &FiniteSampleSpace, labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut members = BTreeSet::new();
        for l in labels {
            let l = l.as_ref();
            let idx = space
                .index_of(l)
                .ok_or_else(|| Error::SpaceMismatch(format!("atom '{l}' is not in the sample space")))?;
            members.insert(idx);
        }
        Ok(Self {
            space: space.clone(),
            members,
        })
    }

    pub fn from_indices(space: &FiniteSampleSpace, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let members: BTreeSet<usize> = indices.into_iter().collect();
        if let Some(&bad) = members.iter().find(|&&i| i >= space.len()) {
            return Err(Error::SpaceMismatch(format!("atom index {bad} out of range")));
        }
        Ok(Self {
            space: space.clone(),
            members,
        })
    }

    pub fn full(space: &FiniteSampleSpace) -> Self {
        Self {
            space: space.clone(),
            members: (0..space.len()).collect(),
        }
    }

    pub fn empty(space: &FiniteSampleSpace) -> Self {
        Self {
            space: space.clone(),
            members: BTreeSet::new(),
        }
    }

    pub fn space(&self) -> &FiniteSampleSpace {
        &self.space
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.members.contains(&atom)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.members.iter().map(|&i| self.space.atoms[i].as_str()).collect()
    }

    pub fn union(&self, other: &Event) -> Result<Event> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch("events live on different spaces".into()));
        }
        Ok(Self {
            space: self.space.clone(),
            members: self.members.union(&other.members).copied().collect(),
        })
    }

    pub fn is_disjoint(&self, other: &Event) -> bool {
        self.members.is_disjoint(&other.members)
    }
}

/// Party label of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Site {
    One,
    Two,
}

impl Site {
    pub fn number(self) -> u8 {
        match self {
            Site::One => 1,
            Site::Two => 2,
        }
    }
}

impl From<Site> for u8 {
    fn from(s: Site) -> u8 {
        s.number()
    }
}

impl TryFrom<u8> for Site {
    type Error = Error;
    fn try_from(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Site::One),
            2 => Ok(Site::Two),
            other => Err(Error::InvalidArgument(format!("site must be 1 or 2, got {other}"))),
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Deterministic local response `f_k(v, w)` of one site.
///
/// The signature only admits an operator of this site and an atom, so a
/// response can never depend on what is measured at the other site.
pub trait ResponseFunction {
    fn site(&self) -> Site;

    /// Whether the response is defined on every atom of `space`.
    fn defined_on(&self, space: &FiniteSampleSpace) -> bool;

    fn evaluate(&self, v: &HermitianOperator, atom: usize) -> Result<f64>;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureViolation {
    Negative { atom: String, weight: f64 },
    NonFinite { atom: String },
    Normalization { total: f64, excess: f64 },
}

impl fmt::Display for MeasureViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureViolation::Negative { atom, weight } => write!(f, "negative weight {weight} on atom '{atom}'"),
            MeasureViolation::NonFinite { atom } => write!(f, "non-finite weight on atom '{atom}'"),
            MeasureViolation::Normalization { total, excess } => {
                write!(f, "weights sum to {total} (excess {excess:+})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResponseViolation {
    OutOfRange {
        site: u8,
        probe: usize,
        atom: String,
        value: f64,
        lower: f64,
        upper: f64,
    },
    NullRule {
        site: u8,
        probe: usize,
        atom: String,
        value: f64,
    },
    Evaluation {
        site: u8,
        probe: usize,
        atom: String,
        message: String,
    },
}

impl fmt::Display for ResponseViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResponseViolation::OutOfRange {
                site,
                probe,
                atom,
                value,
                lower,
                upper,
            } => write!(
                f,
                "site {site} probe #{probe} atom '{atom}': value {value} outside [{lower}, {upper}]"
            ),
            ResponseViolation::NullRule {
                site,
                probe,
                atom,
                value,
            } => {
                write!(
                    f,
                    "site {site} probe #{probe} atom '{atom}': null operator mapped to {value}"
                )
            }
            ResponseViolation::Evaluation {
                site,
                probe,
                atom,
                message,
            } => write!(f, "site {site} probe #{probe} atom '{atom}': {message}"),
        }
    }
}

/// Total weight of the event's atoms.
pub fn measure_of(measure: &ProbabilityMeasure, event: &Event) -> Result<f64> {
    if event.space != measure.space {
        return Err(Error::SpaceMismatch(
            "event and measure live on different spaces".into(),
        ));
    }
    Ok(event.indices().fold(0.0, |acc, i| acc + measure.weights[i]))
}

/// Finite form of `integral M(dw) f1(v1, w) f2(v2, w)`.
///
/// Every response value is checked against the spectrum interval of its
/// operator; a value outside `[I(v), S(v)]` means the model is invalid.
pub fn integrate_product(
    measure: &ProbabilityMeasure,
    f1: &dyn ResponseFunction,
    f2: &dyn ResponseFunction,
    v1: &HermitianOperator,
    v2: &HermitianOperator,
) -> Result<f64> {
    integrate_product_with(measure, f1, f2, v1, v2, Tolerances::DEFAULT.range)
}

pub fn integrate_product_with(
    measure: &ProbabilityMeasure,
    f1: &dyn ResponseFunction,
    f2: &dyn ResponseFunction,
    v1: &HermitianOperator,
    v2: &HermitianOperator,
    tol_range: f64,
) -> Result<f64> {
    for (f, expected) in [(f1, Site::One), (f2, Site::Two)] {
        if f.site() != expected {
            return Err(Error::WrongSite {
                expected: expected.number(),
                got: f.site().number(),
            });
        }
        if !f.defined_on(measure.space()) {
            return Err(Error::SpaceMismatch(format!(
                "site {expected} response is not defined on the measure's sample space"
            )));
        }
    }
    let b1 = spectrum_bounds(v1)?;
    let b2 = spectrum_bounds(v2)?;
    let mut total = 0.0;
    for (atom, &w) in measure.weights().iter().enumerate() {
        let x1 = checked_value(f1, v1, &b1, atom, tol_range)?;
        let x2 = checked_value(f2, v2, &b2, atom, tol_range)?;
        total += w * x1 * x2;
    }
    Ok(total)
}

fn checked_value(
    f: &dyn ResponseFunction,
    v: &HermitianOperator,
    bounds: &SpectrumBounds,
    atom: usize,
    tol_range: f64,
) -> Result<f64> {
    let value = f.evaluate(v, atom)?;
    if !bounds.contains(value, tol_range) {
        return Err(Error::ResponseOutOfRange {
            site: f.site().number(),
            atom,
            value,
            lower: bounds.infimum,
            upper: bounds.supremum,
        });
    }
    Ok(value)
}

pub fn validate_model_measure(measure: &ProbabilityMeasure) -> Vec<MeasureViolation> {
    validate_model_measure_with(measure, Tolerances::DEFAULT.measure)
}

pub fn validate_model_measure_with(measure: &ProbabilityMeasure, tol_measure: f64) -> Vec<MeasureViolation> {
    let mut out = Vec::new();
    for (label, &w) in measure.space.atoms().iter().zip(&measure.weights) {
        if !w.is_finite() {
            out.push(MeasureViolation::NonFinite { atom: label.clone() });
        } else if w < -tol_measure {
            out.push(MeasureViolation::Negative {
                atom: label.clone(),
                weight: w,
            });
        }
    }
    let total: f64 = measure.weights.iter().sum();
    if total.is_finite() && (total - 1.0).abs() > tol_measure {
        out.push(MeasureViolation::Normalization {
            total,
            excess: total - 1.0,
        });
    }
    out
}

/// Evaluates `f` on every (probe, atom) pair and reports values outside
/// `[I(v) - tol, S(v) + tol]` and nonzero values on the null operator.
pub fn validate_response_range(
    f: &dyn ResponseFunction,
    space: &FiniteSampleSpace,
    probes: &[HermitianOperator],
) -> Result<Vec<ResponseViolation>> {
    validate_response_range_with(f, space, probes, &Tolerances::DEFAULT)
}

pub fn validate_response_range_with(
    f: &dyn ResponseFunction,
    space: &FiniteSampleSpace,
    probes: &[HermitianOperator],
    tol: &Tolerances,
) -> Result<Vec<ResponseViolation>> {
    if probes.is_empty() {
        return Err(Error::InvalidArgument("probe family must be nonempty".into()));
    }
    if !f.defined_on(space) {
        return Err(Error::SpaceMismatch(
            "response is not defined on the given sample space".into(),
        ));
    }
    let site = f.site().number();
    let mut out = Vec::new();
    for (probe, v) in probes.iter().enumerate() {
        let bounds = spectrum_bounds(v)?;
        let null = is_null(v.matrix(), 0.0);
        for (atom, label) in space.atoms().iter().enumerate() {
            let value = match f.evaluate(v, atom) {
                Ok(x) => x,
                Err(e) => {
                    out.push(ResponseViolation::Evaluation {
                        site,
                        probe,
                        atom: label.clone(),
                        message: e.to_string(),
                    });
                    continue;
                }
            };
            if null {
                if value != 0.0 {
                    out.push(ResponseViolation::NullRule {
                        site,
                        probe,
                        atom: label.clone(),
                        value,
                    });
                }
            } else if !bounds.contains(value, tol.range) {
                out.push(ResponseViolation::OutOfRange {
                    site,
                    probe,
                    atom: label.clone(),
                    value,
                    lower: bounds.infimum,
                    upper: bounds.supremum,
                });
            }
        }
    }
    Ok(out)
}
