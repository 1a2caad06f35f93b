//! Local hidden-variable models built from separable decompositions.
//!
//! Given `rho = sum_i p_i rho1_i ⊗ rho2_i`, the model takes one atom per
//! component, weight `p_i` on atom `i`, and responses
//! `f_k(v, i) = tr(rho_k_i v)`. Linearity of the trace gives
//! `sum_i p_i f1(v1, i) f2(v2, i) = tr(rho v1 ⊗ v2)` for every pair of local
//! observables, and each response lies in the spectrum hull of `v`.

use serde::Serialize;

use crate::operator::{
    expectation, is_null, pauli, scaled_commutator, Axis, Complex64, ComplexMatrix, DensityOperator, HermitianOperator,
};
use crate::probability::{
    integrate_product_with, measure_of, validate_model_measure_with, validate_response_range_with, Event,
    FiniteSampleSpace, ProbabilityMeasure, ResponseFunction, ResponseViolation, Site,
};
use crate::{Error, Result, Tolerances};

/// One term `p * rho1 ⊗ rho2` of a separable decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductComponent {
    pub label: String,
    pub weight: f64,
    pub site1: DensityOperator,
    pub site2: DensityOperator,
}

/// Convex mixture of product states.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableDecomposition {
    components: Vec<ProductComponent>,
    state: DensityOperator,
}

impl SeparableDecomposition {
    pub fn new(components: Vec<ProductComponent>) -> Result<Self> {
        Self::with_tolerances(components, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(components: Vec<ProductComponent>, tol: &Tolerances) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidDecomposition("no components".into()))?;
        let (d1, d2) = (first.site1.dim(), first.site2.dim());
        for c in &components {
            if c.site1.dim() != d1 || c.site2.dim() != d2 {
                return Err(Error::InvalidDecomposition(format!(
                    "component '{}' has site dimensions {}x{}, expected {}x{}",
                    c.label,
                    c.site1.dim(),
                    c.site2.dim(),
                    d1,
                    d2
                )));
            }
        }
        let space = FiniteSampleSpace::new(components.iter().map(|c| c.label.clone()))
            .map_err(|e| Error::InvalidDecomposition(e.to_string()))?;
        let weights: Vec<f64> = components.iter().map(|c| c.weight).collect();
        let measure = ProbabilityMeasure::unchecked(space, weights)?;
        if let Some(v) = validate_model_measure_with(&measure, tol.measure).first() {
            return Err(Error::InvalidDecomposition(v.to_string()));
        }

        let mut acc: Option<ComplexMatrix> = None;
        for c in &components {
            let term = c.site1.kron(&c.site2)?.matrix().scale(Complex64::new(c.weight, 0.0));
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term)?,
            });
        }
        let state = DensityOperator::with_tolerances(acc.expect("nonempty"), tol)
            .map_err(|e| Error::InvalidDecomposition(format!("reconstructed state: {e}")))?;
        Ok(Self { components, state })
    }

    /// The two-component decomposition of `U(alpha, beta)` with atoms `+` and `-`.
    pub fn u_family(u: UFamilyState) -> Result<Self> {
        let plus = DensityOperator::new(ComplexMatrix::from_diagonal(&[1.0, 0.0])?)?;
        let minus = DensityOperator::new(ComplexMatrix::from_diagonal(&[0.0, 1.0])?)?;
        Self::new(vec![
            ProductComponent {
                label: "+".into(),
                weight: u.alpha,
                site1: plus.clone(),
                site2: plus,
            },
            ProductComponent {
                label: "-".into(),
                weight: u.beta,
                site1: minus.clone(),
                site2: minus,
            },
        ])
    }

    pub fn components(&self) -> &[ProductComponent] {
        &self.components
    }

    /// `sum_i p_i rho1_i ⊗ rho2_i`.
    pub fn state(&self) -> &DensityOperator {
        &self.state
    }

    pub fn site_dims(&self) -> (usize, usize) {
        let c = &self.components[0];
        (c.site1.dim(), c.site2.dim())
    }
}

/// Parameters of `U(alpha, beta) = alpha |++><++| + beta |--><--|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UFamilyState {
    pub alpha: f64,
    pub beta: f64,
}

impl UFamilyState {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let ok = alpha.is_finite()
            && beta.is_finite()
            && alpha >= 0.0
            && beta >= 0.0
            && (alpha + beta - 1.0).abs() <= Tolerances::DEFAULT.measure;
        if !ok {
            return Err(Error::InvalidUState { alpha, beta });
        }
        Ok(Self { alpha, beta })
    }

    /// `U(alpha, 1 - alpha)`.
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0 - alpha)
    }
}

/// `diag(alpha, 0, 0, beta)` in the product basis ordered `++, +-, -+, --`.
pub fn build_u_state(alpha: f64, beta: f64) -> Result<DensityOperator> {
    let u = UFamilyState::new(alpha, beta)?;
    DensityOperator::new(ComplexMatrix::from_diagonal(&[u.alpha, 0.0, 0.0, u.beta])?)
}

/// Response `f(v, i) = tr(rho_i v)` for a list of per-atom local states.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalStateResponse {
    site: Site,
    states: Vec<DensityOperator>,
}

impl ConditionalStateResponse {
    pub fn new(site: Site, states: Vec<DensityOperator>) -> Self {
        Self { site, states }
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }
}

impl ResponseFunction for ConditionalStateResponse {
    fn site(&self) -> Site {
        self.site
    }

    fn defined_on(&self, space: &FiniteSampleSpace) -> bool {
        self.states.len() == space.len()
    }

    fn evaluate(&self, v: &HermitianOperator, atom: usize) -> Result<f64> {
        let state = self
            .states
            .get(atom)
            .ok_or_else(|| Error::SpaceMismatch(format!("atom index {atom} out of range")))?;
        expectation(state, v)
    }
}

/// Finite LHV model: sample space, measure, and the two local responses.
#[derive(Debug, Clone, PartialEq)]
pub struct LhvModel {
    measure: ProbabilityMeasure,
    f1: ConditionalStateResponse,
    f2: ConditionalStateResponse,
    target_state: DensityOperator,
}

impl LhvModel {
    pub fn space(&self) -> &FiniteSampleSpace {
        self.measure.space()
    }

    pub fn measure(&self) -> &ProbabilityMeasure {
        &self.measure
    }

    pub fn f1(&self) -> &ConditionalStateResponse {
        &self.f1
    }

    pub fn f2(&self) -> &ConditionalStateResponse {
        &self.f2
    }

    pub fn target_state(&self) -> &DensityOperator {
        &self.target_state
    }

    pub fn site_dims(&self) -> (usize, usize) {
        (self.f1.dim(), self.f2.dim())
    }

    /// `sum_w M(w) f1(v1, w) f2(v2, w)`.
    pub fn integrate(&self, v1: &HermitianOperator, v2: &HermitianOperator) -> Result<f64> {
        integrate_product_with(&self.measure, &self.f1, &self.f2, v1, v2, Tolerances::DEFAULT.range)
    }

    /// Range and null-rule violations of both responses on [`standard_probe_family`].
    pub fn response_violations(&self, tol: &Tolerances) -> Result<Vec<ResponseViolation>> {
        let (d1, d2) = self.site_dims();
        let mut out = validate_response_range_with(&self.f1, self.space(), &standard_probe_family(d1)?, tol)?;
        out.extend(validate_response_range_with(
            &self.f2,
            self.space(),
            &standard_probe_family(d2)?,
            tol,
        )?);
        Ok(out)
    }
}

/// Conditional-state LHV model of a separable decomposition.
pub fn lhv_from_separable(decomp: &SeparableDecomposition) -> Result<LhvModel> {
    let comps = decomp.components();
    let space = FiniteSampleSpace::new(comps.iter().map(|c| c.label.clone()))?;
    let measure = ProbabilityMeasure::unchecked(space, comps.iter().map(|c| c.weight).collect())?;
    Ok(LhvModel {
        measure,
        f1: ConditionalStateResponse::new(Site::One, comps.iter().map(|c| c.site1.clone()).collect()),
        f2: ConditionalStateResponse::new(Site::Two, comps.iter().map(|c| c.site2.clone()).collect()),
        target_state: decomp.state().clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReproductionReport {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Compares the model integral with `tr(rho v1 ⊗ v2)`.
pub fn verify_reproduction(
    model: &LhvModel,
    v1: &HermitianOperator,
    v2: &HermitianOperator,
    tol: f64,
) -> Result<ReproductionReport> {
    let (d1, d2) = model.site_dims();
    if v1.dim() != d1 {
        return Err(Error::DimensionMismatch {
            left: d1,
            right: v1.dim(),
        });
    }
    if v2.dim() != d2 {
        return Err(Error::DimensionMismatch {
            left: d2,
            right: v2.dim(),
        });
    }
    let lhs = model.integrate(v1, v2)?;
    let rhs = expectation(model.target_state(), &v1.kron(v2)?)?;
    Ok(ReproductionReport {
        lhs,
        rhs,
        pass: (lhs - rhs).abs() <= tol,
    })
}

/// Model integral of `i[σx, σy] ⊗ i[σx, σy]` for the `U(alpha, beta)` model.
pub fn eq5_integral(alpha: f64, beta: f64) -> Result<f64> {
    let model = lhv_from_separable(&SeparableDecomposition::u_family(UFamilyState::new(alpha, beta)?)?)?;
    let c = scaled_commutator(&pauli(Axis::X), &pauli(Axis::Y))?;
    model.integrate(&c, &c)
}

/// Event on which both local responses to `i[a_k, b_k]` are nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct NoncommutativityWitness {
    pub event: Event,
    pub measure: f64,
    /// Both commutators differ from the null operator.
    pub commutators_nonnull: bool,
    /// Max-norm of `i[a_1, b_1]` and `i[a_2, b_2]`.
    pub commutator_norms: [f64; 2],
}

pub fn witness_noncommutativity(
    model: &LhvModel,
    a1: &HermitianOperator,
    b1: &HermitianOperator,
    a2: &HermitianOperator,
    b2: &HermitianOperator,
) -> Result<NoncommutativityWitness> {
    witness_noncommutativity_with(model, a1, b1, a2, b2, Tolerances::DEFAULT.null)
}

pub fn witness_noncommutativity_with(
    model: &LhvModel,
    a1: &HermitianOperator,
    b1: &HermitianOperator,
    a2: &HermitianOperator,
    b2: &HermitianOperator,
    tol_null: f64,
) -> Result<NoncommutativityWitness> {
    let (d1, d2) = model.site_dims();
    for (op, d) in [(a1, d1), (b1, d1), (a2, d2), (b2, d2)] {
        if op.dim() != d {
            return Err(Error::DimensionMismatch {
                left: d,
                right: op.dim(),
            });
        }
    }
    let c1 = scaled_commutator(a1, b1)?;
    let c2 = scaled_commutator(a2, b2)?;
    let mut members = Vec::new();
    for atom in 0..model.space().len() {
        let x1 = model.f1.evaluate(&c1, atom)?;
        let x2 = model.f2.evaluate(&c2, atom)?;
        if x1.abs() > tol_null && x2.abs() > tol_null {
            members.push(atom);
        }
    }
    let event = Event::from_indices(model.space(), members)?;
    let measure = measure_of(model.measure(), &event)?;
    Ok(NoncommutativityWitness {
        event,
        measure,
        commutators_nonnull: !is_null(c1.matrix(), tol_null) && !is_null(c2.matrix(), tol_null),
        commutator_norms: [c1.matrix().max_norm(), c2.matrix().max_norm()],
    })
}

/// Generalized Gell-Mann matrices of dimension `dim` (the Pauli matrices for `dim = 2`).
pub fn gell_mann_basis(dim: usize) -> Result<Vec<HermitianOperator>> {
    let mut out = Vec::with_capacity(dim * dim - 1);
    let zero = ComplexMatrix::zeros(dim)?;
    let unit = |entries: &[(usize, usize, Complex64)]| -> Result<HermitianOperator> {
        let mut e = zero.entries().to_vec();
        for &(i, j, z) in entries {
            e[i * dim + j] = z;
        }
        HermitianOperator::new(ComplexMatrix::from_row_major(dim, e)?)
    };
    for j in 0..dim {
        for k in j + 1..dim {
            let one = Complex64::new(1.0, 0.0);
            let i = Complex64::new(0.0, 1.0);
            out.push(unit(&[(j, k, one), (k, j, one)])?);
            out.push(unit(&[(j, k, -i), (k, j, i)])?);
        }
    }
    for l in 1..dim {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; dim];
        for d in diag.iter_mut().take(l) {
            *d = norm;
        }
        diag[l] = -(l as f64) * norm;
        out.push(HermitianOperator::from_diagonal(&diag)?);
    }
    // keep the x, y, z order for qubits
    if dim == 2 {
        debug_assert_eq!(out[0], pauli(Axis::X));
        debug_assert_eq!(out[1], pauli(Axis::Y));
        debug_assert_eq!(out[2], pauli(Axis::Z));
    }
    Ok(out)
}

/// Identity, the Gell-Mann basis, and `i[g_a, g_b]` for every ordered pair of basis elements.
///
/// For qubits: `I, σx, σy, σz` plus the nine scaled commutators of the Pauli
/// matrices, three of which are the null operator.
pub fn standard_probe_family(dim: usize) -> Result<Vec<HermitianOperator>> {
    let basis = gell_mann_basis(dim)?;
    let mut out = vec![HermitianOperator::identity(dim)?];
    out.extend(basis.iter().cloned());
    for a in &basis {
        for b in &basis {
            out.push(scaled_commutator(a, b)?);
        }
    }
    Ok(out)
}
