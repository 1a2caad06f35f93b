//! Dense complex operators on small finite-dimensional Hilbert spaces.
//!
//! Matrices are stored row-major as `Vec<Complex64>`. Every dimension is
//! capped at [`MAX_DIM`] so Kronecker products cannot blow up silently.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Tolerances};

pub type Complex64 = num_complex::Complex<f64>;

/// Largest matrix dimension accepted anywhere in the crate.
pub const MAX_DIM: usize = 64;

const EIGEN_MAX_ITERATIONS: usize = 10_000;

#[inline]
fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Square complex matrix with finite entries.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<[f64; 2]>>", into = "Vec<Vec<[f64; 2]>>")]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from a row-major entry list of length `dim * dim`.
    pub fn from_row_major(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::NotSquare {
                rows: dim,
                detail: format!("{} entries", entries.len()),
            });
        }
        check_dim(dim)?;
        if let Some(k) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite {
                row: k / dim,
                col: k % dim,
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            let lens: Vec<String> = rows.iter().map(|r| r.len().to_string()).collect();
            return Err(Error::NotSquare {
                rows: dim,
                detail: lens.join(","),
            });
        }
        Self::from_row_major(dim, rows.into_iter().flatten().collect())
    }

    /// Real matrix given as rows.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| c(x, 0.0)).collect()).collect())
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::from_row_major(dim, vec![Complex64::default(); dim * dim])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.entries[i * dim + i] = c(1.0, 0.0);
        }
        Ok(m)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let dim = diag.len();
        let mut entries = vec![Complex64::default(); dim * dim];
        for (i, &d) in diag.iter().enumerate() {
            entries[i * dim + i] = c(d, 0.0);
        }
        Self::from_row_major(dim, entries)
    }

    /// Rank-one projector `|psi><psi|` (no normalization applied).
    pub fn outer(psi: &[Complex64]) -> Result<Self> {
        let dim = psi.len();
        let entries = psi.iter().flat_map(|a| psi.iter().map(move |b| a * b.conj())).collect();
        Self::from_row_major(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.entries.chunks(self.dim).map(<[_]>::to_vec).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(self.get(j, i).conj());
            }
        }
        Self { dim: n, entries }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let n = self.dim;
        let mut entries = vec![Complex64::default(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                for j in 0..n {
                    entries[i * n + j] += a * other.get(k, j);
                }
            }
        }
        Ok(Self { dim: n, entries })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-norm of `self - self^dagger`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        })
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for row in self.entries.chunks(self.dim) {
            let cells: Vec<String> = row.iter().map(|z| format!("{:+.4}{:+.4}i", z.re, z.im)).collect();
            writeln!(f, "  {}", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

impl TryFrom<Vec<Vec<[f64; 2]>>> for ComplexMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<[f64; 2]>>) -> Result<Self> {
        Self::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(|[re, im]| c(re, im)).collect())
                .collect(),
        )
    }
}

impl From<ComplexMatrix> for Vec<Vec<[f64; 2]>> {
    fn from(m: ComplexMatrix) -> Self {
        m.entries
            .chunks(m.dim)
            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
            .collect()
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim > MAX_DIM {
        return Err(Error::DimensionOverflow { dim, max: MAX_DIM });
    }
    Ok(())
}

/// Pauli axis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::InvalidArgument(format!("unknown Pauli axis '{other}'"))),
        }
    }
}

/// Self-adjoint matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, Tolerances::DEFAULT.herm)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol_herm: f64) -> Result<Self> {
        let deviation = matrix.hermiticity_defect();
        if deviation > tol_herm {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self(matrix))
    }

    /// Hermitian part `(A + A^dagger) / 2` of an arbitrary matrix.
    pub fn hermitian_part(matrix: &ComplexMatrix) -> Self {
        let adj = matrix.adjoint();
        let sum = matrix.add(&adj).expect("adjoint has the same dimension");
        Self(sum.scale(c(0.5, 0.0)))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Ok(Self(ComplexMatrix::identity(dim)?))
    }

    /// The null operator.
    pub fn null(dim: usize) -> Result<Self> {
        Ok(Self(ComplexMatrix::zeros(dim)?))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Ok(Self(ComplexMatrix::from_diagonal(diag)?))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self(self.0.scale(c(factor, 0.0)))
    }

    /// Real linear combination of operators of equal dimension.
    pub fn linear_combination(terms: &[(f64, &HermitianOperator)]) -> Result<Self> {
        let (first, rest) = terms
            .split_first()
            .ok_or_else(|| Error::InvalidArgument("empty linear combination".into()))?;
        let mut acc = first.1 .0.scale(c(first.0, 0.0));
        for (coef, op) in rest {
            acc = acc.add(&op.0.scale(c(*coef, 0.0)))?;
        }
        Ok(Self(acc))
    }

    /// `self ⊗ other`; products of Hermitian factors stay Hermitian.
    pub fn kron(&self, other: &HermitianOperator) -> Result<Self> {
        Ok(Self(tensor_product(&self.0, &other.0)?))
    }
}

impl fmt::Debug for HermitianOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hermitian{:?}", self.0)
    }
}

impl TryFrom<ComplexMatrix> for HermitianOperator {
    type Error = Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl From<HermitianOperator> for ComplexMatrix {
    fn from(h: HermitianOperator) -> Self {
        h.0
    }
}

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct DensityOperator(HermitianOperator);

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let herm = HermitianOperator::with_tolerance(matrix, tol.herm)?;
        let trace = herm.matrix().trace();
        if (trace.re - 1.0).abs() > tol.trace || trace.im.abs() > tol.trace {
            return Err(Error::InvalidTrace { trace: trace.re });
        }
        let min_eigenvalue = spectrum_bounds(&herm)?.infimum;
        if min_eigenvalue < -tol.psd {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self(herm))
    }

    /// Pure state `|psi><psi|`; `psi` is normalized first.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidArgument(
                "state vector has zero or non-finite norm".into(),
            ));
        }
        let unit: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&unit)?)
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let m = ComplexMatrix::identity(dim)?.scale(c(1.0 / dim as f64, 0.0));
        Self::new(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.0.matrix()
    }

    pub fn as_hermitian(&self) -> &HermitianOperator {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `self ⊗ other` is again a density operator.
    pub fn kron(&self, other: &DensityOperator) -> Result<Self> {
        Ok(Self(self.0.kron(&other.0)?))
    }
}

impl fmt::Debug for DensityOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Density{:?}", self.0.matrix())
    }
}

impl TryFrom<ComplexMatrix> for DensityOperator {
    type Error = Error;
    fn try_from(m: ComplexMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl From<DensityOperator> for ComplexMatrix {
    fn from(d: DensityOperator) -> Self {
        d.0.into_matrix()
    }
}

/// Extremal eigenvalues `I(v)` and `S(v)` of a Hermitian operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumBounds {
    pub infimum: f64,
    pub supremum: f64,
}

impl SpectrumBounds {
    pub fn contains(&self, value: f64, slack: f64) -> bool {
        value >= self.infimum - slack && value <= self.supremum + slack
    }

    /// `max(|I|, |S|)`, the operator norm.
    pub fn magnitude(&self) -> f64 {
        self.infimum.abs().max(self.supremum.abs())
    }
}

pub fn pauli(axis: Axis) -> HermitianOperator {
    let o = c(0.0, 0.0);
    let entries = match axis {
        Axis::X => vec![o, c(1.0, 0.0), c(1.0, 0.0), o],
        Axis::Y => vec![o, c(0.0, -1.0), c(0.0, 1.0), o],
        Axis::Z => vec![c(1.0, 0.0), o, o, c(-1.0, 0.0)],
    };
    HermitianOperator(ComplexMatrix { dim: 2, entries })
}

/// Kronecker product `a ⊗ b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (na, nb) = (a.dim(), b.dim());
    let n = na.checked_mul(nb).ok_or(Error::DimensionOverflow {
        dim: usize::MAX,
        max: MAX_DIM,
    })?;
    check_dim(n)?;
    let mut entries = vec![Complex64::default(); n * n];
    for i in 0..na {
        for j in 0..na {
            let aij = a.get(i, j);
            for k in 0..nb {
                for l in 0..nb {
                    entries[(i * nb + k) * n + (j * nb + l)] = aij * b.get(k, l);
                }
            }
        }
    }
    Ok(ComplexMatrix { dim: n, entries })
}

/// `ab - ba`.
pub fn commutator(a: &HermitianOperator, b: &HermitianOperator) -> Result<ComplexMatrix> {
    let ab = a.matrix().matmul(b.matrix())?;
    let ba = b.matrix().matmul(a.matrix())?;
    ab.sub(&ba)
}

/// `i(ab - ba)`, Hermitian whenever `a` and `b` are.
pub fn scaled_commutator(a: &HermitianOperator, b: &HermitianOperator) -> Result<HermitianOperator> {
    // (ba)_ij is computed with the same summation order as conj((ab)_ji), so
    // the result is Hermitian to the bit.
    let comm = commutator(a, b)?;
    Ok(HermitianOperator(comm.scale(c(0.0, 1.0))))
}

/// All eigenvalues in ascending order.
pub fn eigenvalues(v: &HermitianOperator) -> Result<Vec<f64>> {
    let m = v.matrix();
    let n = m.dim();
    let dm = DMatrix::from_row_slice(n, n, m.entries());
    let eig = SymmetricEigen::try_new(dm, f64::EPSILON, EIGEN_MAX_ITERATIONS).ok_or(Error::EigenNonConvergence)?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenNonConvergence);
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn spectrum_bounds(v: &HermitianOperator) -> Result<SpectrumBounds> {
    let values = eigenvalues(v)?;
    Ok(SpectrumBounds {
        infimum: values[0],
        supremum: values[values.len() - 1],
    })
}

/// `Re tr(rho v)`; errors when the imaginary part exceeds the Hermiticity tolerance.
pub fn expectation(rho: &DensityOperator, v: &HermitianOperator) -> Result<f64> {
    expectation_with(rho, v, Tolerances::DEFAULT.herm)
}

pub fn expectation_with(rho: &DensityOperator, v: &HermitianOperator, tol_herm: f64) -> Result<f64> {
    let (r, m) = (rho.matrix(), v.matrix());
    if r.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            left: r.dim(),
            right: m.dim(),
        });
    }
    let n = r.dim();
    let mut acc = Complex64::default();
    for i in 0..n {
        for j in 0..n {
            acc += r.get(i, j) * m.get(j, i);
        }
    }
    if acc.im.abs() > tol_herm {
        return Err(Error::ImaginaryResidue { residue: acc.im });
    }
    Ok(acc.re)
}

/// True iff every entry has modulus at most `tol`.
pub fn is_null(a: &ComplexMatrix, tol: f64) -> bool {
    a.max_norm() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sx() -> HermitianOperator {
        pauli(Axis::X)
    }
    fn sy() -> HermitianOperator {
        pauli(Axis::Y)
    }
    fn sz() -> HermitianOperator {
        pauli(Axis::Z)
    }

    #[test]
    fn pauli_z_is_diagonal() {
        let expected = ComplexMatrix::from_diagonal(&[1.0, -1.0]).unwrap();
        assert_eq!(sz().matrix(), &expected);
    }

    #[test]
    fn pauli_squares_to_identity() {
        let id = ComplexMatrix::identity(2).unwrap();
        for axis in Axis::ALL {
            let p = pauli(axis);
            assert_eq!(p.matrix().matmul(p.matrix()).unwrap(), id, "axis {axis}");
        }
    }

    #[test]
    fn pauli_spectra() {
        for axis in Axis::ALL {
            let ev = eigenvalues(&pauli(axis)).unwrap();
            assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn z_eigenvectors() {
        let plus = [c(1.0, 0.0), c(0.0, 0.0)];
        let minus = [c(0.0, 0.0), c(1.0, 0.0)];
        let z = sz();
        for (v, sign) in [(plus, 1.0), (minus, -1.0)] {
            for i in 0..2 {
                let row: Complex64 = (0..2).map(|j| z.matrix().get(i, j) * v[j]).sum();
                assert_eq!(row, v[i] * sign);
            }
        }
    }

    #[test]
    fn kronecker_examples() {
        let i2 = ComplexMatrix::identity(2).unwrap();
        assert_eq!(tensor_product(&i2, &i2).unwrap(), ComplexMatrix::identity(4).unwrap());
        let zz = tensor_product(sz().matrix(), sz().matrix()).unwrap();
        assert_eq!(zz, ComplexMatrix::from_diagonal(&[1.0, -1.0, -1.0, 1.0]).unwrap());
        let xy = tensor_product(sx().matrix(), sy().matrix()).unwrap();
        assert_eq!(xy.trace(), Complex64::default());
    }

    #[test]
    fn kronecker_overflow_is_rejected() {
        let big = ComplexMatrix::identity(16).unwrap();
        let small = ComplexMatrix::identity(4).unwrap();
        assert!(tensor_product(&big, &small).is_ok());
        let err = tensor_product(&big, &ComplexMatrix::identity(5).unwrap()).unwrap_err();
        assert!(matches!(err, Error::DimensionOverflow { dim: 80, .. }));
    }

    #[test]
    fn commutator_of_x_and_y() {
        // Hand multiplication: XY = [[i,0],[0,-i]], YX = [[-i,0],[0,i]].
        let expected =
            ComplexMatrix::from_rows(vec![vec![c(0.0, 2.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, -2.0)]]).unwrap();
        assert_eq!(commutator(&sx(), &sy()).unwrap(), expected);
        assert!(is_null(&commutator(&sz(), &sz()).unwrap(), 0.0));
        assert!(!is_null(&commutator(&sx(), &sy()).unwrap(), 1e-12));
    }

    #[test]
    fn identity_commutes_with_everything() {
        let id = HermitianOperator::identity(2).unwrap();
        for axis in Axis::ALL {
            assert!(is_null(&commutator(&pauli(axis), &id).unwrap(), 0.0));
        }
    }

    #[test]
    fn scaled_commutator_examples() {
        assert_eq!(scaled_commutator(&sx(), &sy()).unwrap(), sz().scale(-2.0));
        assert_eq!(scaled_commutator(&sy(), &sx()).unwrap(), sz().scale(2.0));
        assert!(is_null(scaled_commutator(&sy(), &sy()).unwrap().matrix(), 0.0));
    }

    #[test]
    fn commutator_dimension_mismatch() {
        let id4 = HermitianOperator::identity(4).unwrap();
        assert!(matches!(
            commutator(&sx(), &id4),
            Err(Error::DimensionMismatch { left: 2, right: 4 })
        ));
    }

    #[test]
    fn spectrum_bounds_examples() {
        let b = spectrum_bounds(&sz()).unwrap();
        assert_eq!((b.infimum, b.supremum), (-1.0, 1.0));
        let b = spectrum_bounds(&HermitianOperator::identity(3).unwrap()).unwrap();
        assert_eq!((b.infimum, b.supremum), (1.0, 1.0));
        let b = spectrum_bounds(&sz().scale(-2.0)).unwrap();
        assert_eq!((b.infimum, b.supremum), (-2.0, 2.0));
    }

    #[test]
    fn expectation_of_identity_is_one() {
        let rho = DensityOperator::maximally_mixed(4).unwrap();
        let id = HermitianOperator::identity(4).unwrap();
        assert!((expectation(&rho, &id).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let rho = DensityOperator::maximally_mixed(4).unwrap();
        assert!(matches!(expectation(&rho, &sx()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn density_validation() {
        assert!(matches!(
            DensityOperator::new(ComplexMatrix::from_diagonal(&[0.5, 0.6]).unwrap()),
            Err(Error::InvalidTrace { .. })
        ));
        assert!(matches!(
            DensityOperator::new(ComplexMatrix::from_diagonal(&[1.5, -0.5]).unwrap()),
            Err(Error::NotPositive { .. })
        ));
        let skew =
            ComplexMatrix::from_rows(vec![vec![c(0.5, 0.0), c(0.1, 0.0)], vec![c(0.2, 0.0), c(0.5, 0.0)]]).unwrap();
        assert!(matches!(DensityOperator::new(skew), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn matrix_construction_errors() {
        assert!(matches!(ComplexMatrix::zeros(0), Err(Error::NotSquare { .. })));
        assert!(matches!(
            ComplexMatrix::identity(65),
            Err(Error::DimensionOverflow { .. })
        ));
        assert!(matches!(
            ComplexMatrix::from_rows(vec![vec![c(1.0, 0.0)], vec![]]),
            Err(Error::NotSquare { .. })
        ));
        assert!(matches!(
            ComplexMatrix::from_diagonal(&[1.0, f64::NAN]),
            Err(Error::NonFinite { row: 1, col: 1 })
        ));
    }

    #[test]
    fn json_round_trip_uses_re_im_pairs() {
        let json = serde_json::to_string(&sy()).unwrap();
        assert_eq!(json, "[[[0.0,0.0],[0.0,-1.0]],[[0.0,1.0],[0.0,0.0]]]");
        let back: HermitianOperator = serde_json::from_str(&json).unwrap();
        assert_eq!(back, sy());
        let bad: std::result::Result<DensityOperator, _> = serde_json::from_str("[[[0.5,0],[0,0]],[[0,0],[0.6,0]]]");
        assert!(bad.is_err());
    }
}
