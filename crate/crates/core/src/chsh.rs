//! CHSH correlations for spin measurements on two qubits.
//!
//! `S = E(a, b) + E(a, b') + E(a', b) - E(a', b')` with
//! `E(a, b) = tr(rho (a·σ) ⊗ (b·σ))`. Any LHV model with ±1 responses obeys
//! `|S| <= 2`; quantum states reach `2√2`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::lhv::{LhvModel, ProductComponent, SeparableDecomposition, UFamilyState};
use crate::operator::{expectation, pauli, Axis, Complex64, ComplexMatrix, DensityOperator, HermitianOperator};
use crate::{Error, Result};

const UNIT_NORM_TOL: f64 = 1e-12;

/// Unit vector on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochDirection {
    x: f64,
    y: f64,
    z: f64,
}

impl BlochDirection {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NonUnitDirection { x, y, z, norm });
        }
        Ok(Self { x, y, z })
    }

    /// Rescales a nonzero vector to unit length.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NonUnitDirection { x, y, z, norm });
        }
        Self::new(x / norm, y / norm, z / norm)
    }

    /// `(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        Self {
            x: theta.sin() * phi.cos(),
            y: theta.sin() * phi.sin(),
            z: theta.cos(),
        }
    }

    /// `(sin θ, 0, cos θ)`: angle `θ` measured from `z` towards `x`.
    pub fn in_xz_plane(theta: f64) -> Self {
        Self::from_spherical(theta, 0.0)
    }

    pub fn x_axis() -> Self {
        Self { x: 1.0, y: 0.0, z: 0.0 }
    }

    pub fn y_axis() -> Self {
        Self { x: 0.0, y: 1.0, z: 0.0 }
    }

    pub fn z_axis() -> Self {
        Self { x: 0.0, y: 0.0, z: 1.0 }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn negated(&self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

/// Two settings per site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    pub a: BlochDirection,
    pub a_prime: BlochDirection,
    pub b: BlochDirection,
    pub b_prime: BlochDirection,
}

impl ChshSettings {
    /// All four directions in the x-z plane.
    pub fn planar(theta_a: f64, theta_a_prime: f64, theta_b: f64, theta_b_prime: f64) -> Self {
        Self {
            a: BlochDirection::in_xz_plane(theta_a),
            a_prime: BlochDirection::in_xz_plane(theta_a_prime),
            b: BlochDirection::in_xz_plane(theta_b),
            b_prime: BlochDirection::in_xz_plane(theta_b_prime),
        }
    }

    /// `a = z, a' = x, b = (z + x)/√2, b' = (z - x)/√2`; optimal for the singlet up to sign.
    pub fn textbook() -> Self {
        Self::planar(0.0, PI / 2.0, PI / 4.0, -PI / 4.0)
    }
}

/// `n_x σx + n_y σy + n_z σz`.
pub fn spin_observable(n: &BlochDirection) -> HermitianOperator {
    let (sx, sy, sz) = (pauli(Axis::X), pauli(Axis::Y), pauli(Axis::Z));
    HermitianOperator::linear_combination(&[(n.x, &sx), (n.y, &sy), (n.z, &sz)]).expect("2x2 Paulis")
}

/// `tr(rho (a·σ) ⊗ (b·σ))` for a two-qubit state.
pub fn correlation(rho: &DensityOperator, a: &BlochDirection, b: &BlochDirection) -> Result<f64> {
    require_two_qubits(rho)?;
    let obs = spin_observable(a).kron(&spin_observable(b))?;
    expectation(rho, &obs)
}

pub fn chsh_value(rho: &DensityOperator, s: &ChshSettings) -> Result<f64> {
    Ok(chsh_combination(
        correlation(rho, &s.a, &s.b)?,
        correlation(rho, &s.a, &s.b_prime)?,
        correlation(rho, &s.a_prime, &s.b)?,
        correlation(rho, &s.a_prime, &s.b_prime)?,
    ))
}

/// CHSH value with every correlation computed through the model integral instead of the trace.
pub fn chsh_from_lhv(model: &LhvModel, s: &ChshSettings) -> Result<f64> {
    if model.site_dims() != (2, 2) {
        let (d1, d2) = model.site_dims();
        return Err(Error::InvalidArgument(format!(
            "CHSH needs a two-qubit model, got site dimensions {d1}x{d2}"
        )));
    }
    let e = |a: &BlochDirection, b: &BlochDirection| model.integrate(&spin_observable(a), &spin_observable(b));
    Ok(chsh_combination(
        e(&s.a, &s.b)?,
        e(&s.a, &s.b_prime)?,
        e(&s.a_prime, &s.b)?,
        e(&s.a_prime, &s.b_prime)?,
    ))
}

#[inline]
fn chsh_combination(ab: f64, ab_p: f64, a_pb: f64, a_pb_p: f64) -> f64 {
    ab + ab_p + a_pb - a_pb_p
}

fn require_two_qubits(rho: &DensityOperator) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            left: 4,
            right: rho.dim(),
        });
    }
    Ok(())
}

/// Which directions the setting search may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchSpace {
    /// All four directions in the x-z plane; one angle each.
    #[default]
    Planar,
    /// Full Bloch sphere; polar and azimuthal angle per direction.
    FullSphere,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSearch {
    pub grid_steps: usize,
    pub refine_iters: usize,
    pub space: SearchSpace,
}

impl ChshSearch {
    pub fn planar(grid_steps: usize, refine_iters: usize) -> Self {
        Self {
            grid_steps,
            refine_iters,
            space: SearchSpace::Planar,
        }
    }
}

/// Best setting found by [`maximize_chsh`].
///
/// `settings` are sign-normalized so that `chsh_value(rho, settings) == value >= 0`.
/// `angles` holds `θa, θa', θb, θb'` for planar searches and
/// `θa, φa, θa', φa', θb, φb, θb', φb'` for full-sphere searches.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChshOptimum {
    pub settings: ChshSettings,
    pub angles: Vec<f64>,
    pub value: f64,
    pub space: SearchSpace,
}

/// One row of a planar grid scan: for each grid pair `(θa, θa')`, the best `(θb, θb')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub theta_a: f64,
    pub theta_a_prime: f64,
    pub theta_b: f64,
    pub theta_b_prime: f64,
    pub chsh_value: f64,
}

pub fn maximize_chsh(rho: &DensityOperator, grid_steps: usize, refine_iters: usize) -> Result<ChshOptimum> {
    maximize_chsh_with(rho, &ChshSearch::planar(grid_steps, refine_iters))
}

/// Coarse grid search followed by deterministic coordinate-wise refinement.
///
/// The objective is `|S|`. The refinement is a compass search: each sweep
/// tries `±step` on every angle in turn, accepting the first improvement;
/// a sweep without improvement halves the step.
pub fn maximize_chsh_with(rho: &DensityOperator, search: &ChshSearch) -> Result<ChshOptimum> {
    require_two_qubits(rho)?;
    if search.grid_steps < 4 {
        return Err(Error::InvalidArgument(format!(
            "grid_steps must be at least 4, got {}",
            search.grid_steps
        )));
    }
    let n = search.grid_steps;

    let start: Vec<f64> = match search.space {
        SearchSpace::Planar => {
            let (idx, _) = best_on_grid(rho, n, Plane::Xz)?;
            idx.iter().map(|&i| grid_angle(i, n)).collect()
        }
        SearchSpace::FullSphere => {
            let mut best: Option<(Vec<f64>, f64)> = None;
            for plane in [Plane::Xz, Plane::Yz, Plane::Xy] {
                let (idx, value) = best_on_grid(rho, n, plane)?;
                if best.as_ref().is_none_or(|(_, v)| value.abs() > v.abs()) {
                    let sph = idx
                        .iter()
                        .flat_map(|&i| {
                            let (t, p) = plane.spherical(grid_angle(i, n));
                            [t, p]
                        })
                        .collect();
                    best = Some((sph, value));
                }
            }
            best.expect("three planes scanned").0
        }
    };

    let objective = |p: &[f64]| -> Result<f64> { Ok(chsh_value(rho, &settings_from(search.space, p))?.abs()) };
    let mut params = start;
    let mut best = objective(&params)?;
    let mut step = PI / n as f64;
    for _ in 0..search.refine_iters {
        let mut improved = false;
        for c in 0..params.len() {
            for dir in [1.0, -1.0] {
                let mut trial = params.clone();
                trial[c] += dir * step;
                let v = objective(&trial)?;
                if v > best {
                    best = v;
                    params = trial;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    let mut settings = settings_from(search.space, &params);
    if chsh_value(rho, &settings)? < 0.0 {
        // negating a and a' flips the sign of every term
        settings.a = settings.a.negated();
        settings.a_prime = settings.a_prime.negated();
        match search.space {
            SearchSpace::Planar => {
                params[0] += PI;
                params[1] += PI;
            }
            SearchSpace::FullSphere => {
                for k in [0, 2] {
                    params[k] = PI - params[k];
                    params[k + 1] += PI;
                }
            }
        }
    }
    let angles = params.iter().map(|t| t.rem_euclid(2.0 * PI)).collect();
    Ok(ChshOptimum {
        value: chsh_value(rho, &settings)?,
        settings,
        angles,
        space: search.space,
    })
}

/// Planar grid scan in the x-z plane: one row per `(θa, θa')` pair.
pub fn scan_planar(rho: &DensityOperator, grid_steps: usize) -> Result<Vec<ScanRow>> {
    require_two_qubits(rho)?;
    if grid_steps < 4 {
        return Err(Error::InvalidArgument(format!(
            "grid_steps must be at least 4, got {grid_steps}"
        )));
    }
    let n = grid_steps;
    let table = correlation_table(rho, n, Plane::Xz)?;
    let mut rows = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let (k, l, value) = best_b_pair(&table, i, j);
            rows.push(ScanRow {
                theta_a: grid_angle(i, n),
                theta_a_prime: grid_angle(j, n),
                theta_b: grid_angle(k, n),
                theta_b_prime: grid_angle(l, n),
                chsh_value: value,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy)]
enum Plane {
    Xz,
    Yz,
    Xy,
}

impl Plane {
    /// Spherical `(θ, φ)` of the in-plane direction at angle `t`.
    fn spherical(self, t: f64) -> (f64, f64) {
        match self {
            Plane::Xz => (t, 0.0),
            Plane::Yz => (t, PI / 2.0),
            Plane::Xy => (PI / 2.0, t),
        }
    }

    fn direction(self, t: f64) -> BlochDirection {
        let (theta, phi) = self.spherical(t);
        BlochDirection::from_spherical(theta, phi)
    }
}

fn grid_angle(i: usize, n: usize) -> f64 {
    2.0 * PI * i as f64 / n as f64
}

fn settings_from(space: SearchSpace, p: &[f64]) -> ChshSettings {
    match space {
        SearchSpace::Planar => ChshSettings::planar(p[0], p[1], p[2], p[3]),
        SearchSpace::FullSphere => ChshSettings {
            a: BlochDirection::from_spherical(p[0], p[1]),
            a_prime: BlochDirection::from_spherical(p[2], p[3]),
            b: BlochDirection::from_spherical(p[4], p[5]),
            b_prime: BlochDirection::from_spherical(p[6], p[7]),
        },
    }
}

/// `table[i][j] = E(d_i, d_j)` over the grid directions of one plane.
fn correlation_table(rho: &DensityOperator, n: usize, plane: Plane) -> Result<Vec<Vec<f64>>> {
    let dirs: Vec<BlochDirection> = (0..n).map(|i| plane.direction(grid_angle(i, n))).collect();
    dirs.iter()
        .map(|a| dirs.iter().map(|b| correlation(rho, a, b)).collect())
        .collect()
}

fn best_b_pair(table: &[Vec<f64>], i: usize, j: usize) -> (usize, usize, f64) {
    let n = table.len();
    let mut best = (
        0,
        0,
        chsh_combination(table[i][0], table[i][0], table[j][0], table[j][0]),
    );
    for k in 0..n {
        for l in 0..n {
            let v = chsh_combination(table[i][k], table[i][l], table[j][k], table[j][l]);
            if v.abs() > best.2.abs() {
                best = (k, l, v);
            }
        }
    }
    best
}

fn best_on_grid(rho: &DensityOperator, n: usize, plane: Plane) -> Result<([usize; 4], f64)> {
    let table = correlation_table(rho, n, plane)?;
    let mut best = ([0usize; 4], f64::NEG_INFINITY);
    for i in 0..n {
        for j in 0..n {
            let (k, l, v) = best_b_pair(&table, i, j);
            if v.abs() > best.1.abs() || best.1 == f64::NEG_INFINITY {
                best = ([i, j, k, l], v);
            }
        }
    }
    Ok(best)
}

/// `(|01> - |10>)/√2`.
pub fn singlet() -> DensityOperator {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [
        Complex64::default(),
        Complex64::new(s, 0.0),
        Complex64::new(-s, 0.0),
        Complex64::default(),
    ];
    DensityOperator::pure(&psi).expect("normalized singlet")
}

/// Two-qubit state presets understood by the CLI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StatePreset {
    /// `U(alpha, 1 - alpha)`.
    U(f64),
    Singlet,
    /// `I / 4`.
    Mixed,
}

impl StatePreset {
    pub fn density(&self) -> Result<DensityOperator> {
        match self {
            StatePreset::U(alpha) => {
                let u = UFamilyState::from_alpha(*alpha)?;
                crate::lhv::build_u_state(u.alpha, u.beta)
            }
            StatePreset::Singlet => Ok(singlet()),
            StatePreset::Mixed => DensityOperator::maximally_mixed(4),
        }
    }

    /// A separable decomposition when one is known; `None` for the singlet.
    pub fn decomposition(&self) -> Result<Option<SeparableDecomposition>> {
        match self {
            StatePreset::U(alpha) => Ok(Some(SeparableDecomposition::u_family(UFamilyState::from_alpha(
                *alpha,
            )?)?)),
            StatePreset::Singlet => Ok(None),
            StatePreset::Mixed => {
                let basis = |i: usize| DensityOperator::new(ComplexMatrix::from_diagonal(&[(1 - i) as f64, i as f64])?);
                let labels = ["++", "+-", "-+", "--"];
                let mut comps = Vec::with_capacity(4);
                for (k, label) in labels.iter().enumerate() {
                    comps.push(ProductComponent {
                        label: (*label).into(),
                        weight: 0.25,
                        site1: basis(k / 2)?,
                        site2: basis(k % 2)?,
                    });
                }
                Ok(Some(SeparableDecomposition::new(comps)?))
            }
        }
    }
}

impl FromStr for StatePreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "singlet" => Ok(StatePreset::Singlet),
            "mixed" => Ok(StatePreset::Mixed),
            _ => {
                let alpha = s
                    .strip_prefix("u:")
                    .and_then(|a| a.parse::<f64>().ok())
                    .ok_or_else(|| {
                        Error::InvalidArgument(format!("unknown state '{s}' (expected u:<alpha>, singlet or mixed)"))
                    })?;
                UFamilyState::from_alpha(alpha)?;
                Ok(StatePreset::U(alpha))
            }
        }
    }
}

impl fmt::Display for StatePreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatePreset::U(a) => write!(f, "u:{a}"),
            StatePreset::Singlet => f.write_str("singlet"),
            StatePreset::Mixed => f.write_str("mixed"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lhv::{build_u_state, lhv_from_separable};
    use crate::operator::spectrum_bounds;
    use crate::random::{random_direction, seeded};

    #[test]
    fn spin_observable_axes() {
        assert_eq!(spin_observable(&BlochDirection::z_axis()), pauli(Axis::Z));
        assert_eq!(spin_observable(&BlochDirection::x_axis()), pauli(Axis::X));
        let mut rng = seeded(5);
        for _ in 0..20 {
            let b = spectrum_bounds(&spin_observable(&random_direction(&mut rng))).unwrap();
            assert!((b.infimum + 1.0).abs() < 1e-12 && (b.supremum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn direction_validation() {
        assert!(BlochDirection::new(1.0, 1.0, 0.0).is_err());
        assert!(BlochDirection::new(0.6, 0.0, 0.8).is_ok());
        assert!(BlochDirection::normalized(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn correlation_examples() {
        let z = BlochDirection::z_axis();
        let x = BlochDirection::x_axis();
        for alpha in [0.0, 0.3, 1.0] {
            let u = build_u_state(alpha, 1.0 - alpha).unwrap();
            assert!((correlation(&u, &z, &z).unwrap() - 1.0).abs() < 1e-15);
        }
        let half = build_u_state(0.5, 0.5).unwrap();
        assert_eq!(correlation(&half, &x, &x).unwrap(), 0.0);

        let singlet = singlet();
        let mut rng = seeded(10);
        for _ in 0..10 {
            let n = random_direction(&mut rng);
            assert!((correlation(&singlet, &n, &n).unwrap() + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn correlation_needs_two_qubits() {
        let rho = DensityOperator::maximally_mixed(2).unwrap();
        let z = BlochDirection::z_axis();
        assert!(matches!(
            correlation(&rho, &z, &z),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn equal_settings_collapse() {
        let mut rng = seeded(2);
        let rho = singlet();
        for _ in 0..5 {
            let n = random_direction(&mut rng);
            let s = ChshSettings {
                a: n,
                a_prime: n,
                b: n,
                b_prime: n,
            };
            let v = chsh_value(&rho, &s).unwrap();
            assert!((v - 2.0 * correlation(&rho, &n, &n).unwrap()).abs() < 1e-12);
            assert!(v.abs() <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn singlet_textbook_value() {
        let v = chsh_value(&singlet(), &ChshSettings::textbook()).unwrap();
        assert!((v.abs() - 2.0 * 2f64.sqrt()).abs() < 1e-12, "{v}");
    }

    #[test]
    fn maximize_examples() {
        for alpha in [0.0, 0.3, 1.0] {
            let opt = maximize_chsh(&build_u_state(alpha, 1.0 - alpha).unwrap(), 24, 20).unwrap();
            assert!(opt.value <= 2.0 + 1e-9, "{opt:?}");
        }
        let opt = maximize_chsh(&singlet(), 24, 50).unwrap();
        assert!(opt.value >= 2.82, "{opt:?}");
        assert!((chsh_value(&singlet(), &opt.settings).unwrap() - opt.value).abs() < 1e-15);
        let opt = maximize_chsh(&DensityOperator::maximally_mixed(4).unwrap(), 24, 10).unwrap();
        assert!(opt.value.abs() <= 1e-9);
    }

    #[test]
    fn maximize_is_deterministic() {
        let a = maximize_chsh(&singlet(), 12, 30).unwrap();
        let b = maximize_chsh(&singlet(), 12, 30).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn maximize_rejects_small_grid() {
        assert!(maximize_chsh(&singlet(), 3, 0).is_err());
    }

    #[test]
    fn full_sphere_finds_out_of_plane_optimum() {
        // (|00> + i|11>)/√2: E(x,y) = E(y,x) = E(z,z) = 1 and E(x,x) = 0, so the
        // x-z plane only reaches 2 while the x-y plane reaches 2√2.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [
            Complex64::new(s, 0.0),
            Complex64::default(),
            Complex64::default(),
            Complex64::new(0.0, s),
        ];
        let rho = DensityOperator::pure(&psi).unwrap();
        let search = ChshSearch {
            grid_steps: 16,
            refine_iters: 40,
            space: SearchSpace::FullSphere,
        };
        let opt = maximize_chsh_with(&rho, &search).unwrap();
        assert!(opt.value >= 2.82, "{opt:?}");
        assert_eq!(opt.angles.len(), 8);
    }

    #[test]
    fn lhv_chsh_matches_trace() {
        let model =
            lhv_from_separable(&SeparableDecomposition::u_family(UFamilyState::from_alpha(0.3).unwrap()).unwrap())
                .unwrap();
        let s = ChshSettings::textbook();
        let lhs = chsh_from_lhv(&model, &s).unwrap();
        let rhs = chsh_value(model.target_state(), &s).unwrap();
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn scan_has_one_row_per_pair() {
        let rows = scan_planar(&singlet(), 8).unwrap();
        assert_eq!(rows.len(), 64);
        let best = rows.iter().map(|r| r.chsh_value.abs()).fold(0.0, f64::max);
        assert!((best - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn preset_parsing() {
        assert_eq!("u:0.3".parse::<StatePreset>().unwrap(), StatePreset::U(0.3));
        assert_eq!("singlet".parse::<StatePreset>().unwrap(), StatePreset::Singlet);
        assert_eq!("mixed".parse::<StatePreset>().unwrap(), StatePreset::Mixed);
        assert!("u:1.5".parse::<StatePreset>().is_err());
        assert!("bell".parse::<StatePreset>().is_err());
        let mixed = StatePreset::Mixed;
        assert_eq!(
            mixed.decomposition().unwrap().unwrap().state(),
            &DensityOperator::maximally_mixed(4).unwrap()
        );
    }
}
