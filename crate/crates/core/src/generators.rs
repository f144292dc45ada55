//! Dissipation generators on the simplex.
//!
//! A [`GeneratorMatrix`] `B` has vanishing column sums and nonpositive
//! off-diagonal entries, so `exp(−tB)` is column-stochastic for `t ≥ 0`.
//! The constructors here cover the tridiagonal ladder family, its
//! zero-temperature member, the thermal generator relaxing into a Gibbs
//! vector, and block-diagonal lifts for chains of qudits.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::simplex::SimplexVector;

/// Dimension cap applied to [`b0_local_lift`].
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

/// Relative pivot threshold used by [`fixed_point`].
pub const NULL_SPACE_REL_TOL: f64 = 1e-10;

const GENERATOR_TOL: f64 = 1e-12;

/// Infinitesimal generator of a stochastic semigroup on the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    matrix: DMatrix<f64>,
}

impl GeneratorMatrix {
    /// Checks the column-sum and off-diagonal sign conditions. The tolerance
    /// is `1e-12` scaled by the largest entry magnitude when that exceeds one.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidGenerator(format!(
                "expected a nonempty square matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGenerator("non-finite entry".into()));
        }
        let scale = matrix.amax().max(1.0);
        let tol = GENERATOR_TOL * scale;
        for (j, col) in matrix.column_iter().enumerate() {
            let s: f64 = col.iter().sum();
            if s.abs() > tol {
                return Err(Error::InvalidGenerator(format!(
                    "column {} sums to {s:e}",
                    j + 1
                )));
            }
            for (i, &v) in col.iter().enumerate() {
                if i != j && v > tol {
                    return Err(Error::InvalidGenerator(format!(
                        "off-diagonal entry ({}, {}) = {v:e} is positive",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    /// Induced ℓ₁ operator norm (maximum absolute column sum).
    pub fn norm1(&self) -> f64 {
        linalg::norm1(&self.matrix)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(x))
            .iter()
            .copied()
            .collect()
    }

    /// Returns the rates `c_1, …, c_{n−1}` if `B` has the upper-bidiagonal
    /// zero-temperature shape: zero first column, `B[i][i] = c_i > 0` and
    /// `B[i−1][i] = −c_i`, all other entries zero.
    pub fn bidiagonal_rates(&self) -> Option<Vec<f64>> {
        let n = self.dim();
        let m = &self.matrix;
        let tol = GENERATOR_TOL * m.amax().max(1.0);
        let mut rates = Vec::with_capacity(n.saturating_sub(1));
        for j in 0..n {
            for i in 0..n {
                let v = m[(i, j)];
                let expected_nonzero = j > 0 && (i == j || i + 1 == j);
                if !expected_nonzero && v.abs() > tol {
                    return None;
                }
            }
            if j > 0 {
                let c = m[(j, j)];
                if c <= tol || (m[(j - 1, j)] + c).abs() > tol {
                    return None;
                }
                rates.push(c);
            }
        }
        Some(rates)
    }

    fn is_upper_triangular(&self) -> bool {
        let n = self.dim();
        let tol = GENERATOR_TOL * self.matrix.amax().max(1.0);
        (0..n).all(|j| (j + 1..n).all(|i| self.matrix[(i, j)].abs() <= tol))
    }
}

/// Temperature input for [`gibbs_vector`]. The two limits are symbolic to
/// avoid overflow in `exp(−E/T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Temperature {
    Finite(f64),
    ZeroLimit,
    InfiniteLimit,
}

/// Energy levels (nondecreasing) together with a bath temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySpec {
    energies: Vec<f64>,
    temperature: Temperature,
}

impl EnergySpec {
    pub fn new(energies: Vec<f64>, temperature: Temperature) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::DimensionTooSmall { min: 1, actual: 0 });
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidParameter("non-finite energy".into()));
        }
        if energies.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::UnsortedEnergies);
        }
        if let Temperature::Finite(t) = temperature {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::InvalidTemperature(format!(
                    "T must be positive and finite, got {t}"
                )));
            }
        }
        Ok(Self {
            energies,
            temperature,
        })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn temperature(&self) -> Temperature {
        self.temperature
    }
}

/// Boltzmann populations `d_k ∝ exp(−E_k/T)`.
pub fn gibbs_vector(spec: &EnergySpec) -> Result<SimplexVector> {
    let e = spec.energies();
    let n = e.len();
    match spec.temperature() {
        Temperature::InfiniteLimit => SimplexVector::uniform(n),
        Temperature::ZeroLimit => {
            if n >= 2 && e[1] == e[0] {
                return Err(Error::AmbiguousGroundState);
            }
            SimplexVector::vertex(n, 0)
        }
        Temperature::Finite(t) => {
            let e0 = e[0];
            let w: Vec<f64> = e.iter().map(|ek| (-(ek - e0) / t).exp()).collect();
            SimplexVector::normalized(w)
        }
    }
}

/// Gibbs vector with constant neighbour ratio `α ∈ (0, 1)`:
/// `d = (1−α)/(1−αⁿ)·(1, α, …, α^{n−1})`.
pub fn equidistant_gibbs(alpha: f64, n: usize) -> Result<SimplexVector> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if n == 0 {
        return Err(Error::DimensionTooSmall { min: 1, actual: 0 });
    }
    let norm = (1.0 - alpha) / (1.0 - alpha.powi(n as i32));
    let entries: Vec<f64> = (0..n).map(|k| norm * alpha.powi(k as i32)).collect();
    SimplexVector::normalized(entries)
}

/// Thermal ladder model relaxing into a strictly positive `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalModel {
    d: SimplexVector,
    thetas: Vec<f64>,
    couplings: Vec<f64>,
}

impl ThermalModel {
    pub fn dim(&self) -> usize {
        self.d.dim()
    }

    pub fn fixed_point(&self) -> &SimplexVector {
        &self.d
    }

    /// Angles `θ_k = arccos((1 + d_{k+1}/d_k)^{−1/2})`.
    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Spin-ladder weights `√(k(n−k))`.
    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    /// Raising weights `√(k(n−k))·cos θ_k`.
    pub fn raising_weights(&self) -> Vec<f64> {
        self.couplings
            .iter()
            .zip(&self.thetas)
            .map(|(w, th)| w * th.cos())
            .collect()
    }

    /// Lowering weights `√(k(n−k))·sin θ_k`.
    pub fn lowering_weights(&self) -> Vec<f64> {
        self.couplings
            .iter()
            .zip(&self.thetas)
            .map(|(w, th)| w * th.sin())
            .collect()
    }

    /// Whether `d` is nonincreasing, i.e. no population inversion between
    /// neighbouring levels.
    pub fn is_physically_ordered(&self) -> bool {
        self.d.as_slice().windows(2).all(|w| w[0] >= w[1])
    }
}

/// Builds the thermal model whose generator relaxes into `d`.
pub fn thermal_model(d: &SimplexVector) -> Result<ThermalModel> {
    let n = d.dim();
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, actual: n });
    }
    if let Some((index, &value)) = d.as_slice().iter().enumerate().find(|(_, v)| **v <= 0.0) {
        return Err(Error::NonPositiveFixedPoint {
            index: index + 1,
            value,
        });
    }
    let x = d.as_slice();
    let thetas = (0..n - 1)
        .map(|k| thermal_angle(x[k + 1] / x[k]))
        .collect();
    Ok(ThermalModel {
        d: d.clone(),
        thetas,
        couplings: spin_couplings(n),
    })
}

/// `√(k(n−k))` for `k = 1, …, n−1`.
pub fn spin_couplings(n: usize) -> Vec<f64> {
    (1..n).map(|k| ((k * (n - k)) as f64).sqrt()).collect()
}

/// Tridiagonal generator `Σ_j a_j²(e_{j+1}−e_j)e_{j+1}ᵀ + b_j²(e_j−e_{j+1})e_jᵀ`.
pub fn b0_from_ladder_weights(a: &[f64], b: &[f64]) -> Result<GeneratorMatrix> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    let a2: Vec<f64> = a.iter().map(|v| v * v).collect();
    let b2: Vec<f64> = b.iter().map(|v| v * v).collect();
    b0_from_squared_weights(&a2, &b2)
}

/// Same as [`b0_from_ladder_weights`] but taking the squared rates directly.
pub fn b0_from_squared_weights(a2: &[f64], b2: &[f64]) -> Result<GeneratorMatrix> {
    if a2.len() != b2.len() {
        return Err(Error::DimensionMismatch {
            expected: a2.len(),
            actual: b2.len(),
        });
    }
    if a2.iter().chain(b2).any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "squared weights must be finite and nonnegative".into(),
        ));
    }
    let n = a2.len() + 1;
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n - 1 {
        // upward jump j+1 → j
        m[(j + 1, j + 1)] += a2[j];
        m[(j, j + 1)] -= a2[j];
        // downward jump j → j+1
        m[(j, j)] += b2[j];
        m[(j + 1, j)] -= b2[j];
    }
    GeneratorMatrix::new(m)
}

/// `Σ_j j(n−j)(e_{j+1}−e_j)e_{j+1}ᵀ`: the generator of a bath at zero
/// temperature.
pub fn b0_zero_temperature(n: usize) -> Result<GeneratorMatrix> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, actual: n });
    }
    let a2: Vec<f64> = (1..n).map(|j| (j * (n - j)) as f64).collect();
    b0_from_squared_weights(&a2, &vec![0.0; n - 1])
}

/// Thermal generator with rates `a_k² = k(n−k)·d_k/(d_k+d_{k+1})` and
/// `b_k² = k(n−k)·d_{k+1}/(d_k+d_{k+1})`; its kernel contains `d`.
pub fn b0_thermal(model: &ThermalModel) -> Result<GeneratorMatrix> {
    let n = model.dim();
    let d = model.fixed_point().as_slice();
    let mut a2 = Vec::with_capacity(n - 1);
    let mut b2 = Vec::with_capacity(n - 1);
    for k in 0..n - 1 {
        let w = ((k + 1) * (n - k - 1)) as f64;
        let s = d[k] + d[k + 1];
        a2.push(w * d[k] / s);
        b2.push(w * d[k + 1] / s);
    }
    b0_from_squared_weights(&a2, &b2)
}

/// Block-diagonal generator with `copies` copies of `core`, i.e. the
/// restriction for noise acting on the last qudit of a chain.
pub fn b0_local_lift(core: &GeneratorMatrix, copies: usize) -> Result<GeneratorMatrix> {
    b0_local_lift_capped(core, copies, DEFAULT_DIMENSION_CAP)
}

pub fn b0_local_lift_capped(
    core: &GeneratorMatrix,
    copies: usize,
    cap: usize,
) -> Result<GeneratorMatrix> {
    if copies == 0 {
        return Err(Error::InvalidParameter("copies must be at least 1".into()));
    }
    let n = core.dim();
    let total = n
        .checked_mul(copies)
        .filter(|t| *t <= cap)
        .ok_or(Error::DimensionCap {
            requested: n.saturating_mul(copies),
            cap,
        })?;
    let mut m = DMatrix::zeros(total, total);
    for c in 0..copies {
        m.view_mut((c * n, c * n), (n, n)).copy_from(core.matrix());
    }
    Ok(GeneratorMatrix { matrix: m })
}

/// The unique fixed point in the simplex of the semigroup `exp(−tB)`.
///
/// Zero-temperature (upper-triangular) generators relax into `e_1` and are
/// handled directly. Otherwise `B` must be irreducible, and the kernel is
/// computed by a column-pivoted QR with threshold
/// [`NULL_SPACE_REL_TOL`]`·‖B‖`.
pub fn fixed_point(b: &GeneratorMatrix) -> Result<SimplexVector> {
    let n = b.dim();
    if n == 1 {
        return SimplexVector::vertex(1, 0);
    }
    if b.is_upper_triangular() {
        let tol = GENERATOR_TOL * b.matrix.amax().max(1.0);
        if (1..n).all(|i| b.matrix[(i, i)] > tol) {
            return SimplexVector::vertex(n, 0);
        }
        return Err(Error::Reducible);
    }
    let tol = GENERATOR_TOL * b.matrix.amax().max(1.0);
    if !linalg::strongly_connected(&b.matrix, tol) {
        return Err(Error::Reducible);
    }
    let v = linalg::null_vector(&b.matrix, NULL_SPACE_REL_TOL)?;
    let s: f64 = v.iter().sum();
    if s == 0.0 {
        return Err(Error::NonConvergent("kernel vector has zero mass".into()));
    }
    let entries: Vec<f64> = v.iter().map(|x| x / s).collect();
    if entries.iter().any(|x| *x <= 0.0) {
        return Err(Error::NonConvergent(
            "kernel vector is not strictly positive".into(),
        ));
    }
    SimplexVector::normalized(entries)
}

/// `θ` with `cos²θ = 1/(1 + ratio)`, where `ratio = d_{k+1}/d_k`.
pub fn thermal_angle(ratio: f64) -> f64 {
    (1.0 + ratio).powf(-0.5).acos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn mat(n: usize, rows: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(n, n, rows)
    }

    fn max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).amax()
    }

    #[test]
    fn ladder_weights_examples() {
        let b = b0_from_ladder_weights(&[1.0], &[0.0]).unwrap();
        assert_eq!(b.matrix(), &mat(2, &[0.0, -1.0, 0.0, 1.0]));
        let z = b0_from_ladder_weights(&[0.0, 0.0], &[0.0, 0.0]).unwrap();
        assert_eq!(z.matrix(), &DMatrix::zeros(3, 3));
        let s = 2f64.sqrt();
        let b = b0_from_ladder_weights(&[s, s], &[0.0, 0.0]).unwrap();
        let want = mat(3, &[0.0, -2.0, 0.0, 0.0, 2.0, -2.0, 0.0, 0.0, 2.0]);
        assert!(max_diff(b.matrix(), &want) < 1e-15);
        assert!(b0_from_ladder_weights(&[1.0], &[]).is_err());
    }

    #[test]
    fn ladder_matrix_matches_displayed_tridiagonal() {
        let (a, b) = ([0.7, 1.3, 0.4], [0.2, 0.9, 1.1]);
        let g = b0_from_ladder_weights(&a, &b).unwrap();
        let m = g.matrix();
        assert!((m[(0, 0)] - b[0] * b[0]).abs() < 1e-15);
        assert!((m[(0, 1)] + a[0] * a[0]).abs() < 1e-15);
        assert!((m[(1, 0)] + b[0] * b[0]).abs() < 1e-15);
        assert!((m[(1, 1)] - (a[0] * a[0] + b[1] * b[1])).abs() < 1e-15);
        assert!((m[(2, 1)] + b[1] * b[1]).abs() < 1e-15);
        assert!((m[(3, 3)] - a[2] * a[2]).abs() < 1e-15);
    }

    #[test]
    fn zero_temperature_rates() {
        assert_eq!(b0_zero_temperature(2).unwrap().bidiagonal_rates().unwrap(), vec![1.0]);
        assert_eq!(b0_zero_temperature(3).unwrap().bidiagonal_rates().unwrap(), vec![2.0, 2.0]);
        assert_eq!(
            b0_zero_temperature(4).unwrap().bidiagonal_rates().unwrap(),
            vec![3.0, 4.0, 3.0]
        );
        assert!(b0_zero_temperature(1).is_err());
    }

    #[test]
    fn generator_validation() {
        assert!(GeneratorMatrix::new(mat(2, &[1.0, -1.0, -1.0, 1.0])).is_ok());
        assert!(GeneratorMatrix::new(mat(2, &[1.0, 1.0, -1.0, -1.0])).is_err());
        assert!(GeneratorMatrix::new(mat(2, &[1.0, 0.0, -0.5, 0.0])).is_err());
    }

    #[test]
    fn gibbs_examples() {
        let spec = EnergySpec::new(vec![0.0, 1.0, 2.0], Temperature::Finite(1.0)).unwrap();
        let d = gibbs_vector(&spec).unwrap();
        let z = 1.0 + (-1f64).exp() + (-2f64).exp();
        let want = [1.0 / z, (-1f64).exp() / z, (-2f64).exp() / z];
        for (a, b) in d.as_slice().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }

        let spec = EnergySpec::new(vec![0.0, 0.64, 1.28], Temperature::Finite(1.0)).unwrap();
        let d = gibbs_vector(&spec).unwrap();
        for (a, b) in d.as_slice().iter().zip([0.5539, 0.2921, 0.1540]) {
            assert!((a - b).abs() < 5e-5, "{a} vs {b}");
        }

        let spec = EnergySpec::new(vec![0.0, 0.25, 4.25], Temperature::Finite(1.0)).unwrap();
        let d = gibbs_vector(&spec).unwrap();
        #[allow(clippy::approx_constant)]
        for (a, b) in d.as_slice().iter().zip([0.5577, 0.4343, 0.0080]) {
            assert!((a - b).abs() < 5e-5, "{a} vs {b}");
        }
    }

    #[test]
    fn gibbs_limits_and_errors() {
        let e = vec![0.0, 1.0, 3.0, 7.0];
        let inf = gibbs_vector(&EnergySpec::new(e.clone(), Temperature::InfiniteLimit).unwrap());
        assert_eq!(inf.unwrap(), SimplexVector::uniform(4).unwrap());
        let zero = gibbs_vector(&EnergySpec::new(e.clone(), Temperature::ZeroLimit).unwrap());
        assert_eq!(zero.unwrap(), SimplexVector::vertex(4, 0).unwrap());
        let tie = EnergySpec::new(vec![0.0, 0.0, 1.0], Temperature::ZeroLimit).unwrap();
        assert_eq!(gibbs_vector(&tie), Err(Error::AmbiguousGroundState));
        assert!(EnergySpec::new(e.clone(), Temperature::Finite(0.0)).is_err());
        assert!(EnergySpec::new(e.clone(), Temperature::Finite(-1.0)).is_err());
        assert_eq!(
            EnergySpec::new(vec![1.0, 0.0], Temperature::Finite(1.0)),
            Err(Error::UnsortedEnergies)
        );
        // large energies must not underflow to an all-zero vector
        let spec = EnergySpec::new(vec![1e4, 1e4 + 1.0], Temperature::Finite(1e-3)).unwrap();
        assert!(gibbs_vector(&spec).is_ok());
    }

    #[test]
    fn equidistant_normalization() {
        let d = equidistant_gibbs(0.5, 3).unwrap();
        for (a, b) in d.as_slice().iter().zip([4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(equidistant_gibbs(1.0, 3).is_err());
        assert!(equidistant_gibbs(0.0, 3).is_err());
    }

    #[test]
    fn thermal_angles() {
        for n in 2..7 {
            let m = thermal_model(&SimplexVector::uniform(n).unwrap()).unwrap();
            assert!(m.thetas().iter().all(|t| (t - FRAC_PI_4).abs() < 1e-15));
            let a = m.raising_weights();
            let b = m.lowering_weights();
            for k in 0..n - 1 {
                let w = (((k + 1) * (n - k - 1)) as f64 / 2.0).sqrt();
                assert!((a[k] - w).abs() < 1e-14 && (b[k] - w).abs() < 1e-14);
            }
        }
        let alpha: f64 = 0.3;
        let m = thermal_model(&equidistant_gibbs(alpha, 5).unwrap()).unwrap();
        let want = (1.0 + alpha).powf(-0.5).acos();
        assert!(m.thetas().iter().all(|t| (t - want).abs() < 1e-14));

        let d = SimplexVector::new(vec![2.0 / 3.0, 1.0 / 3.0]).unwrap();
        let m = thermal_model(&d).unwrap();
        assert!((m.thetas()[0] - (2f64 / 3.0).sqrt().acos()).abs() < 1e-15);

        for (a, b) in m.raising_weights().iter().zip(m.lowering_weights()) {
            assert!((a * a + b * b - 1.0).abs() < 1e-15);
        }
        assert!(thermal_model(&SimplexVector::vertex(3, 0).unwrap()).is_err());
    }

    #[test]
    fn physical_ordering_flag() {
        let ordered = thermal_model(&SimplexVector::new(vec![0.5, 0.3, 0.2]).unwrap()).unwrap();
        assert!(ordered.is_physically_ordered());
        let inverted = thermal_model(&SimplexVector::new(vec![0.2, 0.3, 0.5]).unwrap()).unwrap();
        assert!(!inverted.is_physically_ordered());
    }

    #[test]
    fn thermal_generator_annihilates_d() {
        let d = SimplexVector::new(vec![0.4, 0.25, 0.2, 0.1, 0.05]).unwrap();
        let b = b0_thermal(&thermal_model(&d).unwrap()).unwrap();
        let r: f64 = b.apply(d.as_slice()).iter().map(|v| v.abs()).sum();
        assert!(r <= 1e-12);

        let u = b0_thermal(&thermal_model(&SimplexVector::uniform(2).unwrap()).unwrap()).unwrap();
        assert!(max_diff(u.matrix(), &mat(2, &[0.5, -0.5, -0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn thermal_generator_equidistant_closed_form() {
        let alpha = 0.35;
        let n = 3;
        let b = b0_thermal(&thermal_model(&equidistant_gibbs(alpha, n).unwrap()).unwrap()).unwrap();
        let c1 = 2.0 / (1.0 + alpha);
        assert!((b.matrix()[(0, 0)] - c1 * alpha).abs() < 1e-14);
        assert!((b.matrix()[(0, 1)] + c1).abs() < 1e-14);
    }

    #[test]
    fn lift_examples() {
        let core = b0_zero_temperature(2).unwrap();
        assert_eq!(b0_local_lift(&core, 1).unwrap(), core);
        let l = b0_local_lift(&core, 2).unwrap();
        assert_eq!(l.dim(), 4);
        assert_eq!(l.matrix().view((2, 2), (2, 2)), core.matrix().view((0, 0), (2, 2)));
        assert_eq!(l.matrix()[(0, 2)], 0.0);
        let zero = GeneratorMatrix::new(DMatrix::zeros(3, 3)).unwrap();
        assert_eq!(b0_local_lift(&zero, 4).unwrap().matrix(), &DMatrix::zeros(12, 12));
        assert!(matches!(
            b0_local_lift(&core, 3000),
            Err(Error::DimensionCap { .. })
        ));
        assert!(b0_local_lift(&core, 0).is_err());
    }

    #[test]
    fn fixed_point_cases() {
        let d = SimplexVector::new(vec![0.45, 0.3, 0.15, 0.1]).unwrap();
        let b = b0_thermal(&thermal_model(&d).unwrap()).unwrap();
        let fp = fixed_point(&b).unwrap();
        for (a, b) in fp.as_slice().iter().zip(d.as_slice()) {
            assert!((a - b).abs() < 1e-13);
        }
        assert_eq!(
            fixed_point(&b0_zero_temperature(5).unwrap()).unwrap(),
            SimplexVector::vertex(5, 0).unwrap()
        );
        let zero = GeneratorMatrix::new(DMatrix::zeros(3, 3)).unwrap();
        assert_eq!(fixed_point(&zero), Err(Error::Reducible));
        // two decoupled thermal blocks: reducible
        let core = b0_thermal(&thermal_model(&SimplexVector::uniform(2).unwrap()).unwrap()).unwrap();
        assert_eq!(fixed_point(&b0_local_lift(&core, 2).unwrap()), Err(Error::Reducible));
    }
}
