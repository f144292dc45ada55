//! Full density-matrix GKSL semigroups, used as an independent check of the
//! simplex generators.
//!
//! `Γ(ρ) = Σ_k ½(V_k†V_k ρ + ρ V_k†V_k) − V_k ρ V_k†` and the state evolves
//! as `ρ̇ = −Γ(ρ)`. Propagation integrates this n×n matrix ODE directly
//! rather than exponentiating the n²×n² superoperator.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::generators::{spin_couplings, GeneratorMatrix, ThermalModel};
use crate::ode::{self, OdeOptions};
use crate::simplex::SimplexVector;

pub type CMatrix = DMatrix<Complex64>;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const EIGEN_TOL: f64 = 1e-10;
const DIAGONAL_TOL: f64 = 1e-12;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Hermitian, positive semidefinite, unit-trace complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: CMatrix,
}

impl DensityMatrix {
    pub fn new(rho: CMatrix) -> Result<Self> {
        if !rho.is_square() || rho.nrows() == 0 {
            return Err(Error::NotDensityMatrix("not a nonempty square matrix".into()));
        }
        let herm_err = (&rho - rho.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm_err > HERMITIAN_TOL {
            return Err(Error::NotDensityMatrix(format!(
                "not hermitian (deviation {herm_err:e})"
            )));
        }
        let tr = rho.trace();
        if (tr - c(1.0)).norm() > TRACE_TOL {
            return Err(Error::NotDensityMatrix(format!("trace {tr} differs from 1")));
        }
        let min_eig = min_eigenvalue(&rho);
        if min_eig < -EIGEN_TOL {
            return Err(Error::NotDensityMatrix(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self { rho })
    }

    /// `diag(x)`.
    pub fn diagonal(x: &SimplexVector) -> Self {
        let n = x.dim();
        let mut rho = CMatrix::zeros(n, n);
        for (i, v) in x.as_slice().iter().enumerate() {
            rho[(i, i)] = c(*v);
        }
        Self { rho }
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    /// Real parts of the diagonal.
    pub fn populations(&self) -> Vec<f64> {
        self.rho.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.rho)
    }
}

fn min_eigenvalue(m: &CMatrix) -> f64 {
    let herm = hermitian_part(m);
    SymmetricEigen::new(herm)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5)
}

/// Trace norm `‖ρ − σ‖₁` (sum of absolute eigenvalues of the difference).
pub fn trace_norm_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: sigma.dim(),
        });
    }
    let diff = hermitian_part(&(&rho.rho - &sigma.rho));
    Ok(SymmetricEigen::new(diff)
        .eigenvalues
        .iter()
        .map(|v| v.abs())
        .sum())
}

/// `σ₊ = Σ_k √(k(n−k)) e_k e_{k+1}ᵀ`.
pub fn ladder_plus(n: usize) -> Result<CMatrix> {
    if n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, actual: n });
    }
    Ok(raising(&spin_couplings(n)))
}

/// `σ₋ = σ₊ᵀ`.
pub fn ladder_minus(n: usize) -> Result<CMatrix> {
    Ok(ladder_plus(n)?.transpose())
}

fn raising(weights: &[f64]) -> CMatrix {
    let n = weights.len() + 1;
    let mut m = CMatrix::zeros(n, n);
    for (k, w) in weights.iter().enumerate() {
        m[(k, k + 1)] = c(*w);
    }
    m
}

fn lowering(weights: &[f64]) -> CMatrix {
    let n = weights.len() + 1;
    let mut m = CMatrix::zeros(n, n);
    for (k, w) in weights.iter().enumerate() {
        m[(k + 1, k)] = c(*w);
    }
    m
}

/// A GKSL operator given by its jump operators.
#[derive(Debug, Clone, PartialEq)]
pub struct GkslOperator {
    jump_ops: Vec<CMatrix>,
    // Σ V_k†V_k
    anticommutator: CMatrix,
}

impl GkslOperator {
    pub fn new(jump_ops: Vec<CMatrix>) -> Result<Self> {
        let first = jump_ops
            .first()
            .ok_or_else(|| Error::InvalidParameter("at least one jump operator is required".into()))?;
        let n = first.nrows();
        for v in &jump_ops {
            if !v.is_square() || v.nrows() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: v.nrows().max(v.ncols()),
                });
            }
        }
        let mut anticommutator = CMatrix::zeros(n, n);
        for v in &jump_ops {
            anticommutator += v.adjoint() * v;
        }
        Ok(Self {
            jump_ops,
            anticommutator,
        })
    }

    /// Jump operators `N₊ = Σ a_j e_j e_{j+1}ᵀ` and `N₋ = Σ b_j e_{j+1} e_jᵀ`.
    pub fn ladder_pair(a: &[f64], b: &[f64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                actual: b.len(),
            });
        }
        Self::new(vec![raising(a), lowering(b)])
    }

    /// The single jump operator `σ₊` (bath at zero temperature).
    pub fn zero_temperature(n: usize) -> Result<Self> {
        Self::new(vec![ladder_plus(n)?])
    }

    /// Jump operators `σ₊^d` and `σ₋^d` of a thermal model, built from the
    /// angles `θ_k`.
    pub fn thermal(model: &ThermalModel) -> Result<Self> {
        Self::new(vec![
            raising(&model.raising_weights()),
            lowering(&model.lowering_weights()),
        ])
    }

    /// Replaces each jump operator `V` by `I_copies ⊗ V`.
    pub fn local_lift(&self, copies: usize) -> Result<Self> {
        if copies == 0 {
            return Err(Error::InvalidParameter("copies must be at least 1".into()));
        }
        let n = self.dim();
        let ops = self
            .jump_ops
            .iter()
            .map(|v| {
                let mut m = CMatrix::zeros(n * copies, n * copies);
                for k in 0..copies {
                    m.view_mut((k * n, k * n), (n, n)).copy_from(v);
                }
                m
            })
            .collect();
        Self::new(ops)
    }

    pub fn dim(&self) -> usize {
        self.anticommutator.nrows()
    }

    pub fn jump_ops(&self) -> &[CMatrix] {
        &self.jump_ops
    }

    /// Whether `Σ V_k†V_k` is a multiple of the identity, i.e. the semigroup
    /// is unital.
    pub fn is_unital(&self, tol: f64) -> bool {
        let mut sum = CMatrix::zeros(self.dim(), self.dim());
        for v in &self.jump_ops {
            sum += v * v.adjoint() - v.adjoint() * v;
        }
        sum.iter().all(|z| z.norm() <= tol)
    }

    fn apply_unchecked(&self, y: &CMatrix) -> CMatrix {
        let mut out = (&self.anticommutator * y + y * &self.anticommutator) * c(0.5);
        for v in &self.jump_ops {
            out -= v * y * v.adjoint();
        }
        out
    }
}

/// `Γ(Y)`.
pub fn apply_gksl(g: &GkslOperator, y: &CMatrix) -> Result<CMatrix> {
    if !y.is_square() || y.nrows() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            actual: y.nrows(),
        });
    }
    Ok(g.apply_unchecked(y))
}

/// `exp(−tΓ)ρ₀`, integrated adaptively with tolerances `1e-12`.
pub fn propagate_density(g: &GkslOperator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    propagate_density_with(g, rho0, t, OdeOptions::default())
}

pub fn propagate_density_with(
    g: &GkslOperator,
    rho0: &DensityMatrix,
    t: f64,
    opts: OdeOptions,
) -> Result<DensityMatrix> {
    if rho0.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            actual: rho0.dim(),
        });
    }
    if t < 0.0 || !t.is_finite() {
        return Err(Error::NegativeTime(t));
    }
    let rho = ode::integrate(
        |y: &CMatrix| -g.apply_unchecked(y),
        &rho0.rho,
        t,
        opts,
        |y: &mut CMatrix| *y = hermitian_part(y),
    )?;
    Ok(DensityMatrix { rho })
}

/// Whether `Γ` maps every `diag(e_i)` to a diagonal matrix (up to `1e-12`),
/// which by linearity means diagonal matrices are invariant.
pub fn check_in_condition(g: &GkslOperator) -> bool {
    let n = g.dim();
    (0..n).all(|i| {
        let mut e = CMatrix::zeros(n, n);
        e[(i, i)] = c(1.0);
        let out = g.apply_unchecked(&e);
        (0..n).all(|r| (0..n).all(|s| r == s || out[(r, s)].norm() <= DIAGONAL_TOL))
    })
}

/// The real n×n matrix whose column `i` is the diagonal of `Γ(diag(e_i))`.
pub fn extract_diagonal_restriction(g: &GkslOperator) -> Result<GeneratorMatrix> {
    if !check_in_condition(g) {
        return Err(Error::InvariancePropertyViolated);
    }
    let n = g.dim();
    let mut b = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut e = CMatrix::zeros(n, n);
        e[(i, i)] = c(1.0);
        let out = g.apply_unchecked(&e);
        for r in 0..n {
            b[(r, i)] = out[(r, r)].re;
        }
    }
    GeneratorMatrix::new(b)
}
