//! The semigroup action `x ↦ exp(−tB)x`, the closed-form flow of
//! upper-bidiagonal generators, and the hybrid simulator that interleaves
//! dwell segments with permutation impulses.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::GeneratorMatrix;
use crate::linalg;
use crate::simplex::{l1, Permutation, SimplexVector};

/// `exp(−tB)x`.
pub fn evolve(b: &GeneratorMatrix, x: &SimplexVector, t: f64) -> Result<SimplexVector> {
    check_dims(b, x)?;
    if t < 0.0 || !t.is_finite() {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(x.clone());
    }
    let e = propagator(b, t);
    SimplexVector::new(mat_vec(&e, x.as_slice()))
}

/// The transition matrix `exp(−tB)`.
///
/// Columns are rescaled to sum to one afterwards. The exact flow is column
/// stochastic, and repeated squaring at large `t` otherwise lets the sums
/// drift by a few ulps per squaring.
pub fn propagator(b: &GeneratorMatrix, t: f64) -> DMatrix<f64> {
    let mut e = linalg::expm(&(b.matrix() * -t));
    for mut col in e.column_iter_mut() {
        let s = col.sum();
        if s > 0.0 {
            col /= s;
        }
    }
    e
}

fn mat_vec(m: &DMatrix<f64>, x: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(x)).iter().copied().collect()
}

fn check_dims(b: &GeneratorMatrix, x: &SimplexVector) -> Result<()> {
    if b.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: b.dim(),
            actual: x.dim(),
        });
    }
    Ok(())
}

/// Flow of the upper-bidiagonal generator
///
/// ```text
///     ⎡0  −c₁            ⎤
/// A = ⎢   c₁  −c₂        ⎥ = ⎡0  A₁₂⎤
///     ⎢       c₂   ⋱     ⎥   ⎣0  A₂₂⎦
///     ⎣            c_{n−1}⎦
/// ```
///
/// evaluated blockwise: `Φ₁₁ = 1`, `Φ₂₂(t) = exp(−tA₂₂)` and
/// `Φ₁₂(t) = −A₁₂A₂₂⁻¹ + A₁₂A₂₂⁻¹ exp(−tA₂₂)`. As `t → ∞` the flow tends
/// to `e₁𝟙ᵀ`.
#[derive(Debug, Clone)]
pub struct BidiagonalFlow {
    rates: Vec<f64>,
    a22: DMatrix<f64>,
    // A₁₂A₂₂⁻¹ as a row
    gain: DMatrix<f64>,
}

/// Builds the closed-form evaluator for the rates `c`.
pub fn expm_limit_bidiagonal(c: &[f64]) -> Result<BidiagonalFlow> {
    if c.is_empty() {
        return Err(Error::DimensionTooSmall { min: 2, actual: 1 });
    }
    if let Some(bad) = c.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "rates must be positive, got {bad}"
        )));
    }
    let m = c.len();
    let mut a22 = DMatrix::zeros(m, m);
    for i in 0..m {
        a22[(i, i)] = c[i];
        if i + 1 < m {
            a22[(i, i + 1)] = -c[i + 1];
        }
    }
    let mut a12 = DMatrix::zeros(1, m);
    a12[(0, 0)] = -c[0];
    // gain = A₁₂A₂₂⁻¹  ⇔  A₂₂ᵀ gainᵀ = A₁₂ᵀ
    let gain_t = a22
        .transpose()
        .solve_lower_triangular(&a12.transpose())
        .ok_or_else(|| Error::InvalidParameter("singular rate block".into()))?;
    Ok(BidiagonalFlow {
        rates: c.to_vec(),
        a22,
        gain: gain_t.transpose(),
    })
}

impl BidiagonalFlow {
    pub fn dim(&self) -> usize {
        self.rates.len() + 1
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// The full matrix `A`.
    pub fn generator(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut a = DMatrix::zeros(n, n);
        a.view_mut((1, 1), (n - 1, n - 1)).copy_from(&self.a22);
        a[(0, 1)] = -self.rates[0];
        a
    }

    /// `exp(−tA)` assembled from the blocks.
    pub fn at(&self, t: f64) -> Result<DMatrix<f64>> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::NegativeTime(t));
        }
        let n = self.dim();
        let phi22 = linalg::expm(&(&self.a22 * -t));
        let phi12 = -&self.gain + &self.gain * &phi22;
        let mut out = DMatrix::zeros(n, n);
        out[(0, 0)] = 1.0;
        out.view_mut((0, 1), (1, n - 1)).copy_from(&phi12);
        out.view_mut((1, 1), (n - 1, n - 1)).copy_from(&phi22);
        Ok(out)
    }

    /// `lim_{t→∞} exp(−tA)`, assembled as `[[1, −A₁₂A₂₂⁻¹], [0, 0]]`.
    pub fn limit(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        out[(0, 0)] = 1.0;
        out.view_mut((0, 1), (1, n - 1)).copy_from(&(-&self.gain));
        out
    }
}

/// `sup_i ‖exp(−sB)e_i − target‖₁`, the worst-case distance to `target`
/// over the simplex vertices after time `s`.
pub fn worst_vertex_distance(b: &GeneratorMatrix, target: &SimplexVector, s: f64) -> f64 {
    let e = propagator(b, s);
    let x = target.as_slice();
    e.column_iter()
        .map(|col| col.iter().zip(x).map(|(a, b)| (a - b).abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// A time `t` such that every initial state is within `eps` (ℓ₁) of the
/// fixed point `target` for all `s ≥ t`.
///
/// The worst-vertex distance is nonincreasing in `s` because `exp(−rB)` is
/// an ℓ₁ contraction fixing `target`, so a bracketing search on it suffices.
pub fn relaxation_time(b: &GeneratorMatrix, target: &SimplexVector, eps: f64) -> Result<f64> {
    check_dims(b, target)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if eps >= 2.0 {
        return Ok(0.0);
    }
    let residual: f64 = b.apply(target.as_slice()).iter().map(|v| v.abs()).sum();
    if residual > 1e-9 * b.norm1().max(1.0) {
        return Err(Error::NotFixedPoint { residual });
    }
    check_spectral_gap(b)?;

    let g = |s: f64| worst_vertex_distance(b, target, s);
    if g(0.0) < eps {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0 / b.norm1().max(f64::MIN_POSITIVE);
    let mut prev = f64::INFINITY;
    loop {
        let v = g(hi);
        if v < eps {
            break;
        }
        if v >= prev && hi > 1e3 / b.norm1().max(f64::MIN_POSITIVE) {
            return Err(Error::NonConvergent(format!(
                "distance stalls at {v:e} above eps = {eps:e}"
            )));
        }
        prev = v;
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NonConvergent("relaxation time overflow".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < eps {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(hi)
}

/// Requires a simple zero eigenvalue with every other eigenvalue of `B` in
/// the open right half plane.
fn check_spectral_gap(b: &GeneratorMatrix) -> Result<()> {
    let n = b.dim();
    if n == 1 {
        return Ok(());
    }
    let eig = b.matrix().clone().complex_eigenvalues();
    let scale = b.norm1().max(1.0);
    let tol = 1e-9 * scale;
    let zeros = eig.iter().filter(|z| z.norm() <= tol).count();
    let unstable = eig.iter().filter(|z| z.norm() > tol && z.re <= tol).count();
    if zeros != 1 || unstable != 0 {
        return Err(Error::NonConvergent(format!(
            "{zeros} eigenvalues at zero and {unstable} outside the open right half plane"
        )));
    }
    Ok(())
}

/// One dwell-then-impulse segment: evolve for `duration`, then apply
/// `permutation`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub duration: f64,
    pub permutation: Permutation,
}

/// Finite sequence of segments realizing the hybrid dynamics.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<Segment>", into = "Vec<Segment>")]
pub struct ControlSchedule {
    pub segments: Vec<Segment>,
}

impl ControlSchedule {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let s = Self { segments };
        s.validate()?;
        Ok(s)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        let mut n = None;
        for seg in &self.segments {
            if !(seg.duration >= 0.0) || !seg.duration.is_finite() {
                return Err(Error::NegativeTime(seg.duration));
            }
            match n {
                None => n = Some(seg.permutation.dim()),
                Some(n) if n != seg.permutation.dim() => {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        actual: seg.permutation.dim(),
                    })
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn push(&mut self, duration: f64, permutation: Permutation) {
        self.segments.push(Segment {
            duration,
            permutation,
        });
    }

    /// Composes `permutation` into the last segment's impulse, or appends a
    /// pure impulse when the schedule is empty.
    pub fn push_impulse(&mut self, permutation: Permutation) -> Result<()> {
        if permutation.is_identity() {
            return Ok(());
        }
        match self.segments.last_mut() {
            Some(last) => last.permutation = last.permutation.then(&permutation)?,
            None => self.push(0.0, permutation),
        }
        Ok(())
    }

    pub fn extend(&mut self, other: ControlSchedule) {
        self.segments.extend(other.segments);
    }
}

impl TryFrom<Vec<Segment>> for ControlSchedule {
    type Error = Error;

    fn try_from(segments: Vec<Segment>) -> Result<Self> {
        Self::new(segments)
    }
}

impl From<ControlSchedule> for Vec<Segment> {
    fn from(s: ControlSchedule) -> Self {
        s.segments
    }
}

/// Sampled trajectory of the hybrid system plus the impulse log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<(f64, SimplexVector)>,
    pub events: Vec<(f64, Permutation)>,
    pub final_state: SimplexVector,
}

/// Default sampling step: 1% of the longest segment.
pub fn default_sample_step(schedule: &ControlSchedule) -> f64 {
    let longest = schedule
        .segments
        .iter()
        .map(|s| s.duration)
        .fold(0.0, f64::max);
    if longest > 0.0 {
        0.01 * longest
    } else {
        1.0
    }
}

/// Runs the schedule from `x0`.
///
/// The final state is the exact composition `π_K e^{−τ_K B} ⋯ π₁ e^{−τ₁ B} x₀`.
/// Samples are taken every `sample_step` within each dwell and are only
/// used for reporting.
pub fn run_schedule(
    b: &GeneratorMatrix,
    x0: &SimplexVector,
    schedule: &ControlSchedule,
    sample_step: f64,
) -> Result<Trajectory> {
    check_dims(b, x0)?;
    schedule.validate()?;
    if !(sample_step > 0.0) || !sample_step.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "sample step must be positive, got {sample_step}"
        )));
    }
    let n = b.dim();
    if let Some(seg) = schedule.segments.first() {
        if seg.permutation.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: seg.permutation.dim(),
            });
        }
    }

    let step_map = propagator(b, sample_step);
    let mut samples = vec![(0.0, x0.clone())];
    let mut events = Vec::new();
    let mut x = x0.as_slice().to_vec();
    let mut t = 0.0;
    for seg in &schedule.segments {
        if seg.duration > 0.0 {
            let mut sampled = x.clone();
            let mut s = sample_step;
            while s < seg.duration {
                sampled = mat_vec(&step_map, &sampled);
                samples.push((t + s, SimplexVector::normalized(sampled.clone())?));
                s += sample_step;
            }
            x = mat_vec(&propagator(b, seg.duration), &x);
            t += seg.duration;
            samples.push((t, SimplexVector::new(x.clone())?));
        }
        x = seg.permutation.apply_slice(&x)?;
        events.push((t, seg.permutation.clone()));
        samples.push((t, SimplexVector::new(x.clone())?));
    }
    Ok(Trajectory {
        samples,
        events,
        final_state: SimplexVector::new(x)?,
    })
}

/// Final state of the schedule without sampling.
pub fn final_state(
    b: &GeneratorMatrix,
    x0: &SimplexVector,
    schedule: &ControlSchedule,
) -> Result<SimplexVector> {
    check_dims(b, x0)?;
    schedule.validate()?;
    let mut x = x0.as_slice().to_vec();
    for seg in &schedule.segments {
        if seg.duration > 0.0 {
            x = mat_vec(&propagator(b, seg.duration), &x);
        }
        x = seg.permutation.apply_slice(&x)?;
    }
    SimplexVector::new(x)
}

/// ℓ₁ distance between two states given as slices.
pub fn state_distance(x: &SimplexVector, y: &[f64]) -> f64 {
    l1(x.as_slice(), y)
}
