//! Numerical checks of the majorization bound for equidistant spectra, the
//! qubit reachable set, and reproductions of the worked examples.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{
    b0_thermal, equidistant_gibbs, gibbs_vector, thermal_model, EnergySpec, GeneratorMatrix,
    Temperature,
};
use crate::gksl::{propagate_density, DensityMatrix, GkslOperator};
use crate::propagate::{evolve, propagator};
use crate::simplex::{blocks, majorization_excess, majorizes, Block, Permutation, SimplexVector};

/// Relative tolerance for recognising a constant-ratio fixed point.
pub const RATIO_TOL: f64 = 1e-9;

/// Tolerance of the paper-value comparisons in the example reports.
pub const EXAMPLE_TOL: f64 = 5e-4;

/// The common ratio `α = d_{i+1}/d_i`, if it is constant.
pub fn equidistant_ratio(d: &SimplexVector) -> Result<f64> {
    let x = d.as_slice();
    if x.len() < 2 {
        return Err(Error::DimensionTooSmall { min: 2, actual: x.len() });
    }
    if x.iter().any(|v| *v <= 0.0) {
        return Err(Error::NotEquidistant);
    }
    let alpha = x[1] / x[0];
    let constant = x
        .windows(2)
        .all(|w| (w[1] / w[0] - alpha).abs() <= RATIO_TOL * alpha.max(1.0));
    if !constant {
        return Err(Error::NotEquidistant);
    }
    Ok(alpha)
}

/// Step size `1e−6/‖B‖₁` used when none is given.
pub fn default_mu(b: &GeneratorMatrix) -> f64 {
    1e-6 / b.norm1().max(1.0)
}

/// Whether `(I − μB)πd ≺ d`.
///
/// Fails with [`Error::TangentExitsSimplex`] if the step leaves the simplex.
pub fn thm3_tangential_check(
    b: &GeneratorMatrix,
    d: &SimplexVector,
    pi: &Permutation,
    mu: f64,
) -> Result<bool> {
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!("mu must be positive, got {mu}")));
    }
    if b.dim() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: b.dim(),
            actual: d.dim(),
        });
    }
    let x = pi.apply_slice(d.as_slice())?;
    let bx = b.apply(&x);
    let y: Vec<f64> = x.iter().zip(&bx).map(|(xi, bi)| xi - mu * bi).collect();
    let min_entry = y.iter().copied().fold(f64::INFINITY, f64::min);
    if min_entry < -crate::simplex::SIMPLEX_TOL {
        return Err(Error::TangentExitsSimplex { min_entry });
    }
    majorizes(&SimplexVector::normalized(y)?, d)
}

/// One block of `π({1..k})` with its sum of `(Bπd)` evaluated two ways.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockCertificate {
    pub block: Block,
    pub direct: f64,
    pub boundary: f64,
    /// The entries just inside the block have strictly lower `α`-degree
    /// than their outside neighbours.
    pub degree_ok: bool,
}

impl BlockCertificate {
    pub fn consistent(&self, tol: f64) -> bool {
        (self.direct - self.boundary).abs() <= tol
    }

    pub fn nonnegative(&self, tol: f64) -> bool {
        self.direct >= -tol && self.boundary >= -tol
    }
}

/// Block sums of `Bπd` for every block of `π({1..k})`.
///
/// The boundary form is `c_{lo−1}(x_lo − αx_{lo−1}) + c_hi(αx_hi − x_{hi+1})`
/// with `x = πd`, `c_j = −B[j−1][j]`, and `c₀ = c_n = 0`.
pub fn thm3_block_certificate(
    b: &GeneratorMatrix,
    d: &SimplexVector,
    pi: &Permutation,
    k: usize,
) -> Result<Vec<BlockCertificate>> {
    let n = d.dim();
    if b.dim() != n || pi.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: if b.dim() != n { b.dim() } else { pi.dim() },
        });
    }
    let alpha = equidistant_ratio(d)?;
    let x = pi.apply_slice(d.as_slice())?;
    let bx = b.apply(&x);
    let m = b.matrix();
    // rate between positions j and j+1 (0-based)
    let c = |j: usize| -m[(j, j + 1)];
    let degree = |v: f64| ((v / d.as_slice()[0]).ln() / alpha.ln()).round() as i64;

    Ok(blocks(pi, k)?
        .into_iter()
        .map(|blk| {
            let direct = blk.indices().map(|a| bx[a]).sum();
            let mut boundary = 0.0;
            let mut degree_ok = true;
            if blk.lo > 0 {
                boundary += c(blk.lo - 1) * (x[blk.lo] - alpha * x[blk.lo - 1]);
                degree_ok &= degree(x[blk.lo]) < degree(x[blk.lo - 1]);
            }
            if blk.hi + 1 < n {
                boundary += c(blk.hi) * (alpha * x[blk.hi] - x[blk.hi + 1]);
                degree_ok &= degree(x[blk.hi]) < degree(x[blk.hi + 1]);
            }
            BlockCertificate {
                block: blk,
                direct,
                boundary,
                degree_ok,
            }
        })
        .collect())
}

/// All permutations of `0..n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    loop {
        out.push(Permutation::new(cur.clone()).expect("valid by construction"));
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// Parameters of [`thm3_bound_sweep`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Fixed point of the thermal generator under test.
    pub d: SimplexVector,
    pub trials: usize,
    /// Step for the tangential check; [`default_mu`] when absent.
    pub mu: Option<f64>,
    pub seed: u64,
    pub segments_per_trial: usize,
    pub dwell_min: f64,
    pub dwell_max: f64,
    /// Interior samples checked per dwell.
    pub samples_per_segment: usize,
    /// Start somewhere other than `d`. Results are then exploratory.
    pub x0: Option<SimplexVector>,
}

impl SweepConfig {
    pub fn new(d: SimplexVector, trials: usize, seed: u64) -> Self {
        Self {
            d,
            trials,
            mu: None,
            seed,
            segments_per_trial: 6,
            dwell_min: 1e-3,
            dwell_max: 10.0,
            samples_per_segment: 8,
            x0: None,
        }
    }

    pub fn equidistant(n: usize, alpha: f64, trials: usize, seed: u64) -> Result<Self> {
        Ok(Self::new(equidistant_gibbs(alpha, n)?, trials, seed))
    }
}

/// A sampled state that escaped `{x : x ≺ d}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub trial: usize,
    pub segment: usize,
    pub time: f64,
    pub state: SimplexVector,
    pub excess: f64,
    /// The full random schedule of the trial as (dwell, one-line image).
    pub dwells: Vec<f64>,
    pub permutations: Vec<Permutation>,
}

/// Outcome of the exhaustive tangential check over `S_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentialSummary {
    pub mu: f64,
    pub checked: usize,
    pub failures: Vec<Permutation>,
    pub exits: Vec<Permutation>,
}

impl TangentialSummary {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty() && self.exits.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    /// `"theorem"` when starting from `d`, `"conjecture"` otherwise.
    pub mode: String,
    pub alpha: Option<f64>,
    pub x0_majorized_by_d: bool,
    pub states_checked: usize,
    pub max_excess: f64,
    pub violations: Vec<Violation>,
    pub tangential: Option<TangentialSummary>,
}

impl SweepReport {
    pub fn violation_count(&self) -> usize {
        self.violations.len()
    }
}

/// Largest `n` for which the sweep also runs the tangential check over all
/// of `S_n`.
pub const TANGENTIAL_EXHAUSTIVE_MAX_N: usize = 8;

/// Random permutation schedules from `x0` (default `d`); every sampled
/// state is tested against `x ≺ d`.
pub fn thm3_bound_sweep(config: &SweepConfig) -> Result<SweepReport> {
    let d = &config.d;
    let n = d.dim();
    if !(config.dwell_min > 0.0 && config.dwell_max >= config.dwell_min) {
        return Err(Error::InvalidParameter(format!(
            "dwell range [{}, {}] is invalid",
            config.dwell_min, config.dwell_max
        )));
    }
    let b = b0_thermal(&thermal_model(d)?)?;
    let x0 = config.x0.clone().unwrap_or_else(|| d.clone());
    if x0.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: x0.dim(),
        });
    }
    let alpha = equidistant_ratio(d).ok();
    let mu = config.mu.unwrap_or_else(|| default_mu(&b));

    let per_trial: Vec<(usize, f64, Vec<Violation>)> = (0..config.trials)
        .into_par_iter()
        .map(|trial| run_trial(&b, d, &x0, config, trial))
        .collect::<Result<_>>()?;

    let mut violations: Vec<Violation> = Vec::new();
    let mut states_checked = 0;
    let mut max_excess = f64::NEG_INFINITY;
    for (count, excess, v) in per_trial {
        states_checked += count;
        max_excess = max_excess.max(excess);
        violations.extend(v);
    }
    violations.sort_by(|a, b| {
        a.trial
            .cmp(&b.trial)
            .then(a.segment.cmp(&b.segment))
            .then(a.time.total_cmp(&b.time))
    });

    let tangential = if n <= TANGENTIAL_EXHAUSTIVE_MAX_N {
        Some(tangential_all(&b, d, mu))
    } else {
        None
    };

    Ok(SweepReport {
        mode: if config.x0.is_some() { "conjecture" } else { "theorem" }.into(),
        alpha,
        x0_majorized_by_d: majorizes(&x0, d)?,
        states_checked,
        max_excess: if states_checked == 0 { 0.0 } else { max_excess },
        violations,
        tangential,
        config: config.clone(),
    })
}

/// Tangential check for every `π ∈ S_n`.
pub fn tangential_all(b: &GeneratorMatrix, d: &SimplexVector, mu: f64) -> TangentialSummary {
    let perms = all_permutations(d.dim());
    let outcomes: Vec<(Permutation, Result<bool>)> = perms
        .into_par_iter()
        .map(|p| {
            let r = thm3_tangential_check(b, d, &p, mu);
            (p, r)
        })
        .collect();
    let checked = outcomes.len();
    let mut failures = Vec::new();
    let mut exits = Vec::new();
    for (p, r) in outcomes {
        match r {
            Ok(true) => {}
            Ok(false) => failures.push(p),
            Err(_) => exits.push(p),
        }
    }
    TangentialSummary {
        mu,
        checked,
        failures,
        exits,
    }
}

fn run_trial(
    b: &GeneratorMatrix,
    d: &SimplexVector,
    x0: &SimplexVector,
    config: &SweepConfig,
    trial: usize,
) -> Result<(usize, f64, Vec<Violation>)> {
    let n = d.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(trial as u64);
    let (lo, hi) = (config.dwell_min.ln(), config.dwell_max.ln());
    let mut dwells = Vec::with_capacity(config.segments_per_trial);
    let mut perms = Vec::with_capacity(config.segments_per_trial);
    for _ in 0..config.segments_per_trial {
        let u: f64 = rng.random_range(0.0..=1.0);
        dwells.push((lo + u * (hi - lo)).exp());
        let mut image: Vec<usize> = (0..n).collect();
        image.shuffle(&mut rng);
        perms.push(Permutation::new(image)?);
    }

    let mut found: Vec<(usize, f64, SimplexVector, f64)> = Vec::new();
    let mut checked = 0;
    let mut worst = f64::NEG_INFINITY;
    let mut check = |segment: usize, time: f64, state: Vec<f64>| -> Result<()> {
        let state = SimplexVector::normalized(state)?;
        let excess = majorization_excess(&state, d)?;
        checked += 1;
        worst = worst.max(excess);
        if excess > crate::simplex::SIMPLEX_TOL {
            found.push((segment, time, state, excess));
        }
        Ok(())
    };

    let mut x = x0.as_slice().to_vec();
    let mut t = 0.0;
    let samples = config.samples_per_segment.max(1);
    for (k, (&tau, pi)) in dwells.iter().zip(&perms).enumerate() {
        let h = tau / samples as f64;
        let step = propagator(b, h);
        let mut y = nalgebra::DVector::from_column_slice(&x);
        for s in 1..=samples {
            y = &step * y;
            check(k, t + h * s as f64, y.iter().copied().collect())?;
        }
        // the dwell endpoint is recomputed exactly to avoid drift
        x = evolve(b, &SimplexVector::normalized(x)?, tau)?.into_vec();
        t += tau;
        x = pi.apply_slice(&x)?;
        check(k, t, x.clone())?;
    }

    let violations = found
        .into_iter()
        .map(|(segment, time, state, excess)| Violation {
            trial,
            segment,
            time,
            state,
            excess,
            dwells: dwells.clone(),
            permutations: perms.clone(),
        })
        .collect();
    Ok((checked, worst, violations))
}

/// Membership in `{x : x ≺ d} ∪ {x : x ≺ x₀}` for qubits.
pub fn qubit_reachable_bound(
    x0: &SimplexVector,
    d: &SimplexVector,
    x: &SimplexVector,
) -> Result<bool> {
    for v in [x0, d, x] {
        if v.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: v.dim(),
            });
        }
    }
    Ok(majorizes(x, d)? || majorizes(x, x0)?)
}

/// A qualitative statement checked by an example report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub statement: String,
    pub holds: bool,
}

/// Reproduction of one worked example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub name: String,
    pub energies: Vec<f64>,
    pub temperature: f64,
    pub d: SimplexVector,
    pub x0: SimplexVector,
    pub t: f64,
    /// `exp(−tB)x₀` from the classical generator.
    pub computed: Vec<f64>,
    /// Populations from propagating `diag(x₀)` under the GKSL operator.
    pub gksl: Vec<f64>,
    pub gksl_deviation: f64,
    pub paper: Vec<f64>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub matches_paper: bool,
    pub claims: Vec<Claim>,
}

impl ExampleReport {
    pub fn claims_hold(&self) -> bool {
        self.claims.iter().all(|c| c.holds)
    }

    pub fn passed(&self) -> bool {
        self.matches_paper && self.claims_hold()
    }
}

struct ExampleSetup {
    name: &'static str,
    energies: Vec<f64>,
    x0: Vec<f64>,
    t: f64,
    paper: Vec<f64>,
}

fn run_example(
    setup: ExampleSetup,
    claims: impl FnOnce(&SimplexVector, &SimplexVector, &SimplexVector) -> Result<Vec<Claim>>,
) -> Result<ExampleReport> {
    let temperature = 1.0;
    let spec = EnergySpec::new(setup.energies.clone(), Temperature::Finite(temperature))?;
    let d = gibbs_vector(&spec)?;
    let model = thermal_model(&d)?;
    let b = b0_thermal(&model)?;
    let x0 = SimplexVector::new(setup.x0)?;
    let result = evolve(&b, &x0, setup.t)?;

    let g = GkslOperator::thermal(&model)?;
    let rho = propagate_density(&g, &DensityMatrix::diagonal(&x0), setup.t)?;
    let gksl = rho.populations();
    let gksl_deviation = deviation(result.as_slice(), &gksl);
    let max_deviation = deviation(result.as_slice(), &setup.paper);
    let claims = claims(&result, &d, &x0)?;

    Ok(ExampleReport {
        name: setup.name.into(),
        energies: setup.energies,
        temperature,
        computed: result.as_slice().to_vec(),
        gksl,
        gksl_deviation,
        matches_paper: max_deviation <= EXAMPLE_TOL,
        paper: setup.paper,
        max_deviation,
        tolerance: EXAMPLE_TOL,
        claims,
        d,
        x0,
        t: setup.t,
    })
}

fn deviation(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Energies `(0, 0.64, 1.28)` at `T = 1`, `x₀ = (0.55, 0.4, 0.05)`, `t = 1`.
pub fn repro_example1() -> Result<ExampleReport> {
    run_example(
        ExampleSetup {
            name: "example1",
            energies: vec![0.0, 0.64, 1.28],
            x0: vec![0.55, 0.4, 0.05],
            t: 1.0,
            paper: vec![0.5783, 0.3098, 0.1119],
        },
        |y, d, x0| {
            Ok(vec![
                Claim {
                    statement: "result is not majorized by d".into(),
                    holds: !majorizes(y, d)?,
                },
                Claim {
                    statement: "result is not majorized by x0".into(),
                    holds: !majorizes(y, x0)?,
                },
            ])
        },
    )
}

/// Energies `(0, 1/4, 17/4)` at `T = 1`, `x₀ = (0.0080, 0.5577, 0.4343)`,
/// `t = 0.1`.
#[allow(clippy::approx_constant)] // 0.4343 is data, not log10(e)
pub fn repro_example3() -> Result<ExampleReport> {
    run_example(
        ExampleSetup {
            name: "example3",
            energies: vec![0.0, 0.25, 4.25],
            x0: vec![0.0080, 0.5577, 0.4343],
            t: 0.1,
            paper: vec![0.0683, 0.5730, 0.3587],
        },
        |y, d, _| {
            let largest = |v: &SimplexVector| v.as_slice().iter().copied().fold(0.0, f64::max);
            Ok(vec![
                Claim {
                    statement: "result is not majorized by d".into(),
                    holds: !majorizes(y, d)?,
                },
                Claim {
                    statement: "largest entry exceeds that of d".into(),
                    holds: largest(y) > largest(d),
                },
            ])
        },
    )
}
