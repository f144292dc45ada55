//! Control synthesis for zero-temperature generators.
//!
//! [`steer_from_ground`] reaches an arbitrary target from `e₁` exactly by
//! running the flow backwards until it hits a face of the simplex and
//! recursing on that face. [`plan_theorem1`] prefixes a relaxation into
//! `e₁`, and [`plan_theorem2`] does the same for block-lifted generators,
//! scheduling the per-block plans so that they finish together.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{b0_local_lift_capped, b0_zero_temperature, GeneratorMatrix, DEFAULT_DIMENSION_CAP};
use crate::linalg;
use crate::propagate::{final_state, relaxation_time, ControlSchedule};
use crate::simplex::{l1, Permutation, SimplexVector};

/// Coordinates at or below this value at a face hit are treated as zero.
pub const FACE_TOL: f64 = 1e-12;

/// Event times closer than this (relative) are merged into one impulse.
pub const EVENT_MERGE_TOL: f64 = 1e-12;

const MAX_BACKWARD_STEPS: usize = 10_000_000;

/// Which part of a plan a segment belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Relaxation,
    Steering,
}

/// When one block's plan runs inside a parallel stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockTiming {
    pub stage: usize,
    pub block: usize,
    pub start: f64,
    pub duration: f64,
    pub end: f64,
}

/// A face hit of the backward flow found during synthesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceHit {
    /// Dimension of the face the recursion was working in.
    pub dimension: usize,
    pub time: f64,
    /// The coordinate that reached zero (highest index on ties).
    pub coordinate: usize,
    pub value: f64,
    /// Smallest of the remaining coordinates at the hit.
    pub min_other: f64,
    /// Several coordinates went negative within the same coarse step.
    pub multiple_crossings: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteeringPlan {
    pub schedule: ControlSchedule,
    /// ℓ₁ bound on the deviation of the final state from the target.
    pub predicted_error: f64,
    /// One label per schedule segment.
    pub phases: Vec<Phase>,
    #[serde(default)]
    pub block_timings: Vec<BlockTiming>,
    #[serde(default)]
    pub face_hits: Vec<FaceHit>,
    #[serde(default)]
    pub diagnostics: Vec<String>,
}

impl SteeringPlan {
    pub fn empty() -> Self {
        Self {
            schedule: ControlSchedule::empty(),
            predicted_error: 0.0,
            phases: Vec::new(),
            block_timings: Vec::new(),
            face_hits: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn total_duration(&self) -> f64 {
        self.schedule.total_duration()
    }

    /// Number of segments with a positive dwell.
    pub fn dwell_count(&self) -> usize {
        self.schedule
            .segments
            .iter()
            .filter(|s| s.duration > 0.0)
            .count()
    }

    /// Number of non-identity impulses.
    pub fn impulse_count(&self) -> usize {
        self.schedule
            .segments
            .iter()
            .filter(|s| !s.permutation.is_identity())
            .count()
    }

    /// Total duration of the segments labelled `phase`.
    pub fn phase_duration(&self, phase: Phase) -> f64 {
        self.schedule
            .segments
            .iter()
            .zip(&self.phases)
            .filter(|(_, p)| **p == phase)
            .map(|(s, _)| s.duration)
            .sum()
    }

    /// Appends `other`, folding its leading pure impulse into the last
    /// segment of `self`.
    fn append(&mut self, other: SteeringPlan) -> Result<()> {
        let mut segments = other.schedule.segments.into_iter();
        let mut phases = other.phases.into_iter();
        if let Some(first) = segments.next() {
            let phase = phases.next().unwrap_or(Phase::Steering);
            if first.duration == 0.0 && !self.schedule.is_empty() {
                self.schedule.push_impulse(first.permutation)?;
            } else {
                self.schedule.push(first.duration, first.permutation);
                self.phases.push(phase);
            }
        }
        for (seg, phase) in segments.zip(phases) {
            self.schedule.push(seg.duration, seg.permutation);
            self.phases.push(phase);
        }
        self.predicted_error += other.predicted_error;
        self.block_timings.extend(other.block_timings);
        self.face_hits.extend(other.face_hits);
        self.diagnostics.extend(other.diagnostics);
        Ok(())
    }
}

fn zero_temperature_rates(b: &GeneratorMatrix) -> Result<Vec<f64>> {
    b.bidiagonal_rates().ok_or_else(|| {
        Error::InvalidGenerator(
            "steering needs an upper-bidiagonal generator with zero first column and positive rates"
                .into(),
        )
    })
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

struct Synthesizer<'a> {
    n: usize,
    rates: &'a [f64],
    error: f64,
    face_hits: Vec<FaceHit>,
    diagnostics: Vec<String>,
}

impl Synthesizer<'_> {
    /// Schedule (in the full dimension) taking `e₁` to `x`, where `x` lives
    /// on the leading face of dimension `x.len()`.
    fn steer(&mut self, x: Vec<f64>) -> Result<ControlSchedule> {
        let m = x.len();
        if m <= 1 {
            return Ok(ControlSchedule::empty());
        }
        let support: Vec<usize> = (0..m).filter(|&i| x[i] > 0.0).collect();
        if support.len() < m {
            // Move the support to the front, reach it there, then move back.
            let mut image = vec![0; m];
            let mut next = 0;
            for &i in &support {
                image[i] = next;
                next += 1;
            }
            for i in (0..m).filter(|i| x[*i] <= 0.0) {
                image[i] = next;
                next += 1;
            }
            let rho = Permutation::new(image)?;
            let w = rho.apply_slice(&x)?;
            let mut s = self.steer(w[..support.len().max(1)].to_vec())?;
            s.push_impulse(rho.inverse().embed(self.n, 0)?)?;
            return Ok(s);
        }
        let (t, y) = self.face_hit(&x)?;
        let mut s = self.steer(y)?;
        if t > 0.0 {
            s.push(t, Permutation::identity(self.n));
        }
        Ok(s)
    }

    /// Runs `ẏ = A y` from the interior point `x` until the first coordinate
    /// reaches zero. Returns the hitting time and the state there with the
    /// vanishing coordinates set to exactly zero.
    fn face_hit(&mut self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let m = x.len();
        let rates = &self.rates[..m - 1];
        let mut a = DMatrix::zeros(m, m);
        for (j, &c) in rates.iter().enumerate() {
            a[(j + 1, j + 1)] = c;
            a[(j, j + 1)] = -c;
        }
        let cmax = rates.iter().copied().fold(0.0, f64::max);
        let h = 0.05 / cmax;
        let step = linalg::expm(&(&a * h));
        let flow = |s: f64, y: &DVector<f64>| -> DVector<f64> { linalg::expm(&(&a * s)) * y };
        let negative = |v: &DVector<f64>| v.iter().filter(|e| **e < 0.0).count();

        let mut y = DVector::from_column_slice(x);
        let mut t = 0.0;
        let mut steps = 0usize;
        let coarse = loop {
            let next = &step * &y;
            if negative(&next) > 0 {
                break next;
            }
            y = next;
            t += h;
            steps += 1;
            if steps >= MAX_BACKWARD_STEPS {
                return Err(Error::NonConvergent(format!(
                    "backward flow in dimension {m} did not reach a face"
                )));
            }
        };

        let (mut lo, mut hi) = (0.0, h);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if negative(&flow(mid, &y)) > 0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mut hit = if lo > 0.0 { flow(lo, &y) } else { y.clone() };
        let past = flow(hi, &y);
        let coordinate = (0..m)
            .rev()
            .find(|&i| past[i] < 0.0)
            .or_else(|| (0..m).rev().find(|&i| hit[i] <= FACE_TOL))
            .expect("the bracket ends past a face");
        let value = hit[coordinate];
        let min_other = (0..m)
            .filter(|&i| i != coordinate)
            .map(|i| hit[i])
            .fold(f64::INFINITY, f64::min);
        let multiple_crossings = negative(&coarse) > 1;
        if multiple_crossings {
            self.diagnostics.push(format!(
                "dimension {m}: {} coordinates crossed zero within one step near t = {:.6e}",
                negative(&coarse),
                t + lo
            ));
        }
        self.face_hits.push(FaceHit {
            dimension: m,
            time: t + lo,
            coordinate,
            value,
            min_other,
            multiple_crossings,
        });

        let mut removed = 0.0;
        for v in hit.iter_mut() {
            if *v <= FACE_TOL {
                removed += v.abs();
                *v = 0.0;
            }
        }
        self.error += removed + (steps as f64 + 64.0) * 4.0 * f64::EPSILON;
        Ok((t + lo, hit.iter().copied().collect()))
    }
}

/// Exact steering from `e₁` to `target` under an upper-bidiagonal
/// zero-temperature generator.
///
/// The plan starts with a pure impulse (the flow fixes `e₁`), followed by at
/// most `n − 1` dwells. Every dwell after the first is preceded by a
/// permutation folded into the previous segment.
pub fn steer_from_ground(b: &GeneratorMatrix, target: &SimplexVector) -> Result<SteeringPlan> {
    let rates = zero_temperature_rates(b)?;
    let n = b.dim();
    check_dim(n, target.dim())?;
    let mut synth = Synthesizer {
        n,
        rates: &rates,
        error: 0.0,
        face_hits: Vec::new(),
        diagnostics: Vec::new(),
    };
    let schedule = synth.steer(target.as_slice().to_vec())?;
    Ok(SteeringPlan {
        phases: vec![Phase::Steering; schedule.len()],
        schedule,
        predicted_error: synth.error,
        block_timings: Vec::new(),
        face_hits: synth.face_hits,
        diagnostics: synth.diagnostics,
    })
}

/// The share of `eps` left for relaxation once the steering error `p` is
/// reserved. Nondecreasing in `eps`.
fn relaxation_budget(eps: f64, p: f64) -> f64 {
    (eps * (1.0 - 1e-6) - p).max(eps * 1e-3)
}

fn is_ground(x: &SimplexVector) -> bool {
    x.as_slice()[0] == 1.0
}

/// Relax into `e₁`, then steer exactly to `target`.
pub fn plan_theorem1(
    b: &GeneratorMatrix,
    x0: &SimplexVector,
    target: &SimplexVector,
    eps: f64,
) -> Result<SteeringPlan> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let n = b.dim();
    check_dim(n, x0.dim())?;
    let steer = steer_from_ground(b, target)?;
    let mut plan = SteeringPlan::empty();
    if !is_ground(x0) {
        let budget = relaxation_budget(eps, steer.predicted_error);
        let t = relaxation_time(b, &SimplexVector::vertex(n, 0)?, budget)?;
        if t > 0.0 {
            plan.schedule.push(t, Permutation::identity(n));
            plan.phases.push(Phase::Relaxation);
        }
        plan.predicted_error = budget;
    }
    plan.append(steer)?;
    Ok(plan)
}

/// `b0_local_lift(b0_zero_temperature(core_n), core_n^(copies−1))`.
pub fn theorem2_generator(core_n: usize, copies: usize) -> Result<GeneratorMatrix> {
    let blocks = chain_dim(core_n, copies.saturating_sub(1))?;
    b0_local_lift_capped(&b0_zero_temperature(core_n)?, blocks, DEFAULT_DIMENSION_CAP)
}

fn chain_dim(core_n: usize, copies: usize) -> Result<usize> {
    u32::try_from(copies)
        .ok()
        .and_then(|c| core_n.checked_pow(c))
        .filter(|d| *d <= DEFAULT_DIMENSION_CAP)
        .ok_or(Error::DimensionCap {
            requested: usize::MAX,
            cap: DEFAULT_DIMENSION_CAP,
        })
}

/// The permutation sending `sources[j]` to slot `j` that moves the fewest
/// points: every maximal chain of the partial map is closed into a cycle.
pub fn gather_permutation(n: usize, sources: &[usize]) -> Result<Permutation> {
    let mut image: Vec<Option<usize>> = vec![None; n];
    let mut is_target = vec![false; n];
    for (j, &s) in sources.iter().enumerate() {
        if s >= n || j >= n {
            return Err(Error::IndexOutOfRange { index: s.max(j), n });
        }
        if image[s].is_some() {
            return Err(Error::InvalidPermutation(format!("repeated source {s}")));
        }
        image[s] = Some(j);
        is_target[j] = true;
    }
    // Chains start at sources that are not targets and end at targets that
    // are not sources; closing each chain keeps the support minimal.
    for start in 0..n {
        if image[start].is_none() || is_target[start] {
            continue;
        }
        let mut end = start;
        while let Some(next) = image[end] {
            end = next;
        }
        image[end] = Some(start);
    }
    Permutation::new(
        image
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.unwrap_or(i))
            .collect(),
    )
}

/// Relax-and-collect into `e₁`, then fill the chain level by level with
/// per-block exact plans run in parallel.
pub fn plan_theorem2(
    core_n: usize,
    copies: usize,
    x0: &SimplexVector,
    target: &SimplexVector,
    eps: f64,
) -> Result<SteeringPlan> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if core_n < 2 {
        return Err(Error::DimensionTooSmall { min: 2, actual: core_n });
    }
    if copies == 0 {
        return Err(Error::InvalidParameter("copies must be at least 1".into()));
    }
    let core = b0_zero_temperature(core_n)?;
    if copies == 1 {
        return plan_theorem1(&core, x0, target, eps);
    }
    let big_n = chain_dim(core_n, copies)?;
    check_dim(big_n, x0.dim())?;
    check_dim(big_n, target.dim())?;

    let fill = parallel_fill(&core, copies, big_n, target)?;

    let mut plan = SteeringPlan::empty();
    if !is_ground(x0) {
        let budget = relaxation_budget(eps, fill.predicted_error);
        let t = relaxation_time(&core, &SimplexVector::vertex(core_n, 0)?, budget / copies as f64)?;
        for round in 1..=copies {
            let occupied = chain_dim(core_n, copies - round)?;
            let sources: Vec<usize> = (0..occupied).map(|j| j * core_n).collect();
            let collect = gather_permutation(big_n, &sources)?;
            if t > 0.0 {
                plan.schedule.push(t, collect);
                plan.phases.push(Phase::Relaxation);
            } else {
                plan.schedule.push_impulse(collect)?;
            }
        }
        plan.predicted_error = budget;
    }
    plan.append(fill)?;
    Ok(plan)
}

/// Stage `s` holds the level-`s` block sums on the leading `core_nˢ` slots.
fn parallel_fill(
    core: &GeneratorMatrix,
    copies: usize,
    big_n: usize,
    target: &SimplexVector,
) -> Result<SteeringPlan> {
    let n = core.dim();
    let mut levels = vec![target.as_slice().to_vec()];
    for _ in 0..copies {
        let prev = levels.last().expect("nonempty");
        levels.push(prev.chunks(n).map(|c| c.iter().sum()).collect());
    }
    levels.reverse(); // levels[s] has n^s entries

    let mut plan = SteeringPlan::empty();
    let mut offset = 0.0;
    for (stage, level) in levels.iter().enumerate().skip(1) {
        let active = chain_dim(n, stage - 1)?;
        let sources: Vec<usize> = (0..active).map(|j| j * n).collect();
        let distribute = gather_permutation(big_n, &sources)?.inverse();

        let mut events: Vec<(f64, usize, Permutation)> = Vec::new();
        let mut block_plans = Vec::new();
        for (j, chunk) in level.chunks(n).enumerate() {
            let mass: f64 = chunk.iter().sum();
            if mass <= 0.0 {
                continue;
            }
            let local = SimplexVector::normalized(chunk.iter().map(|v| v / mass).collect())?;
            let p = steer_from_ground(core, &local)?;
            if p.schedule.is_empty() {
                continue;
            }
            plan.predicted_error += mass * p.predicted_error;
            plan.face_hits.extend(p.face_hits.iter().cloned());
            plan.diagnostics
                .extend(p.diagnostics.iter().map(|d| format!("stage {stage}, block {j}: {d}")));
            block_plans.push((j, p));
        }
        let longest = block_plans
            .iter()
            .map(|(_, p)| p.total_duration())
            .fold(0.0, f64::max);
        for (order, (j, p)) in block_plans.iter().enumerate() {
            let duration = p.total_duration();
            let start = longest - duration;
            let mut clock = start;
            for seg in &p.schedule.segments {
                clock += seg.duration;
                events.push((clock, order, seg.permutation.embed(big_n, j * n)?));
            }
            plan.block_timings.push(BlockTiming {
                stage,
                block: *j,
                start: offset + start,
                duration,
                end: offset + start + duration,
            });
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        plan.schedule.push_impulse(distribute.clone())?;
        if plan.schedule.len() > plan.phases.len() {
            plan.phases.push(Phase::Steering);
        }
        let merge = EVENT_MERGE_TOL * longest.max(1.0);
        let mut clock = 0.0;
        let mut i = 0;
        while i < events.len() {
            let group_start = events[i].0;
            let mut perm = Permutation::identity(big_n);
            let mut time = group_start;
            while i < events.len() && events[i].0 - group_start <= merge {
                perm = perm.then(&events[i].2)?;
                time = events[i].0;
                i += 1;
            }
            let dwell = (time - clock).max(0.0);
            if dwell > 0.0 {
                plan.schedule.push(dwell, perm);
                plan.phases.push(Phase::Steering);
            } else {
                plan.schedule.push_impulse(perm)?;
                if plan.schedule.len() > plan.phases.len() {
                    plan.phases.push(Phase::Steering);
                }
            }
            clock = time;
        }
        offset += clock;
    }
    Ok(plan)
}

/// ℓ₁ distance between the final state of `plan` run from `x0` and `target`.
pub fn verify_plan(
    b: &GeneratorMatrix,
    x0: &SimplexVector,
    plan: &SteeringPlan,
    target: &SimplexVector,
) -> Result<f64> {
    check_dim(b.dim(), target.dim())?;
    let x = final_state(b, x0, &plan.schedule)?;
    Ok(l1(x.as_slice(), target.as_slice()))
}
