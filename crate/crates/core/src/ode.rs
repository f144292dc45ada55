//! Adaptive Dormand–Prince 5(4) integration of autonomous matrix-valued ODEs.

use nalgebra::{ComplexField, DMatrix};

use crate::error::{Error, Result};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-12,
            max_steps: 5_000_000,
        }
    }
}

/// Integrates `ẏ = f(y)` from `y0` over `[0, t_end]`. `post_step` runs on
/// every accepted state (e.g. to project back onto a symmetry class).
pub fn integrate<T, F, P>(
    mut f: F,
    y0: &DMatrix<T>,
    t_end: f64,
    opts: OdeOptions,
    mut post_step: P,
) -> Result<DMatrix<T>>
where
    T: ComplexField<RealField = f64> + Copy,
    F: FnMut(&DMatrix<T>) -> DMatrix<T>,
    P: FnMut(&mut DMatrix<T>),
{
    if t_end < 0.0 || !t_end.is_finite() {
        return Err(Error::NegativeTime(t_end));
    }
    let mut y = y0.clone();
    if t_end == 0.0 {
        return Ok(y);
    }
    let s = |x: f64| T::from_real(x);

    let mut k1 = f(&y);
    let mut t = 0.0;
    let mut h = initial_step(&y, &k1, opts, t_end);
    let mut steps = 0usize;
    while t < t_end {
        if steps >= opts.max_steps {
            return Err(Error::InvalidParameter(format!(
                "integration did not finish within {} steps",
                opts.max_steps
            )));
        }
        steps += 1;
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let k2 = f(&(&y + &k1 * s(h * A21)));
        let k3 = f(&(&y + (&k1 * s(A31) + &k2 * s(A32)) * s(h)));
        let k4 = f(&(&y + (&k1 * s(A41) + &k2 * s(A42) + &k3 * s(A43)) * s(h)));
        let k5 = f(&(&y + (&k1 * s(A51) + &k2 * s(A52) + &k3 * s(A53) + &k4 * s(A54)) * s(h)));
        let k6 = f(&(&y
            + (&k1 * s(A61) + &k2 * s(A62) + &k3 * s(A63) + &k4 * s(A64) + &k5 * s(A65))
                * s(h)));
        let y_new = &y
            + (&k1 * s(A71) + &k3 * s(A73) + &k4 * s(A74) + &k5 * s(A75) + &k6 * s(A76)) * s(h);
        let k7 = f(&y_new);
        let err = (&k1 * s(E1) + &k3 * s(E3) + &k4 * s(E4) + &k5 * s(E5) + &k6 * s(E6) + &k7 * s(E7))
            * s(h);

        let mut acc = 0.0;
        for ((e, a), b) in err.iter().zip(y.iter()).zip(y_new.iter()) {
            let sc = opts.atol + opts.rtol * a.modulus().max(b.modulus());
            let r = e.modulus() / sc;
            acc += r * r;
        }
        let err_norm = (acc / err.len().max(1) as f64).sqrt();

        if err_norm <= 1.0 || h <= 1e-14 * t_end.max(1.0) {
            t = if last { t_end } else { t + h };
            y = y_new;
            post_step(&mut y);
            k1 = f(&y);
            let fac = if err_norm == 0.0 {
                5.0
            } else {
                (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= fac;
        } else {
            h *= (0.9 * err_norm.powf(-0.2)).clamp(0.2, 1.0);
        }
    }
    Ok(y)
}

fn initial_step<T>(y: &DMatrix<T>, dy: &DMatrix<T>, opts: OdeOptions, t_end: f64) -> f64
where
    T: ComplexField<RealField = f64>,
{
    let scale = |v: &DMatrix<T>| -> f64 {
        let mut acc = 0.0;
        for (a, b) in v.iter().zip(y.iter()) {
            let r = a.clone().modulus() / (opts.atol + opts.rtol * b.clone().modulus());
            acc += r * r;
        }
        (acc / v.len().max(1) as f64).sqrt()
    };
    let d0 = scale(y);
    let d1 = scale(dy);
    let h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h.min(t_end).max(1e-300)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_decay() {
        let y0 = DMatrix::from_element(1, 1, 1.0f64);
        let y = integrate(|y| -y * 2.0, &y0, 3.0, OdeOptions::default(), |_| {}).unwrap();
        assert!((y[(0, 0)] - (-6.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn rotation_preserves_norm() {
        let y0 = DMatrix::from_column_slice(2, 1, &[1.0f64, 0.0]);
        let gen = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let y = integrate(|y| &gen * y, &y0, 2.0, OdeOptions::default(), |_| {}).unwrap();
        assert!((y[(0, 0)] - 2f64.cos()).abs() < 1e-11);
        assert!((y[(1, 0)] - 2f64.sin()).abs() < 1e-11);
    }

    #[test]
    fn rejects_negative_time() {
        let y0 = DMatrix::from_element(1, 1, 1.0f64);
        assert!(integrate(|y| y.clone(), &y0, -1.0, OdeOptions::default(), |_| {}).is_err());
    }
}
