//! Dense linear-algebra helpers: the matrix exponential, rank-revealing null
//! vectors and graph connectivity of sparsity patterns.

use nalgebra::{ColPivQR, DMatrix, DVector};

use crate::error::{Error, Result};

// Padé degree thresholds on the 1-norm for double precision.
const THETA_3: f64 = 1.495585217958292e-2;
#[allow(clippy::excessive_precision)]
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Maximum absolute column sum.
pub fn norm1(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a diagonal Padé
/// approximant whose degree (3, 5, 7, 9 or 13) is chosen from the 1-norm.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let norm = norm1(a);
    if norm == 0.0 {
        return DMatrix::identity(n, n);
    }
    let ident = DMatrix::<f64>::identity(n, n);
    let a2 = a * a;
    for (theta, coeffs) in [
        (THETA_3, &B3[..]),
        (THETA_5, &B5[..]),
        (THETA_7, &B7[..]),
        (THETA_9, &B9[..]),
    ] {
        if norm <= theta {
            let (u, v) = pade_low(a, &a2, &ident, coeffs);
            return pade_solve(&u, &v);
        }
    }

    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scale = 2f64.powi(-s);
    let a = a * scale;
    let a2 = a2 * (scale * scale);
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let b = &B13;
    let u_inner = &a6 * (&a6 * b[13] + &a4 * b[11] + &a2 * b[9])
        + &a6 * b[7]
        + &a4 * b[5]
        + &a2 * b[3]
        + &ident * b[1];
    let u = &a * u_inner;
    let v = &a6 * (&a6 * b[12] + &a4 * b[10] + &a2 * b[8])
        + &a6 * b[6]
        + &a4 * b[4]
        + &a2 * b[2]
        + &ident * b[0];
    let mut r = pade_solve(&u, &v);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

fn pade_low(
    a: &DMatrix<f64>,
    a2: &DMatrix<f64>,
    ident: &DMatrix<f64>,
    coeffs: &[f64],
) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut u_inner = ident * coeffs[1];
    let mut v = ident * coeffs[0];
    let mut power = ident.clone();
    let mut k = 2;
    while k < coeffs.len() {
        power = &power * a2;
        v += &power * coeffs[k];
        u_inner += &power * coeffs[k + 1];
        k += 2;
    }
    (a * u_inner, v)
}

fn pade_solve(u: &DMatrix<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
    let p = v + u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .expect("Padé denominator is nonsingular within the degree thresholds")
}

/// `exp(t·a)·x`.
pub fn expm_apply(a: &DMatrix<f64>, t: f64, x: &[f64]) -> Vec<f64> {
    let e = expm(&(a * t));
    let y = e * DVector::from_column_slice(x);
    y.iter().copied().collect()
}

/// Unit-norm basis vector of the one-dimensional kernel of `b`, computed by a
/// column-pivoted QR of `bᵀ`. Fails when the kernel is not one-dimensional
/// under the relative threshold `rel_tol·‖b‖`.
pub fn null_vector(b: &DMatrix<f64>, rel_tol: f64) -> Result<DVector<f64>> {
    let n = b.nrows();
    if n == 0 || !b.is_square() {
        return Err(Error::InvalidGenerator("null_vector needs a square matrix".into()));
    }
    if n == 1 {
        return Ok(DVector::from_element(1, 1.0));
    }
    let scale = norm1(b).max(f64::MIN_POSITIVE);
    let qr = ColPivQR::new(b.transpose());
    let r = qr.r();
    let thresh = rel_tol * scale;
    let last = r[(n - 1, n - 1)].abs();
    let second = r[(n - 2, n - 2)].abs();
    if last > thresh {
        return Err(Error::NonConvergent(format!(
            "generator is nonsingular (smallest pivot {last:e})"
        )));
    }
    if second <= thresh {
        return Err(Error::Reducible);
    }
    let q = qr.q();
    Ok(q.column(n - 1).into_owned())
}

/// Whether the directed graph with an edge `j → i` for every off-diagonal
/// entry `|a[(i, j)]| > tol` is strongly connected.
pub fn strongly_connected(a: &DMatrix<f64>, tol: f64) -> bool {
    let n = a.nrows();
    if n <= 1 {
        return true;
    }
    let reach = |forward: bool| -> bool {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for w in 0..n {
                if w == v || seen[w] {
                    continue;
                }
                let entry = if forward { a[(w, v)] } else { a[(v, w)] };
                if entry.abs() > tol {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}
