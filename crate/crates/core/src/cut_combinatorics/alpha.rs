use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{invalid, Result};

/// Asymptotic number of minimal A-B cuts per column of the l-scheme, in closed form.
///
/// `alpha(1) = 1`; for `l >= 2`, with `s = sqrt(l^2 + 6l - 7)`,
/// `alpha(l) = 2^-l ((1 + l + s)^l - (1 + l - s)^l) / s`.
pub fn alpha_closed(l: usize) -> Result<f64> {
    match l {
        0 => Err(invalid("alpha(l) needs l >= 1")),
        1 => Ok(1.0),
        _ => {
            let lf = l as f64;
            let s = (lf * lf + 6.0 * lf - 7.0).sqrt();
            let e = l as i32;
            Ok(((1.0 + lf + s).powi(e) - (1.0 + lf - s).powi(e)) / (2f64.powi(e) * s))
        }
    }
}

/// The same quantity via the two-state transfer matrix, in exact arithmetic:
/// `alpha(l) = (1 / (l-1)) (1, l-2) M^(l-1) (1, 1)^T` with
/// `M = [[3, 2(l-2)], [2, l-2]]`.
pub fn alpha_matrix(l: usize) -> Result<BigRational> {
    if l < 2 {
        return Err(invalid("matrix form of alpha(l) needs l >= 2"));
    }
    let k = BigInt::from(l - 2);
    let m: Mat = [
        [BigInt::from(3), BigInt::from(2) * &k],
        [BigInt::from(2), k.clone()],
    ];
    let p = mat_pow(&m, l - 1);
    let row = [BigInt::one(), k];
    let mut total = BigInt::zero();
    for (i, coeff) in row.iter().enumerate() {
        total += coeff * (&p[i][0] + &p[i][1]);
    }
    Ok(BigRational::new(total, BigInt::from(l - 1)))
}

type Mat = [[BigInt; 2]; 2];

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let cell = |i: usize, j: usize| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
    [[cell(0, 0), cell(0, 1)], [cell(1, 0), cell(1, 1)]]
}

fn mat_pow(m: &Mat, mut e: usize) -> Mat {
    let mut result: Mat = [
        [BigInt::one(), BigInt::zero()],
        [BigInt::zero(), BigInt::one()],
    ];
    let mut base = m.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = mat_mul(&result, &base);
        }
        base = mat_mul(&base, &base);
        e >>= 1;
    }
    result
}
