//! Dense matrix exponential by Pade approximation with scaling and squaring
//! (Higham 2005 degree selection: 3/5/7/9/13).

use crate::error::Error;
use crate::spinor::{c, C64};
use crate::Result;
use ndarray::Array2;
use ndarray_linalg::Inverse;

// degree-selection thresholds with their digits as published
#[allow(clippy::excessive_precision)]
const THETA: [(usize, f64); 5] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
    (13, 5.371920351148152e0),
];

fn pade_coeffs(degree: usize) -> &'static [f64] {
    match degree {
        3 => &[120.0, 60.0, 12.0, 1.0],
        5 => &[30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0],
        7 => &[
            17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
        ],
        9 => &[
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
        ],
        13 => &[
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
        ],
        _ => unreachable!("unsupported Pade degree"),
    }
}

fn one_norm(a: &Array2<C64>) -> f64 {
    let mut best = 0.0f64;
    for col in a.columns() {
        let s: f64 = col.iter().map(|z| z.norm()).sum();
        best = best.max(s);
    }
    best
}

/// Solve (V - U) X = (V + U) for the Pade quotient.
fn pade_quotient(u: Array2<C64>, v: Array2<C64>) -> Result<Array2<C64>> {
    let denom = &v - &u;
    let numer = &v + &u;
    let inv = denom.inv().map_err(|_| Error::ExpDiverged {
        residual: f64::INFINITY,
    })?;
    Ok(inv.dot(&numer))
}

/// Evaluate the degree-(3/5/7/9) diagonal Pade approximant of exp(a).
fn pade_low(a: &Array2<C64>, degree: usize) -> Result<Array2<C64>> {
    let b = pade_coeffs(degree);
    let n = a.nrows();
    let eye = Array2::<C64>::eye(n);
    // even powers a^2, a^4, ...
    let a2 = a.dot(a);
    let mut powers = vec![eye.clone(), a2];
    while powers.len() < degree / 2 + 1 {
        let next = powers.last().unwrap().dot(&powers[1]);
        powers.push(next);
    }
    let mut u_poly = Array2::<C64>::zeros((n, n));
    let mut v_poly = Array2::<C64>::zeros((n, n));
    for (k, pw) in powers.iter().enumerate() {
        if 2 * k < degree {
            u_poly = u_poly + pw.mapv(|z| z * c(b[2 * k + 1], 0.0));
        }
        v_poly = v_poly + pw.mapv(|z| z * c(b[2 * k], 0.0));
    }
    pade_quotient(a.dot(&u_poly), v_poly)
}

fn pade13(a: &Array2<C64>) -> Result<Array2<C64>> {
    let b = pade_coeffs(13);
    let n = a.nrows();
    let eye = Array2::<C64>::eye(n);
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let scale = |m: &Array2<C64>, coef: f64| m.mapv(|z| z * c(coef, 0.0));

    let u_inner = scale(&a6, b[13]) + scale(&a4, b[11]) + scale(&a2, b[9]);
    let u_poly = a6.dot(&u_inner)
        + scale(&a6, b[7])
        + scale(&a4, b[5])
        + scale(&a2, b[3])
        + scale(&eye, b[1]);
    let v_inner = scale(&a6, b[12]) + scale(&a4, b[10]) + scale(&a2, b[8]);
    let v_poly = a6.dot(&v_inner)
        + scale(&a6, b[6])
        + scale(&a4, b[4])
        + scale(&a2, b[2])
        + scale(&eye, b[0]);
    pade_quotient(a.dot(&u_poly), v_poly)
}

/// exp(a) for a square complex matrix.
pub fn expm(a: &Array2<C64>) -> Result<Array2<C64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::Validation(format!(
            "matrix exponential needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(Error::ExpDiverged { residual: norm });
    }
    for &(degree, theta) in &THETA[..4] {
        if norm <= theta {
            return pade_low(a, degree);
        }
    }
    let theta13 = THETA[4].1;
    let squarings = if norm <= theta13 {
        0
    } else {
        (norm / theta13).log2().ceil() as u32
    };
    let scaled = a.mapv(|z| z / c(2f64.powi(squarings as i32), 0.0));
    let mut x = pade13(&scaled)?;
    for _ in 0..squarings {
        x = x.dot(&x);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinor::C_ZERO;
    use ndarray::array;
    use ndarray_linalg::{Eigh, UPLO};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn exponential_of_zero_is_identity() {
        let z = Array2::<C64>::zeros((5, 5));
        assert_eq!(max_abs_diff(&expm(&z).unwrap(), &Array2::eye(5)), 0.0);
    }

    #[test]
    fn diagonal_matrices_exponentiate_entrywise() {
        let entries = [c(1.0, 0.0), c(0.0, 2.0), c(-0.5, 0.3)];
        let mut a = Array2::<C64>::zeros((3, 3));
        let mut expected = Array2::<C64>::zeros((3, 3));
        for (k, z) in entries.iter().enumerate() {
            a[[k, k]] = *z;
            expected[[k, k]] = z.exp();
        }
        assert!(max_abs_diff(&expm(&a).unwrap(), &expected) <= 1e-13);
    }

    #[test]
    fn nilpotent_series_terminates_exactly() {
        let a = array![[C_ZERO, c(1.0, 0.0)], [C_ZERO, C_ZERO]];
        let expected = array![[c(1.0, 0.0), c(1.0, 0.0)], [C_ZERO, c(1.0, 0.0)]];
        assert!(max_abs_diff(&expm(&a).unwrap(), &expected) <= 1e-15);
    }

    #[test]
    fn antisymmetric_generator_gives_a_rotation() {
        for theta in [0.7, 9.3] {
            // 9.3 exceeds the top Pade bound, exercising the squaring branch
            let a = array![[C_ZERO, c(theta, 0.0)], [c(-theta, 0.0), C_ZERO]];
            let expected = array![
                [c(theta.cos(), 0.0), c(theta.sin(), 0.0)],
                [c(-theta.sin(), 0.0), c(theta.cos(), 0.0)]
            ];
            assert!(
                max_abs_diff(&expm(&a).unwrap(), &expected) <= 1e-12,
                "theta = {theta}"
            );
        }
    }

    #[test]
    fn hermitian_matrices_match_the_spectral_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 24;
        let mut a = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            a[[i, i]] = c(rng.random_range(-1.0..1.0), 0.0);
            for j in i + 1..n {
                let z = c(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
                a[[i, j]] = z;
                a[[j, i]] = z.conj();
            }
        }
        let (vals, raw) = a.eigh(UPLO::Lower).unwrap();
        // the backend reconstructs as conj(V) D V^T, so the eigenvector
        // columns are the conjugated ones
        let vecs = raw.mapv(|z| z.conj());
        let mut d = Array2::<C64>::zeros((n, n));
        for (k, v) in vals.iter().enumerate() {
            d[[k, k]] = c(v.exp(), 0.0);
        }
        let spectral = vecs.dot(&d).dot(&vecs.mapv(|z| z.conj()).t());
        let pade = expm(&a).unwrap();
        let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.exp()));
        let diff = max_abs_diff(&pade, &spectral);
        assert!(diff <= 1e-12 * scale, "diff {diff:e} at scale {scale:e}");
    }

    #[test]
    fn exponential_of_negation_is_the_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 12;
        let a = Array2::<C64>::from_shape_fn((n, n), |_| {
            c(rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4))
        });
        let forward = expm(&a).unwrap();
        let backward = expm(&a.mapv(|z| -z)).unwrap();
        assert!(max_abs_diff(&forward.dot(&backward), &Array2::eye(n)) <= 1e-12);
    }

    #[test]
    fn nonsquare_input_is_rejected() {
        let a = Array2::<C64>::zeros((2, 3));
        assert!(matches!(expm(&a), Err(Error::Validation(_))));
    }
}
