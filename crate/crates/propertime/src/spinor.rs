//! Dense 4x4 complex matrices, 4-spinors and the Dirac-representation
//! gamma-matrix family.
//!
//! Everything here is closed-form arithmetic on fixed-size arrays; no
//! iterative numerics except the operator norm, which defers to LAPACK.

use std::ops::{Add, Mul, Neg, Sub};

use ndarray::Array2;
use ndarray_linalg::SVD;
use num_complex::Complex64;

pub type C64 = Complex64;

pub const C_ZERO: C64 = Complex64::new(0.0, 0.0);
pub const C_ONE: C64 = Complex64::new(1.0, 0.0);
pub const C_I: C64 = Complex64::new(0.0, 1.0);

/// Shorthand complex constructor.
pub fn c(re: f64, im: f64) -> C64 {
    Complex64::new(re, im)
}

// ============================================================================
// 2x2 building blocks
// ============================================================================

/// Dense 2x2 complex matrix (Pauli blocks, spin seeds).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat2(pub [[C64; 2]; 2]);

impl CMat2 {
    pub fn zeros() -> Self {
        CMat2([[C_ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        CMat2([[C_ONE, C_ZERO], [C_ZERO, C_ONE]])
    }

    /// Pauli matrix sigma_j for j in 1..=3.
    pub fn pauli(j: usize) -> Self {
        match j {
            1 => CMat2([[C_ZERO, C_ONE], [C_ONE, C_ZERO]]),
            2 => CMat2([[C_ZERO, -C_I], [C_I, C_ZERO]]),
            3 => CMat2([[C_ONE, C_ZERO], [C_ZERO, -C_ONE]]),
            _ => panic!("pauli index must be 1, 2 or 3"),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = CMat2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = self.0[i][j] * s;
            }
        }
        out
    }
}

// ============================================================================
// 4-spinors
// ============================================================================

/// Complex 4-component spinor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spinor4(pub [C64; 4]);

impl Spinor4 {
    pub fn zeros() -> Self {
        Spinor4([C_ZERO; 4])
    }

    pub fn basis(k: usize) -> Self {
        let mut v = Spinor4::zeros();
        v.0[k] = C_ONE;
        v
    }

    /// Conjugating inner product `<self|other>`.
    pub fn dot(&self, other: &Spinor4) -> C64 {
        let mut acc = C_ZERO;
        for k in 0..4 {
            acc += self.0[k].conj() * other.0[k];
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).re.sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        for k in 0..4 {
            out.0[k] *= s;
        }
        out
    }

    pub fn normalized(&self) -> Self {
        self.scale(c(1.0 / self.norm(), 0.0))
    }
}

impl Add for Spinor4 {
    type Output = Spinor4;
    fn add(self, rhs: Spinor4) -> Spinor4 {
        let mut out = self;
        for k in 0..4 {
            out.0[k] += rhs.0[k];
        }
        out
    }
}

impl Sub for Spinor4 {
    type Output = Spinor4;
    fn sub(self, rhs: Spinor4) -> Spinor4 {
        let mut out = self;
        for k in 0..4 {
            out.0[k] -= rhs.0[k];
        }
        out
    }
}

// ============================================================================
// 4x4 complex matrices
// ============================================================================

/// Dense 4x4 complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat4(pub [[C64; 4]; 4]);

impl CMat4 {
    pub fn zeros() -> Self {
        CMat4([[C_ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = CMat4::zeros();
        for k in 0..4 {
            m.0[k][k] = C_ONE;
        }
        m
    }

    /// Real diagonal matrix.
    pub fn diag(d: [f64; 4]) -> Self {
        let mut m = CMat4::zeros();
        for (k, &v) in d.iter().enumerate() {
            m.0[k][k] = c(v, 0.0);
        }
        m
    }

    /// Assemble from 2x2 blocks `[[a, b], [d, e]]`.
    pub fn from_blocks(a: CMat2, b: CMat2, d: CMat2, e: CMat2) -> Self {
        let mut m = CMat4::zeros();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = a.0[i][j];
                m.0[i][j + 2] = b.0[i][j];
                m.0[i + 2][j] = d.0[i][j];
                m.0[i + 2][j + 2] = e.0[i][j];
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] *= s;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = CMat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.0[j][i].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = CMat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = self.0[j][i];
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2] + self.0[3][3]
    }

    pub fn matvec(&self, v: &Spinor4) -> Spinor4 {
        let mut out = Spinor4::zeros();
        for i in 0..4 {
            let mut acc = C_ZERO;
            for j in 0..4 {
                acc += self.0[i][j] * v.0[j];
            }
            out.0[i] = acc;
        }
        out
    }

    pub fn commutator(a: &CMat4, b: &CMat4) -> CMat4 {
        *a * *b - *b * *a
    }

    pub fn anticommutator(a: &CMat4, b: &CMat4) -> CMat4 {
        *a * *b + *b * *a
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for row in &self.0 {
            for z in row {
                m = m.max(z.norm());
            }
        }
        m
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &CMat4) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Operator norm: largest singular value (LAPACK SVD).
    pub fn op_norm(&self) -> f64 {
        let (_, s, _) = self
            .to_array2()
            .svd(false, false)
            .expect("SVD of a finite 4x4 matrix cannot fail");
        s.iter().cloned().fold(0.0f64, f64::max)
    }

    pub fn to_array2(&self) -> Array2<C64> {
        Array2::from_shape_fn((4, 4), |(i, j)| self.0[i][j])
    }

    pub fn from_array2(a: &Array2<C64>) -> Self {
        assert_eq!(a.dim(), (4, 4));
        let mut m = CMat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = a[[i, j]];
            }
        }
        m
    }
}

impl Add for CMat4 {
    type Output = CMat4;
    fn add(self, rhs: CMat4) -> CMat4 {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for CMat4 {
    type Output = CMat4;
    fn sub(self, rhs: CMat4) -> CMat4 {
        let mut out = self;
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] -= rhs.0[i][j];
            }
        }
        out
    }
}

impl Neg for CMat4 {
    type Output = CMat4;
    fn neg(self) -> CMat4 {
        self.scale(-C_ONE)
    }
}

impl Mul for CMat4 {
    type Output = CMat4;
    fn mul(self, rhs: CMat4) -> CMat4 {
        let mut out = CMat4::zeros();
        for i in 0..4 {
            for k in 0..4 {
                let aik = self.0[i][k];
                if aik == C_ZERO {
                    continue;
                }
                for j in 0..4 {
                    out.0[i][j] += aik * rhs.0[k][j];
                }
            }
        }
        out
    }
}

impl Mul<C64> for CMat4 {
    type Output = CMat4;
    fn mul(self, rhs: C64) -> CMat4 {
        self.scale(rhs)
    }
}

impl Mul<f64> for CMat4 {
    type Output = CMat4;
    fn mul(self, rhs: f64) -> CMat4 {
        self.scale(c(rhs, 0.0))
    }
}

// ============================================================================
// Gamma matrices, Dirac representation
// ============================================================================

/// The Dirac-representation matrix family: gamma^mu, alpha_j, beta, Sigma_j
/// and the metric signature (+,-,-,-).
#[derive(Clone, Copy, Debug)]
pub struct GammaBasis {
    pub gamma: [CMat4; 4],
    pub alpha: [CMat4; 3],
    pub beta: CMat4,
    pub sigma: [CMat4; 3],
    pub eta: [f64; 4],
}

impl GammaBasis {
    /// Standard Dirac representation:
    /// gamma^0 = diag(I, -I), gamma^j = [[0, sigma_j], [-sigma_j, 0]].
    pub fn dirac() -> Self {
        let i2 = CMat2::identity();
        let z2 = CMat2::zeros();
        let minus = c(-1.0, 0.0);

        let gamma0 = CMat4::from_blocks(i2, z2, z2, i2.scale(minus));
        let mut gamma = [gamma0; 4];
        let mut alpha = [CMat4::zeros(); 3];
        let mut sigma = [CMat4::zeros(); 3];
        for j in 1..=3 {
            let s = CMat2::pauli(j);
            gamma[j] = CMat4::from_blocks(z2, s, s.scale(minus), z2);
            // alpha_j = gamma^0 gamma^j = [[0, sigma_j], [sigma_j, 0]]
            alpha[j - 1] = CMat4::from_blocks(z2, s, s, z2);
            // Sigma_j = diag(sigma_j, sigma_j)
            sigma[j - 1] = CMat4::from_blocks(s, z2, z2, s);
        }

        GammaBasis {
            gamma,
            alpha,
            beta: gamma0,
            sigma,
            eta: [1.0, -1.0, -1.0, -1.0],
        }
    }
}
