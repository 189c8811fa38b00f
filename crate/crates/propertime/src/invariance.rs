//! Derivation of the proper-time rate operator from invariance constraints.
//!
//! A candidate rate operator is a Hermitian 4x4 matrix `D` sandwiched as
//! `psi^H D psi`. Requiring that expectation to be invariant under Lorentz
//! transformations, time reversal and parity imposes real-linear conditions
//! on `D`:
//!
//! - Lorentz (infinitesimal, spinor representation): for every antisymmetric
//!   generator pair (mu < nu), `D g^mu g^nu + g^nu^H g^mu^H D = 0`.
//! - Time reversal: `g^1 g^3 D^T g^1 g^3 = -D`.
//! - Parity: `g^0 D g^0 = D`.
//!
//! Each condition is expanded over a fixed orthonormal basis of the 16-dim
//! real vector space of Hermitian matrices and solved as a numerical null
//! space. The staged kernel dimensions are (2, 1, 1) and the unique survivor,
//! normalized to unit rest rate, is the Dirac matrix `beta`.

use ndarray::{Array1, Array2};
use ndarray_linalg::SVD;

use crate::error::Error;
use crate::spinor::{c, CMat4, GammaBasis};
use crate::tol::Tolerances;
use crate::Result;

/// Dimension of the real vector space of Hermitian 4x4 matrices.
pub const BASIS_DIM: usize = 16;

/// Orthonormal Hermitian basis under the real inner product
/// `<A, B> = Re tr(A^H B) / 4`.
///
/// Elements 0..4 are scaled diagonal units, 4..10 symmetric pairs,
/// 10..16 antisymmetric-imaginary pairs.
pub fn hermitian_basis() -> [CMat4; BASIS_DIM] {
    let mut basis = [CMat4::zeros(); BASIS_DIM];
    let mut idx = 0;
    for k in 0..4 {
        let mut m = CMat4::zeros();
        m.0[k][k] = c(2.0, 0.0);
        basis[idx] = m;
        idx += 1;
    }
    let rt2 = std::f64::consts::SQRT_2;
    for k in 0..4 {
        for l in (k + 1)..4 {
            let mut m = CMat4::zeros();
            m.0[k][l] = c(rt2, 0.0);
            m.0[l][k] = c(rt2, 0.0);
            basis[idx] = m;
            idx += 1;
        }
    }
    for k in 0..4 {
        for l in (k + 1)..4 {
            let mut m = CMat4::zeros();
            m.0[k][l] = c(0.0, rt2);
            m.0[l][k] = c(0.0, -rt2);
            basis[idx] = m;
            idx += 1;
        }
    }
    basis
}

/// Coordinates of a Hermitian matrix in [`hermitian_basis`].
#[derive(Clone, Copy, Debug)]
pub struct HermitianParam {
    pub coeffs: [f64; BASIS_DIM],
}

impl HermitianParam {
    pub fn zeros() -> Self {
        HermitianParam {
            coeffs: [0.0; BASIS_DIM],
        }
    }

    /// Project a Hermitian matrix onto the basis.
    pub fn from_matrix(m: &CMat4) -> Result<Self> {
        let tol = Tolerances::standard();
        if !m.is_hermitian(tol.identity * m.max_abs().max(1.0)) {
            return Err(Error::Validation(
                "cannot parametrize a non-Hermitian matrix".into(),
            ));
        }
        let basis = hermitian_basis();
        let mut coeffs = [0.0; BASIS_DIM];
        for (a, b) in basis.iter().enumerate() {
            // <B_a, M> = Re tr(B_a^H M)/4, and B_a is Hermitian
            coeffs[a] = ((*b * *m).trace() / c(4.0, 0.0)).re;
        }
        Ok(HermitianParam { coeffs })
    }

    /// Rebuild the matrix `sum_a coeffs[a] B_a`.
    pub fn reconstruct(&self) -> CMat4 {
        let basis = hermitian_basis();
        let mut m = CMat4::zeros();
        for (a, b) in basis.iter().enumerate() {
            m = m + *b * self.coeffs[a];
        }
        m
    }
}

/// Which symmetry produced a constraint row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowSource {
    /// Lorentz generator pair (mu < nu).
    Lorentz { mu: usize, nu: usize },
    TimeReversal,
    Parity,
}

/// One real-linear functional on Hermitian-parameter space.
#[derive(Clone, Copy, Debug)]
pub struct ConstraintRow {
    pub coeffs: [f64; BASIS_DIM],
    pub source: RowSource,
}

/// Stacked constraint rows from one or more symmetries.
#[derive(Clone, Debug, Default)]
pub struct ConstraintSystem {
    pub rows: Vec<ConstraintRow>,
}

impl ConstraintSystem {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn extend(&mut self, other: ConstraintSystem) {
        self.rows.extend(other.rows);
    }

    /// Evaluate every row at the given parameter vector.
    pub fn evaluate(&self, p: &HermitianParam) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| {
                r.coeffs
                    .iter()
                    .zip(p.coeffs.iter())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    fn to_matrix(&self) -> Array2<f64> {
        let mut a = Array2::zeros((self.rows.len(), BASIS_DIM));
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row.coeffs.iter().enumerate() {
                a[[i, j]] = *v;
            }
        }
        a
    }
}

/// Expand a real-linear matrix map `F` into constraint rows: the real and
/// imaginary parts of all 16 entries of `F(B_a)`, as functionals of the
/// basis coordinates.
fn rows_from_map<F>(map: F, source: RowSource) -> Vec<ConstraintRow>
where
    F: Fn(&CMat4) -> CMat4,
{
    let basis = hermitian_basis();
    let images: Vec<CMat4> = basis.iter().map(&map).collect();
    let mut rows = Vec::with_capacity(32);
    for i in 0..4 {
        for j in 0..4 {
            for part in 0..2 {
                let mut coeffs = [0.0; BASIS_DIM];
                for (a, img) in images.iter().enumerate() {
                    let z = img.0[i][j];
                    coeffs[a] = if part == 0 { z.re } else { z.im };
                }
                rows.push(ConstraintRow { coeffs, source });
            }
        }
    }
    rows
}

/// Lorentz-invariance rows: for each generator pair (mu < nu) the entries of
/// `D g^mu g^nu + g^nu^H g^mu^H D`.
pub fn lorentz_rows(gb: &GammaBasis) -> ConstraintSystem {
    let mut rows = Vec::with_capacity(6 * 32);
    for mu in 0..4 {
        for nu in (mu + 1)..4 {
            let gmn = gb.gamma[mu] * gb.gamma[nu];
            let gnm_adj = gb.gamma[nu].adjoint() * gb.gamma[mu].adjoint();
            let map = |d: &CMat4| *d * gmn + gnm_adj * *d;
            rows.extend(rows_from_map(map, RowSource::Lorentz { mu, nu }));
        }
    }
    ConstraintSystem { rows }
}

/// Time-reversal rows: entries of `g^1 g^3 D^T g^1 g^3 + D`.
pub fn time_reversal_rows(gb: &GammaBasis) -> ConstraintSystem {
    let g13 = gb.gamma[1] * gb.gamma[3];
    let map = |d: &CMat4| g13 * d.transpose() * g13 + *d;
    ConstraintSystem {
        rows: rows_from_map(map, RowSource::TimeReversal),
    }
}

/// Parity rows: entries of `g^0 D g^0 - D`.
pub fn parity_rows(gb: &GammaBasis) -> ConstraintSystem {
    let g0 = gb.gamma[0];
    let map = |d: &CMat4| g0 * *d * g0 - *d;
    ConstraintSystem {
        rows: rows_from_map(map, RowSource::Parity),
    }
}

/// Null space of the stacked system by SVD with a relative singular-value
/// threshold. Returns an orthonormal kernel basis.
pub fn null_space(sys: &ConstraintSystem) -> Result<Vec<HermitianParam>> {
    if sys.is_empty() {
        return Err(Error::Validation(
            "constraint system has no rows".into(),
        ));
    }
    let tol = Tolerances::standard();
    let a = sys.to_matrix();
    let max_entry = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max_entry < tol.exact {
        return Err(Error::DegenerateSystem);
    }

    let (_, s, vt) = a
        .svd(false, true)
        .map_err(|e| Error::Validation(format!("SVD failed: {e}")))?;
    let vt: Array2<f64> = vt.expect("requested right singular vectors");
    let s: Array1<f64> = s;
    let smax = s[0];
    if smax < tol.exact {
        return Err(Error::DegenerateSystem);
    }
    let rank = s.iter().filter(|&&sv| sv > tol.rank * smax).count();

    let mut kernel = Vec::new();
    for k in rank..BASIS_DIM {
        let mut coeffs = [0.0; BASIS_DIM];
        for j in 0..BASIS_DIM {
            coeffs[j] = vt[[k, j]];
        }
        kernel.push(HermitianParam { coeffs });
    }
    Ok(kernel)
}

/// Result of the staged derivation.
#[derive(Clone, Copy, Debug)]
pub struct Derivation {
    /// Kernel dimensions after (Lorentz), (Lorentz + T), (Lorentz + T + P).
    pub stage_dims: [usize; 3],
    /// The unique surviving operator, normalized to unit rest rate.
    pub matrix: CMat4,
}

/// Run the full constraint pipeline and normalize the survivor so its (1,1)
/// entry is +1 (unit rate for a positive-energy particle at rest).
pub fn derivation(gb: &GammaBasis) -> Result<Derivation> {
    let mut sys = lorentz_rows(gb);
    let dim_lorentz = null_space(&sys)?.len();

    sys.extend(time_reversal_rows(gb));
    let dim_lt = null_space(&sys)?.len();

    sys.extend(parity_rows(gb));
    let kernel = null_space(&sys)?;
    let dim_ltp = kernel.len();
    if dim_ltp != 1 {
        return Err(Error::UnexpectedKernel {
            stage: "lorentz+time-reversal+parity",
            dim: dim_ltp,
            expected: 1,
        });
    }

    let raw = kernel[0].reconstruct();
    let lead = raw.0[0][0];
    if lead.norm() < 1e-6 * raw.max_abs() {
        return Err(Error::Validation(
            "surviving operator has vanishing rest-rate entry; cannot normalize".into(),
        ));
    }
    // Hermitian matrix: the diagonal entry is real up to rounding.
    let matrix = raw.scale(c(1.0 / lead.re, 0.0));

    Ok(Derivation {
        stage_dims: [dim_lorentz, dim_lt, dim_ltp],
        matrix,
    })
}

/// The derived rate operator itself.
pub fn derive_rate_matrix(gb: &GammaBasis) -> Result<CMat4> {
    derivation(gb).map(|d| d.matrix)
}

/// The second Lorentz-kernel element: the antidiagonal Hermitian matrix
/// `[[0, i I2], [-i I2, 0]]` that time reversal (and parity) excludes.
/// Exposed for tests and reports.
pub fn antidiagonal_kernel_partner() -> CMat4 {
    let mut m = CMat4::zeros();
    for k in 0..2 {
        m.0[k][k + 2] = c(0.0, 1.0);
        m.0[k + 2][k] = c(0.0, -1.0);
    }
    m
}
