//! Dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub type CMatrix = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry of `m - m^dagger`.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// `Tr[a b]` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::NotSquare { rows: 0, cols: 0 });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(m.nrows())
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Hermitian eigendecomposition with a residual check `||AV - VL|| <= tol ||A||`.
pub fn eigh(m: &CMatrix) -> Result<Eigh> {
    let n = m.nrows();
    let sym = hermitian_part(m);
    let decomposition = sym.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        decomposition.eigenvalues[i]
            .partial_cmp(&decomposition.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values: Vec<f64> = order.iter().map(|&i| decomposition.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &decomposition.eigenvectors.column(src));
    }

    let mut scaled = vectors.clone();
    for (j, &lambda) in values.iter().enumerate() {
        scaled.column_mut(j).scale_mut(lambda);
    }
    let residual = (&sym * &vectors - scaled).norm();
    let norm = sym.norm();
    if residual.is_nan() || residual > Tolerances::DEFAULT.eigen_residual * norm.max(f64::MIN_POSITIVE) {
        return Err(Error::Eigensolver { residual });
    }
    Ok(Eigh { values, vectors })
}

pub fn min_eigenvalue(m: &CMatrix) -> Result<f64> {
    Ok(eigh(m)?.values[0])
}

/// `v v^dagger` for column `j` of `vectors`.
pub(crate) fn outer_column(vectors: &CMatrix, j: usize) -> CMatrix {
    let col = vectors.column(j);
    col * col.adjoint()
}

/// Inverse square root of a positive definite matrix; `None` when the
/// smallest eigenvalue is below `rel_floor` times the largest.
pub fn inv_sqrt_pd(m: &CMatrix, rel_floor: f64) -> Result<Option<CMatrix>> {
    let e = eigh(m)?;
    let n = m.nrows();
    let max = e.values[n - 1];
    if max.is_nan() || max <= 0.0 || e.values[0] <= rel_floor * max {
        return Ok(None);
    }
    let mut out = CMatrix::zeros(n, n);
    for (j, &lambda) in e.values.iter().enumerate() {
        out += outer_column(&e.vectors, j).scale(1.0 / lambda.sqrt());
    }
    Ok(Some(out))
}

/// Kronecker product with `a` as the first (outer) factor.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Partial trace over the second factor of a `d1*d2` square matrix.
pub fn partial_trace_second(m: &CMatrix, d1: usize, d2: usize) -> CMatrix {
    let mut out = CMatrix::zeros(d1, d1);
    for i in 0..d1 {
        for j in 0..d1 {
            let mut acc = ZERO;
            for k in 0..d2 {
                acc += m[(i * d2 + k, j * d2 + k)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Largest entry of `U^dagger U - I`.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - identity(n)))
}

/// JSON form of a complex matrix: rows of `[re, im]` pairs.
pub mod serde_matrix {
    use serde::de::Error as _;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::CMatrix;
    use num_complex::Complex64;

    pub fn to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect()
    }

    pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix, String> {
        let n = rows.len();
        if n == 0 {
            return Err("matrix has no rows".into());
        }
        let m = rows[0].len();
        if rows.iter().any(|r| r.len() != m) {
            return Err("ragged matrix rows".into());
        }
        Ok(CMatrix::from_fn(n, m, |i, j| {
            Complex64::new(rows[i][j][0], rows[i][j][1])
        }))
    }

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        let rows = to_rows(m);
        let mut seq = s.serialize_seq(Some(rows.len()))?;
        for r in &rows {
            seq.serialize_element(r)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        from_rows(&rows).map_err(D::Error::custom)
    }
}
