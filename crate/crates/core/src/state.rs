//! Quantum and classical state spaces with their state-dependent geometry.
//!
//! A density operator `rho` induces the semi-inner product
//! `<A, B>_rho = <{A, B}>_rho / 2` on Hermitian operators, and a probability
//! distribution `p` induces `<f, g>_p = <f g>_p` on real outcome functions.
//! Both are only positive semidefinite, so operators (functions) that differ
//! by something invisible to the state are indistinguishable here.

use std::collections::HashSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, serde_matrix, CMatrix, ONE, ZERO};
use crate::tolerance::Tolerances;

#[derive(Serialize, Deserialize)]
struct MatrixJson(#[serde(with = "serde_matrix")] CMatrix);

/// A self-adjoint operator on a finite-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct Observable {
    matrix: CMatrix,
}

impl TryFrom<MatrixJson> for Observable {
    type Error = Error;
    fn try_from(m: MatrixJson) -> Result<Self> {
        Observable::new(m.0)
    }
}

impl From<Observable> for MatrixJson {
    fn from(o: Observable) -> Self {
        MatrixJson(o.matrix)
    }
}

impl Observable {
    /// Validates Hermiticity to `1e-12` relative to the largest entry and
    /// stores the exact Hermitian part.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        linalg::check_square(&matrix)?;
        let residual = linalg::hermiticity_residual(&matrix);
        if residual > Tolerances::DEFAULT.input * linalg::max_abs(&matrix) {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self::from_hermitian_part(&matrix))
    }

    /// Hermitian part of an operator that is self-adjoint up to roundoff.
    pub(crate) fn from_hermitian_part(matrix: &CMatrix) -> Self {
        Self {
            matrix: linalg::hermitian_part(matrix),
        }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare {
                rows: n,
                cols: rows.first().map_or(0, |r| r.len()),
            });
        }
        Self::new(CMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self {
            matrix: CMatrix::from_fn(n, n, |i, j| if i == j { Complex64::new(values[i], 0.0) } else { ZERO }),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: linalg::identity(dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim, dim),
        }
    }

    pub fn pauli_x() -> Self {
        Self {
            matrix: CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        }
    }

    pub fn pauli_y() -> Self {
        Self {
            matrix: CMatrix::from_row_slice(2, 2, &[ZERO, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), ZERO]),
        }
    }

    pub fn pauli_z() -> Self {
        Self::diagonal(&[1.0, -1.0])
    }

    /// `|v><v| / <v|v>`.
    pub fn projector(v: &[Complex64]) -> Result<Self> {
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if v.is_empty() || !norm2.is_finite() || norm2 <= 0.0 {
            return Err(Error::ParameterOutOfRange(
                "projector needs a nonzero finite vector".into(),
            ));
        }
        let col = nalgebra::DVector::from_column_slice(v);
        Ok(Self::from_hermitian_part(&(&col * col.adjoint()).scale(1.0 / norm2)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Largest absolute entry, used as a scale for relative thresholds.
    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.matrix)
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        linalg::min_eigenvalue(&self.matrix)
    }

    /// `(A B + B A) / 2`.
    pub fn jordan_product(&self, other: &Observable) -> Result<Observable> {
        check_dims(self.dim(), other.dim())?;
        let ab = &self.matrix * &other.matrix;
        Ok(Self::from_hermitian_part(&ab))
    }

    /// The square `A^2`.
    pub fn square(&self) -> Observable {
        Self::from_hermitian_part(&(&self.matrix * &self.matrix))
    }

    /// `sum_i c_i X_i` over observables of a common dimension.
    pub fn linear_combination<'a>(
        dim: usize,
        terms: impl IntoIterator<Item = (f64, &'a Observable)>,
    ) -> Result<Observable> {
        let mut acc = CMatrix::zeros(dim, dim);
        for (c, x) in terms {
            check_dims(dim, x.dim())?;
            acc += x.matrix.scale(c);
        }
        Ok(Self { matrix: acc })
    }

    pub fn scaled(&self, s: f64) -> Observable {
        Self {
            matrix: self.matrix.scale(s),
        }
    }

    pub fn try_add(&self, other: &Observable) -> Result<Observable> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn try_sub(&self, other: &Observable) -> Result<Observable> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            matrix: &self.matrix - &other.matrix,
        })
    }

    /// Projection onto the traceless subspace.
    pub fn traceless_part(&self) -> Observable {
        let n = self.dim();
        let shift = self.trace() / n as f64;
        Self {
            matrix: &self.matrix - linalg::identity(n).scale(shift),
        }
    }
}

impl Add for &Observable {
    type Output = Observable;
    fn add(self, rhs: &Observable) -> Observable {
        self.try_add(rhs).expect("observable dimensions must agree")
    }
}

impl Sub for &Observable {
    type Output = Observable;
    fn sub(self, rhs: &Observable) -> Observable {
        self.try_sub(rhs).expect("observable dimensions must agree")
    }
}

impl Neg for &Observable {
    type Output = Observable;
    fn neg(self) -> Observable {
        self.scaled(-1.0)
    }
}

impl Mul<&Observable> for f64 {
    type Output = Observable;
    fn mul(self, rhs: &Observable) -> Observable {
        rhs.scaled(self)
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A unit-trace positive semidefinite Hermitian matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl TryFrom<MatrixJson> for DensityOperator {
    type Error = Error;
    fn try_from(m: MatrixJson) -> Result<Self> {
        DensityOperator::new(m.0)
    }
}

impl From<DensityOperator> for MatrixJson {
    fn from(o: DensityOperator) -> Self {
        MatrixJson(o.matrix)
    }
}

impl DensityOperator {
    /// Validates a density matrix. Eigenvalues in `[-1e-10, 0)` are clipped
    /// to zero and the trace renormalized; anything more negative is rejected.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        linalg::check_square(&matrix)?;
        let residual = linalg::hermiticity_residual(&matrix);
        if residual > tol.input * linalg::max_abs(&matrix) {
            return Err(Error::NotHermitian { residual });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tol.input {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        let herm = linalg::hermitian_part(&matrix);
        let eig = linalg::eigh(&herm)?;
        let min = eig.values[0];
        if min < -tol.psd {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        if min >= 0.0 {
            return Ok(Self { matrix: herm });
        }
        let n = herm.nrows();
        let mut clipped = CMatrix::zeros(n, n);
        let mut total = 0.0;
        for (j, &lambda) in eig.values.iter().enumerate() {
            if lambda > 0.0 {
                clipped += linalg::outer_column(&eig.vectors, j).scale(lambda);
                total += lambda;
            }
        }
        Ok(Self {
            matrix: linalg::hermitian_part(&clipped.scale(1.0 / total)),
        })
    }

    /// Pure state `|psi><psi|`, normalizing `psi`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let p = Observable::projector(psi)?;
        Ok(Self { matrix: p.matrix })
    }

    /// Computational basis state `|k><k|`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::ParameterOutOfRange(format!("basis index {k} >= dim {dim}")));
        }
        let mut v = vec![ZERO; dim];
        v[k] = ONE;
        Self::pure(&v)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: linalg::identity(dim).scale(1.0 / dim as f64),
        }
    }

    /// Qubit state `(I + r . sigma) / 2` for a Bloch vector with `|r| <= 1`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if len.is_nan() || len > 1.0 + 1e-12 {
            return Err(Error::ParameterOutOfRange(format!("Bloch vector length {len} > 1")));
        }
        let m = linalg::identity(2)
            + Observable::pauli_x().matrix.scale(r[0])
            + Observable::pauli_y().matrix.scale(r[1])
            + Observable::pauli_z().matrix.scale(r[2]);
        Self::new(m.scale(0.5))
    }

    /// `lambda rho1 + (1 - lambda) rho2`.
    pub fn mixture(lambda: f64, rho1: &DensityOperator, rho2: &DensityOperator) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::ParameterOutOfRange(format!("mixing weight {lambda}")));
        }
        check_dims(rho1.dim(), rho2.dim())?;
        Self::new(rho1.matrix.scale(lambda) + rho2.matrix.scale(1.0 - lambda))
    }

    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> Result<usize> {
        Ok(linalg::eigh(&self.matrix)?.values.iter().filter(|&&l| l > tol).count())
    }

    pub fn purity(&self) -> f64 {
        linalg::trace_product(&self.matrix, &self.matrix).re
    }
}

/// Finite sample space: distinct labels, each carrying a numeric value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSpace {
    labels: Vec<String>,
    values: Vec<f64>,
}

impl OutcomeSpace {
    pub fn new(labels: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidOutcomeSpace("no outcomes".into()));
        }
        if labels.len() != values.len() {
            return Err(Error::InvalidOutcomeSpace(format!(
                "{} labels but {} values",
                labels.len(),
                values.len()
            )));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidOutcomeSpace(format!("duplicate label {l:?}")));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidOutcomeSpace("non-finite outcome value".into()));
        }
        Ok(Self { labels, values })
    }

    /// Labels are the shortest round-trip decimal form of each value.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let labels = values.iter().map(|v| format!("{v}")).collect();
        Self::new(labels, values)
    }

    /// Outcomes `1..=n`.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::from_values((1..=n).map(|k| k as f64).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub(crate) fn check_same(&self, other: &OutcomeSpace) -> Result<()> {
        if self != other {
            return Err(Error::OutcomeSpaceMismatch);
        }
        Ok(())
    }
}

/// Probability weights over an outcome space.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    space: OutcomeSpace,
    weights: Vec<f64>,
}

impl Distribution {
    /// Weights in `[-1e-12, 0)` are clipped to zero; the sum must be within
    /// `1e-10` of one.
    pub fn new(space: OutcomeSpace, weights: Vec<f64>) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        if weights.len() != space.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} weights for {} outcomes",
                weights.len(),
                space.len()
            )));
        }
        let mut clipped = Vec::with_capacity(weights.len());
        for w in weights {
            if !w.is_finite() || w < -tol.input {
                return Err(Error::InvalidDistribution(format!("weight {w}")));
            }
            clipped.push(w.max(0.0));
        }
        let sum: f64 = clipped.iter().sum();
        if (sum - 1.0).abs() > tol.probability_sum {
            return Err(Error::InvalidDistribution(format!("weights sum to {sum}")));
        }
        Ok(Self {
            space,
            weights: clipped,
        })
    }

    pub fn uniform(space: OutcomeSpace) -> Self {
        let n = space.len();
        Self {
            space,
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, label: &str) -> Option<f64> {
        self.space.index_of(label).map(|i| self.weights[i])
    }

    /// Largest absolute weight difference against another distribution.
    pub fn max_difference(&self, other: &Distribution) -> Result<f64> {
        self.space.check_same(&other.space)?;
        Ok(self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

impl Serialize for Distribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.weights.len()))?;
        for (l, w) in self.space.labels.iter().zip(&self.weights) {
            map.serialize_entry(l, w)?;
        }
        map.end()
    }
}

/// Reads `{label: weight}` in document order. An outcome's numeric value is
/// its label parsed as a number, or its 1-based position when that fails.
impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct OrderedMap;
        impl<'de> Visitor<'de> for OrderedMap {
            type Value = Vec<(String, f64)>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from outcome labels to weights")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = access.next_entry::<String, f64>()? {
                    out.push((k, v));
                }
                Ok(out)
            }
        }
        let entries = d.deserialize_map(OrderedMap)?;
        let values = entries
            .iter()
            .enumerate()
            .map(|(i, (l, _))| l.trim().parse::<f64>().unwrap_or((i + 1) as f64))
            .collect();
        let (labels, weights): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        let space = OutcomeSpace::new(labels, values).map_err(serde::de::Error::custom)?;
        Distribution::new(space, weights).map_err(serde::de::Error::custom)
    }
}

/// A real-valued function on an outcome space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeFunction {
    space: OutcomeSpace,
    values: Vec<f64>,
}

impl OutcomeFunction {
    pub fn new(space: OutcomeSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::OutcomeSpaceMismatch);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::ParameterOutOfRange("non-finite function value".into()));
        }
        Ok(Self { space, values })
    }

    pub fn constant(space: OutcomeSpace, c: f64) -> Self {
        let n = space.len();
        Self {
            space,
            values: vec![c; n],
        }
    }

    /// The estimator `f(w) = w` reading off each outcome's numeric value.
    pub fn identity(space: OutcomeSpace) -> Self {
        let values = space.values.clone();
        Self { space, values }
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn map(&self, op: impl Fn(f64) -> f64) -> Self {
        Self {
            space: self.space.clone(),
            values: self.values.iter().map(|&v| op(v)).collect(),
        }
    }

    /// `a f + b g`.
    pub fn combine(&self, a: f64, other: &OutcomeFunction, b: f64) -> Result<Self> {
        self.space.check_same(&other.space)?;
        Ok(Self {
            space: self.space.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    pub fn max_abs_difference(&self, other: &OutcomeFunction) -> Result<f64> {
        self.space.check_same(&other.space)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// `Tr[X rho]`.
pub fn expectation(x: &Observable, rho: &DensityOperator) -> Result<f64> {
    check_dims(x.dim(), rho.dim())?;
    let z = linalg::trace_product(&x.matrix, &rho.matrix);
    debug_assert!(z.im.abs() <= 1e-10 * (1.0 + x.max_abs()));
    Ok(z.re)
}

/// `<A, B>_rho = <{A, B}>_rho / 2 = Re Tr[A B rho]`.
pub fn state_inner(a: &Observable, b: &Observable, rho: &DensityOperator) -> Result<f64> {
    Ok(complex_state_product(a, b, rho)?.re)
}

/// `Tr[A B rho]`; its imaginary part is `<[A, B] / 2i>_rho`.
pub fn complex_state_product(a: &Observable, b: &Observable, rho: &DensityOperator) -> Result<Complex64> {
    check_dims(a.dim(), b.dim())?;
    check_dims(a.dim(), rho.dim())?;
    let ab = &a.matrix * &b.matrix;
    Ok(linalg::trace_product(&ab, &rho.matrix))
}

/// `<[A, B] / 2i>_rho`.
pub fn commutator_expectation(a: &Observable, b: &Observable, rho: &DensityOperator) -> Result<f64> {
    Ok(complex_state_product(a, b, rho)?.im)
}

/// `||A||_rho = sqrt(<A^2>_rho)`.
pub fn state_norm(a: &Observable, rho: &DensityOperator) -> Result<f64> {
    Ok(state_inner(a, a, rho)?.max(0.0).sqrt())
}

/// Quantum standard deviation `sqrt(||A||_rho^2 - <A>_rho^2)`, clipped at zero.
pub fn std_dev(a: &Observable, rho: &DensityOperator) -> Result<f64> {
    let norm2 = state_inner(a, a, rho)?;
    let mean = expectation(a, rho)?;
    Ok((norm2 - mean * mean).max(0.0).sqrt())
}

/// `<f>_p`.
pub fn class_mean(f: &OutcomeFunction, p: &Distribution) -> Result<f64> {
    f.space.check_same(&p.space)?;
    Ok(f.values.iter().zip(&p.weights).map(|(v, w)| v * w).sum())
}

/// `<f, g>_p = sum_w f(w) g(w) p(w)`.
pub fn class_inner(f: &OutcomeFunction, g: &OutcomeFunction, p: &Distribution) -> Result<f64> {
    f.space.check_same(&p.space)?;
    g.space.check_same(&p.space)?;
    Ok(f.values
        .iter()
        .zip(&g.values)
        .zip(&p.weights)
        .filter(|(_, &w)| w > 0.0)
        .map(|((a, b), w)| a * b * w)
        .sum())
}

pub fn class_norm(f: &OutcomeFunction, p: &Distribution) -> Result<f64> {
    Ok(class_inner(f, f, p)?.max(0.0).sqrt())
}

/// Classical standard deviation `sqrt(||f||_p^2 - <f>_p^2)`, clipped at zero.
pub fn class_std_dev(f: &OutcomeFunction, p: &Distribution) -> Result<f64> {
    let norm2 = class_inner(f, f, p)?;
    let mean = class_mean(f, p)?;
    Ok((norm2 - mean * mean).max(0.0).sqrt())
}

/// One eigenvalue with its spectral projector.
#[derive(Debug, Clone)]
pub struct SpectralComponent {
    pub eigenvalue: f64,
    pub projector: Observable,
}

/// Spectral decomposition in descending eigenvalue order. Eigenvalues within
/// `1e-8 * max|lambda|` of their neighbour share one projector.
pub fn spectral_decompose(a: &Observable) -> Result<Vec<SpectralComponent>> {
    let eig = linalg::eigh(&a.matrix)?;
    let n = a.dim();
    let scale = eig.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let gap = Tolerances::DEFAULT.eigen_merge * scale;

    // Walk from the top of the ascending spectrum, grouping close neighbours.
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for j in (0..n).rev() {
        match groups.last_mut() {
            Some(g) if eig.values[*g.last().unwrap()] - eig.values[j] <= gap => g.push(j),
            _ => groups.push(vec![j]),
        }
    }

    Ok(groups
        .into_iter()
        .map(|g| {
            let eigenvalue = g.iter().map(|&j| eig.values[j]).sum::<f64>() / g.len() as f64;
            let mut proj = CMatrix::zeros(n, n);
            for &j in &g {
                proj += linalg::outer_column(&eig.vectors, j);
            }
            SpectralComponent {
                eigenvalue,
                projector: Observable::from_hermitian_part(&proj),
            }
        })
        .collect())
}
