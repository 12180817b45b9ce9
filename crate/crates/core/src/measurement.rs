//! Measurements as POVMs: the affine map `rho -> p` and its adjoint.
//!
//! In finite dimensions every affine map from density operators to
//! probability distributions is given by a POVM `{E_w}` through
//! `p(w) = Tr[E_w rho]`, and its adjoint sends a function `f` to the operator
//! `M'f = sum_w f(w) E_w`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::state::{
    self, class_norm, spectral_decompose, DensityOperator, Distribution, Observable, OutcomeFunction, OutcomeSpace,
};
use crate::tolerance::Tolerances;

/// Where a POVM came from. Carried into reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasurementKind {
    Projective,
    Trivial,
    Unsharp,
    NoisyProjective,
    InducedFromIndirect,
    Custom,
}

impl MeasurementKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasurementKind::Projective => "projective",
            MeasurementKind::Trivial => "trivial",
            MeasurementKind::Unsharp => "unsharp",
            MeasurementKind::NoisyProjective => "noisy-projective",
            MeasurementKind::InducedFromIndirect => "induced-from-indirect",
            MeasurementKind::Custom => "custom",
        }
    }
}

impl std::fmt::Display for MeasurementKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Serialize, Deserialize)]
struct PovmJson {
    kind: MeasurementKind,
    labels: Vec<String>,
    values: Vec<f64>,
    effects: Vec<Observable>,
}

/// A validated POVM: one positive effect per outcome, summing to the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PovmJson", into = "PovmJson")]
pub struct Povm {
    kind: MeasurementKind,
    space: OutcomeSpace,
    effects: Vec<Observable>,
}

impl TryFrom<PovmJson> for Povm {
    type Error = Error;
    fn try_from(j: PovmJson) -> Result<Self> {
        Povm::new(j.kind, OutcomeSpace::new(j.labels, j.values)?, j.effects)
    }
}

impl From<Povm> for PovmJson {
    fn from(p: Povm) -> Self {
        PovmJson {
            kind: p.kind,
            labels: p.space.labels().to_vec(),
            values: p.space.values().to_vec(),
            effects: p.effects,
        }
    }
}

/// Both sides of `||f||_{M rho} >= ||M'f||_rho` and the smallest eigenvalue
/// of the operator gap `M'(f^2) - (M'f)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractivityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub operator_gap_min_eig: f64,
}

impl ContractivityReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs >= self.rhs - tol * (1.0 + self.lhs) && self.operator_gap_min_eig >= -tol
    }
}

impl Povm {
    /// Validates effect count, dimensions, positivity (`min eig >= -1e-10`)
    /// and completeness (`|sum E - I| <= 1e-9`).
    pub fn new(kind: MeasurementKind, space: OutcomeSpace, effects: Vec<Observable>) -> Result<Self> {
        let tol = Tolerances::DEFAULT;
        if effects.len() != space.len() {
            return Err(Error::InvalidPovm(format!(
                "{} effects for {} outcomes",
                effects.len(),
                space.len()
            )));
        }
        let dim = effects[0].dim();
        let mut sum = linalg::CMatrix::zeros(dim, dim);
        for (label, e) in space.labels().iter().zip(&effects) {
            if e.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: e.dim(),
                });
            }
            let min = e.min_eigenvalue()?;
            if min < -tol.psd {
                return Err(Error::InvalidPovm(format!("effect {label:?} has eigenvalue {min:e}")));
            }
            sum += e.matrix();
        }
        let residual = linalg::max_abs(&(sum - linalg::identity(dim)));
        if residual > tol.completeness {
            return Err(Error::InvalidPovm(format!(
                "effects sum to identity only within {residual:e}"
            )));
        }
        Ok(Self { kind, space, effects })
    }

    /// Projective measurement of an observable: outcomes are its distinct
    /// eigenvalues (descending), effects its spectral projectors.
    pub fn projective(a: &Observable) -> Result<Self> {
        let parts = spectral_decompose(a)?;
        let space = OutcomeSpace::from_values(parts.iter().map(|p| p.eigenvalue).collect())?;
        let effects = parts.into_iter().map(|p| p.projector).collect();
        Self::new(MeasurementKind::Projective, space, effects)
    }

    /// The constant map `rho -> p0`, with effects `p0(w) I`.
    pub fn trivial(p0: &Distribution, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ParameterOutOfRange("dimension must be positive".into()));
        }
        let effects = p0
            .weights()
            .iter()
            .map(|&w| Observable::identity(dim).scaled(w))
            .collect();
        Self::new(MeasurementKind::Trivial, p0.space().clone(), effects)
    }

    /// Qubit effects `(I +- eta n.sigma) / 2` with outcomes `+1`, `-1`.
    pub fn unsharp_qubit(axis: [f64; 3], eta: f64) -> Result<Self> {
        let len = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if len.is_nan() || (len - 1.0).abs() > 1e-9 {
            return Err(Error::ParameterOutOfRange(format!("axis length {len} is not 1")));
        }
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::ParameterOutOfRange(format!("sharpness {eta} outside [0, 1]")));
        }
        let n_sigma = Observable::linear_combination(
            2,
            [
                (axis[0], &Observable::pauli_x()),
                (axis[1], &Observable::pauli_y()),
                (axis[2], &Observable::pauli_z()),
            ],
        )?;
        let id = Observable::identity(2);
        let plus = Observable::linear_combination(2, [(0.5, &id), (0.5 * eta, &n_sigma)])?;
        let minus = Observable::linear_combination(2, [(0.5, &id), (-0.5 * eta, &n_sigma)])?;
        let space = OutcomeSpace::from_values(vec![1.0, -1.0])?;
        Self::new(MeasurementKind::Unsharp, space, vec![plus, minus])
    }

    /// Projective measurement of `a` mixed with uniform noise:
    /// `lambda P_w + (1 - lambda) I / n` over the `n` outcomes.
    pub fn noisy_projective(a: &Observable, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::ParameterOutOfRange(format!("mixing {lambda} outside [0, 1]")));
        }
        let sharp = Self::projective(a)?;
        let n = sharp.effects.len() as f64;
        let dim = a.dim();
        let id = Observable::identity(dim);
        let effects = sharp
            .effects
            .iter()
            .map(|p| Observable::linear_combination(dim, [(lambda, p), ((1.0 - lambda) / n, &id)]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(MeasurementKind::NoisyProjective, sharp.space, effects)
    }

    pub fn with_kind(mut self, kind: MeasurementKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn kind(&self) -> MeasurementKind {
        self.kind
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn effects(&self) -> &[Observable] {
        &self.effects
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    /// `max |sum_w E_w - I|`.
    pub fn completeness_residual(&self) -> f64 {
        let dim = self.dim();
        let mut sum = linalg::CMatrix::zeros(dim, dim);
        for e in &self.effects {
            sum += e.matrix();
        }
        linalg::max_abs(&(sum - linalg::identity(dim)))
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }

    /// Born rule `p(w) = Tr[E_w rho]`, renormalized to absorb the (at most
    /// `1e-9`) completeness slack of the effects.
    pub fn apply(&self, rho: &DensityOperator) -> Result<Distribution> {
        self.check_dim(rho.dim())?;
        let raw = self
            .effects
            .iter()
            .map(|e| state::expectation(e, rho))
            .collect::<Result<Vec<_>>>()?;
        let total: f64 = raw.iter().sum();
        let weights = raw.iter().map(|w| w / total).collect();
        Distribution::new(self.space.clone(), weights)
    }

    /// `M'f = sum_w f(w) E_w`.
    pub fn adjoint(&self, f: &OutcomeFunction) -> Result<Observable> {
        if f.space() != &self.space {
            return Err(Error::OutcomeSpaceMismatch);
        }
        Observable::linear_combination(self.dim(), f.values().iter().copied().zip(&self.effects))
    }

    /// Checks `||f||_{M rho} >= ||M'f||_rho` together with the operator
    /// inequality `M'(f^2) >= (M'f)^2` behind it.
    pub fn contractivity_check(&self, f: &OutcomeFunction, rho: &DensityOperator) -> Result<ContractivityReport> {
        let p = self.apply(rho)?;
        let mf = self.adjoint(f)?;
        let mf2 = self.adjoint(&f.map(|v| v * v))?;
        let gap = mf2.try_sub(&mf.square())?;
        Ok(ContractivityReport {
            lhs: class_norm(f, &p)?,
            rhs: state::state_norm(&mf, rho)?,
            operator_gap_min_eig: gap.min_eigenvalue()?,
        })
    }
}
