//! Indirect measurement models and the comparison with Ozawa's error.
//!
//! A model couples the system to an ancilla prepared in `xi` through a joint
//! unitary `U` and then measures a meter observable on the ancilla
//! projectively. Tensor products put the system factor first. The model
//! induces the POVM
//!
//! ```text
//! E_w = Tr_anc[(I (x) xi) U^dag (I (x) Pi_w) U]
//! ```
//!
//! and Ozawa's error is the root-mean-square deviation
//! `<(U^dag (I (x) Meter) U - A (x) I)^2>_{rho (x) xi}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, serde_matrix, CMatrix, ONE, ZERO};
use crate::measurement::{MeasurementKind, Povm};
use crate::measurement_error::{f_error, quantum_error};
use crate::relations::evaluate_relation;
use crate::state::{
    self, spectral_decompose, DensityOperator, Distribution, Observable, OutcomeFunction, OutcomeSpace,
};
use crate::tolerance::Tolerances;
use crate::transport::LocalContext;

#[derive(Serialize, Deserialize)]
struct ModelJson {
    system_dim: usize,
    ancilla_state: DensityOperator,
    #[serde(with = "serde_matrix")]
    interaction: CMatrix,
    meter: Observable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelJson", into = "ModelJson")]
pub struct IndirectModel {
    system_dim: usize,
    ancilla_state: DensityOperator,
    interaction: CMatrix,
    meter: Observable,
}

impl TryFrom<ModelJson> for IndirectModel {
    type Error = Error;
    fn try_from(j: ModelJson) -> Result<Self> {
        IndirectModel::new(j.system_dim, j.ancilla_state, j.interaction, j.meter)
    }
}

impl From<IndirectModel> for ModelJson {
    fn from(m: IndirectModel) -> Self {
        ModelJson {
            system_dim: m.system_dim,
            ancilla_state: m.ancilla_state,
            interaction: m.interaction,
            meter: m.meter,
        }
    }
}

impl IndirectModel {
    pub fn new(
        system_dim: usize,
        ancilla_state: DensityOperator,
        interaction: CMatrix,
        meter: Observable,
    ) -> Result<Self> {
        let ancilla_dim = ancilla_state.dim();
        if system_dim == 0 {
            return Err(Error::InvalidModel("system dimension must be positive".into()));
        }
        if meter.dim() != ancilla_dim {
            return Err(Error::DimensionMismatch {
                expected: ancilla_dim,
                found: meter.dim(),
            });
        }
        let joint = linalg::check_square(&interaction)?;
        if joint != system_dim * ancilla_dim {
            return Err(Error::DimensionMismatch {
                expected: system_dim * ancilla_dim,
                found: joint,
            });
        }
        let residual = linalg::unitarity_residual(&interaction);
        if residual > Tolerances::DEFAULT.completeness {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self {
            system_dim,
            ancilla_state,
            interaction,
            meter,
        })
    }

    /// Qubit system controlling a CNOT onto a qubit ancilla in `|0>`, with the
    /// ancilla's Pauli Z as meter.
    pub fn cnot() -> Self {
        let interaction = CMatrix::from_row_slice(
            4,
            4,
            &[
                ONE, ZERO, ZERO, ZERO, //
                ZERO, ONE, ZERO, ZERO, //
                ZERO, ZERO, ZERO, ONE, //
                ZERO, ZERO, ONE, ZERO,
            ],
        );
        Self::new(
            2,
            DensityOperator::basis(2, 0).expect("basis state"),
            interaction,
            Observable::pauli_z(),
        )
        .expect("CNOT model is valid")
    }

    /// No coupling: the meter reads the ancilla alone, so the induced
    /// measurement is trivial.
    pub fn uncoupled(system_dim: usize, ancilla_state: DensityOperator, meter: Observable) -> Result<Self> {
        let n = system_dim * ancilla_state.dim();
        Self::new(system_dim, ancilla_state, linalg::identity(n), meter)
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_state.dim()
    }

    pub fn ancilla_state(&self) -> &DensityOperator {
        &self.ancilla_state
    }

    pub fn interaction(&self) -> &CMatrix {
        &self.interaction
    }

    pub fn meter(&self) -> &Observable {
        &self.meter
    }

    fn lift_to_ancilla(&self, x: &Observable) -> CMatrix {
        linalg::kron(&linalg::identity(self.system_dim), x.matrix())
    }

    fn heisenberg(&self, joint: &CMatrix) -> CMatrix {
        self.interaction.adjoint() * joint * &self.interaction
    }

    /// `U^dag (I (x) Meter) U`, the meter read out in the Heisenberg picture.
    pub fn output_observable(&self) -> Observable {
        Observable::from_hermitian_part(&self.heisenberg(&self.lift_to_ancilla(&self.meter)))
    }

    fn check_system(&self, found: usize) -> Result<()> {
        if found != self.system_dim {
            return Err(Error::DimensionMismatch {
                expected: self.system_dim,
                found,
            });
        }
        Ok(())
    }

    /// The POVM the model realizes on the system; outcomes are the distinct
    /// meter eigenvalues in descending order.
    pub fn induced_povm(&self) -> Result<Povm> {
        let parts = spectral_decompose(&self.meter)?;
        let space = OutcomeSpace::from_values(parts.iter().map(|p| p.eigenvalue).collect())?;
        let xi = linalg::kron(&linalg::identity(self.system_dim), self.ancilla_state.matrix());
        let effects = parts
            .iter()
            .map(|p| {
                let heis = self.heisenberg(&self.lift_to_ancilla(&p.projector));
                let reduced = linalg::partial_trace_second(&(&xi * heis), self.system_dim, self.ancilla_dim());
                Observable::from_hermitian_part(&reduced)
            })
            .collect();
        Povm::new(MeasurementKind::InducedFromIndirect, space, effects)
    }

    /// Meter statistics computed on the full system-ancilla state.
    pub fn joint_distribution(&self, rho: &DensityOperator) -> Result<Distribution> {
        self.check_system(rho.dim())?;
        let parts = spectral_decompose(&self.meter)?;
        let space = OutcomeSpace::from_values(parts.iter().map(|p| p.eigenvalue).collect())?;
        let joint = DensityOperator::from_trusted(linalg::kron(rho.matrix(), self.ancilla_state.matrix()));
        let weights = parts
            .iter()
            .map(|p| {
                let heis = Observable::from_hermitian_part(&self.heisenberg(&self.lift_to_ancilla(&p.projector)));
                state::expectation(&heis, &joint)
            })
            .collect::<Result<Vec<_>>>()?;
        Distribution::new(space, weights)
    }

    /// Ozawa's error `sqrt(<(U^dag (I (x) Meter) U - A (x) I)^2>_{rho (x) xi})`,
    /// evaluated on the joint system directly.
    pub fn ozawa_error(&self, rho: &DensityOperator, a: &Observable) -> Result<f64> {
        self.check_system(rho.dim())?;
        self.check_system(a.dim())?;
        let joint = DensityOperator::from_trusted(linalg::kron(rho.matrix(), self.ancilla_state.matrix()));
        let lifted = Observable::from_hermitian_part(&linalg::kron(a.matrix(), &linalg::identity(self.ancilla_dim())));
        let noise = self.output_observable().try_sub(&lifted)?;
        state::state_norm(&noise, &joint)
    }

    /// Compares Ozawa's errors with the state-local errors of the induced
    /// measurement along the full chain of bounds.
    pub fn chain_check(&self, rho: &DensityOperator, a: &Observable, b: &Observable) -> Result<ChainReport> {
        let povm = self.induced_povm()?;
        let ctx = LocalContext::new(povm, rho.clone())?;
        let identity = OutcomeFunction::identity(ctx.povm().space().clone());

        let ozawa_a = self.ozawa_error(rho, a)?;
        let ozawa_b = self.ozawa_error(rho, b)?;
        let bridge_a = f_error(&ctx, a, &identity)?.f_error;
        let bridge_b = f_error(&ctx, b, &identity)?.f_error;
        let relation = evaluate_relation(&ctx, a, b)?;
        let sigma_a = state::std_dev(a, rho)?;
        let sigma_b = state::std_dev(b, rho)?;
        let naive = 2.0 * state::commutator_expectation(a, b, rho)?.abs();

        Ok(ChainReport {
            ozawa_a,
            ozawa_b,
            eps_a: quantum_error(&ctx, a)?,
            eps_b: quantum_error(&ctx, b)?,
            sigma_a,
            sigma_b,
            chain: [
                ozawa_a * ozawa_b,
                relation.product(),
                relation.bound,
                relation.imag_part.abs(),
                naive / 2.0 - ozawa_a * sigma_b - sigma_a * ozawa_b,
            ],
            bridge_residual: (ozawa_a - bridge_a).abs().max((ozawa_b - bridge_b).abs()),
        })
    }
}

/// The five chain values
/// `eps_O(A) eps_O(B) >= eps(A) eps(B) >= sqrt(R^2+I^2) >= |I| >= |<[A,B]>|/2 - eps_O(A) sigma(B) - sigma(A) eps_O(B)`
/// with the individual errors they are built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub ozawa_a: f64,
    pub ozawa_b: f64,
    pub eps_a: f64,
    pub eps_b: f64,
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub chain: [f64; 5],
    /// `|eps_O - f-error of the identity estimator|`, worst of `A` and `B`.
    pub bridge_residual: f64,
}

impl ChainReport {
    /// Whether each adjacent pair in the chain is ordered within `tol`.
    pub fn links(&self, tol: f64) -> [bool; 4] {
        let mut out = [false; 4];
        for (k, link) in out.iter_mut().enumerate() {
            let (hi, lo) = (self.chain[k], self.chain[k + 1]);
            *link = hi >= lo - tol * (1.0 + hi.abs());
        }
        out
    }

    /// Ozawa's error is never below the state-local error.
    pub fn dominance(&self, tol: f64) -> [bool; 2] {
        [
            self.ozawa_a >= self.eps_a - tol * (1.0 + self.eps_a),
            self.ozawa_b >= self.eps_b - tol * (1.0 + self.eps_b),
        ]
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.links(tol).iter().all(|&l| l)
            && self.dominance(tol).iter().all(|&d| d)
            && self.bridge_residual <= tol * (1.0 + self.ozawa_a.max(self.ozawa_b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cnot_induces_projective_z() {
        let povm = IndirectModel::cnot().induced_povm().unwrap();
        let z = Povm::projective(&Observable::pauli_z()).unwrap();
        assert_eq!(povm.space(), z.space());
        for (a, b) in povm.effects().iter().zip(z.effects()) {
            assert!((a - b).max_abs() < 1e-15);
        }
        assert_eq!(povm.kind(), MeasurementKind::InducedFromIndirect);
    }

    #[test]
    fn uncoupled_model_is_trivial() {
        let xi = DensityOperator::from_bloch([0.0, 0.0, 0.4]).unwrap();
        let model = IndirectModel::uncoupled(3, xi, Observable::pauli_z()).unwrap();
        let povm = model.induced_povm().unwrap();
        assert!((&povm.effects()[0] - &Observable::identity(3).scaled(0.7)).max_abs() < 1e-15);
        assert!((&povm.effects()[1] - &Observable::identity(3).scaled(0.3)).max_abs() < 1e-15);
    }

    #[test]
    fn ozawa_error_examples() {
        let model = IndirectModel::cnot();
        let mixed = DensityOperator::maximally_mixed(2);
        assert_abs_diff_eq!(
            model.ozawa_error(&mixed, &Observable::pauli_z()).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            model.ozawa_error(&mixed, &Observable::pauli_x()).unwrap(),
            2f64.sqrt(),
            epsilon = 1e-15
        );

        let centered = DensityOperator::maximally_mixed(2);
        let model = IndirectModel::uncoupled(2, centered, Observable::pauli_z()).unwrap();
        // <Z^2>_xi = 1 for the centered meter, no cross term.
        assert_abs_diff_eq!(
            model.ozawa_error(&mixed, &Observable::pauli_z()).unwrap(),
            2f64.sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn cnot_chain_on_y_state() {
        let rho = DensityOperator::from_bloch([0.0, 0.8, 0.0]).unwrap();
        let r = IndirectModel::cnot()
            .chain_check(&rho, &Observable::pauli_x(), &Observable::pauli_z())
            .unwrap();
        assert_abs_diff_eq!(r.ozawa_a, 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.ozawa_b, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.eps_a, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.eps_b, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.chain[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.chain[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.chain[2], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.chain[3], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.chain[4], 0.8 - 2f64.sqrt(), epsilon = 1e-15);
        assert!(r.holds(1e-9), "{r:?}");
    }

    #[test]
    fn joint_statistics_match_the_induced_povm() {
        let model = IndirectModel::cnot();
        let rho = DensityOperator::from_bloch([0.3, -0.2, 0.6]).unwrap();
        let direct = model.joint_distribution(&rho).unwrap();
        let induced = model.induced_povm().unwrap().apply(&rho).unwrap();
        assert!(direct.max_difference(&induced).unwrap() < 1e-15);
    }

    #[test]
    fn model_validation() {
        let xi = DensityOperator::basis(2, 0).unwrap();
        let not_unitary = linalg::identity(4).scale(1.1);
        assert!(matches!(
            IndirectModel::new(2, xi.clone(), not_unitary, Observable::pauli_z()),
            Err(Error::NotUnitary { .. })
        ));
        assert!(matches!(
            IndirectModel::new(3, xi.clone(), linalg::identity(4), Observable::pauli_z()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(IndirectModel::new(2, xi, linalg::identity(4), Observable::identity(3)).is_err());
    }

    #[test]
    fn model_json_round_trip() {
        let m = IndirectModel::cnot();
        let json = serde_json::to_string(&m).unwrap();
        let back: IndirectModel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }
}
