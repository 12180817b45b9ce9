//! State-local pullback and pushforward of a measurement.
//!
//! At a state `rho` with outcome distribution `p = M rho`, the pullback sends
//! (the class of) a function `f` to the operator `M'f`, and the pushforward is
//! its adjoint for the inner products `<.,.>_rho` and `<.,.>_p`:
//!
//! ```text
//! <A, M'f>_rho = <M_* A, f>_p      for all A, f
//! ```
//!
//! The classical Gram matrix is diagonal on point masses, so the solution is
//! `(M_* A)(w) = <A, E_w>_rho / p(w)` on the support of `p`. Function classes
//! are represented by the member that vanishes off the support.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::Povm;
use crate::state::{self, DensityOperator, Distribution, Observable, OutcomeFunction};
use crate::tolerance::Tolerances;

/// A measurement pinned at a state, with the outcome distribution cached.
#[derive(Debug, Clone)]
pub struct LocalContext {
    povm: Povm,
    state: DensityOperator,
    distribution: Distribution,
    support: Vec<bool>,
    tolerances: Tolerances,
}

/// Norms along `A -> M_* A -> M'(M_* A)`; each is at most the previous one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub norm_a: f64,
    pub norm_push: f64,
    pub norm_pull_push: f64,
}

impl ContractionReport {
    pub fn holds(&self, tol: f64) -> bool {
        let slack = tol * (1.0 + self.norm_a);
        self.norm_a >= self.norm_push - slack && self.norm_push >= self.norm_pull_push - slack
    }
}

impl LocalContext {
    pub fn new(povm: Povm, state: DensityOperator) -> Result<Self> {
        Self::with_tolerances(povm, state, Tolerances::DEFAULT)
    }

    pub fn with_tolerances(povm: Povm, state: DensityOperator, tolerances: Tolerances) -> Result<Self> {
        let distribution = povm.apply(&state)?;
        let support = distribution
            .weights()
            .iter()
            .map(|&w| w > tolerances.support_cutoff)
            .collect();
        Ok(Self {
            povm,
            state,
            distribution,
            support,
            tolerances,
        })
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn state(&self) -> &DensityOperator {
        &self.state
    }

    pub fn distribution(&self) -> &Distribution {
        &self.distribution
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    /// Whether each outcome has probability above the support cutoff.
    pub fn support(&self) -> &[bool] {
        &self.support
    }

    /// Outcomes on the support whose probability is small enough to make the
    /// division in the pushforward ill-conditioned.
    pub fn near_zero_outcomes(&self) -> Vec<usize> {
        self.distribution
            .weights()
            .iter()
            .enumerate()
            .filter(|(i, &w)| self.support[*i] && w < self.tolerances.near_zero_warning)
            .map(|(i, _)| i)
            .collect()
    }

    fn check_dim(&self, a: &Observable) -> Result<()> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: a.dim(),
            });
        }
        Ok(())
    }

    /// The pushforward `M_* A`, zero off the support.
    pub fn pushforward(&self, a: &Observable) -> Result<OutcomeFunction> {
        self.check_dim(a)?;
        let values = self
            .povm
            .effects()
            .iter()
            .zip(self.distribution.weights())
            .zip(&self.support)
            .map(|((e, &p), &on)| {
                if on {
                    Ok(state::state_inner(a, e, &self.state)? / p)
                } else {
                    Ok(0.0)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        OutcomeFunction::new(self.povm.space().clone(), values)
    }

    /// Canonical representative of `f` in its class: zero off the support.
    pub fn canonical(&self, f: &OutcomeFunction) -> Result<OutcomeFunction> {
        if f.space() != self.povm.space() {
            return Err(Error::OutcomeSpaceMismatch);
        }
        let values = f
            .values()
            .iter()
            .zip(&self.support)
            .map(|(&v, &on)| if on { v } else { 0.0 })
            .collect();
        OutcomeFunction::new(f.space().clone(), values)
    }

    /// The pullback `M*_rho f`, represented by `M'` of the canonical member
    /// of the class of `f`.
    pub fn pullback(&self, f: &OutcomeFunction) -> Result<Observable> {
        self.povm.adjoint(&self.canonical(f)?)
    }

    /// `M*_rho M_*rho A`, the reconstruction of `A` from its optimal estimator.
    pub fn reconstruction(&self, a: &Observable) -> Result<Observable> {
        self.pullback(&self.pushforward(a)?)
    }

    /// `|<A, M*f>_rho - <M_* A, f>_p|`.
    pub fn adjointness_residual(&self, a: &Observable, f: &OutcomeFunction) -> Result<f64> {
        let lhs = state::state_inner(a, &self.pullback(f)?, &self.state)?;
        let rhs = state::class_inner(&self.pushforward(a)?, f, &self.distribution)?;
        Ok((lhs - rhs).abs())
    }

    pub fn contraction_report(&self, a: &Observable) -> Result<ContractionReport> {
        let push = self.pushforward(a)?;
        Ok(ContractionReport {
            norm_a: state::state_norm(a, &self.state)?,
            norm_push: state::class_norm(&push, &self.distribution)?,
            norm_pull_push: state::state_norm(&self.pullback(&push)?, &self.state)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::MeasurementKind;
    use crate::state::OutcomeSpace;
    use approx::assert_abs_diff_eq;

    fn proj_z(rho: DensityOperator) -> LocalContext {
        LocalContext::new(Povm::projective(&Observable::pauli_z()).unwrap(), rho).unwrap()
    }

    #[test]
    fn pushforward_examples() {
        let ctx = proj_z(DensityOperator::maximally_mixed(2));
        let fz = ctx.pushforward(&Observable::pauli_z()).unwrap();
        assert_abs_diff_eq!(fz.values()[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(fz.values()[1], -1.0, epsilon = 1e-15);
        let fx = ctx.pushforward(&Observable::pauli_x()).unwrap();
        assert!(fx.values().iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn trivial_pushforward_is_the_expectation() {
        let p0 = Distribution::new(OutcomeSpace::numbered(3).unwrap(), vec![0.2, 0.5, 0.3]).unwrap();
        let rho = DensityOperator::from_bloch([0.3, -0.4, 0.5]).unwrap();
        let ctx = LocalContext::new(Povm::trivial(&p0, 2).unwrap(), rho.clone()).unwrap();
        let a = Observable::from_real_rows(&[&[0.7, -1.2], &[-1.2, 2.0]]).unwrap();
        let mean = state::expectation(&a, &rho).unwrap();
        for v in ctx.pushforward(&a).unwrap().values() {
            assert_abs_diff_eq!(*v, mean, epsilon = 1e-14);
        }
    }

    #[test]
    fn pullback_examples() {
        let ctx = proj_z(DensityOperator::maximally_mixed(2));
        let f = OutcomeFunction::identity(ctx.povm().space().clone());
        assert!((&ctx.pullback(&f).unwrap() - &Observable::pauli_z()).max_abs() < 1e-15);

        let ctx = proj_z(DensityOperator::basis(2, 0).unwrap());
        let space = ctx.povm().space().clone();
        let f = OutcomeFunction::new(space.clone(), vec![1.0, 7.0]).unwrap();
        let g = OutcomeFunction::new(space, vec![1.0, 0.0]).unwrap();
        let pf = ctx.pullback(&f).unwrap();
        assert_eq!(pf, ctx.pullback(&g).unwrap());
        assert!((&pf - &Observable::diagonal(&[1.0, 0.0])).max_abs() < 1e-15);

        let eta = 0.35;
        let ctx = LocalContext::new(
            Povm::unsharp_qubit([0.0, 0.0, 1.0], eta).unwrap(),
            DensityOperator::maximally_mixed(2),
        )
        .unwrap();
        let f = OutcomeFunction::identity(ctx.povm().space().clone());
        let expected = Observable::pauli_z().scaled(eta);
        assert!((&ctx.pullback(&f).unwrap() - &expected).max_abs() < 1e-15);
    }

    #[test]
    fn adjointness_examples() {
        let rho = DensityOperator::from_bloch([0.1, 0.2, -0.3]).unwrap();
        let ctx = LocalContext::new(Povm::unsharp_qubit([0.6, 0.0, 0.8], 0.7).unwrap(), rho).unwrap();
        let one = OutcomeFunction::constant(ctx.povm().space().clone(), 1.0);
        let a = Observable::from_real_rows(&[&[1.0, 0.5], &[0.5, -2.0]]).unwrap();
        assert!(ctx.adjointness_residual(&a, &one).unwrap() < 1e-15);

        let ctx = proj_z(DensityOperator::maximally_mixed(2));
        let f = OutcomeFunction::identity(ctx.povm().space().clone());
        assert_eq!(ctx.adjointness_residual(&Observable::pauli_x(), &f).unwrap(), 0.0);
    }

    #[test]
    fn contraction_examples() {
        let ctx = proj_z(DensityOperator::maximally_mixed(2));
        let r = ctx.contraction_report(&Observable::pauli_z()).unwrap();
        for v in [r.norm_a, r.norm_push, r.norm_pull_push] {
            assert_abs_diff_eq!(v, 1.0, epsilon = 1e-15);
        }
        let r = ctx.contraction_report(&Observable::pauli_x()).unwrap();
        assert_abs_diff_eq!(r.norm_a, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.norm_push, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.norm_pull_push, 0.0, epsilon = 1e-15);

        // f_Z = +-0.6 and M'f_Z = 0.6 * (0.6 Z).
        let ctx = LocalContext::new(
            Povm::unsharp_qubit([0.0, 0.0, 1.0], 0.6).unwrap(),
            DensityOperator::maximally_mixed(2),
        )
        .unwrap();
        let r = ctx.contraction_report(&Observable::pauli_z()).unwrap();
        assert_abs_diff_eq!(r.norm_a, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.norm_push, 0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(r.norm_pull_push, 0.36, epsilon = 1e-15);
        assert!(r.holds(1e-9));
    }

    #[test]
    fn support_insensitivity() {
        // Outcome "3" never fires on |0><0|; reshaping its effect against
        // outcome "2" leaves the pushforward on the support untouched.
        let rho = DensityOperator::basis(3, 0).unwrap();
        let space = OutcomeSpace::numbered(3).unwrap();
        let build = |s: f64| {
            Povm::new(
                MeasurementKind::Custom,
                space.clone(),
                vec![
                    Observable::diagonal(&[0.7, 0.0, 0.0]),
                    Observable::diagonal(&[0.3, 1.0 - s, 0.5]),
                    Observable::diagonal(&[0.0, s, 0.5]),
                ],
            )
            .unwrap()
        };
        let a = Observable::from_real_rows(&[&[1.0, 2.0, 0.0], &[2.0, -1.0, 0.5], &[0.0, 0.5, 3.0]]).unwrap();
        let c1 = LocalContext::new(build(0.2), rho.clone()).unwrap();
        let c2 = LocalContext::new(build(0.9), rho).unwrap();
        assert_eq!(c1.support(), &[true, true, false]);
        let f1 = c1.pushforward(&a).unwrap();
        let f2 = c2.pushforward(&a).unwrap();
        assert!(f1.max_abs_difference(&f2).unwrap() < 1e-10);
        assert_eq!(f1.values()[2], 0.0);
    }

    #[test]
    fn near_zero_probabilities_are_flagged() {
        let rho = DensityOperator::from_bloch([0.0, 0.0, 1.0 - 2e-9]).unwrap();
        let ctx = proj_z(rho);
        assert_eq!(ctx.near_zero_outcomes(), vec![1]);
        assert!(ctx.support()[1]);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let ctx = proj_z(DensityOperator::maximally_mixed(2));
        assert!(matches!(
            ctx.pushforward(&Observable::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
        let foreign = OutcomeFunction::identity(OutcomeSpace::numbered(2).unwrap());
        assert_eq!(ctx.pullback(&foreign), Err(Error::OutcomeSpaceMismatch));
    }
}
