//! The error-error uncertainty relation and its reductions.
//!
//! For any measurement `M`, state `rho` and observables `A`, `B`:
//!
//! ```text
//! eps(A) eps(B) >= sqrt(R^2 + I^2)
//! R = <{A,B}/2>_rho - <M_* A, M_* B>_p
//! I = <[A,B]/2i>_rho - <[M*M_* A, B]/2i>_rho - <[A, M*M_* B]/2i>_rho
//! ```
//!
//! `R + iI` is the cross term of the semi-inner product
//! `<(X,f),(Y,g)> = <X^dag Y>_rho + <f^* g>_p - <(M'f)^dag M'g>_rho`
//! evaluated at `(A - M*M_* A, M_* A)` and `(B - M*M_* B, M_* B)`, whose
//! seminorms are the two errors; the relation is Cauchy-Schwarz for it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::Povm;
use crate::measurement_error::{errorless_check, quantum_error};
use crate::state::{self, DensityOperator, Distribution, Observable, OutcomeFunction, OutcomeSpace};
use crate::transport::LocalContext;

/// Which sign the composite commutator terms of `I` carry.
///
/// `FlippedComposite` is a deliberately wrong variant used to check that the
/// verification suites can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImagVariant {
    #[default]
    Standard,
    FlippedComposite,
}

/// `R`: the anticommutator covariance lost to the pushforward.
pub fn real_part(ctx: &LocalContext, a: &Observable, b: &Observable) -> Result<f64> {
    let fa = ctx.pushforward(a)?;
    let fb = ctx.pushforward(b)?;
    Ok(state::state_inner(a, b, ctx.state())? - state::class_inner(&fa, &fb, ctx.distribution())?)
}

/// `I`: the three commutator terms.
pub fn imag_part(ctx: &LocalContext, a: &Observable, b: &Observable) -> Result<f64> {
    imag_part_with(ctx, a, b, ImagVariant::Standard)
}

pub fn imag_part_with(ctx: &LocalContext, a: &Observable, b: &Observable, variant: ImagVariant) -> Result<f64> {
    let rho = ctx.state();
    let ca = ctx.reconstruction(a)?;
    let cb = ctx.reconstruction(b)?;
    let composite = state::commutator_expectation(&ca, b, rho)? + state::commutator_expectation(a, &cb, rho)?;
    let sign = match variant {
        ImagVariant::Standard => -1.0,
        ImagVariant::FlippedComposite => 1.0,
    };
    Ok(state::commutator_expectation(a, b, rho)? + sign * composite)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    #[serde(rename = "epsA")]
    pub eps_a: f64,
    #[serde(rename = "epsB")]
    pub eps_b: f64,
    #[serde(rename = "R")]
    pub real_part: f64,
    #[serde(rename = "I")]
    pub imag_part: f64,
    /// `sqrt(R^2 + I^2)`.
    pub bound: f64,
    /// `eps_a eps_b - bound`.
    pub slack: f64,
    /// `|<[A,B]/2i>_rho|`.
    #[serde(rename = "naiveBound")]
    pub naive_bound: f64,
    #[serde(rename = "naiveViolated")]
    pub naive_violated: bool,
}

impl RelationReport {
    pub fn product(&self) -> f64 {
        self.eps_a * self.eps_b
    }

    /// `slack >= -tol (1 + |eps_a eps_b|)`.
    pub fn holds(&self, tol: f64) -> bool {
        self.slack >= -tol * (1.0 + self.product().abs())
    }

    /// The reduced form `eps_a eps_b >= |I|`.
    pub fn reduced_holds(&self, tol: f64) -> bool {
        self.product() >= self.imag_part.abs() - tol * (1.0 + self.product().abs())
    }
}

pub fn evaluate_relation(ctx: &LocalContext, a: &Observable, b: &Observable) -> Result<RelationReport> {
    evaluate_relation_with(ctx, a, b, ImagVariant::Standard)
}

pub fn evaluate_relation_with(
    ctx: &LocalContext,
    a: &Observable,
    b: &Observable,
    variant: ImagVariant,
) -> Result<RelationReport> {
    let eps_a = quantum_error(ctx, a)?;
    let eps_b = quantum_error(ctx, b)?;
    let real = real_part(ctx, a, b)?;
    let imag = imag_part_with(ctx, a, b, variant)?;
    let bound = real.hypot(imag);
    let naive_bound = state::commutator_expectation(a, b, ctx.state())?.abs();
    let product = eps_a * eps_b;
    Ok(RelationReport {
        eps_a,
        eps_b,
        real_part: real,
        imag_part: imag,
        bound,
        slack: product - bound,
        naive_bound,
        naive_violated: product < naive_bound - ctx.tolerances().naive_guard,
    })
}

/// `<(X,f),(Y,g)> = <X^dag Y>_rho + <f g>_p - <(M'f)(M'g)>_rho` for
/// Hermitian `X`, `Y` and real `f`, `g`.
pub fn composite_inner(
    ctx: &LocalContext,
    x: &Observable,
    f: &OutcomeFunction,
    y: &Observable,
    g: &OutcomeFunction,
) -> Result<Complex64> {
    let rho = ctx.state();
    let mf = ctx.povm().adjoint(f)?;
    let mg = ctx.povm().adjoint(g)?;
    let classical = state::class_inner(f, g, ctx.distribution())?;
    Ok(state::complex_state_product(x, y, rho)? + classical - state::complex_state_product(&mf, &mg, rho)?)
}

/// `(A - M*M_* A, M_* A)`.
pub fn error_vector(ctx: &LocalContext, a: &Observable) -> Result<(Observable, OutcomeFunction)> {
    let fa = ctx.pushforward(a)?;
    let xa = a.try_sub(&ctx.pullback(&fa)?)?;
    Ok((xa, fa))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProofDeviceReport {
    pub seminorm_a: f64,
    pub seminorm_b: f64,
    pub eps_a: f64,
    pub eps_b: f64,
    pub cross_re: f64,
    pub cross_im: f64,
    pub real_part: f64,
    pub imag_part: f64,
    /// `max(|p(X_A,f_A) - eps_A|, |p(X_B,f_B) - eps_B|)`.
    pub seminorm_residual: f64,
    /// `|<(X_A,f_A),(X_B,f_B)> - (R + iI)|`.
    pub cross_residual: f64,
}

impl ProofDeviceReport {
    pub fn holds(&self, tol: f64) -> bool {
        let scale = 1.0 + self.eps_a.max(self.eps_b).powi(2);
        self.seminorm_residual <= tol * scale && self.cross_residual <= tol * scale
    }
}

pub fn proof_device_check(ctx: &LocalContext, a: &Observable, b: &Observable) -> Result<ProofDeviceReport> {
    proof_device_check_with(ctx, a, b, ImagVariant::Standard)
}

/// Ties the relation to its Cauchy-Schwarz derivation: the seminorm of the
/// error vector must equal the error, and the cross term must equal `R + iI`
/// as computed from the closed forms.
pub fn proof_device_check_with(
    ctx: &LocalContext,
    a: &Observable,
    b: &Observable,
    variant: ImagVariant,
) -> Result<ProofDeviceReport> {
    let (xa, fa) = error_vector(ctx, a)?;
    let (xb, fb) = error_vector(ctx, b)?;
    let self_a = composite_inner(ctx, &xa, &fa, &xa, &fa)?;
    let self_b = composite_inner(ctx, &xb, &fb, &xb, &fb)?;
    let cross = composite_inner(ctx, &xa, &fa, &xb, &fb)?;
    let seminorm_a = self_a.re.max(0.0).sqrt();
    let seminorm_b = self_b.re.max(0.0).sqrt();
    let eps_a = quantum_error(ctx, a)?;
    let eps_b = quantum_error(ctx, b)?;
    let real = real_part(ctx, a, b)?;
    let imag = imag_part_with(ctx, a, b, variant)?;

    let seminorm_residual = (seminorm_a - eps_a).abs().max((seminorm_b - eps_b).abs());
    Ok(ProofDeviceReport {
        seminorm_a,
        seminorm_b,
        eps_a,
        eps_b,
        cross_re: cross.re,
        cross_im: cross.im,
        real_part: real,
        imag_part: imag,
        seminorm_residual,
        cross_residual: (cross - Complex64::new(real, imag)).norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchroedingerReport {
    pub sigma_a: f64,
    pub sigma_b: f64,
    /// `sigma_a sigma_b`.
    pub lhs: f64,
    /// `<{A,B}>/2 - <A><B>`.
    pub real_part: f64,
    /// `<[A,B]/2i>`.
    pub imag_part: f64,
    /// `sqrt(R^2 + I^2)`.
    pub schroedinger_bound: f64,
    /// `|<[A,B]/2i>|`.
    pub kr_bound: f64,
    /// The general relation evaluated for a trivial measurement.
    pub relation: RelationReport,
    /// Largest mismatch between the trivial-measurement relation and the
    /// Schroedinger forms (errors vs deviations, `R`, `I`).
    pub reduction_residual: f64,
}

impl SchroedingerReport {
    pub fn holds(&self, tol: f64) -> bool {
        let slack = tol * (1.0 + self.lhs);
        self.lhs >= self.schroedinger_bound - slack && self.kr_bound <= self.schroedinger_bound + slack
    }
}

/// Evaluates the relation for a non-informative measurement and compares it
/// with the Schroedinger inequality and the Kennard-Robertson bound.
pub fn schroedinger_reduction(rho: &DensityOperator, a: &Observable, b: &Observable) -> Result<SchroedingerReport> {
    if a.dim() != rho.dim() || b.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: if a.dim() != rho.dim() { a.dim() } else { b.dim() },
        });
    }
    let p0 = Distribution::uniform(OutcomeSpace::numbered(2)?);
    let ctx = LocalContext::new(Povm::trivial(&p0, rho.dim())?, rho.clone())?;
    let relation = evaluate_relation(&ctx, a, b)?;

    let sigma_a = state::std_dev(a, rho)?;
    let sigma_b = state::std_dev(b, rho)?;
    let real = state::state_inner(a, b, rho)? - state::expectation(a, rho)? * state::expectation(b, rho)?;
    let imag = state::commutator_expectation(a, b, rho)?;
    let reduction_residual = [
        (relation.eps_a - sigma_a).abs(),
        (relation.eps_b - sigma_b).abs(),
        (relation.real_part - real).abs(),
        (relation.imag_part - imag).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(SchroedingerReport {
        sigma_a,
        sigma_b,
        lhs: sigma_a * sigma_b,
        real_part: real,
        imag_part: imag,
        schroedinger_bound: real.hypot(imag),
        kr_bound: imag.abs(),
        relation,
        reduction_residual,
    })
}

/// Whether `A` and `B` are both measured errorlessly while `<[A,B]>_rho` is
/// nonzero beyond `threshold`; this must never happen.
pub fn simultaneous_errorless(ctx: &LocalContext, a: &Observable, b: &Observable, threshold: f64) -> Result<bool> {
    let comm = 2.0 * state::commutator_expectation(a, b, ctx.state())?.abs();
    if comm <= threshold {
        return Ok(false);
    }
    Ok(errorless_check(ctx, a)?.cond_a && errorless_check(ctx, b)?.cond_a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::MeasurementKind;
    use approx::assert_abs_diff_eq;

    fn y_state() -> DensityOperator {
        DensityOperator::from_bloch([0.0, 0.8, 0.0]).unwrap()
    }

    fn proj_z(rho: DensityOperator) -> LocalContext {
        LocalContext::new(Povm::projective(&Observable::pauli_z()).unwrap(), rho).unwrap()
    }

    fn trivial(rho: DensityOperator) -> LocalContext {
        let p0 = Distribution::new(OutcomeSpace::numbered(3).unwrap(), vec![0.5, 0.2, 0.3]).unwrap();
        LocalContext::new(Povm::trivial(&p0, rho.dim()).unwrap(), rho).unwrap()
    }

    #[test]
    fn real_part_examples() {
        let rho = DensityOperator::from_bloch([0.2, -0.5, 0.4]).unwrap();
        let a = Observable::from_real_rows(&[&[1.0, 0.3], &[0.3, -0.2]]).unwrap();
        let b = Observable::pauli_y();
        let r = real_part(&trivial(rho.clone()), &a, &b).unwrap();
        let expected = state::state_inner(&a, &b, &rho).unwrap()
            - state::expectation(&a, &rho).unwrap() * state::expectation(&b, &rho).unwrap();
        assert_abs_diff_eq!(r, expected, epsilon = 1e-14);

        let c = proj_z(y_state());
        assert_abs_diff_eq!(
            real_part(&c, &Observable::pauli_x(), &Observable::pauli_z()).unwrap(),
            0.0,
            epsilon = 1e-15
        );

        let eps = quantum_error(&c, &a).unwrap();
        assert_abs_diff_eq!(real_part(&c, &a, &a).unwrap(), eps * eps, epsilon = 1e-14);
    }

    #[test]
    fn imag_part_examples() {
        let rho = DensityOperator::from_bloch([0.2, -0.5, 0.4]).unwrap();
        let a = Observable::pauli_x();
        let b = Observable::pauli_y();
        let i = imag_part(&trivial(rho.clone()), &a, &b).unwrap();
        assert_abs_diff_eq!(i, state::commutator_expectation(&a, &b, &rho).unwrap(), epsilon = 1e-14);
        assert_abs_diff_eq!(i, 0.4, epsilon = 1e-14);

        let c = proj_z(y_state());
        assert_abs_diff_eq!(
            imag_part(&c, &Observable::pauli_x(), &Observable::pauli_z()).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(imag_part(&c, &a, &a).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn naive_violation_example() {
        let c = proj_z(y_state());
        let r = evaluate_relation(&c, &Observable::pauli_x(), &Observable::pauli_z()).unwrap();
        assert_abs_diff_eq!(r.eps_a, 1.0, epsilon = 1e-15);
        assert_eq!(r.eps_b, 0.0);
        assert_eq!(r.product(), 0.0);
        assert_abs_diff_eq!(r.bound, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.naive_bound, 0.8, epsilon = 1e-15);
        assert!(r.naive_violated);
        assert!(r.holds(1e-9));
    }

    #[test]
    fn schroedinger_saturation() {
        let zero = DensityOperator::basis(2, 0).unwrap();
        let c = trivial(zero.clone());
        let r = evaluate_relation(&c, &Observable::pauli_x(), &Observable::pauli_y()).unwrap();
        assert_abs_diff_eq!(r.product(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.bound, 1.0, epsilon = 1e-15);
        assert!(!r.naive_violated);

        let s = schroedinger_reduction(&zero, &Observable::pauli_x(), &Observable::pauli_y()).unwrap();
        assert_abs_diff_eq!(s.lhs, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.schroedinger_bound, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.kr_bound, 1.0, epsilon = 1e-15);
        assert!(s.reduction_residual < 1e-14);

        let s = schroedinger_reduction(
            &DensityOperator::maximally_mixed(2),
            &Observable::pauli_x(),
            &Observable::pauli_z(),
        )
        .unwrap();
        assert_abs_diff_eq!(s.lhs, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.schroedinger_bound, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn identical_observables_have_zero_slack() {
        let c = proj_z(DensityOperator::from_bloch([0.3, 0.1, -0.2]).unwrap());
        let a = Observable::from_real_rows(&[&[0.5, -1.0], &[-1.0, 2.0]]).unwrap();
        let r = evaluate_relation(&c, &a, &a).unwrap();
        assert!(r.slack.abs() < 1e-14, "{r:?}");
        assert_eq!(r.imag_part, 0.0);
    }

    #[test]
    fn proof_device_examples() {
        let c = proj_z(y_state());
        let a = Observable::from_real_rows(&[&[0.5, -1.0], &[-1.0, 2.0]]).unwrap();
        let r = proof_device_check(&c, &a, &a).unwrap();
        assert!(r.holds(1e-12), "{r:?}");
        assert_abs_diff_eq!(r.cross_re, r.eps_a * r.eps_a, epsilon = 1e-14);

        let c = trivial(y_state());
        let r = proof_device_check(&c, &Observable::pauli_x(), &Observable::pauli_y()).unwrap();
        assert!(r.holds(1e-12), "{r:?}");
        // Covariance form: Cov(X, Y) = 0 and <[X,Y]/2i> = <Z> = 0 on this state.
        assert_abs_diff_eq!(r.cross_re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.cross_im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn flipped_variant_breaks_the_cross_term() {
        let rho = DensityOperator::from_bloch([0.1, 0.3, 0.5]).unwrap();
        let c = LocalContext::new(Povm::unsharp_qubit([0.6, 0.0, 0.8], 0.7).unwrap(), rho).unwrap();
        let (a, b) = (Observable::pauli_x(), Observable::pauli_y());
        assert!(proof_device_check(&c, &a, &b).unwrap().holds(1e-9));
        assert!(!proof_device_check_with(&c, &a, &b, ImagVariant::FlippedComposite)
            .unwrap()
            .holds(1e-9));
    }

    #[test]
    fn composite_terms_ignore_off_support_representatives() {
        // rho lives on span{|0>,|1>}; outcome "3" never fires, so the class of
        // an estimator does not depend on its value there.
        let rho = DensityOperator::new(
            DensityOperator::from_bloch([0.2, 0.4, -0.1])
                .unwrap()
                .matrix()
                .clone()
                .resize(3, 3, num_complex::Complex64::new(0.0, 0.0)),
        )
        .unwrap();
        let space = OutcomeSpace::numbered(3).unwrap();
        let povm = Povm::new(
            MeasurementKind::Custom,
            space.clone(),
            vec![
                Observable::from_real_rows(&[&[0.6, 0.2, 0.0], &[0.2, 0.3, 0.0], &[0.0, 0.0, 0.0]]).unwrap(),
                Observable::from_real_rows(&[&[0.4, -0.2, 0.0], &[-0.2, 0.7, 0.0], &[0.0, 0.0, 0.0]]).unwrap(),
                Observable::diagonal(&[0.0, 0.0, 1.0]),
            ],
        )
        .unwrap();
        let ctx = LocalContext::new(povm.clone(), rho.clone()).unwrap();
        let a = Observable::from_real_rows(&[&[1.0, 0.5, 0.7], &[0.5, -1.0, 0.2], &[0.7, 0.2, 0.3]]).unwrap();
        let b = Observable::from_real_rows(&[&[0.0, 1.0, -0.4], &[1.0, 0.5, 0.9], &[-0.4, 0.9, -2.0]]).unwrap();
        let fa = ctx.pushforward(&a).unwrap();
        let junk = OutcomeFunction::new(space, vec![fa.values()[0], fa.values()[1], 42.0]).unwrap();
        let canonical = ctx.pullback(&fa).unwrap();
        let other = povm.adjoint(&junk).unwrap();
        assert!((&canonical - &other).max_abs() > 1.0);
        let t1 = state::commutator_expectation(&canonical, &b, &rho).unwrap();
        let t2 = state::commutator_expectation(&other, &b, &rho).unwrap();
        assert!((t1 - t2).abs() < 1e-14);
    }
}
