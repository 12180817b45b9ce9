//! Quantum error of a measurement and the error of a chosen estimator.
//!
//! The quantum error is the norm lost under the pushforward,
//! `eps(A)^2 = ||A||_rho^2 - ||M_* A||_p^2`. For an estimator `f`, the
//! f-error adds the algebraic deviation of the reconstruction `M*f` from `A`
//! to the cost `||f||_p^2 - ||M*f||_rho^2` of using `f` at all. The two are
//! tied by the exact decomposition
//!
//! ```text
//! eps(A; f)^2 = eps(A)^2 + ||M_* A - f||_p^2
//! ```
//!
//! so the pushforward is the optimal estimator.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{self, Observable, OutcomeFunction};
use crate::transport::LocalContext;

/// Clips a squared quantity that should be nonnegative. Values down to
/// `-tol * scale` are treated as roundoff; anything lower is an error.
pub(crate) fn clip_radicand(value: f64, scale: f64, tol: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -tol * scale.max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::ContractivityViolation { radicand: value })
    }
}

/// `eps_rho(A; M)^2`.
pub fn squared_quantum_error(ctx: &LocalContext, a: &Observable) -> Result<f64> {
    let norm2 = state::state_inner(a, a, ctx.state())?;
    let push = ctx.pushforward(a)?;
    let push2 = state::class_inner(&push, &push, ctx.distribution())?;
    clip_radicand(norm2 - push2, norm2, ctx.tolerances().radicand_clip)
}

/// `eps_rho(A; M) = sqrt(||A||_rho^2 - ||M_* A||_p^2)`.
pub fn quantum_error(ctx: &LocalContext, a: &Observable) -> Result<f64> {
    Ok(squared_quantum_error(ctx, a)?.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBreakdown {
    pub quantum_error: f64,
    pub estimation_error: f64,
    pub f_error: f64,
    pub estimator: OutcomeFunction,
}

impl ErrorBreakdown {
    /// `|f_error^2 - (quantum_error^2 + estimation_error^2)|`.
    pub fn decomposition_residual(&self) -> f64 {
        (self.f_error.powi(2) - self.quantum_error.powi(2) - self.estimation_error.powi(2)).abs()
    }
}

/// The f-error evaluated from its definition, alongside the quantum and
/// estimation errors it decomposes into.
pub fn f_error(ctx: &LocalContext, a: &Observable, f: &OutcomeFunction) -> Result<ErrorBreakdown> {
    let rho = ctx.state();
    let p = ctx.distribution();
    let pulled = ctx.pullback(f)?;
    let deviation = a.try_sub(&pulled)?;
    let deviation2 = state::state_inner(&deviation, &deviation, rho)?;
    let f2 = state::class_inner(f, f, p)?;
    let pulled2 = state::state_inner(&pulled, &pulled, rho)?;
    let cost = clip_radicand(f2 - pulled2, f2, ctx.tolerances().radicand_clip)?;

    let push = ctx.pushforward(a)?;
    let diff = push.combine(1.0, f, -1.0)?;
    Ok(ErrorBreakdown {
        quantum_error: quantum_error(ctx, a)?,
        estimation_error: state::class_norm(&diff, p)?,
        f_error: (deviation2 + cost).sqrt(),
        estimator: f.clone(),
    })
}

/// Excess of one perturbed estimator `f_A + t delta` over the optimum,
/// with the value predicted by the decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcessCheck {
    pub quantum_error: f64,
    pub f_error: f64,
    /// `f_error^2 - quantum_error^2`.
    pub excess: f64,
    /// `t^2 ||delta||_p^2`.
    pub predicted: f64,
}

pub fn perturbed_excess(ctx: &LocalContext, a: &Observable, delta: &OutcomeFunction, t: f64) -> Result<ExcessCheck> {
    let push = ctx.pushforward(a)?;
    let f = push.combine(1.0, delta, t)?;
    let b = f_error(ctx, a, &f)?;
    let q2 = squared_quantum_error(ctx, a)?;
    Ok(ExcessCheck {
        quantum_error: b.quantum_error,
        f_error: b.f_error,
        excess: b.f_error.powi(2) - q2,
        predicted: t * t * state::class_inner(delta, delta, ctx.distribution())?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimalityReport {
    pub trials: usize,
    /// Most negative `f_error - quantum_error` seen (0 when none is negative).
    pub worst_undercut: f64,
    /// Largest `|excess - t^2 ||delta||_p^2|`.
    pub max_quadratic_residual: f64,
}

impl MinimalityReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.worst_undercut >= -tol && self.max_quadratic_residual <= tol
    }
}

/// Perturbs the pushforward by `t delta` with `delta` uniform in `[-1, 1]`
/// per outcome and `t` uniform in `[-1, 1]`, checking that no perturbation
/// beats it and that the excess is exactly quadratic.
pub fn verify_minimality<R: Rng + ?Sized>(
    ctx: &LocalContext,
    a: &Observable,
    trials: usize,
    rng: &mut R,
) -> Result<MinimalityReport> {
    if trials == 0 {
        return Err(Error::ParameterOutOfRange("at least one trial is required".into()));
    }
    let space = ctx.povm().space().clone();
    let mut worst_undercut = 0.0f64;
    let mut max_quadratic_residual = 0.0f64;
    for _ in 0..trials {
        let values = (0..space.len()).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let delta = OutcomeFunction::new(space.clone(), values)?;
        let t = rng.random_range(-1.0..=1.0);
        let check = perturbed_excess(ctx, a, &delta, t)?;
        worst_undercut = worst_undercut.min(check.f_error - check.quantum_error);
        max_quadratic_residual = max_quadratic_residual.max((check.excess - check.predicted).abs());
    }
    Ok(MinimalityReport {
        trials,
        worst_undercut,
        max_quadratic_residual,
    })
}

/// The three equivalent characterizations of an errorless measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorlessReport {
    /// `eps(A)^2 <= tau ||A||^2`.
    pub cond_a: bool,
    /// `||A - M* M_* A||^2 <= tau ||A||^2`.
    pub cond_b: bool,
    /// `||A||^2 - ||M_* A||^2` and `||M_* A||^2 - ||M* M_* A||^2` both `<= tau ||A||^2`.
    pub cond_c: bool,
    pub squared_error: f64,
    pub reconstruction_gap: f64,
}

impl ErrorlessReport {
    pub fn consistent(&self) -> bool {
        self.cond_a == self.cond_b && self.cond_b == self.cond_c
    }
}

/// Evaluates the errorless conditions. Thresholds apply to squared norms
/// relative to `||A||_rho^2`, since the error itself carries a
/// `sqrt(machine epsilon)` floor from the difference of squares.
pub fn errorless_check(ctx: &LocalContext, a: &Observable) -> Result<ErrorlessReport> {
    let rho = ctx.state();
    let tau = ctx.tolerances().errorless;
    let norm2 = state::state_inner(a, a, rho)?;
    let scale = tau * norm2.max(f64::EPSILON * a.max_abs().powi(2));

    let push = ctx.pushforward(a)?;
    let push2 = state::class_inner(&push, &push, ctx.distribution())?;
    let rec = ctx.pullback(&push)?;
    let rec2 = state::state_inner(&rec, &rec, rho)?;
    let gap = a.try_sub(&rec)?;
    let gap2 = state::state_inner(&gap, &gap, rho)?;
    let squared_error = squared_quantum_error(ctx, a)?;

    Ok(ErrorlessReport {
        cond_a: squared_error <= scale,
        cond_b: gap2 <= scale,
        cond_c: norm2 - push2 <= scale && push2 - rec2 <= scale,
        squared_error,
        reconstruction_gap: gap2.max(0.0).sqrt(),
    })
}
