//! Brute-force reference routines used only by tests.
//!
//! Everything here works on plain nested vectors with explicit loops and
//! shares no code with the library, so it can be used to cross-check the
//! library's results.
#![allow(dead_code)]

use num_complex::Complex64 as C;

pub type Mat = Vec<Vec<C>>;

pub fn zeros(n: usize) -> Mat {
    vec![vec![C::new(0.0, 0.0); n]; n]
}

pub fn eye(n: usize) -> Mat {
    let mut m = zeros(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = C::new(1.0, 0.0);
    }
    m
}

pub fn from_real(rows: &[&[f64]]) -> Mat {
    rows.iter()
        .map(|r| r.iter().map(|&x| C::new(x, 0.0)).collect())
        .collect()
}

pub fn pauli_x() -> Mat {
    from_real(&[&[0.0, 1.0], &[1.0, 0.0]])
}

pub fn pauli_y() -> Mat {
    vec![
        vec![C::new(0.0, 0.0), C::new(0.0, -1.0)],
        vec![C::new(0.0, 1.0), C::new(0.0, 0.0)],
    ]
}

pub fn pauli_z() -> Mat {
    from_real(&[&[1.0, 0.0], &[0.0, -1.0]])
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = C::new(0.0, 0.0);
            for k in 0..n {
                acc += a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn scale(a: &Mat, s: f64) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

pub fn trace(a: &Mat) -> C {
    (0..a.len()).map(|i| a[i][i]).sum()
}

/// Re Tr[X rho].
pub fn expect(x: &Mat, rho: &Mat) -> f64 {
    trace(&mul(x, rho)).re
}

/// Re Tr[(AB + BA) rho] / 2.
pub fn sym_expect(a: &Mat, b: &Mat, rho: &Mat) -> f64 {
    0.5 * (trace(&mul(&mul(a, b), rho)).re + trace(&mul(&mul(b, a), rho)).re)
}

/// Im Tr[A B rho], i.e. the expectation of [A,B]/2i.
pub fn comm_expect(a: &Mat, b: &Mat, rho: &Mat) -> f64 {
    trace(&mul(&mul(a, b), rho)).im
}

/// Outcome probabilities Tr[E rho].
pub fn probabilities(effects: &[Mat], rho: &Mat) -> Vec<f64> {
    effects.iter().map(|e| expect(e, rho)).collect()
}

/// Optimal estimator: the weighted least-squares solution of the
/// adjointness relation against point-mass test functions.
pub fn pushforward(effects: &[Mat], rho: &Mat, a: &Mat) -> Vec<f64> {
    effects
        .iter()
        .map(|e| {
            let p = expect(e, rho);
            if p > 1e-12 {
                sym_expect(a, e, rho) / p
            } else {
                0.0
            }
        })
        .collect()
}

pub fn adjoint(effects: &[Mat], f: &[f64]) -> Mat {
    let n = effects[0].len();
    let mut out = zeros(n);
    for (e, &fv) in effects.iter().zip(f) {
        out = add(&out, &scale(e, fv));
    }
    out
}

/// Direct sum of the squared quantum error: ||A||^2 - sum_w f_A(w)^2 p(w).
pub fn quantum_error(effects: &[Mat], rho: &Mat, a: &Mat) -> f64 {
    let p = probabilities(effects, rho);
    let f = pushforward(effects, rho, a);
    let norm_a = expect(&mul(a, a), rho);
    let push: f64 = f.iter().zip(&p).map(|(fv, pv)| fv * fv * pv).sum();
    (norm_a - push).max(0.0).sqrt()
}

/// Unsharp qubit effects (I +- eta * Z) / 2.
pub fn unsharp_z(eta: f64) -> Vec<Mat> {
    vec![
        from_real(&[&[(1.0 + eta) / 2.0, 0.0], &[0.0, (1.0 - eta) / 2.0]]),
        from_real(&[&[(1.0 - eta) / 2.0, 0.0], &[0.0, (1.0 + eta) / 2.0]]),
    ]
}

/// Ozawa root-mean-square error on an explicit system (x) ancilla product,
/// system index first: <(U^dag (I (x) meter) U - A (x) I)^2>_{rho (x) xi}.
pub fn ozawa_error(rho: &Mat, xi: &Mat, u: &Mat, meter: &Mat, a: &Mat) -> f64 {
    let joint_rho = kron(rho, xi);
    let ns = rho.len();
    let na = xi.len();
    let out = mul(&mul(&dagger(u), &kron(&eye(ns), meter)), u);
    let d = add(&out, &scale(&kron(a, &eye(na)), -1.0));
    expect(&mul(&d, &d), &joint_rho).max(0.0).sqrt()
}

pub fn dagger(a: &Mat) -> Mat {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (na, nb) = (a.len(), b.len());
    let mut out = zeros(na * nb);
    for i in 0..na {
        for j in 0..na {
            for k in 0..nb {
                for l in 0..nb {
                    out[i * nb + k][j * nb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// CNOT with the first factor as control.
pub fn cnot() -> Mat {
    from_real(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
}
