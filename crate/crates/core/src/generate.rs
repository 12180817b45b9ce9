//! Seeded random instances.
//!
//! Every generator takes the RNG explicitly and advances it in place, so a
//! stream is fully determined by its seed. Parallel sweeps derive one
//! independent seed per instance with [`split_seed`].

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indirect::IndirectModel;
use crate::linalg::{self, CMatrix, ZERO};
use crate::measurement::{MeasurementKind, Povm};
use crate::state::{DensityOperator, Distribution, Observable, OutcomeFunction, OutcomeSpace};

/// Name of the generator behind [`GenConfig::rng`], recorded in reports.
pub const RNG_ALGORITHM: &str = "ChaCha20Rng (rand_chacha 0.9), seed_from_u64; per-instance seeds via splitmix64";

/// How mixed a random state should be.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mixedness {
    /// Haar-random pure state.
    Pure,
    /// `G G^dag / Tr` for a square Ginibre matrix `G`.
    Ginibre,
    /// `(1 - lambda) |psi><psi| + lambda I / n` with Haar-random `psi`.
    MaximallyMixedBlend(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    /// Hilbert space dimension, at least 2.
    pub dim: usize,
    /// Number of POVM outcomes, or the ancilla dimension for indirect
    /// models; at least 1.
    pub outcomes: usize,
    pub mixedness: Mixedness,
}

impl GenConfig {
    pub fn new(seed: u64, dim: usize, outcomes: usize, mixedness: Mixedness) -> Result<Self> {
        if dim < 2 {
            return Err(Error::ParameterOutOfRange(format!("dimension {dim} is below 2")));
        }
        if outcomes == 0 {
            return Err(Error::ParameterOutOfRange("at least one outcome is required".into()));
        }
        if let Mixedness::MaximallyMixedBlend(l) = mixedness {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::ParameterOutOfRange(format!("blend weight {l} outside [0, 1]")));
            }
        }
        Ok(Self {
            seed,
            dim,
            outcomes,
            mixedness,
        })
    }

    pub fn rng(&self) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(self.seed)
    }
}

/// Mixes a base seed with a stream index (splitmix64 finalizer).
pub fn split_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Complex normal with `E|z|^2 = 1`.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-random unit vector.
pub fn random_pure_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| complex_normal(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// `G G^dag / Tr` with `G` of shape `dim x rank`; generically of rank `rank`.
pub fn random_rank_state<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> Result<DensityOperator> {
    if rank == 0 || rank > dim {
        return Err(Error::ParameterOutOfRange(format!("rank {rank} outside 1..={dim}")));
    }
    let g = ginibre(rng, dim, rank);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    DensityOperator::new(w.unscale(tr))
}

pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize, mixedness: Mixedness) -> Result<DensityOperator> {
    match mixedness {
        Mixedness::Pure => DensityOperator::pure(&random_pure_vector(rng, dim)),
        Mixedness::Ginibre => random_rank_state(rng, dim, dim),
        Mixedness::MaximallyMixedBlend(l) => {
            let psi = DensityOperator::pure(&random_pure_vector(rng, dim))?;
            DensityOperator::mixture(1.0 - l, &psi, &DensityOperator::maximally_mixed(dim))
        }
    }
}

/// GUE sample `(G + G^dag) / 2`.
pub fn random_observable<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Observable {
    Observable::from_hermitian_part(&ginibre(rng, dim, dim))
}

pub fn random_traceless_observable<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Observable {
    random_observable(rng, dim).traceless_part()
}

/// `E_w = S^{-1/2} G_w^dag G_w S^{-1/2}` with `S = sum G_w^dag G_w`; outcomes
/// are labeled `1..=n`.
pub fn random_povm<R: Rng + ?Sized>(rng: &mut R, dim: usize, outcomes: usize) -> Result<Povm> {
    if outcomes == 0 {
        return Err(Error::ParameterOutOfRange("at least one outcome is required".into()));
    }
    let space = OutcomeSpace::numbered(outcomes)?;
    loop {
        let raw: Vec<CMatrix> = (0..outcomes)
            .map(|_| {
                let g = ginibre(rng, dim, dim);
                g.adjoint() * g
            })
            .collect();
        let s = raw.iter().fold(CMatrix::zeros(dim, dim), |acc, m| acc + m);
        let Some(root) = linalg::inv_sqrt_pd(&s, 1e-10)? else {
            continue;
        };
        let effects = raw
            .iter()
            .map(|m| Observable::from_hermitian_part(&(&root * m * &root)))
            .collect();
        return Povm::new(MeasurementKind::Custom, space, effects);
    }
}

/// Haar unitary from the QR decomposition of a Ginibre matrix, with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let qr = ginibre(rng, dim, dim).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar interaction, Haar-random pure ancilla, and a diagonal meter with
/// well-separated eigenvalues.
pub fn random_indirect_model<R: Rng + ?Sized>(
    rng: &mut R,
    system_dim: usize,
    ancilla_dim: usize,
) -> Result<IndirectModel> {
    if ancilla_dim < 2 {
        return Err(Error::ParameterOutOfRange(format!(
            "ancilla dimension {ancilla_dim} is below 2"
        )));
    }
    let interaction = haar_unitary(rng, system_dim * ancilla_dim);
    let xi = DensityOperator::pure(&random_pure_vector(rng, ancilla_dim))?;
    let mut levels: Vec<f64> = (0..ancilla_dim)
        .map(|k| k as f64 - (ancilla_dim - 1) as f64 / 2.0 + rng.random_range(-0.3..0.3))
        .collect();
    levels.shuffle(rng);
    IndirectModel::new(system_dim, xi, interaction, Observable::diagonal(&levels))
}

pub fn random_state_for(cfg: &GenConfig) -> Result<DensityOperator> {
    random_state(&mut cfg.rng(), cfg.dim, cfg.mixedness)
}

pub fn random_povm_for(cfg: &GenConfig) -> Result<Povm> {
    random_povm(&mut cfg.rng(), cfg.dim, cfg.outcomes)
}

pub fn random_indirect_model_for(cfg: &GenConfig) -> Result<IndirectModel> {
    random_indirect_model(&mut cfg.rng(), cfg.dim, cfg.outcomes)
}

/// A measurement, a state and two observables.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub povm: Povm,
    pub state: DensityOperator,
    pub a: Observable,
    pub b: Observable,
}

/// Mixes measurement families and state ranks. Roughly one draw in six puts
/// a rank-deficient state next to a block-diagonal measurement so that some
/// outcomes have probability exactly zero.
pub fn random_scenario<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<Scenario> {
    let a = random_observable(rng, dim);
    let b = random_observable(rng, dim);
    let pick = rng.random_range(0..6u8);
    let (povm, state) = match pick {
        0 => {
            let n = rng.random_range(1..=dim + 2);
            (random_povm(rng, dim, n)?, random_state(rng, dim, Mixedness::Ginibre)?)
        }
        1 => {
            let povm = Povm::projective(&random_observable(rng, dim))?;
            let blend = rng.random_range(0.0..1.0);
            (povm, random_state(rng, dim, Mixedness::MaximallyMixedBlend(blend))?)
        }
        2 => (
            Povm::noisy_projective(&random_observable(rng, dim), rng.random_range(0.0..=1.0))?,
            random_state(rng, dim, Mixedness::Ginibre)?,
        ),
        3 => {
            let n = rng.random_range(1..=4);
            let weights = random_probabilities(rng, n);
            let p0 = Distribution::new(OutcomeSpace::numbered(n)?, weights)?;
            (Povm::trivial(&p0, dim)?, random_state(rng, dim, Mixedness::Ginibre)?)
        }
        4 => {
            let n = rng.random_range(2..=dim + 1);
            (random_povm(rng, dim, n)?, random_state(rng, dim, Mixedness::Pure)?)
        }
        _ => {
            let (povm, state, _) = block_scenario(rng, dim)?;
            (povm, state)
        }
    };
    Ok(Scenario { povm, state, a, b })
}

fn random_probabilities<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// State on the first `r < dim` basis vectors, measured projectively in a
/// basis adapted to that block; outcomes outside the block never fire.
/// Returns the block size `r` as well.
fn block_scenario<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<(Povm, DensityOperator, usize)> {
    let r = rng.random_range(1..dim);
    let rank = rng.random_range(1..=r);
    let inner = random_rank_state(rng, r, rank)?;
    let mut padded = CMatrix::from_element(dim, dim, ZERO);
    padded.view_mut((0, 0), (r, r)).copy_from(inner.matrix());
    let state = DensityOperator::new(padded)?;

    let mut m = CMatrix::from_element(dim, dim, ZERO);
    m.view_mut((0, 0), (r, r)).copy_from(random_observable(rng, r).matrix());
    for k in r..dim {
        m[(k, k)] = Complex64::new(10.0 + k as f64, 0.0);
    }
    Ok((Povm::projective(&Observable::new(m)?)?, state, r))
}

/// A projective measurement with `A = M* g` for random `g`, plus a term the
/// state cannot see when the state is rank deficient, so `A` is measured
/// without error. `B` is random.
pub fn errorless_scenario<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<Scenario> {
    let (povm, state, block) = if rng.random_bool(0.5) {
        (
            Povm::projective(&random_observable(rng, dim))?,
            random_state(rng, dim, Mixedness::Ginibre)?,
            dim,
        )
    } else {
        block_scenario(rng, dim)?
    };
    let g = OutcomeFunction::new(
        povm.space().clone(),
        (0..povm.outcomes()).map(|_| rng.random_range(-2.0..2.0)).collect(),
    )?;
    let mut a = povm.adjoint(&g)?;
    if block < dim {
        let mut hidden = CMatrix::from_element(dim, dim, ZERO);
        let tail = random_observable(rng, dim - block);
        hidden
            .view_mut((block, block), (dim - block, dim - block))
            .copy_from(tail.matrix());
        a = a.try_add(&Observable::new(hidden)?)?;
    }
    Ok(Scenario {
        povm,
        state,
        a,
        b: random_observable(rng, dim),
    })
}
