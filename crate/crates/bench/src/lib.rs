//! Fixed inputs shared by the benchmarks.

use errgeom_core::generate::{self, GenConfig, Mixedness};
use errgeom_core::indirect::IndirectModel;
use errgeom_core::{DensityOperator, LocalContext, Observable};

pub struct Case {
    pub ctx: LocalContext,
    pub a: Observable,
    pub b: Observable,
}

/// `n` mixed-family scenarios of dimension `dim`, identical across runs.
pub fn cases(dim: usize, n: usize, seed: u64) -> Vec<Case> {
    let cfg = GenConfig::new(seed, dim, dim, Mixedness::Ginibre).expect("valid config");
    let mut rng = cfg.rng();
    (0..n)
        .map(|_| {
            let s = generate::random_scenario(&mut rng, dim).expect("scenario");
            Case {
                ctx: LocalContext::new(s.povm, s.state).expect("context"),
                a: s.a,
                b: s.b,
            }
        })
        .collect()
}

pub struct ChainCase {
    pub model: IndirectModel,
    pub rho: DensityOperator,
    pub a: Observable,
    pub b: Observable,
}

pub fn chain_case(system_dim: usize, seed: u64) -> ChainCase {
    let cfg = GenConfig::new(seed, system_dim, 2, Mixedness::Ginibre).expect("valid config");
    let mut rng = cfg.rng();
    ChainCase {
        model: generate::random_indirect_model(&mut rng, system_dim, 2).expect("model"),
        rho: generate::random_state(&mut rng, system_dim, Mixedness::Ginibre).expect("state"),
        a: generate::random_observable(&mut rng, system_dim),
        b: generate::random_observable(&mut rng, system_dim),
    }
}
