use std::io::Write;
use std::time::Instant;

use anyhow::bail;
use clap::ValueEnum;
use errgeom_core::generate::{self, split_seed, Mixedness};
use errgeom_core::indirect::{ChainReport, IndirectModel};
use errgeom_core::{DensityOperator, Observable};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::json;

use crate::inputs;
use crate::manifest::{tolerances_with, RunManifest};
use crate::{ChainArgs, ModelChoice};

pub fn run(args: &ChainArgs, out: &mut dyn Write) -> anyhow::Result<bool> {
    if args.model_file.is_none() && args.model == ModelChoice::Random {
        return sweep(args, out);
    }
    let started = Instant::now();
    let tol = tolerances_with(args.tolerance)?;
    let model = match (&args.model_file, args.model) {
        (Some(path), _) => inputs::model(path)?,
        (None, ModelChoice::Cnot) => IndirectModel::cnot(),
        (None, _) => IndirectModel::uncoupled(2, DensityOperator::basis(2, 0)?, Observable::pauli_z())?,
    };
    let dim = model.system_dim();
    let rho = match &args.state {
        Some(path) => inputs::state(path)?,
        None if dim == 2 => DensityOperator::from_bloch([0.0, 0.8, 0.0])?,
        None => DensityOperator::maximally_mixed(dim),
    };
    if rho.dim() != dim {
        bail!("state has dimension {}, model system has {dim}", rho.dim());
    }
    let (a, b) = match &args.observables {
        Some(path) => inputs::observable_pair(path, dim)?,
        None if dim == 2 => (Observable::pauli_x(), Observable::pauli_z()),
        None => bail!("--observables is required for system dimension {dim}"),
    };

    let r = model.chain_check(&rho, &a, &b)?;
    let links = r.links(tol.identity);
    let dominance = r.dominance(tol.identity);
    let bridge = r.bridge_residual <= tol.identity * (1.0 + r.ozawa_a.max(r.ozawa_b));
    let mut manifest = RunManifest::new(
        "chain",
        json!({
            "model": args.model_file.as_ref().map(|p| p.display().to_string())
                .or_else(|| args.model.to_possible_value().map(|v| v.get_name().to_string())),
            "state": args.state,
            "observables": args.observables,
        }),
        tol,
    );
    for ok in links.iter().chain(&dominance).chain([&bridge]) {
        manifest.record(*ok);
    }
    manifest.finish(started);

    if args.json {
        let doc =
            json!({ "report": r, "links": links, "dominance": dominance, "bridge": bridge, "manifest": manifest });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    } else {
        write_single(out, &r, &links, &dominance, bridge)?;
        writeln!(out, "manifest: {}", serde_json::to_string(&manifest)?)?;
    }
    Ok(manifest.passed())
}

fn write_single(
    out: &mut dyn Write,
    r: &ChainReport,
    links: &[bool; 4],
    dominance: &[bool; 2],
    bridge: bool,
) -> std::io::Result<()> {
    let mark = |ok: bool| if ok { "HOLD" } else { "FAIL" };
    writeln!(out, "ozawa error  A = {}  B = {}", r.ozawa_a, r.ozawa_b)?;
    writeln!(out, "local error  A = {}  B = {}", r.eps_a, r.eps_b)?;
    writeln!(out, "std dev      A = {}  B = {}", r.sigma_a, r.sigma_b)?;
    let names = [
        "ozawaA*ozawaB",
        "epsA*epsB",
        "sqrt(R^2+I^2)",
        "|I|",
        "|<[A,B]>|/2 - ozawaA*sigmaB - sigmaA*ozawaB",
    ];
    for (k, name) in names.iter().enumerate() {
        writeln!(out, "chain[{k}] {name} = {}", r.chain[k])?;
    }
    for (k, ok) in links.iter().enumerate() {
        writeln!(out, "{} chain[{k}] >= chain[{}]", mark(*ok), k + 1)?;
    }
    writeln!(
        out,
        "{} ozawa error >= local error (A, B)",
        mark(dominance[0] && dominance[1])
    )?;
    writeln!(
        out,
        "{} ozawa error = identity-estimator error (residual {:e})",
        mark(bridge),
        r.bridge_residual
    )
}

fn sweep(args: &ChainArgs, out: &mut dyn Write) -> anyhow::Result<bool> {
    let started = Instant::now();
    let tol = tolerances_with(args.tolerance)?;
    if args.n == 0 {
        bail!("--n must be at least 1");
    }
    let mut dims: Vec<usize> = args.dims.iter().map(|&d| d as usize).collect();
    dims.sort_unstable();
    dims.dedup();
    let mut manifest = RunManifest::new(
        "chain",
        json!({ "model": "random", "dims": dims, "instances": args.n, "seed": args.seed, "ancilla_dim": 2 }),
        tol,
    );
    let mut lines = Vec::new();
    let mut worst_bridge = 0.0f64;
    for &dim in &dims {
        let mut failed = 0;
        for i in 0..args.n {
            let seed = split_seed(split_seed(args.seed, dim as u64), i as u64);
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let model = generate::random_indirect_model(&mut rng, dim, 2)?;
            let rho = generate::random_state(&mut rng, dim, Mixedness::Ginibre)?;
            let a = generate::random_observable(&mut rng, dim);
            let b = generate::random_observable(&mut rng, dim);
            let r = model.chain_check(&rho, &a, &b)?;
            worst_bridge = worst_bridge.max(r.bridge_residual);
            let ok = r.holds(tol.identity);
            manifest.record(ok);
            if !ok {
                failed += 1;
            }
        }
        lines.push(json!({ "system_dim": dim, "ancilla_dim": 2, "models": args.n, "failed": failed }));
    }
    manifest.finish(started);

    if args.json {
        let doc = json!({ "sweep": lines, "worst_bridge_residual": worst_bridge, "manifest": manifest });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    } else {
        for l in &lines {
            writeln!(
                out,
                "{} {}x{}: {} random models, {} failed",
                if l["failed"] == 0 { "HOLD" } else { "FAIL" },
                l["system_dim"],
                l["ancilla_dim"],
                l["models"],
                l["failed"]
            )?;
        }
        writeln!(out, "worst bridge residual = {worst_bridge:e}")?;
        writeln!(out, "manifest: {}", serde_json::to_string(&manifest)?)?;
    }
    Ok(manifest.passed())
}
