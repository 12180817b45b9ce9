use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::ValueEnum;
use errgeom_core::{evaluate_relation, DensityOperator, LocalContext, Observable, Povm, RelationReport};
use serde_json::json;

use crate::inputs;
use crate::manifest::{tolerances_with, RunManifest};
use crate::{Family, ScanArgs};

pub const HEADER: [&str; 11] = [
    "dim",
    "kind",
    "param",
    "epsA",
    "epsB",
    "R",
    "I",
    "bound",
    "slack",
    "naiveBound",
    "naiveViolated",
];

/// Twelve significant digits, locale independent.
pub fn format_float(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn row(dim: usize, kind: &str, param: f64, r: &RelationReport) -> Vec<String> {
    let mut cells = vec![dim.to_string(), kind.to_string(), format_float(param)];
    cells.extend(
        [
            r.eps_a,
            r.eps_b,
            r.real_part,
            r.imag_part,
            r.bound,
            r.slack,
            r.naive_bound,
        ]
        .iter()
        .map(|&v| format_float(v)),
    );
    cells.push(r.naive_violated.to_string());
    cells
}

struct Setup {
    state: DensityOperator,
    a: Observable,
    b: Observable,
    measured: Observable,
}

fn setup(args: &ScanArgs) -> anyhow::Result<Setup> {
    let state = args.state.as_deref().map(inputs::state).transpose()?;
    let measured = args.measured.as_deref().map(inputs::observable).transpose()?;
    let dim = state
        .as_ref()
        .map(DensityOperator::dim)
        .or(measured.as_ref().map(Observable::dim))
        .unwrap_or(2);
    let (a, b) = match &args.observables {
        Some(path) => inputs::observable_pair(path, dim)?,
        None if dim == 2 => (Observable::pauli_z(), Observable::pauli_x()),
        None => bail!("--observables is required for dimension {dim}"),
    };
    let state = state.unwrap_or_else(|| DensityOperator::maximally_mixed(dim));
    let measured = measured.unwrap_or_else(|| a.clone());
    if state.dim() != dim || measured.dim() != dim {
        bail!("state, observables and measured observable must share one dimension");
    }
    if args.axis.len() != 3 {
        bail!("--axis takes three comma-separated components");
    }
    if args.family == Family::Unsharp && dim != 2 {
        bail!("the unsharp family is defined on a qubit");
    }
    Ok(Setup { state, a, b, measured })
}

fn povm_at(args: &ScanArgs, setup: &Setup, param: f64) -> anyhow::Result<Povm> {
    let povm = match args.family {
        Family::Unsharp => {
            let axis = [args.axis[0], args.axis[1], args.axis[2]];
            Povm::unsharp_qubit(axis, param)
        }
        Family::NoisyProjective => Povm::noisy_projective(&setup.measured, param),
    };
    povm.with_context(|| format!("grid point {param}"))
}

pub fn run(args: &ScanArgs, out: &mut dyn Write) -> anyhow::Result<bool> {
    let started = Instant::now();
    let tolerances = tolerances_with(args.tolerance)?;
    let grid = inputs::grid(&args.grid)?;
    let setup = setup(args)?;
    let dim = setup.state.dim();

    let mut rows = Vec::with_capacity(grid.len());
    let mut manifest = RunManifest::new(
        "scan",
        json!({
            "family": args.family.to_possible_value().map(|v| v.get_name().to_string()),
            "grid": grid,
            "axis": args.axis,
            "state": args.state,
            "observables": args.observables,
            "measured": args.measured,
        }),
        tolerances,
    );
    for &param in &grid {
        let povm = povm_at(args, &setup, param)?;
        let kind = povm.kind().as_str();
        let ctx = LocalContext::with_tolerances(povm, setup.state.clone(), tolerances)?;
        let report = evaluate_relation(&ctx, &setup.a, &setup.b)?;
        manifest.record(report.holds(tolerances.identity));
        rows.push(row(dim, kind, param, &report));
    }
    manifest.finish(started);

    match &args.out {
        Some(path) => {
            let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
            write_csv(file, &rows)?;
            let mut side = PathBuf::from(path);
            side.as_mut_os_string().push(".manifest.json");
            std::fs::write(&side, serde_json::to_string_pretty(&manifest)?)
                .with_context(|| format!("cannot write {}", side.display()))?;
        }
        None => {
            write_csv(&mut *out, &rows)?;
            eprintln!("manifest: {}", serde_json::to_string(&manifest)?);
        }
    }
    Ok(manifest.passed())
}

fn write_csv<W: Write>(sink: W, rows: &[Vec<String>]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}
