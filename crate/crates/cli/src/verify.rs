use std::io::Write;
use std::time::Instant;

use anyhow::bail;
use errgeom_core::verify::{self as suites, Fault, VerifyOptions};
use serde_json::json;

use crate::manifest::{tolerances_with, RunManifest};
use crate::VerifyArgs;

pub fn run(args: &VerifyArgs, out: &mut dyn Write) -> anyhow::Result<bool> {
    let started = Instant::now();
    if args.n == 0 {
        bail!("--n must be at least 1");
    }
    let fault = match args.inject_fault.as_deref() {
        None => None,
        Some(name) => match Fault::parse(name) {
            Some(f) => Some(f),
            None => bail!("unknown fault {name:?}"),
        },
    };
    let mut dims: Vec<usize> = args.dims.iter().map(|&d| d as usize).collect();
    dims.sort_unstable();
    dims.dedup();

    let options = VerifyOptions {
        dims: dims.clone(),
        instances: args.n,
        seed: args.seed,
        tolerances: tolerances_with(args.tolerance)?,
        fault,
    };
    let report = suites::run(&options);

    let mut manifest = RunManifest::new(
        "verify",
        json!({ "dims": dims, "instances": args.n, "seed": args.seed, "fault": fault }),
        options.tolerances,
    );
    manifest.checks_failed = report.failures();
    manifest.checks_passed = report.checks() - report.failures();
    manifest.finish(started);

    if args.json {
        let doc = json!({ "manifest": manifest, "suites": report.suites });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    } else {
        let dims_text: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
        writeln!(
            out,
            "errgeom verify: dims {} | {} instances per dimension | seed {}",
            dims_text.join(","),
            args.n,
            args.seed
        )?;
        for s in &report.suites {
            writeln!(
                out,
                "{} {:<18} checks {:>7}  failures {:>5}  worst/tol {:.3e}",
                if s.passed() { "PASS" } else { "FAIL" },
                s.name,
                s.checks,
                s.failures,
                s.worst
            )?;
            if let Some(first) = &s.first_failure {
                writeln!(out, "     first failure: {first}")?;
            }
        }
        if report.passed() {
            writeln!(
                out,
                "all {} suites passed ({} checks)",
                report.suites.len(),
                report.checks()
            )?;
        } else {
            writeln!(out, "violations in: {}", report.failing_suites().join(", "))?;
        }
        writeln!(out, "manifest: {}", serde_json::to_string(&manifest)?)?;
    }
    if !report.passed() {
        eprintln!("property violation in suite(s): {}", report.failing_suites().join(", "));
    }
    Ok(report.passed())
}
