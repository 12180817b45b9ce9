//! Named scenarios with every computed value printed.

use std::io::Write;

use errgeom_core::indirect::IndirectModel;
use errgeom_core::{
    evaluate_relation, schroedinger_reduction, DensityOperator, LocalContext, Observable, Povm, Tolerances,
};
use serde_json::{json, Value};

use crate::manifest::RunManifest;
use crate::{DemoArgs, DemoName};

struct Demo {
    title: &'static str,
    setup: Vec<&'static str>,
    values: Vec<(&'static str, Value)>,
    checks: Vec<(&'static str, bool)>,
}

pub fn run(args: &DemoArgs, out: &mut dyn Write) -> anyhow::Result<bool> {
    let tol = Tolerances::DEFAULT;
    let demo = match args.name {
        DemoName::NaiveViolation => naive_violation(&tol)?,
        DemoName::KrReduction => kr_reduction(&tol)?,
        DemoName::OzawaChain => ozawa_chain(&tol)?,
    };
    let name = args.name_str();
    let mut manifest = RunManifest::new("demo", json!({ "name": name }), tol);
    for &(_, ok) in &demo.checks {
        manifest.record(ok);
    }

    if args.json {
        let values: serde_json::Map<String, Value> =
            demo.values.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        let checks: serde_json::Map<String, Value> = demo
            .checks
            .iter()
            .map(|(k, v)| (k.to_string(), Value::Bool(*v)))
            .collect();
        let doc =
            json!({ "demo": name, "setup": demo.setup, "values": values, "checks": checks, "manifest": manifest });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    } else {
        writeln!(out, "# demo: {name} ({})", demo.title)?;
        writeln!(out, "# errgeom {}", env!("CARGO_PKG_VERSION"))?;
        for line in &demo.setup {
            writeln!(out, "# {line}")?;
        }
        for (k, v) in &demo.values {
            writeln!(out, "{k} = {v}")?;
        }
        for (k, ok) in &demo.checks {
            writeln!(out, "{} {k}", if *ok { "HOLD" } else { "FAIL" })?;
        }
        writeln!(out, "manifest: {}", serde_json::to_string(&manifest)?)?;
    }
    Ok(manifest.passed())
}

impl DemoArgs {
    fn name_str(&self) -> &'static str {
        match self.name {
            DemoName::NaiveViolation => "naive-violation",
            DemoName::KrReduction => "kr-reduction",
            DemoName::OzawaChain => "ozawa-chain",
        }
    }
}

fn y_state() -> anyhow::Result<DensityOperator> {
    Ok(DensityOperator::from_bloch([0.0, 0.8, 0.0])?)
}

fn naive_violation(tol: &Tolerances) -> anyhow::Result<Demo> {
    let ctx = LocalContext::new(Povm::projective(&Observable::pauli_z())?, y_state()?)?;
    let r = evaluate_relation(&ctx, &Observable::pauli_x(), &Observable::pauli_z())?;
    Ok(Demo {
        title: "the error product can sit below |<[A,B]>|/2",
        setup: vec![
            "measurement: projective Pauli Z",
            "state: rho = (I + 0.8 Y)/2",
            "observables: A = X, B = Z",
        ],
        values: vec![
            ("epsA", json!(r.eps_a)),
            ("epsB", json!(r.eps_b)),
            ("product", json!(r.product())),
            ("R", json!(r.real_part)),
            ("I", json!(r.imag_part)),
            ("bound", json!(r.bound)),
            ("slack", json!(r.slack)),
            ("naiveBound", json!(r.naive_bound)),
            ("naiveViolated", json!(r.naive_violated)),
        ],
        checks: vec![
            ("eps(A) eps(B) >= sqrt(R^2 + I^2)", r.holds(tol.identity)),
            ("eps(A) eps(B) < |<[A,B]/2i>|", r.naive_violated),
        ],
    })
}

fn kr_reduction(tol: &Tolerances) -> anyhow::Result<Demo> {
    let rho = DensityOperator::basis(2, 0)?;
    let r = schroedinger_reduction(&rho, &Observable::pauli_x(), &Observable::pauli_y())?;
    Ok(Demo {
        title: "a trivial measurement turns the relation into the Schroedinger inequality",
        setup: vec![
            "measurement: trivial, outcomes drawn uniformly and independently of the state",
            "state: rho = |0><0|",
            "observables: A = X, B = Y",
        ],
        values: vec![
            ("epsA", json!(r.relation.eps_a)),
            ("epsB", json!(r.relation.eps_b)),
            ("sigmaA", json!(r.sigma_a)),
            ("sigmaB", json!(r.sigma_b)),
            ("sigmaA*sigmaB", json!(r.lhs)),
            ("R", json!(r.real_part)),
            ("I", json!(r.imag_part)),
            ("schroedingerBound", json!(r.schroedinger_bound)),
            ("kennardRobertsonBound", json!(r.kr_bound)),
            ("reductionResidual", json!(r.reduction_residual)),
        ],
        checks: vec![
            ("errors equal standard deviations", r.reduction_residual <= tol.identity),
            (
                "sigmaA sigmaB >= Schroedinger bound >= Kennard-Robertson bound",
                r.holds(tol.identity),
            ),
            (
                "saturated: sigmaA sigmaB = Schroedinger bound",
                (r.lhs - r.schroedinger_bound).abs() <= 1e-10,
            ),
        ],
    })
}

fn ozawa_chain(tol: &Tolerances) -> anyhow::Result<Demo> {
    let r = IndirectModel::cnot().chain_check(&y_state()?, &Observable::pauli_x(), &Observable::pauli_z())?;
    let links = r.links(tol.identity);
    let dominance = r.dominance(tol.identity);
    Ok(Demo {
        title: "Ozawa's error against the state-local error for a CNOT meter",
        setup: vec![
            "model: CNOT (system controls), ancilla |0>, meter Z on the ancilla",
            "state: rho = (I + 0.8 Y)/2",
            "observables: A = X, B = Z",
        ],
        values: vec![
            ("ozawaA", json!(r.ozawa_a)),
            ("ozawaB", json!(r.ozawa_b)),
            ("epsA", json!(r.eps_a)),
            ("epsB", json!(r.eps_b)),
            ("sigmaA", json!(r.sigma_a)),
            ("sigmaB", json!(r.sigma_b)),
            ("chain[0] ozawaA*ozawaB", json!(r.chain[0])),
            ("chain[1] epsA*epsB", json!(r.chain[1])),
            ("chain[2] sqrt(R^2+I^2)", json!(r.chain[2])),
            ("chain[3] |I|", json!(r.chain[3])),
            (
                "chain[4] |<[A,B]>|/2 - ozawaA*sigmaB - sigmaA*ozawaB",
                json!(r.chain[4]),
            ),
            ("bridgeResidual", json!(r.bridge_residual)),
        ],
        checks: vec![
            ("chain[0] >= chain[1]", links[0]),
            ("chain[1] >= chain[2]", links[1]),
            ("chain[2] >= chain[3]", links[2]),
            ("chain[3] >= chain[4]", links[3]),
            ("ozawa error >= state-local error", dominance[0] && dominance[1]),
            (
                "ozawa error = identity-estimator error",
                r.bridge_residual <= tol.identity,
            ),
        ],
    })
}
