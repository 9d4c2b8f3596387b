use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::Context;
use cncsim::decomposer::{
    build_columns, feasibility_with, robustness_of_magic, robustness_with, Columns, ExpectationVector, RevisedSimplex,
};
use cncsim::oracle::{h_phi_state, random_hs_state, random_pure_state, rho_xy_unchecked, write_goldens, DenseOperator};
use cncsim::phase_space::{load_or_enumerate, Catalog};
use cncsim::simulator::{exact_outcome_distribution, shot_seed, Sampler, WRep};
use cncsim::verify::{self, Level};
use cncsim::{Error, MeasurementProgram};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::state::{parse_state, StateInput};
use crate::{emit, CatalogArgs, DecomposeArgs, DecomposeMode, Measure, OracleArgs, Provenance, ScanArgs, ScanKind, SimulateArgs, VerificationFailed, VerifyArgs};

fn default_m(n: usize, m: &Option<Vec<usize>>) -> Vec<usize> {
    m.clone().unwrap_or_else(|| (1..=n).collect())
}

fn catalog_for(cache: Option<&Path>, n: usize, m: &[usize], rebit: bool) -> anyhow::Result<Catalog> {
    Ok(load_or_enumerate(cache, n, m, rebit)?)
}

fn solver(tol: Option<f64>) -> RevisedSimplex {
    let mut s = RevisedSimplex::default();
    if let Some(t) = tol {
        s.tol_feasible = t;
    }
    s
}

pub fn catalog(a: &CatalogArgs, cache: Option<&Path>, prov: &Provenance) -> anyhow::Result<()> {
    let cat = catalog_for(cache, a.n, &a.m, a.rebit)?;
    let row = cat.count_row();
    let mut out = prov.csv_header();
    out.push_str("mode,m_set,sets,points\n");
    writeln!(out, "{},\"{}\",{},{}", row.mode, row.m_set, row.sets, row.points)?;
    if let Some(path) = &a.export {
        let text = serde_json::to_string_pretty(&json!({ "provenance": prov, "points": cat.export_records() }))?;
        std::fs::write(path, text).map_err(Error::from)?;
    }
    emit(a.out.as_ref(), &out)
}

pub fn decompose(a: &DecomposeArgs, cache: Option<&Path>, prov: &Provenance) -> anyhow::Result<()> {
    let st = parse_state(&a.state)?;
    let b = st.expectations()?;
    let n = b.n();
    let columns = || -> anyhow::Result<Columns> { Ok(build_columns(&catalog_for(cache, n, &default_m(n, &a.m), a.rebit)?)) };
    let mut doc = json!({ "provenance": prov, "state": a.state, "mode": a.mode, "n": n });
    match a.mode {
        DecomposeMode::Feasibility => {
            let w = feasibility_with(&b, &columns()?, &solver(a.tol_feasible))?;
            doc["feasible"] = json!(w.is_some());
            if let Some(w) = &w {
                doc["support_size"] = json!(w.support_size());
                doc["residual"] = json!(cncsim::decomposer::residual(w, &b));
                if a.with_solution {
                    doc["solution"] = serde_json::to_value(w.to_record())?;
                }
            }
        }
        DecomposeMode::Robustness | DecomposeMode::RobustnessS => {
            let r = if a.mode == DecomposeMode::Robustness {
                robustness_with(&b, &columns()?, &solver(a.tol_feasible))?
            } else {
                robustness_of_magic(&b)?
            };
            doc["robustness"] = json!(r.objective);
            doc["support_size"] = json!(r.support_size);
            doc["residual"] = json!(r.residual);
            doc["iterations"] = json!(r.iterations);
            doc["status"] = json!(r.status);
            doc["wall_time"] = json!(r.wall_time);
            if a.with_solution {
                doc["solution"] = serde_json::to_value(r.solution.to_record())?;
            }
        }
    }
    emit(a.out.as_ref(), &(serde_json::to_string_pretty(&doc)? + "\n"))
}

fn load_program(spec: &str) -> anyhow::Result<MeasurementProgram> {
    let text = if spec.trim_start().starts_with('[') {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec).with_context(|| format!("reading program '{spec}'"))?
    };
    Ok(MeasurementProgram::from_json(&text)?)
}

fn positive_wrep(st: StateInput, cache: Option<&Path>, m: &Option<Vec<usize>>) -> anyhow::Result<WRep> {
    match st {
        StateInput::WRep(w) => Ok(w),
        other => {
            let b = other.expectations()?;
            let n = b.n();
            let cols = build_columns(&catalog_for(cache, n, &default_m(n, m), false)?);
            feasibility_with(&b, &cols, &RevisedSimplex::default())?.ok_or_else(|| {
                Error::Precondition("state is not positively representable on this catalog; see `decompose --mode robustness`".into())
                    .into()
            })
        }
    }
}

pub fn simulate(a: &SimulateArgs, cache: Option<&Path>, prov: &Provenance) -> anyhow::Result<()> {
    let prog = load_program(&a.program)?;
    let w = positive_wrep(parse_state(&a.state)?, cache, &a.m)?;
    let mut out = prov.csv_header();
    if a.exact {
        out.push_str("outcomes,probability\n");
        for (k, p) in exact_outcome_distribution(&w, &prog)? {
            writeln!(out, "{k},{p:.15}")?;
        }
        return emit(a.out.as_ref(), &out);
    }
    let sampler = Sampler::new(&w)?;
    let rows: Vec<anyhow::Result<String>> = (0..a.shots)
        .into_par_iter()
        .map(|i| {
            let seed = shot_seed(a.seed, i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (bits, _) = sampler.run(&prog, &mut rng)?;
            Ok(format!("{seed},{}\n", bits.iter().map(|b| char::from(b'0' + b)).collect::<String>()))
        })
        .collect();
    out.push_str("seed,outcomes\n");
    for r in rows {
        out.push_str(&r?);
    }
    emit(a.out.as_ref(), &out)
}

fn parse_range(s: &str) -> anyhow::Result<(f64, f64)> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| Error::Parse(format!("range '{s}' must be lo:hi")))?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{v}'")));
    Ok((p(lo)?, p(hi)?))
}

fn grid(lo: f64, hi: f64, k: usize, i: usize) -> f64 {
    if k <= 1 {
        lo
    } else {
        lo + (hi - lo) * i as f64 / (k - 1) as f64
    }
}

fn is_physical(rho: &DenseOperator) -> bool {
    rho.check_state(1e-12).is_ok()
}

pub fn scan(a: &ScanArgs, cache: Option<&Path>, prov: &Provenance) -> anyhow::Result<()> {
    let mut out = prov.csv_header();
    let s = RevisedSimplex::default();
    match &a.kind {
        ScanKind::Plane { x, y, grid: k, m } => {
            let (x0, x1) = parse_range(x)?;
            let (y0, y1) = parse_range(y)?;
            let cols = build_columns(&catalog_for(cache, 2, m, false)?);
            let cells: Vec<anyhow::Result<String>> = (0..k * k)
                .into_par_iter()
                .map(|idx| {
                    let (xv, yv) = (grid(x0, x1, *k, idx / k), grid(y0, y1, *k, idx % k));
                    let rho = rho_xy_unchecked(xv, yv);
                    let phys = is_physical(&rho);
                    let feas = if phys {
                        let b = ExpectationVector::from_dense(&rho)?;
                        feasibility_with(&b, &cols, &s)?.is_some().to_string()
                    } else {
                        String::new()
                    };
                    Ok(format!("{xv:.6},{yv:.6},{phys},{feas}\n"))
                })
                .collect();
            out.push_str("x,y,physical,feasible\n");
            for c in cells {
                out.push_str(&c?);
            }
        }
        ScanKind::Phi { power, points, m } => {
            let n = *power;
            let cols = build_columns(&catalog_for(cache, n, &default_m(n, m), false)?);
            let rows: Vec<anyhow::Result<String>> = (0..*points)
                .into_par_iter()
                .map(|i| {
                    let phi = 2.0 * std::f64::consts::PI * i as f64 / *points as f64;
                    let one = h_phi_state(phi);
                    let mut rho = one.clone();
                    for _ in 1..n {
                        rho = rho.kron(&one)?;
                    }
                    let b = ExpectationVector::from_dense(&rho)?;
                    let feas = feasibility_with(&b, &cols, &s)?.is_some();
                    let r = robustness_with(&b, &cols, &s)?.objective;
                    Ok(format!("{phi:.6},{feas},{r:.8}\n"))
                })
                .collect();
            out.push_str("phi,feasible,robustness\n");
            for r in rows {
                out.push_str(&r?);
            }
        }
        ScanKind::Volume { n, samples, measure, m, seed } => {
            let cols = build_columns(&catalog_for(cache, *n, m, false)?);
            let flags: Vec<anyhow::Result<bool>> = (0..*samples)
                .into_par_iter()
                .map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(shot_seed(*seed, i));
                    let rho = match measure {
                        Measure::Hs => random_hs_state(*n, &mut rng)?,
                        Measure::Fs => random_pure_state(*n, &mut rng)?,
                    };
                    Ok(feasibility_with(&ExpectationVector::from_dense(&rho)?, &cols, &s)?.is_some())
                })
                .collect();
            let mut feasible = 0u64;
            for f in flags {
                feasible += f? as u64;
            }
            let ms: Vec<String> = m.iter().map(|v| v.to_string()).collect();
            out.push_str("measure,n,m_set,samples,feasible,fraction\n");
            writeln!(
                out,
                "{},{n},\"{}\",{samples},{feasible},{:.6}",
                serde_json::to_value(measure)?.as_str().unwrap_or(""),
                ms.join(","),
                feasible as f64 / (*samples).max(1) as f64
            )?;
        }
    }
    emit(a.out.as_ref(), &out)
}

pub fn oracle(a: &OracleArgs) -> anyhow::Result<()> {
    let names = write_goldens(&a.out)?;
    let mut out = String::new();
    for n in names {
        writeln!(out, "{}", a.out.join(format!("{n}.json")).display())?;
    }
    emit(None, &out)
}

pub fn verify(a: &VerifyArgs, prov: &Provenance) -> anyhow::Result<()> {
    let level: Level = a.level.parse()?;
    let report = verify::run(level);
    let mut out = prov.csv_header();
    let mut failed = BTreeMap::new();
    for c in &report.checks {
        writeln!(out, "{} {} ({}) [{:.2}s]", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail, c.seconds)?;
        if !c.passed {
            failed.insert(c.name.clone(), c.detail.clone());
        }
    }
    emit(a.out.as_ref(), &out)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(VerificationFailed(failed.keys().cloned().collect::<Vec<_>>().join(", ")).into())
    }
}
