//! `--state` arguments: `named:<spec>`, `product:<bloch>;…[|<stab gens>]`,
//! or a path to a JSON file `{"n", "kind", "payload"}`.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context};
use cncsim::decomposer::ExpectationVector;
use cncsim::oracle::{named_state, DenseOperator};
use cncsim::simulator::{product_wrep, WRep, WRepRecord};
use cncsim::{Error, PauliLabel, PhasePoint, SignedPauli};
use serde::Deserialize;

pub enum StateInput {
    Dense(DenseOperator),
    Expectations(ExpectationVector),
    WRep(WRep),
}

impl StateInput {
    pub fn expectations(&self) -> anyhow::Result<ExpectationVector> {
        Ok(match self {
            StateInput::Dense(d) => ExpectationVector::from_dense(d)?,
            StateInput::Expectations(b) => b.clone(),
            StateInput::WRep(w) => {
                ExpectationVector::new(w.n(), PauliLabel::all(w.n()).map(|a| w.expectation(&a)).collect())?
            }
        })
    }
}

#[derive(Deserialize)]
struct StateFile {
    n: usize,
    kind: String,
    payload: serde_json::Value,
}

pub fn parse_state(spec: &str) -> anyhow::Result<StateInput> {
    if let Some(name) = spec.strip_prefix("named:") {
        let rho = named_state(name)?;
        rho.check_state(1e-9)?;
        return Ok(StateInput::Dense(rho));
    }
    if let Some(rest) = spec.strip_prefix("product:") {
        return parse_product(rest).map(StateInput::WRep);
    }
    let text = std::fs::read_to_string(Path::new(spec)).with_context(|| format!("reading state file '{spec}'"))?;
    let f: StateFile = serde_json::from_str(&text).map_err(Error::from)?;
    match f.kind.as_str() {
        "named" => {
            let name = f.payload.as_str().ok_or_else(|| Error::Parse("named payload must be a string".into()))?;
            let rho = named_state(name)?;
            if rho.n() != f.n {
                return Err(Error::DimensionMismatch { left: rho.n(), right: f.n }.into());
            }
            Ok(StateInput::Dense(rho))
        }
        "dense" => {
            let data: Vec<[f64; 2]> = serde_json::from_value(f.payload).map_err(Error::from)?;
            let d = 1usize << f.n;
            if data.len() != d * d {
                return Err(Error::Parse(format!("dense payload needs {} entries, got {}", d * d, data.len())).into());
            }
            let m = cncsim::oracle::GoldenMatrix { name: String::new(), n: f.n, data }.to_operator()?;
            m.check_state(1e-9)?;
            Ok(StateInput::Dense(m))
        }
        "pauli_expectations" => {
            let map: BTreeMap<String, f64> = serde_json::from_value(f.payload).map_err(Error::from)?;
            let mut values = vec![0.0; 1usize << (2 * f.n)];
            values[0] = 1.0;
            for (k, v) in map {
                let l: PauliLabel = k.parse()?;
                if l.n() != f.n {
                    return Err(Error::DimensionMismatch { left: l.n(), right: f.n }.into());
                }
                values[l.index()] = v;
            }
            Ok(StateInput::Expectations(ExpectationVector::new(f.n, values)?))
        }
        "wrep" => {
            let entries = serde_json::from_value(f.payload).map_err(Error::from)?;
            Ok(StateInput::WRep(WRep::from_record(&WRepRecord { n: f.n, entries })?))
        }
        other => bail!(Error::Parse(format!("unknown state kind '{other}'"))),
    }
}

/// `x,y,z;x,y,z|+ZI,+IZ`: Bloch vectors for the leading qubits, then optional
/// stabilizer generators for a trailing block.
fn parse_product(spec: &str) -> anyhow::Result<WRep> {
    let (bloch, stab) = match spec.split_once('|') {
        Some((b, s)) => (b, Some(s)),
        None => (spec, None),
    };
    let mut vs = Vec::new();
    for part in bloch.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let c: Vec<f64> = part
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad Bloch component '{x}'"))))
            .collect::<Result<_, _>>()?;
        if c.len() != 3 {
            return Err(Error::Parse(format!("Bloch vector '{part}' needs three components")).into());
        }
        vs.push([c[0], c[1], c[2]]);
    }
    let stab_point = match stab {
        Some(s) => {
            let gens = s.split(',').map(|g| g.trim().parse::<SignedPauli>()).collect::<Result<Vec<_>, _>>()?;
            let n = gens.first().map(|g| g.label.n()).ok_or_else(|| Error::Parse("empty stabilizer block".into()))?;
            if gens.len() != n {
                return Err(Error::Parse(format!("stabilizer block on {n} qubits needs {n} generators")).into());
            }
            Some(PhasePoint::stabilizer(n, &gens)?)
        }
        None => None,
    };
    Ok(product_wrep(&vs, stab_point.as_ref())?)
}
