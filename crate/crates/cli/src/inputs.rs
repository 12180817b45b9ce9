use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use errgeom_core::indirect::IndirectModel;
use errgeom_core::{DensityOperator, Observable};
use serde::de::DeserializeOwned;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("invalid JSON in {}", path.display()))
}

pub fn state(path: &Path) -> anyhow::Result<DensityOperator> {
    read_json(path)
}

pub fn observable(path: &Path) -> anyhow::Result<Observable> {
    read_json(path)
}

pub fn observable_pair(path: &Path, dim: usize) -> anyhow::Result<(Observable, Observable)> {
    let pair: Vec<Observable> = read_json(path)?;
    let [a, b]: [Observable; 2] = pair
        .try_into()
        .map_err(|v: Vec<Observable>| anyhow::anyhow!("expected two observables, found {}", v.len()))?;
    if a.dim() != dim || b.dim() != dim {
        bail!("observables must have dimension {dim}");
    }
    Ok((a, b))
}

pub fn model(path: &Path) -> anyhow::Result<IndirectModel> {
    read_json(path)
}

/// `start:step:stop` (inclusive, rounded to 12 decimals) or `v1,v2,...`.
pub fn grid(text: &str) -> anyhow::Result<Vec<f64>> {
    let parse = |s: &str| -> anyhow::Result<f64> {
        let v: f64 = s.trim().parse().with_context(|| format!("bad grid value {s:?}"))?;
        if !v.is_finite() {
            bail!("grid values must be finite");
        }
        Ok(v)
    };
    let values = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            bail!("grid range must be start:step:stop");
        }
        let (start, step, stop) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        if step <= 0.0 || stop < start {
            bail!("grid range needs step > 0 and stop >= start");
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if count > 1_000_000 {
            bail!("grid has too many points");
        }
        (0..count)
            .map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12)
            .collect()
    } else {
        text.split(',').map(parse).collect::<anyhow::Result<Vec<_>>>()?
    };
    if values.is_empty() {
        bail!("grid is empty");
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_forms() {
        let g = grid("0:0.1:1").unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[3], 0.3);
        assert_eq!(g[10], 1.0);
        assert_eq!(grid("0.5, 1").unwrap(), vec![0.5, 1.0]);
        assert!(grid("1:0:2").is_err());
        assert!(grid("a").is_err());
        assert!(grid("0:1").is_err());
    }
}
