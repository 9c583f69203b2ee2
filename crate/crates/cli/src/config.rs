//! Analysis configuration: a JSON document with a generators preamble, an
//! optional system section, an optional corona section, and scan/simulation
//! parameters. Rationals travel as strings (`"p/q"` or decimal literals);
//! bare JSON numbers are converted through their literal text, so exactness
//! survives the trip.

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use lcdde_core::hautus::SystemSpec;
use lcdde_core::lag::{Lag, LabelValues};
use lcdde_core::measure::{DiracSumMeasure, PiecewiseConstant};
use lcdde_core::rational::{parse_rational, Rational};
use lcdde_core::ratmat::RatMatrix;
use lcdde_core::scan::{GridSpec, SigmaWindow};

/// A rational that deserializes from a string or a JSON number literal.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RatValue {
    Text(String),
    Number(serde_json::Number),
}

impl RatValue {
    pub fn parse(&self, field: &str) -> Result<Rational> {
        let text = match self {
            RatValue::Text(s) => s.clone(),
            RatValue::Number(n) => n.to_string(),
        };
        parse_rational(&text).map_err(|e| anyhow!("{field}: {e}"))
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// Generator label values, e.g. `{"sqrt2": "1.4142135623730951"}`.
    #[serde(default)]
    pub generators: std::collections::BTreeMap<String, RatValue>,
    pub system: Option<SystemSection>,
    pub corona: Option<CoronaSection>,
    #[serde(default)]
    pub scan: ScanSection,
    pub certify: Option<CertifySection>,
    pub simulate: Option<SimulateSection>,
    pub steer: Option<SteerSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub delays: Vec<String>,
    pub a: Vec<Vec<Vec<RatValue>>>,
    pub b: Vec<Vec<RatValue>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoronaSection {
    /// Each measure is a list of `[lag, weight]` pairs.
    pub measures: Vec<Vec<(String, RatValue)>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub window: Option<(f64, f64)>,
    pub sigma_points: Option<usize>,
    pub torus_points: Option<usize>,
    pub refine: Option<usize>,
    pub half_torus: Option<bool>,
    pub epsilons: Option<Vec<f64>>,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            window: None,
            sigma_points: None,
            torus_points: None,
            refine: None,
            half_torus: None,
            epsilons: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySection {
    pub sigma: f64,
    /// Torus phases in cycles, one per generator.
    pub phases: Vec<f64>,
    pub epsilons: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub mesh: Option<RatValue>,
    /// Initial window cells on `[-Λ_N, 0)`, one d-vector per cell.
    pub x0: Vec<Vec<RatValue>>,
    /// Control cells from time 0, one m-vector per cell.
    pub u: Vec<Vec<RatValue>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteerSection {
    pub mesh: Option<RatValue>,
    pub horizon: Option<RatValue>,
    pub x0: Vec<Vec<RatValue>>,
    pub target: Vec<Vec<RatValue>>,
}

impl Config {
    pub fn load(text: &str) -> Result<Self> {
        let config: Config = serde_json::from_str(text).context("config parse error")?;
        Ok(config)
    }

    pub fn label_values(&self) -> Result<LabelValues> {
        let mut labels = LabelValues::new();
        for (label, value) in &self.generators {
            let r = value.parse(&format!("generators.{label}"))?;
            let v = lcdde_core::rational::to_f64(&r);
            if !(v > 0.0) {
                bail!("generators.{label}: value must be positive");
            }
            labels.insert(label, v);
        }
        Ok(labels)
    }

    pub fn system_spec(&self) -> Result<SystemSpec> {
        let section = self
            .system
            .as_ref()
            .ok_or_else(|| anyhow!("config has no `system` section"))?;
        if section.a.is_empty() {
            bail!("system.a: need at least one matrix");
        }
        let d = section.b.len();
        let delays = section
            .delays
            .iter()
            .enumerate()
            .map(|(i, s)| Lag::parse(s).map_err(|e| anyhow!("system.delays[{i}]: {e}")))
            .collect::<Result<Vec<_>>>()?;
        let mut a = Vec::with_capacity(section.a.len());
        for (j, mat) in section.a.iter().enumerate() {
            if mat.len() != d {
                bail!("system.a[{j}]: has {} rows, expected {d}", mat.len());
            }
            let mut rows = Vec::with_capacity(d);
            for (i, row) in mat.iter().enumerate() {
                if row.len() != d {
                    bail!(
                        "system.a[{j}][{i}]: row length {} != state dimension {d}",
                        row.len()
                    );
                }
                rows.push(
                    row.iter()
                        .enumerate()
                        .map(|(k, v)| v.parse(&format!("system.a[{j}][{i}][{k}]")))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            a.push(RatMatrix::from_rows(rows).map_err(|e| anyhow!("system.a[{j}]: {e}"))?);
        }
        let m = section
            .b
            .first()
            .map(Vec::len)
            .ok_or_else(|| anyhow!("system.b: empty matrix"))?;
        let mut rows = Vec::with_capacity(d);
        for (i, row) in section.b.iter().enumerate() {
            if row.len() != m {
                bail!("system.b[{i}]: row length {} != control dimension {m}", row.len());
            }
            rows.push(
                row.iter()
                    .enumerate()
                    .map(|(k, v)| v.parse(&format!("system.b[{i}][{k}]")))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let b = RatMatrix::from_rows(rows).map_err(|e| anyhow!("system.b: {e}"))?;
        SystemSpec::new(delays, a, b, self.label_values()?).map_err(|e| anyhow!("system: {e}"))
    }

    pub fn measures(&self) -> Result<Vec<DiracSumMeasure>> {
        let section = self
            .corona
            .as_ref()
            .ok_or_else(|| anyhow!("config has no `corona` section"))?;
        let mut measures = Vec::with_capacity(section.measures.len());
        for (i, pairs) in section.measures.iter().enumerate() {
            let mut atoms = Vec::with_capacity(pairs.len());
            for (k, (lag, weight)) in pairs.iter().enumerate() {
                let lag = Lag::parse(lag)
                    .map_err(|e| anyhow!("corona.measures[{i}][{k}].lag: {e}"))?;
                let weight = weight.parse(&format!("corona.measures[{i}][{k}].weight"))?;
                atoms.push(lcdde_core::measure::Atom::new(lag, weight));
            }
            measures.push(DiracSumMeasure::from_atoms(atoms));
        }
        Ok(measures)
    }

    /// Grid and window, after applying command-line overrides.
    pub fn scan_settings(
        &self,
        window_flag: Option<(f64, f64)>,
        grid_flag: Option<(usize, usize)>,
        refine_flag: Option<usize>,
    ) -> Result<(Option<SigmaWindow>, GridSpec)> {
        let window = match window_flag.or(self.scan.window) {
            Some((lo, hi)) => Some(
                SigmaWindow::new(lo, hi).map_err(|e| anyhow!("scan.window: {e}"))?,
            ),
            None => None,
        };
        let mut grid = GridSpec::default();
        if let Some(n) = self.scan.sigma_points {
            grid.sigma_points = n;
        }
        if let Some(n) = self.scan.torus_points {
            grid.torus_points = n;
        }
        if let Some((ns, nt)) = grid_flag {
            grid.sigma_points = ns;
            grid.torus_points = nt;
        }
        if let Some(r) = refine_flag.or(self.scan.refine) {
            grid.refine_passes = r;
        }
        if let Some(h) = self.scan.half_torus {
            grid.half_torus = h;
        }
        grid.validate().map_err(|e| anyhow!("scan grid: {e}"))?;
        Ok((window, grid))
    }

    pub fn epsilons(&self) -> Vec<f64> {
        self.scan
            .epsilons
            .clone()
            .unwrap_or_else(|| lcdde_core::corona::DEFAULT_EPSILONS.to_vec())
    }

    /// Parse a window of cells (e.g. x0 or a steering target) into a
    /// piecewise-constant function on `[-cells, 0)`.
    pub fn window_function(
        cells: &[Vec<RatValue>],
        rho: &Rational,
        dim: usize,
        field: &str,
    ) -> Result<PiecewiseConstant> {
        let mut values = Vec::with_capacity(cells.len());
        for (i, cell) in cells.iter().enumerate() {
            if cell.len() != dim {
                bail!("{field}[{i}]: has {} entries, expected {dim}", cell.len());
            }
            values.push(
                cell.iter()
                    .enumerate()
                    .map(|(k, v)| v.parse(&format!("{field}[{i}][{k}]")))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        PiecewiseConstant::new(rho.clone(), -(values.len() as i64), values, dim)
            .map_err(|e| anyhow!("{field}: {e}"))
    }

    /// Parse control cells starting at time 0.
    pub fn control_function(
        cells: &[Vec<RatValue>],
        rho: &Rational,
        dim: usize,
        field: &str,
    ) -> Result<PiecewiseConstant> {
        let mut values = Vec::with_capacity(cells.len());
        for (i, cell) in cells.iter().enumerate() {
            if cell.len() != dim {
                bail!("{field}[{i}]: has {} entries, expected {dim}", cell.len());
            }
            values.push(
                cell.iter()
                    .enumerate()
                    .map(|(k, v)| v.parse(&format!("{field}[{i}][{k}]")))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        PiecewiseConstant::new(rho.clone(), 0, values, dim).map_err(|e| anyhow!("{field}: {e}"))
    }
}
