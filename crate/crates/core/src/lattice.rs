//! Delay lattices: decompose a family of lags over a rationally independent
//! generator basis with nonnegative integer exponents, and solve the
//! simultaneous Kronecker approximation problem over that basis.
//!
//! Rational independence of distinct labels is by declaration, not verified;
//! each irrational generator carries a symbolic label plus a float value used
//! only in numeric scans, so the exact layer stays exact.

use std::collections::BTreeMap;

use num::complex::Complex64;
use num::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::Error;
use crate::lag::{Lag, LabelValues, UNIT_LABEL};
use crate::measure::DiracSumMeasure;
use crate::poly::RationalPolynomial;
use crate::rational::{rational_gcd, to_f64, Rational};
use crate::Result;

/// One basis generator: `scale * label`, with a numeric value for scans.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub label: String,
    /// Numeric value of the bare label (1 for the unit label).
    pub label_value: f64,
    /// Rational multiple of the label making up this generator.
    pub scale: Rational,
}

impl Generator {
    /// Numeric value of the generator itself.
    pub fn value(&self) -> f64 {
        to_f64(&self.scale) * self.label_value
    }
}

/// Ordered list of generators, declared rationally independent.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GeneratorBasis {
    generators: Vec<Generator>,
}

impl GeneratorBasis {
    pub fn new(generators: Vec<Generator>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidInput("generator basis must be nonempty".into()));
        }
        let mut labels: Vec<&str> = generators.iter().map(|g| g.label.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != generators.len() {
            return Err(Error::InvalidInput("duplicate generator labels".into()));
        }
        for g in &generators {
            if !(g.value() > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "generator `{}` must have positive value",
                    g.label
                )));
            }
        }
        Ok(Self { generators })
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn values(&self) -> Vec<f64> {
        self.generators.iter().map(Generator::value).collect()
    }
}

/// Lags expressed as nonnegative integer exponent rows over a basis, with
/// columnwise gcd 1 on every used generator.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayDecomposition {
    basis: GeneratorBasis,
    rows: BTreeMap<Lag, Vec<u64>>,
}

impl DelayDecomposition {
    pub fn basis(&self) -> &GeneratorBasis {
        &self.basis
    }

    pub fn lags(&self) -> impl Iterator<Item = &Lag> {
        self.rows.keys()
    }

    pub fn exponents_for(&self, lag: &Lag) -> Result<&[u64]> {
        self.rows
            .get(lag)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Decomposition(lag.to_string()))
    }

    /// Numeric value of a lag, reconstructed through its exponent row.
    pub fn lag_value(&self, lag: &Lag) -> Result<f64> {
        let row = self.exponents_for(lag)?;
        Ok(row
            .iter()
            .zip(self.basis.generators())
            .map(|(m, g)| *m as f64 * g.value())
            .sum())
    }

    /// Extend the decomposition to a lag that is a product of already-covered
    /// structure: every coordinate must be an integer multiple of the
    /// matching generator scale.
    pub fn decompose(&self, lag: &Lag) -> Result<Vec<u64>> {
        if let Some(row) = self.rows.get(lag) {
            return Ok(row.clone());
        }
        let mut row = vec![0u64; self.basis.len()];
        let mut seen = vec![false; self.basis.len()];
        for (label, coeff) in lag.coords() {
            let idx = self
                .basis
                .generators()
                .iter()
                .position(|g| g.label == label)
                .ok_or_else(|| Error::Decomposition(lag.to_string()))?;
            let ratio = coeff / &self.basis.generators()[idx].scale;
            if !ratio.is_integer() || ratio.is_negative() {
                return Err(Error::Decomposition(lag.to_string()));
            }
            row[idx] = ratio
                .to_integer()
                .to_u64()
                .ok_or_else(|| Error::Decomposition(lag.to_string()))?;
            seen[idx] = true;
        }
        let _ = seen;
        Ok(row)
    }
}

/// Build the canonical decomposition of a lag family.
///
/// Per label, the generator is rescaled by the gcd of the coefficients
/// appearing on it (gcd of numerators over lcm of denominators), so all
/// exponents are nonnegative integers with columnwise gcd 1 and the
/// reconstruction is exact in rational coordinates.
pub fn build_lattice_with_values(lags: &[Lag], labels: &LabelValues) -> Result<DelayDecomposition> {
    if lags.is_empty() {
        return Err(Error::InvalidInput("empty lag list".into()));
    }
    // Per-label gcd of all nonzero coefficients.
    let mut scales: BTreeMap<String, Rational> = BTreeMap::new();
    for lag in lags {
        for (label, coeff) in lag.coords() {
            let entry = scales
                .entry(label.to_string())
                .or_insert_with(Rational::zero);
            *entry = rational_gcd(entry, coeff);
        }
    }
    if scales.is_empty() {
        // All lags are zero; keep the unit generator so the basis is nonempty.
        scales.insert(UNIT_LABEL.to_string(), Rational::from_integer(1.into()));
    }
    let mut generators = Vec::with_capacity(scales.len());
    for (label, scale) in &scales {
        let label_value = labels.get(label).ok_or_else(|| {
            Error::InvalidLag(format!("undeclared generator label `{label}`"))
        })?;
        generators.push(Generator {
            label: label.clone(),
            label_value,
            scale: scale.clone(),
        });
    }
    let basis = GeneratorBasis::new(generators)?;
    let mut rows = BTreeMap::new();
    for lag in lags {
        let mut row = vec![0u64; basis.len()];
        for (label, coeff) in lag.coords() {
            let idx = basis
                .generators()
                .iter()
                .position(|g| g.label == label)
                .expect("label collected above");
            let ratio = coeff / &basis.generators()[idx].scale;
            debug_assert!(ratio.is_integer());
            row[idx] = ratio
                .to_integer()
                .to_u64()
                .ok_or_else(|| Error::Decomposition(lag.to_string()))?;
        }
        rows.insert(lag.clone(), row);
    }
    Ok(DelayDecomposition { basis, rows })
}

/// [`build_lattice_with_values`] for purely rational lag families.
pub fn build_lattice(lags: &[Lag]) -> Result<DelayDecomposition> {
    build_lattice_with_values(lags, &LabelValues::new())
}

/// Solution of the simultaneous approximation problem:
/// `|beta * r_j - gamma_j - p_j| <= epsilon` for every generator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KroneckerResult {
    pub beta: f64,
    pub offsets: Vec<i64>,
    /// Achieved bound: the max over generators of the actual error.
    pub epsilon: f64,
}

/// Search controls for [`kronecker_approximate_with_budget`].
#[derive(Debug, Clone, Copy)]
pub struct KroneckerBudget {
    /// Cap on evaluated grid candidates before giving up.
    pub max_candidates: u64,
}

impl Default for KroneckerBudget {
    fn default() -> Self {
        Self {
            max_candidates: 400_000_000,
        }
    }
}

/// Find `beta` and integer offsets meeting the bound for every generator.
///
/// Deterministic: candidates are integer multiples of the grid step
/// `epsilon / (10 * max r_j)` restricted to the windows allowed by the first
/// generator, scanned outward from 0; the smallest `|beta|` candidate wins,
/// ties toward positive `beta`. A single generator is solved exactly.
pub fn kronecker_approximate(
    basis: &GeneratorBasis,
    targets: &[f64],
    epsilon: f64,
) -> Result<KroneckerResult> {
    kronecker_approximate_with_budget(basis, targets, epsilon, KroneckerBudget::default())
}

pub fn kronecker_approximate_with_budget(
    basis: &GeneratorBasis,
    targets: &[f64],
    epsilon: f64,
    budget: KroneckerBudget,
) -> Result<KroneckerResult> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput("epsilon must be positive".into()));
    }
    if targets.len() != basis.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} targets for {} generators",
            targets.len(),
            basis.len()
        )));
    }
    if targets.iter().any(|g| !g.is_finite()) {
        return Err(Error::InvalidInput("targets must be finite".into()));
    }
    let r = basis.values();

    if r.len() == 1 {
        // Exactly solvable: beta = (gamma + p) / r with p minimizing
        // |gamma + p|, ties toward positive beta.
        let gamma = targets[0];
        let frac = gamma - gamma.floor();
        let p = if frac <= 0.5 {
            -gamma.floor()
        } else {
            -gamma.floor() - 1.0
        };
        let beta = (gamma + p) / r[0];
        let achieved = (beta * r[0] - gamma - p).abs();
        return Ok(KroneckerResult {
            beta,
            offsets: vec![p as i64],
            epsilon: achieved,
        });
    }

    let r_max = r.iter().cloned().fold(0.0f64, f64::max);
    let step = epsilon / (10.0 * r_max);
    let half_width = epsilon / r[0];

    let evaluate = |beta: f64| -> (Vec<i64>, f64) {
        let mut offsets = Vec::with_capacity(r.len());
        let mut worst = 0.0f64;
        for (rj, gj) in r.iter().zip(targets) {
            let e = beta * rj - gj;
            let p = e.round();
            offsets.push(p as i64);
            worst = worst.max((e - p).abs());
        }
        (offsets, worst)
    };

    let mut best: Option<KroneckerResult> = None;
    let mut fallback: Option<KroneckerResult> = None;
    let mut spent: u64 = 0;

    let better = |a: &KroneckerResult, b: &KroneckerResult| -> bool {
        // Smaller |beta| wins; exact tie prefers positive beta.
        (a.beta.abs(), a.beta < 0.0) < (b.beta.abs(), b.beta < 0.0)
    };

    // Window centers (gamma_0 + p) / r_0 visited outward from zero.
    let p_center = -targets[0].round();
    let mut up = p_center;
    let mut down = p_center - 1.0;
    loop {
        let center_up = (targets[0] + up) / r[0];
        let center_down = (targets[0] + down) / r[0];
        let (p, center) = if center_up.abs() <= center_down.abs() {
            let c = (up, center_up);
            up += 1.0;
            c
        } else {
            let c = (down, center_down);
            down -= 1.0;
            c
        };
        let _ = p;
        if let Some(ref b) = best {
            if center.abs() - half_width > b.beta.abs() {
                break;
            }
        }
        let lo = ((center - half_width) / step).ceil() as i64;
        let hi = ((center + half_width) / step).floor() as i64;
        for n in lo..=hi {
            spent += 1;
            if spent > budget.max_candidates {
                let best_seen = best.or(fallback).unwrap_or(KroneckerResult {
                    beta: 0.0,
                    offsets: vec![0; r.len()],
                    epsilon: f64::INFINITY,
                });
                return Err(Error::BudgetExceeded { best: best_seen });
            }
            let beta = n as f64 * step;
            let (offsets, worst) = evaluate(beta);
            let candidate = KroneckerResult {
                beta,
                offsets,
                epsilon: worst,
            };
            if worst <= epsilon {
                if best.as_ref().is_none_or(|b| better(&candidate, b)) {
                    best = Some(candidate);
                }
            } else if fallback.as_ref().is_none_or(|f| worst < f.epsilon) {
                fallback = Some(candidate);
            }
        }
    }
    Ok(best.expect("loop exits only with a candidate"))
}

/// Exponential-polynomial form of a measure over a decomposition: terms
/// `weight · e^{s·lag}` rewritten as `weight · e^{σ·lag} · Π z_j^{m_j}` with
/// `z_j = e^{iτ r_j}`.
#[derive(Debug, Clone)]
pub struct MonomialForm {
    terms: Vec<MonomialTerm>,
    q: usize,
}

#[derive(Debug, Clone)]
pub struct MonomialTerm {
    pub weight: Rational,
    pub lag: Lag,
    pub lag_value: f64,
    pub exponents: Vec<u64>,
}

impl MonomialForm {
    pub fn terms(&self) -> &[MonomialTerm] {
        &self.terms
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Evaluate at a real abscissa and a torus point.
    pub fn eval(&self, sigma: f64, z: &[Complex64]) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            let mut factor = Complex64::new((sigma * term.lag_value).exp(), 0.0);
            for (m, zj) in term.exponents.iter().zip(z) {
                factor *= zj.powu(*m as u32);
            }
            total += to_f64(&term.weight) * factor;
        }
        total
    }

    /// Univariate polynomial `P(x) = Σ weight · x^m` for single-generator
    /// decompositions, so that `P(e^{s r})` is the Laplace transform.
    pub fn to_univariate(&self) -> Result<RationalPolynomial> {
        if self.q != 1 {
            return Err(Error::Unsupported(format!(
                "univariate form requires a single generator, found {}",
                self.q
            )));
        }
        let degree = self
            .terms
            .iter()
            .map(|t| t.exponents[0] as usize)
            .max()
            .unwrap_or(0);
        let mut coeffs = vec![Rational::zero(); degree + 1];
        for term in &self.terms {
            coeffs[term.exponents[0] as usize] += &term.weight;
        }
        Ok(RationalPolynomial::new(coeffs))
    }
}

/// Rewrite a measure in exponential-polynomial form over `dec`. Every lag of
/// the measure must appear in the decomposition.
pub fn monomial_rep(m: &DiracSumMeasure, dec: &DelayDecomposition) -> Result<MonomialForm> {
    let mut terms = Vec::with_capacity(m.atoms().len());
    for atom in m.atoms() {
        let row = dec.exponents_for(&atom.lag)?.to_vec();
        let lag_value = dec.lag_value(&atom.lag)?;
        terms.push(MonomialTerm {
            weight: atom.weight.clone(),
            lag: atom.lag.clone(),
            lag_value,
            exponents: row,
        });
    }
    Ok(MonomialForm {
        terms,
        q: dec.basis().len(),
    })
}
