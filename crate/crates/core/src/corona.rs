//! Corona condition: decide or estimate the uniform lower bound
//! `Σ_k |f̂_k(s)| ≥ α` over the complex plane, and certify violations.
//!
//! Transforms of Dirac sums are almost periodic in the imaginary direction,
//! so at a fixed real abscissa the closure of their values is captured by a
//! torus over the delay lattice; the scan minimizes over that torus plus the
//! lag-zero endpoint reached as `Re s → -∞`. For a single-generator lattice
//! the condition is decided exactly through polynomial gcd, and failures are
//! certified by an explicit sequence `s_ε` along which all transforms vanish.

use num::complex::Complex64;
use num::Zero;
use serde::Serialize;

use crate::error::Error;
use crate::lag::{Lag, LabelValues};
use crate::lattice::{
    build_lattice_with_values, kronecker_approximate, monomial_rep, DelayDecomposition,
    MonomialForm,
};
use crate::measure::DiracSumMeasure;
use crate::poly::RationalPolynomial;
use crate::rational::{to_f64, Rational};
use crate::scan::{grid_scan, GridSpec, ScanSample, SigmaWindow};
use crate::Result;

const TAU: f64 = std::f64::consts::TAU;

/// A corona instance: measures `f_1..f_K` plus a decomposition covering all
/// of their lags.
#[derive(Debug, Clone)]
pub struct CoronaInstance {
    measures: Vec<DiracSumMeasure>,
    decomposition: DelayDecomposition,
    forms: Vec<MonomialForm>,
}

impl CoronaInstance {
    /// Build the instance, deriving the lattice from the measures' lags.
    pub fn new(measures: Vec<DiracSumMeasure>, labels: &LabelValues) -> Result<Self> {
        if measures.is_empty() {
            return Err(Error::InvalidInput("need at least one measure".into()));
        }
        if measures.iter().all(DiracSumMeasure::is_zero) {
            return Err(Error::InvalidInput("all measures are zero".into()));
        }
        let mut lags: Vec<Lag> = measures
            .iter()
            .flat_map(|m| m.atoms().iter().map(|a| a.lag.clone()))
            .collect();
        lags.sort();
        lags.dedup();
        if lags.is_empty() {
            lags.push(Lag::zero());
        }
        let decomposition = build_lattice_with_values(&lags, labels)?;
        let forms = measures
            .iter()
            .map(|m| monomial_rep(m, &decomposition))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            measures,
            decomposition,
            forms,
        })
    }

    pub fn measures(&self) -> &[DiracSumMeasure] {
        &self.measures
    }

    pub fn decomposition(&self) -> &DelayDecomposition {
        &self.decomposition
    }

    pub fn forms(&self) -> &[MonomialForm] {
        &self.forms
    }

    pub fn q(&self) -> usize {
        self.decomposition.basis().len()
    }

    pub fn max_tv_norm(&self) -> Rational {
        self.measures
            .iter()
            .map(DiracSumMeasure::tv_norm)
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// `Σ_k |f̂_k|` at a real abscissa and torus angles (cycles).
    pub fn objective(&self, sigma: f64, angles: &[f64]) -> f64 {
        let mut total = 0.0;
        for form in &self.forms {
            let mut transform = Complex64::new(0.0, 0.0);
            for term in form.terms() {
                let mut angle = 0.0f64;
                for (m, theta) in term.exponents.iter().zip(angles) {
                    angle += *m as f64 * theta;
                }
                let phase = Complex64::from_polar(1.0, TAU * angle.rem_euclid(1.0));
                transform += to_f64(&term.weight) * (sigma * term.lag_value).exp() * phase;
            }
            total += transform.norm();
        }
        total
    }

    /// Same objective evaluated at explicit torus coordinates.
    pub fn objective_at_z(&self, sigma: f64, z: &[Complex64]) -> f64 {
        self.forms
            .iter()
            .map(|form| form.eval(sigma, z).norm())
            .sum()
    }

    /// `Σ_k |f̂_k|` in the limit `Re s → -∞`: only lag-zero atoms survive.
    pub fn lag_zero_limit(&self) -> f64 {
        self.measures
            .iter()
            .map(|m| to_f64(&m.weight_at_zero()).abs())
            .sum()
    }

    /// Default abscissa window `[-S, S]`,
    /// `S = max(5, ln(1 + Σ_k tv(f_k)) / min_j r_j)`.
    pub fn default_window(&self) -> SigmaWindow {
        let tv_sum: Rational = self
            .measures
            .iter()
            .map(DiracSumMeasure::tv_norm)
            .fold(Rational::zero(), |a, b| a + b);
        let min_r = self
            .decomposition
            .basis()
            .values()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let s = ((1.0 + to_f64(&tv_sum)).ln() / min_r).max(5.0);
        SigmaWindow { lo: -s, hi: s }
    }
}

/// Where the scan minimum was attained.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CoronaWitness {
    /// Finite-abscissa torus point; `s_equivalent` is the actual complex
    /// argument when the lattice has a single generator.
    Point {
        sigma: f64,
        angles: Vec<f64>,
        s_equivalent: Option<(f64, f64)>,
    },
    /// The `Re s → -∞` endpoint.
    MinusInfinity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfimumEstimate {
    pub alpha_hat: f64,
    pub witness: CoronaWitness,
}

/// Minimize the objective over the window times the torus, including the
/// lag-zero endpoint. One local refinement pass is on by default via
/// [`GridSpec`].
pub fn estimate_infimum(
    inst: &CoronaInstance,
    window: SigmaWindow,
    grid: GridSpec,
) -> Result<InfimumEstimate> {
    estimate_infimum_impl(inst, window, grid, None)
}

/// As [`estimate_infimum`], also appending every base-grid sample for export.
pub fn estimate_infimum_with_samples(
    inst: &CoronaInstance,
    window: SigmaWindow,
    grid: GridSpec,
    samples: &mut Vec<ScanSample>,
) -> Result<InfimumEstimate> {
    estimate_infimum_impl(inst, window, grid, Some(samples))
}

fn estimate_infimum_impl(
    inst: &CoronaInstance,
    window: SigmaWindow,
    grid: GridSpec,
    samples: Option<&mut Vec<ScanSample>>,
) -> Result<InfimumEstimate> {
    SigmaWindow::new(window.lo, window.hi)?;
    let q = inst.q();
    let min = grid_scan(
        window,
        grid,
        q,
        |sigma, angles| inst.objective(sigma, angles),
        samples,
    )?;
    let endpoint = inst.lag_zero_limit();
    if endpoint < min.value {
        return Ok(InfimumEstimate {
            alpha_hat: endpoint,
            witness: CoronaWitness::MinusInfinity,
        });
    }
    let s_equivalent = if q == 1 {
        let r = inst.decomposition.basis().values()[0];
        Some((min.point.sigma, TAU * min.point.angles[0] / r))
    } else {
        None
    };
    Ok(InfimumEstimate {
        alpha_hat: min.value,
        witness: CoronaWitness::Point {
            sigma: min.point.sigma,
            angles: min.point.angles,
            s_equivalent,
        },
    })
}

/// Exact corona decision over a single-generator lattice.
#[derive(Debug, Clone, Serialize)]
pub struct CommensurableDecision {
    /// True exactly when the monic gcd of the polynomial images is a nonzero
    /// constant: no common root in the punctured plane and not every
    /// polynomial vanishing at the origin.
    pub holds: bool,
    pub gcd: RationalPolynomial,
    pub polynomials: Vec<RationalPolynomial>,
}

/// Map each measure to its polynomial `P_i(x)` with `x = e^{s r}` and test
/// coprimality over the rationals; exact.
pub fn decide_commensurable(inst: &CoronaInstance) -> Result<CommensurableDecision> {
    if inst.q() != 1 {
        return Err(Error::Unsupported(format!(
            "exact corona decision requires a single generator, found {}",
            inst.q()
        )));
    }
    let polynomials: Vec<RationalPolynomial> = inst
        .forms
        .iter()
        .map(MonomialForm::to_univariate)
        .collect::<Result<Vec<_>>>()?;
    if polynomials.iter().all(RationalPolynomial::is_zero) {
        return Err(Error::InvalidInput("all measures are zero".into()));
    }
    let mut gcd = RationalPolynomial::zero();
    for p in &polynomials {
        gcd = gcd.gcd(p);
        if gcd == RationalPolynomial::one() {
            break;
        }
    }
    let holds = !gcd.is_zero() && gcd.is_constant();
    Ok(CommensurableDecision {
        holds,
        gcd,
        polynomials,
    })
}

/// What kind of vanishing sequence a certificate encodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CertificateKind {
    /// A common generalized character zero at finite abscissa `sigma` with
    /// torus phases in cycles; `s_ε = sigma + 2πi·β_ε`.
    CharacterZero { sigma: f64, phases: Vec<f64> },
    /// Every measure misses lag zero, so the transforms vanish together as
    /// `Re s → -∞`; `s_ε` marches down the real axis.
    LagZeroLimit,
}

/// One certificate triple: requested ε, the point `s_ε`, the objective value
/// there, and the envelope bound `C·C̃·ε` it must not exceed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificatePoint {
    pub epsilon: f64,
    pub achieved_epsilon: f64,
    pub s: (f64, f64),
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationCertificate {
    pub kind: CertificateKind,
    /// Lipschitz constant `2π · max_{k,l} Σ_j m_{k,l,j}` from
    /// `|1 - e^{iθ}| ≤ |θ|` applied to the exponent rows.
    pub c_constant: f64,
    /// `max_k Σ_l |f_{k,l}|`.
    pub c_tilde: f64,
    pub points: Vec<CertificatePoint>,
}

fn lipschitz_constant(inst: &CoronaInstance) -> f64 {
    let max_row: u64 = inst
        .forms
        .iter()
        .flat_map(|f| f.terms().iter())
        .map(|t| t.exponents.iter().sum::<u64>())
        .max()
        .unwrap_or(0);
    TAU * max_row as f64
}

fn sup_weight_sum(inst: &CoronaInstance) -> f64 {
    inst.measures
        .iter()
        .map(|m| to_f64(&m.tv_norm()))
        .fold(0.0, f64::max)
}

/// Build the vanishing sequence at a common generalized character zero
/// `(sigma, phases)`: for each ε a Kronecker approximation gives β with
/// `s_ε = sigma + 2πi·β`, and `Σ_k |f̂_k(s_ε)| ≤ C·C̃·ε`.
pub fn certify_violation(
    inst: &CoronaInstance,
    sigma: f64,
    phases: &[f64],
    epsilons: &[f64],
    tolerance: Option<f64>,
) -> Result<ViolationCertificate> {
    if epsilons.is_empty() {
        return Err(Error::InvalidInput("need at least one epsilon".into()));
    }
    // Precondition: (sigma, phases) must annihilate every measure.
    for (k, m) in inst.measures.iter().enumerate() {
        let value = m.char_eval(sigma, phases, &inst.decomposition)?;
        let scale: f64 = m
            .atoms()
            .iter()
            .map(|a| {
                let lag = inst.decomposition.lag_value(&a.lag).unwrap_or(0.0);
                to_f64(&a.weight).abs() * (sigma * lag).exp()
            })
            .sum();
        let tol = tolerance.unwrap_or(1e-6 * scale.max(1.0));
        if value.norm() > tol {
            return Err(Error::NotACommonZero {
                index: k,
                magnitude: value.norm(),
                tolerance: tol,
            });
        }
    }
    let c_constant = lipschitz_constant(inst);
    let c_tilde = sup_weight_sum(inst);
    let mut points = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let kron = kronecker_approximate(inst.decomposition.basis(), phases, eps)?;
        let tau_part = TAU * kron.beta;
        let mut value = 0.0;
        for form in inst.forms.iter() {
            let mut transform = Complex64::new(0.0, 0.0);
            for term in form.terms() {
                let s_lag = Complex64::new(sigma * term.lag_value, tau_part * term.lag_value);
                transform += to_f64(&term.weight) * s_lag.exp();
            }
            value += transform.norm();
        }
        points.push(CertificatePoint {
            epsilon: eps,
            achieved_epsilon: kron.epsilon,
            s: (sigma, tau_part),
            value,
            bound: c_constant * c_tilde * eps,
        });
    }
    Ok(ViolationCertificate {
        kind: CertificateKind::CharacterZero {
            sigma,
            phases: phases.to_vec(),
        },
        c_constant,
        c_tilde,
        points,
    })
}

/// Vanishing sequence for instances whose measures all miss lag zero: the
/// transforms die together down the real axis.
pub fn certify_vanishing_at_minus_infinity(
    inst: &CoronaInstance,
    epsilons: &[f64],
) -> Result<ViolationCertificate> {
    if epsilons.is_empty() {
        return Err(Error::InvalidInput("need at least one epsilon".into()));
    }
    for (k, m) in inst.measures.iter().enumerate() {
        if !m.weight_at_zero().is_zero() {
            return Err(Error::NotACommonZero {
                index: k,
                magnitude: to_f64(&m.weight_at_zero()).abs(),
                tolerance: 0.0,
            });
        }
    }
    // Smallest positive lag across all atoms controls the decay rate.
    let mut lag_min = f64::INFINITY;
    for form in &inst.forms {
        for term in form.terms() {
            if term.lag_value > 0.0 {
                lag_min = lag_min.min(term.lag_value);
            }
        }
    }
    if !lag_min.is_finite() {
        return Err(Error::InvalidInput(
            "no positive lag; measures are multiples of the unit".into(),
        ));
    }
    let c_constant = lipschitz_constant(inst).max(1.0);
    let c_tilde = sup_weight_sum(inst);
    let k_count = inst.measures.len() as f64;
    let mut points = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let sigma = (eps / k_count.max(1.0)).ln() / lag_min;
        let value: f64 = inst
            .forms
            .iter()
            .map(|form| {
                form.terms()
                    .iter()
                    .map(|t| (to_f64(&t.weight) * (sigma * t.lag_value).exp()).abs())
                    .sum::<f64>()
            })
            .sum();
        points.push(CertificatePoint {
            epsilon: eps,
            achieved_epsilon: eps,
            s: (sigma, 0.0),
            value,
            bound: c_constant * c_tilde * eps,
        });
    }
    Ok(ViolationCertificate {
        kind: CertificateKind::LagZeroLimit,
        c_constant,
        c_tilde,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CoronaVerdict {
    Holds,
    Fails,
    Inconclusive,
}

/// How the verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecisionSource {
    ExactGcd,
    Scan,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoronaReport {
    pub verdict: CoronaVerdict,
    pub source: DecisionSource,
    pub alpha_hat: f64,
    /// Scan threshold below which a scan verdict stays inconclusive.
    pub threshold: f64,
    pub witness: CoronaWitness,
    pub exact: Option<CommensurableDecision>,
    pub certificate: Option<ViolationCertificate>,
}

/// Default certificate epsilon ladder.
pub const DEFAULT_EPSILONS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// Full pipeline: scan always; decide exactly when the lattice has a single
/// generator (attaching a violation certificate on failure); otherwise grade
/// the scan against the threshold `10⁻² · max_k tv(f_k)`.
pub fn analyze(
    inst: &CoronaInstance,
    window: Option<SigmaWindow>,
    grid: GridSpec,
    epsilons: &[f64],
) -> Result<CoronaReport> {
    let window = match window {
        Some(w) => w,
        None => inst.default_window(),
    };
    let estimate = estimate_infimum(inst, window, grid)?;
    let threshold = 1e-2 * to_f64(&inst.max_tv_norm());
    if inst.q() == 1 {
        let exact = decide_commensurable(inst)?;
        if exact.holds {
            return Ok(CoronaReport {
                verdict: CoronaVerdict::Holds,
                source: DecisionSource::ExactGcd,
                alpha_hat: estimate.alpha_hat,
                threshold,
                witness: estimate.witness,
                exact: Some(exact),
                certificate: None,
            });
        }
        let (power, core) = exact.gcd.split_power_of_x();
        let certificate = if !core.is_constant() {
            let root = core.complex_roots()[0];
            let r = inst.decomposition.basis().values()[0];
            let sigma = root.norm().ln() / r;
            let gamma = (root.arg() / TAU).rem_euclid(1.0);
            Some(certify_violation(inst, sigma, &[gamma], epsilons, None)?)
        } else {
            debug_assert!(power > 0);
            Some(certify_vanishing_at_minus_infinity(inst, epsilons)?)
        };
        return Ok(CoronaReport {
            verdict: CoronaVerdict::Fails,
            source: DecisionSource::ExactGcd,
            alpha_hat: estimate.alpha_hat,
            threshold,
            witness: estimate.witness,
            exact: Some(exact),
            certificate,
        });
    }
    let verdict = if estimate.alpha_hat > threshold {
        CoronaVerdict::Holds
    } else {
        CoronaVerdict::Inconclusive
    };
    Ok(CoronaReport {
        verdict,
        source: DecisionSource::Scan,
        alpha_hat: estimate.alpha_hat,
        threshold,
        witness: estimate.witness,
        exact: None,
        certificate: None,
    })
}
