//! Convolution algebra of finite Dirac sums supported on the nonpositive
//! half-line.
//!
//! A measure is a finite list of atoms `weight · δ(-lag)` with `lag ≥ 0`;
//! lags are stored as their positive offsets. Convolution, the total
//! variation norm, and normalization are exact over the rationals; the
//! Laplace transform and character evaluation are the numeric boundary.
//!
//! [`PiecewiseConstant`] is the mesh-sampled function class used as the test
//! carrier for the truncation identities and as the state/control carrier for
//! the simulator.

use std::fmt;

use num::complex::Complex64;
use num::{Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::lag::{Lag, LabelValues};
use crate::lattice::DelayDecomposition;
use crate::rational::{format_rational, parse_rational, to_f64, Rational};
use crate::Result;

/// One atom `weight · δ(-lag)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub lag: Lag,
    pub weight: Rational,
}

impl Atom {
    pub fn new(lag: Lag, weight: Rational) -> Self {
        Self { lag, weight }
    }

    /// Atom at a rational lag. Fails on negative lags.
    pub fn rational(lag: Rational, weight: Rational) -> Result<Self> {
        Ok(Self::new(Lag::from_rational(lag)?, weight))
    }
}

/// Finite Dirac sum on the nonpositive half-line. Atoms are kept sorted by
/// lag with distinct lags and nonzero weights; the empty list is the zero
/// measure and `δ₀` is the single atom (lag 0, weight 1).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiracSumMeasure {
    atoms: Vec<Atom>,
}

impl DiracSumMeasure {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The convolution unit δ₀.
    pub fn delta_zero() -> Self {
        Self::delta(Lag::zero())
    }

    /// Unit mass at `-lag`.
    pub fn delta(lag: Lag) -> Self {
        Self {
            atoms: vec![Atom::new(lag, Rational::from_integer(1.into()))],
        }
    }

    /// Merge duplicate lags, drop zero weights, sort by lag.
    pub fn normalize(raw: Vec<Atom>) -> Self {
        let mut atoms = raw;
        atoms.sort_by(|a, b| a.lag.cmp(&b.lag));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            match merged.last_mut() {
                Some(last) if last.lag == atom.lag => last.weight += atom.weight,
                _ => merged.push(atom),
            }
        }
        merged.retain(|a| !a.weight.is_zero());
        Self { atoms: merged }
    }

    pub fn from_atoms(raw: Vec<Atom>) -> Self {
        Self::normalize(raw)
    }

    /// Build from `(lag, weight)` rational pairs; rejects negative lags.
    pub fn from_rational_pairs(pairs: &[(Rational, Rational)]) -> Result<Self> {
        let mut atoms = Vec::with_capacity(pairs.len());
        for (lag, weight) in pairs {
            if lag.is_negative() {
                return Err(Error::NegativeLag(format_rational(lag)));
            }
            atoms.push(Atom::rational(lag.clone(), weight.clone())?);
        }
        Ok(Self::normalize(atoms))
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn is_delta_zero(&self) -> bool {
        self.atoms.len() == 1
            && self.atoms[0].lag.is_zero()
            && self.atoms[0].weight == Rational::from_integer(1.into())
    }

    /// Weight carried at lag 0 (zero if absent). This is the value of the
    /// lag-zero homomorphism, the limit of the transform as `Re s → -∞`.
    pub fn weight_at_zero(&self) -> Rational {
        self.atoms
            .iter()
            .find(|a| a.lag.is_zero())
            .map(|a| a.weight.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Largest lag as an exact rational, when all lags are rational.
    /// `Some(0)` for the zero measure.
    pub fn support_bound_rational(&self) -> Option<Rational> {
        let mut bound = Rational::zero();
        for atom in &self.atoms {
            let r = atom.lag.as_rational()?;
            if r > bound {
                bound = r;
            }
        }
        Some(bound)
    }

    /// Largest lag by numeric value (0 for the zero measure).
    pub fn support_bound_value(&self, labels: &LabelValues) -> Result<f64> {
        let mut bound = 0.0f64;
        for atom in &self.atoms {
            bound = bound.max(atom.lag.value(labels)?);
        }
        Ok(bound)
    }

    /// Convolution: all pairwise lag sums with weight products, normalized.
    pub fn convolve(&self, other: &Self) -> Self {
        let mut atoms = Vec::with_capacity(self.atoms.len() * other.atoms.len());
        for a in &self.atoms {
            for b in &other.atoms {
                atoms.push(Atom::new(a.lag.add(&b.lag), &a.weight * &b.weight));
            }
        }
        Self::normalize(atoms)
    }

    /// Bilateral Laplace transform `Σ weight · e^{s·lag}` (entire in `s`).
    ///
    /// Each term is evaluated with a compensated exponential: the products
    /// `Re(s)·lag` and `Im(s)·lag` carry an FMA residual plus the rounding of
    /// the lag itself, so the phase error does not grow with `|s·lag|`.
    pub fn laplace_eval(&self, s: Complex64, labels: &LabelValues) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for atom in &self.atoms {
            let lag_hi = atom.lag.value(labels)?;
            let lag_lo = lag_residual(&atom.lag, lag_hi, labels);
            total += to_f64(&atom.weight) * compensated_exp(s, lag_hi, lag_lo);
        }
        Ok(total)
    }

    /// Laplace transform of a measure whose lags are all rational (no label
    /// table needed).
    pub fn laplace_eval_rational(&self, s: Complex64) -> Result<Complex64> {
        self.laplace_eval(s, &LabelValues::new())
    }

    /// Total variation norm: the sum of absolute weights, exactly.
    pub fn tv_norm(&self) -> Rational {
        self.atoms
            .iter()
            .fold(Rational::zero(), |acc, a| acc + a.weight.abs())
    }

    /// Generalized character evaluation
    /// `Σ weight · e^{σ·lag} · e^{2πi Σ_j m_j γ_j}` where `m` is the lag's
    /// exponent row in the decomposition and phases γ are in cycles.
    pub fn char_eval(
        &self,
        sigma: f64,
        phases: &[f64],
        dec: &DelayDecomposition,
    ) -> Result<Complex64> {
        if phases.len() != dec.basis().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} phases for {} generators",
                phases.len(),
                dec.basis().len()
            )));
        }
        let mut total = Complex64::new(0.0, 0.0);
        for atom in &self.atoms {
            let row = dec.exponents_for(&atom.lag)?;
            let lag_value = dec.lag_value(&atom.lag)?;
            let mut angle = 0.0f64;
            for (m, gamma) in row.iter().zip(phases) {
                angle += *m as f64 * gamma;
            }
            let phase = Complex64::from_polar(1.0, std::f64::consts::TAU * angle.rem_euclid(1.0));
            total += to_f64(&atom.weight) * (sigma * lag_value).exp() * phase;
        }
        Ok(total)
    }

    /// All lags are integer multiples of `step`; returns those multiples.
    pub fn mesh_shifts(&self, step: &Rational) -> Result<Vec<(i64, &Atom)>> {
        let mut shifts = Vec::with_capacity(self.atoms.len());
        for atom in &self.atoms {
            let lag = atom.lag.as_rational().ok_or_else(|| {
                Error::MeshMismatch(format!("lag {} is not rational", atom.lag))
            })?;
            let ratio = lag / step;
            if !ratio.is_integer() {
                return Err(Error::MeshMismatch(format!(
                    "lag {} is not a multiple of mesh step {}",
                    atom.lag,
                    format_rational(step)
                )));
            }
            let n = ratio.to_integer().to_i64().ok_or_else(|| {
                Error::MeshMismatch("mesh shift exceeds i64 range".into())
            })?;
            shifts.push((n, atom));
        }
        Ok(shifts)
    }
}

impl fmt::Display for DiracSumMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for atom in &self.atoms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{} d(-{})", format_rational(&atom.weight), atom.lag)?;
        }
        Ok(())
    }
}

impl Serialize for DiracSumMeasure {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<(String, String)> = self
            .atoms
            .iter()
            .map(|a| (a.lag.to_string(), format_rational(&a.weight)))
            .collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiracSumMeasure {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(String, String)>::deserialize(deserializer)?;
        let mut atoms = Vec::with_capacity(pairs.len());
        for (lag, weight) in pairs {
            let lag = Lag::parse(&lag).map_err(D::Error::custom)?;
            let weight = parse_rational(&weight).map_err(D::Error::custom)?;
            atoms.push(Atom::new(lag, weight));
        }
        Ok(Self::normalize(atoms))
    }
}

/// Rounding residual of a lag below its f64 value; exact for rational lags,
/// zero for symbolic ones (their label values are the definition).
fn lag_residual(lag: &Lag, lag_hi: f64, _labels: &LabelValues) -> f64 {
    let Some(r) = lag.as_rational() else {
        return 0.0;
    };
    // Fast path: p and q fit in f64 exactly, so p - lag_hi*q is one FMA.
    if let (Some(p), Some(q)) = (r.numer().to_i64(), r.denom().to_i64()) {
        if p.abs() < (1i64 << 52) && q < (1i64 << 52) {
            let qf = q as f64;
            return lag_hi.mul_add(-qf, p as f64) / qf;
        }
    }
    match num::BigRational::from_float(lag_hi) {
        Some(hi) => to_f64(&(r - hi)),
        None => 0.0,
    }
}

/// `e^{s·(lag_hi + lag_lo)}` with first-order compensation of the product
/// rounding, accurate to a few ulps even for large `|s·lag|`.
fn compensated_exp(s: Complex64, lag_hi: f64, lag_lo: f64) -> Complex64 {
    let re = s.re * lag_hi;
    let re_err = s.re.mul_add(lag_hi, -re) + s.re * lag_lo;
    let im = s.im * lag_hi;
    let im_err = s.im.mul_add(lag_hi, -im) + s.im * lag_lo;
    let magnitude = re.exp() * (1.0 + re_err);
    let phase = Complex64::new(im.cos(), im.sin()) * Complex64::new(1.0, im_err);
    magnitude * phase
}

/// Vector-valued piecewise-constant function on a uniform mesh. Cell `k`
/// covers `[k·ρ, (k+1)·ρ)`; the function is zero outside its listed cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseConstant {
    mesh_step: Rational,
    start_cell: i64,
    values: Vec<Vec<Rational>>,
    dim: usize,
}

impl PiecewiseConstant {
    pub fn new(mesh_step: Rational, start_cell: i64, values: Vec<Vec<Rational>>, dim: usize) -> Result<Self> {
        if !mesh_step.is_positive() {
            return Err(Error::InvalidInput("mesh step must be positive".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidInput("cell dimension must be positive".into()));
        }
        for (i, v) in values.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "cell {i} has {} entries, expected {dim}",
                    v.len()
                )));
            }
        }
        Ok(Self {
            mesh_step,
            start_cell,
            values,
            dim,
        })
    }

    /// Scalar function from a list of cell values.
    pub fn scalar(mesh_step: Rational, start_cell: i64, values: Vec<Rational>) -> Result<Self> {
        Self::new(
            mesh_step,
            start_cell,
            values.into_iter().map(|v| vec![v]).collect(),
            1,
        )
    }

    pub fn zeros(mesh_step: Rational, start_cell: i64, cells: usize, dim: usize) -> Result<Self> {
        Self::new(
            mesh_step,
            start_cell,
            vec![vec![Rational::zero(); dim]; cells],
            dim,
        )
    }

    pub fn mesh_step(&self) -> &Rational {
        &self.mesh_step
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn start_cell(&self) -> i64 {
        self.start_cell
    }

    /// One past the last cell.
    pub fn end_cell(&self) -> i64 {
        self.start_cell + self.values.len() as i64
    }

    pub fn cells(&self) -> &[Vec<Rational>] {
        &self.values
    }

    /// Value on cell `k`; zero outside the stored domain.
    pub fn value_at_cell(&self, k: i64) -> Vec<Rational> {
        if k < self.start_cell || k >= self.end_cell() {
            vec![Rational::zero(); self.dim]
        } else {
            self.values[(k - self.start_cell) as usize].clone()
        }
    }

    /// Zero out every cell that starts before time 0; the domain is kept.
    pub fn truncate(&self) -> Self {
        let mut out = self.clone();
        for (i, cell) in out.values.iter_mut().enumerate() {
            let k = out.start_cell + i as i64;
            if k < 0 {
                for v in cell.iter_mut() {
                    *v = Rational::zero();
                }
            }
        }
        out
    }

    /// Convolution with a Dirac sum: `(m ∗ f)(t) = Σ weight · f(t + lag)`.
    /// Every lag must be an integer multiple of the mesh step.
    pub fn convolve_measure(&self, m: &DiracSumMeasure) -> Result<Self> {
        if m.is_zero() {
            return Self::new(self.mesh_step.clone(), self.start_cell, Vec::new(), self.dim);
        }
        let shifts = m.mesh_shifts(&self.mesh_step)?;
        let n_max = shifts.iter().map(|(n, _)| *n).max().unwrap_or(0);
        let n_min = shifts.iter().map(|(n, _)| *n).min().unwrap_or(0);
        let start = self.start_cell - n_max;
        let end = self.end_cell() - n_min;
        let mut values = Vec::with_capacity((end - start).max(0) as usize);
        for k in start..end {
            let mut cell = vec![Rational::zero(); self.dim];
            for (n, atom) in &shifts {
                let source = self.value_at_cell(k + n);
                for (c, s) in cell.iter_mut().zip(source) {
                    *c += &atom.weight * s;
                }
            }
            values.push(cell);
        }
        Self::new(self.mesh_step.clone(), start, values, self.dim)
    }

    /// Equality as functions: same mesh and dimension, identical values on
    /// the union of domains with zero extension.
    pub fn function_eq(&self, other: &Self) -> bool {
        if self.mesh_step != other.mesh_step || self.dim != other.dim {
            return false;
        }
        let start = self.start_cell.min(other.start_cell);
        let end = self.end_cell().max(other.end_cell());
        (start..end).all(|k| self.value_at_cell(k) == other.value_at_cell(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice;
    use num::One;
    use proptest::prelude::*;

    fn rat(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn measure(pairs: &[(&str, &str)]) -> DiracSumMeasure {
        let pairs: Vec<(Rational, Rational)> =
            pairs.iter().map(|(l, w)| (rat(l), rat(w))).collect();
        DiracSumMeasure::from_rational_pairs(&pairs).unwrap()
    }

    #[test]
    fn normalize_merges_sorts_and_cancels() {
        assert!(measure(&[("1", "2"), ("1", "-2")]).is_zero());
        assert!(measure(&[("0", "1")]).is_delta_zero());
        let m = measure(&[("1", "1"), ("0", "3"), ("1", "2")]);
        let lags: Vec<Rational> = m
            .atoms()
            .iter()
            .map(|a| a.lag.as_rational().unwrap())
            .collect();
        let weights: Vec<Rational> = m.atoms().iter().map(|a| a.weight.clone()).collect();
        assert_eq!(lags, vec![rat("0"), rat("1")]);
        assert_eq!(weights, vec![rat("3"), rat("3")]);
    }

    #[test]
    fn normalize_rejects_negative_lags() {
        let err = DiracSumMeasure::from_rational_pairs(&[(rat("-1"), rat("1"))]);
        assert!(matches!(err, Err(Error::NegativeLag(_))));
    }

    #[test]
    fn normalize_is_idempotent() {
        let m = measure(&[("1/2", "2"), ("3", "-1"), ("0", "1/3")]);
        assert_eq!(DiracSumMeasure::normalize(m.atoms().to_vec()), m);
    }

    #[test]
    fn convolution_unit_and_lag_addition() {
        let m = measure(&[("1/2", "2"), ("3", "-1")]);
        let unit = DiracSumMeasure::delta_zero();
        assert_eq!(unit.convolve(&m), m);
        assert_eq!(m.convolve(&unit), m);

        let a = measure(&[("1", "1"), ("2", "1")]);
        let b = measure(&[("1", "1")]);
        assert_eq!(a.convolve(&b), measure(&[("2", "1"), ("3", "1")]));
    }

    #[test]
    fn laplace_of_single_atoms() {
        let s = Complex64::new(0.3, -1.7);
        let m = DiracSumMeasure::delta(Lag::from_rational(rat("5/2")).unwrap());
        let v = m.laplace_eval_rational(s).unwrap();
        let expect = (s * 2.5).exp();
        assert!((v - expect).norm() < 1e-14);

        let one = DiracSumMeasure::delta_zero()
            .laplace_eval_rational(Complex64::new(2.0, 11.0))
            .unwrap();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let diff = measure(&[("0", "1"), ("1", "-1")]);
        let at_zero = diff.laplace_eval_rational(Complex64::new(0.0, 0.0)).unwrap();
        assert!(at_zero.norm() < 1e-15);
    }

    #[test]
    fn tv_norm_examples() {
        assert_eq!(DiracSumMeasure::delta_zero().tv_norm(), rat("1"));
        assert_eq!(measure(&[("0", "2"), ("1", "-3")]).tv_norm(), rat("5"));
        assert_eq!(DiracSumMeasure::zero().tv_norm(), rat("0"));
    }

    #[test]
    fn char_eval_matches_examples() {
        let unit_dec = lattice::build_lattice(&[Lag::zero()]).unwrap();
        let one = DiracSumMeasure::delta_zero()
            .char_eval(0.7, &[0.3], &unit_dec)
            .unwrap();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let dec = lattice::build_lattice(&[Lag::from_rational(rat("1")).unwrap()]).unwrap();
        let m = measure(&[("1", "1")]);
        let v = m.char_eval(0.0, &[0.5], &dec).unwrap();
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn char_eval_with_zero_phases_is_laplace_at_real_s() {
        let m = measure(&[("0", "1"), ("1/2", "-2"), ("2", "1/3")]);
        let lags: Vec<Lag> = m.atoms().iter().map(|a| a.lag.clone()).collect();
        let dec = lattice::build_lattice(&lags).unwrap();
        for sigma in [-1.3, 0.0, 0.9] {
            let c = m.char_eval(sigma, &[0.0], &dec).unwrap();
            let l = m
                .laplace_eval_rational(Complex64::new(sigma, 0.0))
                .unwrap();
            assert!((c - l).norm() <= 1e-12 * (1.0 + l.norm()));
        }
    }

    #[test]
    fn char_eval_rejects_foreign_lags() {
        let dec = lattice::build_lattice(&[Lag::from_rational(rat("1")).unwrap()]).unwrap();
        let m = measure(&[("1/3", "1")]);
        assert!(matches!(
            m.char_eval(0.0, &[0.0], &dec),
            Err(Error::Decomposition(_))
        ));
    }

    #[test]
    fn truncate_examples() {
        let pos = PiecewiseConstant::scalar(rat("1"), 0, vec![rat("1"), rat("2")]).unwrap();
        assert_eq!(pos.truncate(), pos);

        let neg = PiecewiseConstant::scalar(rat("1"), -2, vec![rat("1"), rat("2")]).unwrap();
        let zeroed = neg.truncate();
        assert!(zeroed.cells().iter().all(|c| c[0].is_zero()));

        let mixed = PiecewiseConstant::scalar(rat("1"), -1, vec![rat("1"), rat("1")]).unwrap();
        let t = mixed.truncate();
        assert_eq!(t.value_at_cell(-1), vec![rat("0")]);
        assert_eq!(t.value_at_cell(0), vec![rat("1")]);
    }

    #[test]
    fn measure_function_convolution_shifts() {
        let f = PiecewiseConstant::scalar(rat("1"), 0, vec![rat("1")]).unwrap();
        let unit = f.convolve_measure(&DiracSumMeasure::delta_zero()).unwrap();
        assert!(unit.function_eq(&f));

        let shifted = f.convolve_measure(&measure(&[("1", "1")])).unwrap();
        let expect = PiecewiseConstant::scalar(rat("1"), -1, vec![rat("1")]).unwrap();
        assert!(shifted.function_eq(&expect));
    }

    #[test]
    fn measure_function_convolution_rejects_off_mesh_lags() {
        let f = PiecewiseConstant::scalar(rat("1"), 0, vec![rat("1")]).unwrap();
        let err = f.convolve_measure(&measure(&[("1/2", "1")]));
        assert!(matches!(err, Err(Error::MeshMismatch(_))));
    }

    fn arb_rational(max_den: u32) -> impl Strategy<Value = Rational> {
        (-24i64..=24, 1u32..=max_den)
            .prop_map(|(n, d)| Rational::new(n.into(), i64::from(d).into()))
    }

    fn arb_measure() -> impl Strategy<Value = DiracSumMeasure> {
        proptest::collection::vec(
            ((0i64..=40, 1u32..=4), arb_rational(6)),
            0..6,
        )
        .prop_map(|atoms| {
            let pairs: Vec<(Rational, Rational)> = atoms
                .into_iter()
                .map(|((n, d), w)| (Rational::new(n.into(), i64::from(d).into()), w))
                .collect();
            DiracSumMeasure::from_rational_pairs(&pairs).unwrap()
        })
    }

    proptest! {
        #[test]
        fn convolution_is_commutative_and_associative(
            a in arb_measure(), b in arb_measure(), c in arb_measure()
        ) {
            prop_assert_eq!(a.convolve(&b), b.convolve(&a));
            prop_assert_eq!(a.convolve(&b).convolve(&c), a.convolve(&b.convolve(&c)));
        }

        #[test]
        fn tv_norm_is_submultiplicative(a in arb_measure(), b in arb_measure()) {
            prop_assert!(a.convolve(&b).tv_norm() <= a.tv_norm() * b.tv_norm());
        }

        #[test]
        fn truncation_identity_on_mesh_functions(
            m in arb_measure(),
            cells in proptest::collection::vec(arb_rational(4), 1..8),
            start in -5i64..=2,
        ) {
            // Only mesh-compatible measures: snap lags to integers.
            let snapped = DiracSumMeasure::from_rational_pairs(
                &m.atoms()
                    .iter()
                    .map(|a| {
                        let lag = a.lag.as_rational().unwrap();
                        (Rational::from_integer(lag.to_integer()), a.weight.clone())
                    })
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let f = PiecewiseConstant::scalar(rat("1"), start, cells).unwrap();
            let lhs = f.convolve_measure(&snapped).unwrap().truncate();
            let rhs = f.truncate().convolve_measure(&snapped).unwrap().truncate();
            prop_assert!(lhs.function_eq(&rhs));
        }
    }

    #[test]
    fn laplace_is_multiplicative_on_samples() {
        let a = measure(&[("0", "1"), ("1/2", "-2"), ("3", "1/3")]);
        let b = measure(&[("1", "2"), ("5/2", "1/2")]);
        let ab = a.convolve(&b);
        for k in 0..50 {
            let s = Complex64::new(
                -5.0 + 10.0 * (k as f64) / 49.0,
                (k as f64) - 25.0,
            );
            let la = a.laplace_eval_rational(s).unwrap();
            let lb = b.laplace_eval_rational(s).unwrap();
            let lab = ab.laplace_eval_rational(s).unwrap();
            let tol = 1e-12 * (1.0 + la.norm()) * (1.0 + lb.norm());
            assert!((lab - la * lb).norm() <= tol, "s = {s}");
        }
    }

    #[test]
    fn zero_measure_has_unit_free_properties() {
        let z = DiracSumMeasure::zero();
        let m = measure(&[("1", "1")]);
        assert!(z.convolve(&m).is_zero());
        assert!(z.tv_norm().is_zero());
        assert!(z
            .laplace_eval_rational(Complex64::new(1.0, 1.0))
            .unwrap()
            .norm()
            .is_zero());
        assert_eq!(z.support_bound_rational(), Some(Rational::zero()));
        assert!(Rational::one() > Rational::zero());
    }
}
