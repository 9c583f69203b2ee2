//! Constructive Bezout identities: cofactors `g_1..g_K` with
//! `Σ f_i ∗ g_i = δ₀`, built for commensurable-lag instances by exact
//! extended Euclid over the polynomial images and lifted back to Dirac sums.
//!
//! Instances over two or more generators are rejected: no construction is
//! attempted for incommensurable lags.

use num::complex::Complex64;
use num::Zero;
use serde::Serialize;

use crate::corona::{decide_commensurable, CoronaInstance};
use crate::error::Error;
use crate::lag::Lag;
use crate::measure::{Atom, DiracSumMeasure};
use crate::poly::RationalPolynomial;
use crate::rational::Rational;
use crate::Result;

/// Cofactor polynomials `G_1..G_K` with `Σ P_i · G_i = 1`, by left-to-right
/// extended Euclid. Zero inputs get zero cofactors. Fails with the monic gcd
/// as evidence when the inputs share a nonconstant factor.
pub fn poly_bezout(polys: &[RationalPolynomial]) -> Result<Vec<RationalPolynomial>> {
    if polys.iter().all(RationalPolynomial::is_zero) {
        return Err(Error::InvalidInput(
            "need at least one nonzero polynomial".into(),
        ));
    }
    let mut gcd = RationalPolynomial::zero();
    let mut cofactors: Vec<RationalPolynomial> = Vec::with_capacity(polys.len());
    for p in polys {
        let (g, a, b) = gcd.extended_gcd(p);
        for c in cofactors.iter_mut() {
            *c = &*c * &a;
        }
        cofactors.push(b);
        gcd = g;
    }
    if gcd.is_zero() || !gcd.is_constant() {
        return Err(Error::NotCoprime { gcd });
    }
    // gcd is monic, hence exactly 1; the identity holds by construction.
    debug_assert_eq!(
        polys
            .iter()
            .zip(&cofactors)
            .fold(RationalPolynomial::zero(), |acc, (p, g)| &acc + &(p * g)),
        RationalPolynomial::one()
    );
    Ok(cofactors)
}

/// A verified Bezout identity over measures.
#[derive(Debug, Clone, Serialize)]
pub struct BezoutCertificate {
    pub cofactors: Vec<DiracSumMeasure>,
    /// `Σ f_i ∗ g_i`, which must equal δ₀ exactly.
    pub residual: DiracSumMeasure,
    pub verified: bool,
}

/// Solve `Σ f_i ∗ g_i = δ₀` for a single-generator instance: polynomial
/// Bezout on the monomial images, lifted along `x ↦ δ(-r)`; the residual is
/// re-convolved exactly as a check.
pub fn measure_bezout(inst: &CoronaInstance) -> Result<BezoutCertificate> {
    if inst.q() != 1 {
        return Err(Error::Unsupported(format!(
            "Bezout construction requires commensurable lags (single generator), found {} generators",
            inst.q()
        )));
    }
    let decision = decide_commensurable(inst)?;
    if !decision.holds {
        return Err(Error::CoronaViolated { gcd: decision.gcd });
    }
    let cofactor_polys = poly_bezout(&decision.polynomials)?;
    let generator = &inst.decomposition().basis().generators()[0];
    let step = Lag::term(&generator.label, generator.scale.clone())?;
    let cofactors: Vec<DiracSumMeasure> = cofactor_polys
        .iter()
        .map(|g| lift_polynomial(g, &step))
        .collect::<Result<Vec<_>>>()?;
    let residual = inst
        .measures()
        .iter()
        .zip(&cofactors)
        .fold(DiracSumMeasure::zero(), |acc, (f, g)| {
            DiracSumMeasure::from_atoms(
                acc.atoms()
                    .iter()
                    .cloned()
                    .chain(f.convolve(g).atoms().iter().cloned())
                    .collect(),
            )
        });
    let verified = residual.is_delta_zero();
    Ok(BezoutCertificate {
        cofactors,
        residual,
        verified,
    })
}

/// `Σ c_n x^n ↦ Σ c_n δ(-n·r)`.
fn lift_polynomial(poly: &RationalPolynomial, step: &Lag) -> Result<DiracSumMeasure> {
    let mut atoms = Vec::with_capacity(poly.coeffs().len());
    for (n, c) in poly.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let lag = step.scaled(&Rational::from_integer(n.into()))?;
        atoms.push(Atom::new(lag, c.clone()));
    }
    Ok(DiracSumMeasure::from_atoms(atoms))
}

/// Floating-point cross-check of the exact identity at sampled `s` with
/// `|Re s| <= 2`: the worst absolute defect `|Σ f̂_i(s)·ĝ_i(s) - 1|` and the
/// same defect scaled by the expression's magnitude
/// `Σ_i (Σ|f weights| e^{σλ})(Σ|g weights| e^{σλ})`, which is the honest
/// yardstick when Euclid produces large cofactor coefficients.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CrossCheck {
    pub worst_absolute: f64,
    pub worst_scaled: f64,
}

pub fn laplace_cross_check(
    inst: &CoronaInstance,
    certificate: &BezoutCertificate,
    samples: usize,
) -> Result<CrossCheck> {
    let magnitude = |m: &DiracSumMeasure, sigma: f64| -> f64 {
        m.atoms()
            .iter()
            .map(|a| {
                let lag = a.lag.as_rational().map(|r| crate::rational::to_f64(&r)).unwrap_or(0.0);
                crate::rational::to_f64(&a.weight).abs() * (sigma * lag).exp()
            })
            .sum()
    };
    let mut check = CrossCheck {
        worst_absolute: 0.0,
        worst_scaled: 0.0,
    };
    for k in 0..samples {
        let t = k as f64 / samples.max(1) as f64;
        let s = Complex64::new(-2.0 + 4.0 * t, -9.0 + 18.0 * t);
        let mut total = Complex64::new(0.0, 0.0);
        let mut scale = 0.0f64;
        for (f, g) in inst.measures().iter().zip(&certificate.cofactors) {
            total += f.laplace_eval_rational(s)? * g.laplace_eval_rational(s)?;
            scale += magnitude(f, s.re) * magnitude(g, s.re);
        }
        let defect = (total - Complex64::new(1.0, 0.0)).norm();
        check.worst_absolute = check.worst_absolute.max(defect);
        check.worst_scaled = check.worst_scaled.max(defect / scale.max(1.0));
    }
    Ok(check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lag::LabelValues;
    use crate::rational::parse_rational;
    use proptest::prelude::*;

    fn rat(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn poly(coeffs: &[&str]) -> RationalPolynomial {
        RationalPolynomial::new(coeffs.iter().map(|c| rat(c)).collect())
    }

    fn measure(pairs: &[(&str, &str)]) -> DiracSumMeasure {
        let pairs: Vec<(Rational, Rational)> =
            pairs.iter().map(|(l, w)| (rat(l), rat(w))).collect();
        DiracSumMeasure::from_rational_pairs(&pairs).unwrap()
    }

    fn instance(measures: Vec<DiracSumMeasure>) -> CoronaInstance {
        CoronaInstance::new(measures, &LabelValues::new()).unwrap()
    }

    #[test]
    fn bezout_of_x_and_one_minus_x() {
        let cofs = poly_bezout(&[poly(&["0", "1"]), poly(&["1", "-1"])]).unwrap();
        assert_eq!(cofs, vec![poly(&["1"]), poly(&["1"])]);
    }

    #[test]
    fn bezout_of_x_squared_and_one_minus_x() {
        let p1 = poly(&["0", "0", "1"]);
        let p2 = poly(&["1", "-1"]);
        let cofs = poly_bezout(&[p1.clone(), p2.clone()]).unwrap();
        assert_eq!(
            &(&p1 * &cofs[0]) + &(&p2 * &cofs[1]),
            RationalPolynomial::one()
        );
        assert_eq!(cofs[0], poly(&["1"]));
        assert_eq!(cofs[1], poly(&["1", "1"]));
    }

    #[test]
    fn non_coprime_inputs_return_gcd_evidence() {
        let err = poly_bezout(&[poly(&["0", "1"]), poly(&["0", "0", "1"])]);
        match err {
            Err(Error::NotCoprime { gcd }) => {
                assert_eq!(gcd, poly(&["0", "1"]));
                assert!(poly(&["0", "1"]).divisible_by(&gcd));
                assert!(poly(&["0", "0", "1"]).divisible_by(&gcd));
            }
            other => panic!("expected NotCoprime, got {other:?}"),
        }
    }

    #[test]
    fn zero_polynomials_get_zero_cofactors() {
        let cofs = poly_bezout(&[RationalPolynomial::zero(), poly(&["2"])]).unwrap();
        assert!(cofs[0].is_zero());
        assert_eq!(cofs[1], poly(&["1/2"]));
    }

    #[test]
    fn unit_instance_lifts_to_unit_cofactor() {
        let cert = measure_bezout(&instance(vec![DiracSumMeasure::delta_zero()])).unwrap();
        assert!(cert.verified);
        assert!(cert.cofactors[0].is_delta_zero());
    }

    #[test]
    fn shift_plus_difference_instance() {
        // f1 = d(-1), f2 = d0 - d(-1): g1 = g2 = d0.
        let cert = measure_bezout(&instance(vec![
            measure(&[("1", "1")]),
            measure(&[("0", "1"), ("1", "-1")]),
        ]))
        .unwrap();
        assert!(cert.verified);
        assert!(cert.residual.is_delta_zero());
        assert!(cert.cofactors.iter().all(DiracSumMeasure::is_delta_zero));
    }

    #[test]
    fn lifted_frozen_example() {
        // f1 = d(-2) (x^2), f2 = d0 - d(-1) (1 - x): g1 = d0, g2 = d0 + d(-1).
        let cert = measure_bezout(&instance(vec![
            measure(&[("2", "1")]),
            measure(&[("0", "1"), ("1", "-1")]),
        ]))
        .unwrap();
        assert!(cert.verified);
        assert!(cert.cofactors[0].is_delta_zero());
        assert_eq!(cert.cofactors[1], measure(&[("0", "1"), ("1", "1")]));
    }

    #[test]
    fn corona_violation_blocks_construction() {
        let err = measure_bezout(&instance(vec![
            measure(&[("1", "1")]),
            measure(&[("2", "1")]),
        ]));
        match err {
            Err(Error::CoronaViolated { gcd }) => {
                assert_eq!(gcd, poly(&["0", "1"]));
            }
            other => panic!("expected CoronaViolated, got {other:?}"),
        }
    }

    #[test]
    fn incommensurable_instances_are_rejected() {
        let labels = LabelValues::new().with("sqrt2", 2f64.sqrt());
        let m = DiracSumMeasure::from_atoms(vec![
            Atom::new(Lag::zero(), rat("1")),
            Atom::new(Lag::parse("1").unwrap(), rat("1")),
            Atom::new(Lag::parse("1 * sqrt2").unwrap(), rat("1")),
        ]);
        let inst = CoronaInstance::new(vec![m], &labels).unwrap();
        assert!(matches!(
            measure_bezout(&inst),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn cofactor_lags_sit_on_the_generator_mesh() {
        let inst = instance(vec![
            measure(&[("1/2", "1"), ("3/2", "1/3")]),
            measure(&[("0", "1"), ("1/2", "-1")]),
        ]);
        let cert = measure_bezout(&inst).unwrap();
        assert!(cert.verified);
        let r = rat("1/2");
        for g in &cert.cofactors {
            assert!(g.mesh_shifts(&r).is_ok());
        }
        let check = laplace_cross_check(&inst, &cert, 20).unwrap();
        assert!(
            check.worst_absolute <= 1e-10,
            "cross-check residual {}",
            check.worst_absolute
        );
    }

    fn arb_poly() -> impl Strategy<Value = RationalPolynomial> {
        proptest::collection::vec((-4i64..=4, 1u32..=2), 1..=5).prop_map(|cs| {
            RationalPolynomial::new(
                cs.into_iter()
                    .map(|(n, d)| Rational::new(n.into(), i64::from(d).into()))
                    .collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn bezout_identity_or_common_factor(ps in proptest::collection::vec(arb_poly(), 1..4)) {
            match poly_bezout(&ps) {
                Ok(cofs) => {
                    let total = ps
                        .iter()
                        .zip(&cofs)
                        .fold(RationalPolynomial::zero(), |acc, (p, g)| &acc + &(p * g));
                    prop_assert_eq!(total, RationalPolynomial::one());
                    let degree_budget: usize = ps.iter().filter_map(|p| p.degree()).sum();
                    for g in &cofs {
                        prop_assert!(g.degree().unwrap_or(0) <= degree_budget);
                    }
                }
                Err(Error::NotCoprime { gcd }) => {
                    for p in &ps {
                        prop_assert!(p.divisible_by(&gcd));
                    }
                }
                Err(Error::InvalidInput(_)) => {
                    prop_assert!(ps.iter().all(RationalPolynomial::is_zero));
                }
                Err(e) => return Err(TestCaseError::fail(format!("unexpected error {e:?}"))),
            }
        }
    }
}
