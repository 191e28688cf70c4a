#![allow(dead_code)]

use phsify_core::param::ParamScalar;
use phsify_core::poly::{Monomial, Polynomial};
use phsify_core::Rational;
use proptest::prelude::*;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| q(n, d))
}

pub fn nonzero_rational() -> impl Strategy<Value = Rational> {
    (1i64..=9, 1i64..=5, any::<bool>()).prop_map(|(n, d, s)| q(if s { n } else { -n }, d))
}

/// Small polynomial in `nparams` parameters, as a scalar.
pub fn param_poly(nparams: usize) -> impl Strategy<Value = ParamScalar> {
    prop::collection::vec((rational(), 0..nparams.max(1), 0u32..=2), 0..4).prop_map(move |terms| {
        terms.into_iter().fold(ParamScalar::zero(), |acc, (c, i, e)| {
            let t = if nparams == 0 { ParamScalar::one() } else { ParamScalar::param(i).pow(e) };
            acc.add(&t.scale(&c))
        })
    })
}

/// Ratio of two parameter polynomials, the denominator kept nonzero.
pub fn scalar(nparams: usize) -> impl Strategy<Value = ParamScalar> {
    (param_poly(nparams), param_poly(nparams), nonzero_rational()).prop_map(|(n, d, k)| {
        let d = d.add(&ParamScalar::from_rational(k));
        n.div(&d).unwrap_or(n)
    })
}

pub fn numeric_scalar() -> impl Strategy<Value = ParamScalar> {
    rational().prop_map(ParamScalar::from_rational)
}

pub fn monomial(nvars: usize, lo: u32, hi: u32) -> impl Strategy<Value = Monomial> {
    let all = Monomial::all_up_to(nvars, lo, hi);
    prop::sample::select(all)
}

/// Numeric polynomial with terms of degree `lo..=hi`.
pub fn polynomial(nvars: usize, lo: u32, hi: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((monomial(nvars, lo, hi), numeric_scalar()), 0..=max_terms)
        .prop_map(move |t| Polynomial::from_terms(nvars, t))
}

/// Polynomial with parametric coefficients.
pub fn param_polynomial(nvars: usize, nparams: usize, lo: u32, hi: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((monomial(nvars, lo, hi), scalar(nparams)), 0..=max_terms)
        .prop_map(move |t| Polynomial::from_terms(nvars, t))
}

pub fn points(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational(), n)
}
